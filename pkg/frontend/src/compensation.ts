/**
 * Loudness compensation for the dialogue slider.
 *
 * The broadcaster transmits per-stem integrated loudness with the programme.
 * We model stem energies from those values (E ∝ 10^(LUFS/10)) and, whenever
 * the listener moves the dialogue gain, solve for the background gain that
 * keeps the combined energy where it was:
 *
 *     E_d * 10^(g_d/10) + E_b * 10^(g_b/10) = E_d + E_b
 *
 * Past a certain dialogue gain there is no real solution — the boosted
 * dialogue alone already exceeds the original total — so the background is
 * muted outright and the UI shows a "compensation limit reached" flag.
 */

export interface StemLoudness {
  dialogueLufs: number;
  backgroundLufs: number;
}

export interface CompensationResult {
  /** Background gain in dB; -Infinity means fully muted. */
  backgroundGainDb: number;
  limitReached: boolean;
}

export function compensationGain(
  dialogueGainDb: number,
  stems: StemLoudness,
): CompensationResult {
  const ed = Math.pow(10, stems.dialogueLufs / 10);
  const eb = Math.pow(10, stems.backgroundLufs / 10);
  const remaining = ed + eb - ed * Math.pow(10, dialogueGainDb / 10);
  if (remaining <= 0) {
    return { backgroundGainDb: -Infinity, limitReached: true };
  }
  return {
    backgroundGainDb: 10 * Math.log10(remaining / eb),
    limitReached: false,
  };
}

/**
 * Combined energy predicted for a gain pair, relative to the stems' raw
 * energies. Used by tests to assert the energy-balance property.
 */
export function combinedEnergy(
  dialogueGainDb: number,
  backgroundGainDb: number,
  stems: StemLoudness,
): number {
  const ed = Math.pow(10, stems.dialogueLufs / 10);
  const eb = Math.pow(10, stems.backgroundLufs / 10);
  const bg =
    backgroundGainDb === -Infinity ? 0 : Math.pow(10, backgroundGainDb / 10);
  return ed * Math.pow(10, dialogueGainDb / 10) + eb * bg;
}
