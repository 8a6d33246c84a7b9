/**
 * Personalization state and its reducer. All UI interaction is serialized
 * through `reduce`; the audio engine only ever reads the resulting gain
 * pair, so every invariant (slider clamping, original mode = 0/0 gains,
 * deferred switches while stems buffer) lives here and is unit-testable
 * without audio.
 */

import {
  compensationGain,
  type StemLoudness,
} from "./compensation.js";
import type { ProgramMetadata } from "./api.js";

export type Mode =
  | { kind: "original" }
  | { kind: "preset"; name: string }
  | { kind: "custom" };

export interface PersonalizationState {
  programId: string;
  metadata: ProgramMetadata;
  mode: Mode;
  dialogueGainDb: number;
  backgroundGainDb: number;
  /** Playhead in seconds; owned by the transport, echoed here. */
  playheadS: number;
  buffered: boolean;
  /** Switch requested before stems finished buffering. */
  pendingMode: Mode | null;
  /** Dialogue gain hit the point where no background gain can compensate. */
  compensationLimit: boolean;
  /** Stem loudness missing from metadata: gains applied raw, warn visibly. */
  compensationDisabled: boolean;
}

export type Action =
  | { type: "switch_mode"; mode: Mode }
  | { type: "set_dialogue_gain"; gainDb: number }
  | { type: "seek"; positionS: number }
  | { type: "buffered" };

export function initialState(
  programId: string,
  metadata: ProgramMetadata,
): PersonalizationState {
  return {
    programId,
    metadata,
    mode: { kind: "original" },
    dialogueGainDb: 0,
    backgroundGainDb: 0,
    playheadS: 0,
    buffered: false,
    pendingMode: null,
    compensationLimit: false,
    compensationDisabled:
      metadata.stems.dialogue.loudness_lufs === null ||
      metadata.stems.background.loudness_lufs === null,
  };
}

function clampGain(state: PersonalizationState, gainDb: number): number {
  const { dialogue_gain_min_db, dialogue_gain_max_db } = state.metadata.bounds;
  if (!Number.isFinite(gainDb)) {
    return 0;
  }
  return Math.min(dialogue_gain_max_db, Math.max(dialogue_gain_min_db, gainDb));
}

function stemLoudness(state: PersonalizationState): StemLoudness | null {
  const d = state.metadata.stems.dialogue.loudness_lufs;
  const b = state.metadata.stems.background.loudness_lufs;
  return d === null || b === null ? null : { dialogueLufs: d, backgroundLufs: b };
}

/** Apply a dialogue gain: clamp, then compensate the background. */
function withDialogueGain(
  state: PersonalizationState,
  gainDb: number,
): PersonalizationState {
  const clamped = clampGain(state, gainDb);
  const stems = stemLoudness(state);
  if (stems === null) {
    return {
      ...state,
      dialogueGainDb: clamped,
      backgroundGainDb: 0,
      compensationLimit: false,
    };
  }
  const comp = compensationGain(clamped, stems);
  return {
    ...state,
    dialogueGainDb: clamped,
    backgroundGainDb: comp.backgroundGainDb,
    compensationLimit: comp.limitReached,
  };
}

/** Dialogue gain a preset button stands for: its in-speech attenuation. */
export function presetDialogueGain(
  metadata: ProgramMetadata,
  name: string,
): number | null {
  const preset = metadata.presets.find((p) => p.name === name);
  return preset ? preset.duck_extra_db : null;
}

function applyMode(
  state: PersonalizationState,
  mode: Mode,
): PersonalizationState {
  if (mode.kind === "original") {
    // original mode is exact silence of the personalization path: both
    // gains identically 0, never "0 within epsilon"
    return {
      ...state,
      mode,
      dialogueGainDb: 0,
      backgroundGainDb: 0,
      compensationLimit: false,
    };
  }
  if (mode.kind === "preset") {
    const gain = presetDialogueGain(state.metadata, mode.name);
    if (gain === null) {
      return state; // unknown preset: rejected, state unchanged
    }
    return { ...withDialogueGain(state, gain), mode };
  }
  return { ...withDialogueGain(state, state.dialogueGainDb), mode };
}

export function reduce(
  state: PersonalizationState,
  action: Action,
): PersonalizationState {
  switch (action.type) {
    case "switch_mode":
      if (!state.buffered) {
        return { ...state, pendingMode: action.mode };
      }
      return applyMode(state, action.mode);
    case "set_dialogue_gain": {
      const next = withDialogueGain(state, action.gainDb);
      return { ...next, mode: { kind: "custom" } };
    }
    case "seek":
      return { ...state, playheadS: Math.max(0, action.positionS) };
    case "buffered": {
      const buffered = { ...state, buffered: true };
      if (state.pendingMode !== null) {
        return { ...applyMode(buffered, state.pendingMode), pendingMode: null };
      }
      return buffered;
    }
  }
}
