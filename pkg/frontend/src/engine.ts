/**
 * Rendering engine: dialogue and background stems play simultaneously and
 * in sync the whole time; mode switches and slider moves only ever ramp the
 * two gain nodes. No source swapping, so playback is sample-continuous and
 * the playhead never moves on a switch.
 *
 * The audio graph is injected behind a two-method interface so the engine
 * runs identically over Web Audio GainNodes in the browser and over fakes
 * in unit tests.
 */

import type { PersonalizationState } from "./state.js";

/** One gain node; linearRampTo mirrors AudioParam.linearRampToValueAtTime. */
export interface GainNodeLike {
  readonly value: number;
  setValue(value: number): void;
  linearRampTo(value: number, endTimeS: number): void;
}

export interface AudioGraphLike {
  currentTimeS(): number;
  dialogueGain: GainNodeLike;
  backgroundGain: GainNodeLike;
}

/** Longest allowed gain crossfade on a mode switch. */
export const MAX_CROSSFADE_S = 0.05;

export function dbToLinear(db: number): number {
  return db === -Infinity ? 0 : Math.pow(10, db / 20);
}

export class StemMixer {
  constructor(private readonly graph: AudioGraphLike) {}

  /**
   * Drive the gain nodes toward the state's gain pair. Mode switches
   * crossfade over at most 50 ms; slider drags may ask for 0 for
   * immediate tracking.
   */
  applyState(state: PersonalizationState, crossfadeS = MAX_CROSSFADE_S): void {
    const fade = Math.min(Math.max(crossfadeS, 0), MAX_CROSSFADE_S);
    const targetD = dbToLinear(state.dialogueGainDb);
    const targetB = dbToLinear(state.backgroundGainDb);
    if (fade === 0) {
      this.graph.dialogueGain.setValue(targetD);
      this.graph.backgroundGain.setValue(targetB);
      return;
    }
    const end = this.graph.currentTimeS() + fade;
    this.graph.dialogueGain.linearRampTo(targetD, end);
    this.graph.backgroundGain.linearRampTo(targetB, end);
  }
}
