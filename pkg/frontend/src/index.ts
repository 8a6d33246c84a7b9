export {
  compensationGain,
  combinedEnergy,
  type CompensationResult,
  type StemLoudness,
} from "./compensation.js";
export {
  initialState,
  presetDialogueGain,
  reduce,
  type Action,
  type Mode,
  type PersonalizationState,
} from "./state.js";
export {
  dbToLinear,
  MAX_CROSSFADE_S,
  StemMixer,
  type AudioGraphLike,
  type GainNodeLike,
} from "./engine.js";
export {
  ApiError,
  ServiceClient,
  type JobStatus,
  type ProgramMetadata,
  type ProgramSummary,
  type StemName,
} from "./api.js";
