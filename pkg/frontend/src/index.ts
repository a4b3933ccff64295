export { MODES, ConfigError, validateConfig } from "./config.js";
export type { Mode, SamplerConfig } from "./config.js";
export { FormatError, checkImage, decodePnm, encodePnm } from "./pnm.js";
export type { ImageArray } from "./pnm.js";
export { BoundSampler, CliError, newSampler } from "./sampler.js";
export type {
  BlurRecord,
  ColorRecord,
  CropRecord,
  PairRecord,
  ViewRecord,
} from "./sampler.js";
