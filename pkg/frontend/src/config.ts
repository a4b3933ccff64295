/**
 * Sampler configuration mirroring the Python CLI's RunConfig, including its
 * defaults and validation rules, so a config accepted here is accepted by
 * the CLI verbatim.
 */

export const MODES = [
  "random-crop",
  "joint-crop",
  "joint-blur",
  "joint-color",
  "joint-crop-or-blur",
] as const;

export type Mode = (typeof MODES)[number];

export interface SamplerConfig {
  mode: Mode;
  beta: number;
  s_min: number;
  s_max: number;
  sigma_min: number;
  sigma_max: number;
  color_factor: number;
  aspect_lo: number;
  aspect_hi: number;
  out_size: number;
  image_size: number;
  blur_prob_a: number;
  blur_prob_b: number;
  crop_or_blur_p: number;
  seed: number;
  count: number;
}

export class ConfigError extends Error {}

const DEFAULTS: Omit<SamplerConfig, "mode"> = {
  beta: 0.0,
  s_min: 0.2,
  s_max: 1.0,
  sigma_min: 0.1,
  sigma_max: 2.0,
  color_factor: 0.4,
  aspect_lo: 3.0 / 4.0,
  aspect_hi: 4.0 / 3.0,
  out_size: 224,
  image_size: 224,
  blur_prob_a: 1.0,
  blur_prob_b: 1.0,
  crop_or_blur_p: 0.5,
  seed: 0,
  count: 1000,
};

const KNOWN_KEYS = new Set(["mode", ...Object.keys(DEFAULTS)]);

export function validateConfig(mapping: Record<string, unknown>): SamplerConfig {
  const unknown = Object.keys(mapping).filter((k) => !KNOWN_KEYS.has(k));
  if (unknown.length > 0) {
    throw new ConfigError(`unknown config keys: ${unknown.sort().join(", ")}`);
  }
  if (typeof mapping.mode !== "string") {
    throw new ConfigError("config must contain a 'mode' string");
  }
  const cfg = { ...DEFAULTS, ...mapping } as SamplerConfig;

  if (!(MODES as readonly string[]).includes(cfg.mode)) {
    throw new ConfigError(`unknown mode '${cfg.mode}'; expected one of ${MODES.join(", ")}`);
  }
  for (const [key, value] of Object.entries(cfg)) {
    if (key === "mode") continue;
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new ConfigError(`config key '${key}' must be a finite number`);
    }
  }
  for (const key of ["out_size", "image_size", "seed", "count"] as const) {
    if (!Number.isInteger(cfg[key])) {
      throw new ConfigError(`config key '${key}' must be an integer`);
    }
  }
  if (cfg.beta < -8 || cfg.beta > 8) {
    throw new ConfigError("beta outside sanity range [-8, 8]");
  }
  if (!(0 < cfg.s_min && cfg.s_min < cfg.s_max && cfg.s_max <= 1)) {
    throw new ConfigError("need 0 < s_min < s_max <= 1");
  }
  if (!(0 < cfg.sigma_min && cfg.sigma_min < cfg.sigma_max)) {
    throw new ConfigError("need 0 < sigma_min < sigma_max");
  }
  if (!(0 < cfg.color_factor && cfg.color_factor < 1)) {
    throw new ConfigError("color_factor must lie in (0, 1)");
  }
  if (!(0 < cfg.aspect_lo && cfg.aspect_lo <= cfg.aspect_hi)) {
    throw new ConfigError("need 0 < aspect_lo <= aspect_hi");
  }
  if (cfg.out_size < 8 || cfg.image_size < 8) {
    throw new ConfigError("out_size and image_size must be >= 8");
  }
  for (const key of ["blur_prob_a", "blur_prob_b", "crop_or_blur_p"] as const) {
    if (cfg[key] < 0 || cfg[key] > 1) {
      throw new ConfigError(`${key} must lie in [0, 1]`);
    }
  }
  if (cfg.count < 1) {
    throw new ConfigError("count must be >= 1");
  }
  return Object.freeze(cfg);
}
