/**
 * Deterministic pair sampling and pixel augmentation, delegated to the
 * `jointaug` CLI so every number and every pixel byte matches the reference
 * implementation exactly (cross-runtime float math is not trusted to be
 * bit-identical, the CLI is).
 *
 * Requires the Python package to be importable by `python3` (override the
 * interpreter with JOINTAUG_PYTHON).
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { ConfigError, SamplerConfig, validateConfig } from "./config.js";
import { ImageArray, checkImage, decodePnm, encodePnm } from "./pnm.js";

export interface CropRecord {
  i: number;
  j: number;
  w: number;
  h: number;
  image_w: number;
  image_h: number;
}

export interface BlurRecord {
  sigma: number;
  kernel_size: number;
  apply: boolean;
}

export interface ColorRecord {
  brightness: number;
  contrast: number;
}

export interface ViewRecord {
  crop: CropRecord;
  blur: BlurRecord | null;
  color: ColorRecord | null;
}

export interface PairRecord {
  schema_version: number;
  image_id: string;
  index: number;
  mode: string;
  beta: number;
  seed: number;
  branch: string | null;
  view_a: ViewRecord;
  view_b: ViewRecord;
}

export class CliError extends Error {}

// pairParams fetches manifests in blocks of this size; the underlying
// parameter stream is counter-based, so block boundaries cannot change values
const BLOCK = 128;

function pythonBin(): string {
  return process.env.JOINTAUG_PYTHON ?? "python3";
}

function runCli(args: string[]): void {
  const res = spawnSync(pythonBin(), ["-m", "jointaug.cli", ...args], {
    encoding: "utf-8",
    maxBuffer: 1 << 26,
  });
  if (res.error) {
    throw new CliError(`failed to launch jointaug CLI: ${res.error.message}`);
  }
  if (res.status !== 0) {
    throw new CliError(
      `jointaug ${args[0]} exited with ${res.status}: ${res.stderr.trim()}`);
  }
}

function checkIndex(index: number): void {
  if (!Number.isInteger(index) || index < 0) {
    throw new RangeError(`pair index must be a non-negative integer, got ${index}`);
  }
}

export class BoundSampler {
  readonly config: SamplerConfig;
  private readonly configPath: string;
  private readonly cache = new Map<number, PairRecord>();

  /** @internal use newSampler() */
  constructor(config: SamplerConfig) {
    this.config = config;
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "jointaug-"));
    this.configPath = path.join(dir, "config.json");
    fs.writeFileSync(this.configPath, JSON.stringify(config));
  }

  /**
   * Parameters of positive pair `index`: both views' crop regions plus any
   * blur/color settings. Identical to the CLI manifest entry for the same
   * (config, seed, index), independent of which indices were requested before.
   */
  pairParams(index: number): PairRecord {
    checkIndex(index);
    const cached = this.cache.get(index);
    if (cached) return cached;
    const start = Math.floor(index / BLOCK) * BLOCK;
    const out = path.join(path.dirname(this.configPath), `block${start}.jsonl`);
    runCli(["sample", "--config", this.configPath, "--start", String(start),
            "--count", String(BLOCK), "--out", out]);
    for (const line of fs.readFileSync(out, "utf-8").split("\n")) {
      if (!line.trim()) continue;
      const record = JSON.parse(line) as PairRecord;
      this.cache.set(record.index, record);
    }
    const found = this.cache.get(index);
    if (!found) throw new CliError(`CLI manifest is missing index ${index}`);
    return found;
  }

  /**
   * Realize both views of pair `index` for `image`. The input is copied, never
   * mutated. Pixels are byte-identical to what `jointaug augment` writes for
   * the same configuration and index.
   */
  augmentPair(image: ImageArray, index: number): [ImageArray, ImageArray] {
    checkImage(image);
    checkIndex(index);
    const work = fs.mkdtempSync(path.join(os.tmpdir(), "jointaug-px-"));
    try {
      const inDir = path.join(work, "in");
      const outDir = path.join(work, "out");
      fs.mkdirSync(inDir);
      // the CLI assigns pair indices by sorted directory position, so pad
      // with tiny placeholder images to land `img` at the requested index
      const pad = encodePnm({
        data: new Uint8Array(64), width: 8, height: 8, channels: 1,
      });
      for (let k = 0; k < index; k++) {
        fs.writeFileSync(path.join(inDir, `_pad${String(k).padStart(6, "0")}.pgm`), pad);
      }
      const suffix = image.channels === 1 ? "pgm" : "ppm";
      fs.writeFileSync(path.join(inDir, `img.${suffix}`), encodePnm(image));
      runCli(["augment", "--config", this.configPath, "--input", inDir,
              "--out", outDir, "--format", "ppm", "--threads", "1"]);
      const viewA = decodePnm(fs.readFileSync(path.join(outDir, `img_a.${suffix}`)));
      const viewB = decodePnm(fs.readFileSync(path.join(outDir, `img_b.${suffix}`)));
      return [viewA, viewB];
    } finally {
      fs.rmSync(work, { recursive: true, force: true });
    }
  }
}

/**
 * Validate `config` and return an immutable sampler handle. The mapping must
 * contain `mode`; unknown keys are rejected; omitted bounds get the
 * documented defaults (crop area 0.2..1.0, sigma 0.1..2.0).
 */
export function newSampler(config: Record<string, unknown>): BoundSampler {
  return new BoundSampler(validateConfig(config));
}

export { ConfigError };
