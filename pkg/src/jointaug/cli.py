"""Command-line entry point.

Subcommands:
  sample   emit a parameter-only manifest of positive pairs
  augment  realize pixel pairs for a directory of images (or replay a manifest)
  verify   goodness-of-fit of sampled statistics against closed forms
  stats    tail probabilities, log-ratio moments and distance profiles
  sdf      statistical difficulty (mean pair cosine) under an embedding

Exit codes: 0 success / verification pass, 1 verification failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from .config import MODES, ConfigError, RunConfig
from .distributions import (JcDistribution, RatioBounds, randomcrop_ratio_cdf,
                            randomcrop_ratio_pdf, tail_probability)
from .imageops import apply_view
from .manifest import (UnsupportedFormatError, read_image, read_manifest,
                       write_image, write_manifest)
from .metrics import (FeatureTable, distance_profile, gof_report, sdf,
                      toy_embedding)
from .paired import (CropRegion, ViewParams, independent_areas_batch,
                     joint_areas_batch, joint_color_batch, joint_sigmas_batch,
                     make_pair_spec)

IMAGE_SUFFIXES = (".png", ".ppm", ".pgm")

_CONFIG_FLAGS = [f.name for f in fields(RunConfig)]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file with RunConfig keys; flags win")
    parser.add_argument("--mode", choices=MODES, default=None)
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--s-min", dest="s_min", type=float, default=None)
    parser.add_argument("--s-max", dest="s_max", type=float, default=None)
    parser.add_argument("--sigma-min", dest="sigma_min", type=float, default=None)
    parser.add_argument("--sigma-max", dest="sigma_max", type=float, default=None)
    parser.add_argument("--color-factor", dest="color_factor", type=float, default=None)
    parser.add_argument("--aspect-lo", dest="aspect_lo", type=float, default=None)
    parser.add_argument("--aspect-hi", dest="aspect_hi", type=float, default=None)
    parser.add_argument("--out-size", dest="out_size", type=int, default=None)
    parser.add_argument("--image-size", dest="image_size", type=int, default=None)
    parser.add_argument("--blur-prob-a", dest="blur_prob_a", type=float, default=None)
    parser.add_argument("--blur-prob-b", dest="blur_prob_b", type=float, default=None)
    parser.add_argument("--crop-or-blur-p", dest="crop_or_blur_p", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--count", type=int, default=None)


def _build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config is not None:
        try:
            values.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    for name in _CONFIG_FLAGS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return RunConfig.from_dict(values)


def _default_threads() -> int:
    env = os.environ.get("JOINTAUG_THREADS")
    return max(1, int(env)) if env else 1


# ---------------------------------------------------------------------------


def cmd_sample(args) -> int:
    config = _build_config(args)
    entries = [make_pair_spec(config, f"pair{idx:06d}", idx)
               for idx in range(args.start, args.start + config.count)]
    write_manifest(entries, args.out)
    return 0


def _list_images(input_dir: Path):
    return sorted(p for p in input_dir.iterdir()
                  if p.suffix.lower() in IMAGE_SUFFIXES)


def cmd_augment(args) -> int:
    config = _build_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = args.format
    skipped = []

    if args.replay:
        entries = read_manifest(args.replay)
        jobs = [(e.image_id, e.index, e) for e in entries]
    else:
        paths = _list_images(Path(args.input))
        if not paths:
            print(f"error: no supported images in {args.input}", file=sys.stderr)
            return 2
        jobs = []
        for idx, path in enumerate(paths):
            jobs.append((path.stem, idx, None))

    input_dir = Path(args.input)

    def run_one(job):
        image_id, index, entry = job
        candidates = [input_dir / f"{image_id}{s}" for s in IMAGE_SUFFIXES]
        src = next((p for p in candidates if p.exists()), None)
        if src is None:
            return image_id, None, "missing source image"
        try:
            img = read_image(src)
        except (UnsupportedFormatError, OSError, ValueError) as exc:
            return image_id, None, str(exc)
        if entry is None:
            h, w = img.shape[:2]
            entry = make_pair_spec(config, image_id, index, image_w=w, image_h=h)
        view_a = apply_view(img, entry.view_a, config.out_size, config.out_size)
        view_b = apply_view(img, entry.view_b, config.out_size, config.out_size)
        ext = "pgm" if fmt == "ppm" and img.shape[2] == 1 else fmt
        write_image(view_a, out_dir / f"{image_id}_a.{ext}")
        write_image(view_b, out_dir / f"{image_id}_b.{ext}")
        return image_id, entry, None

    threads = args.threads or _default_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, jobs))
    else:
        results = [run_one(job) for job in jobs]

    entries = []
    for image_id, entry, err in results:
        if err is not None:
            print(f"warning: skipping {image_id}: {err}", file=sys.stderr)
            skipped.append(image_id)
        else:
            entries.append(entry)
    if not args.replay:
        write_manifest(entries, out_dir / "manifest.jsonl")
    if skipped:
        print(f"skipped {len(skipped)} image(s)", file=sys.stderr)
        if not entries:
            return 2
    return 0


def _verify_samples(config: RunConfig):
    """Sampled statistic plus its analytical reference for cmd_verify."""
    n, seed = config.count, config.seed
    if config.mode == "random-crop":
        s1, s2, _ = independent_areas_batch(RatioBounds(config.s_min, config.s_max),
                                            seed, n)
        bounds = RatioBounds(config.s_min, config.s_max)
        return (s2 / s1, "scale ratio s2/s1",
                lambda x: randomcrop_ratio_cdf(x, bounds),
                lambda x: randomcrop_ratio_pdf(x, bounds),
                (bounds.v_min / bounds.v_max, bounds.v_max / bounds.v_min))
    if config.mode in ("joint-crop", "joint-crop-or-blur"):
        bounds = RatioBounds(config.s_min, config.s_max)
        _, _, s_r = joint_areas_batch(config.beta, bounds, seed, n)
        label = "log area ratio"
    elif config.mode == "joint-blur":
        bounds = RatioBounds(config.sigma_min, config.sigma_max)
        _, _, s_r = joint_sigmas_batch(config.beta, bounds, seed, n)
        label = "log sigma ratio"
    else:  # joint-color
        bounds = RatioBounds(1.0 - config.color_factor, 1.0 + config.color_factor)
        _, _, s_r = joint_color_batch(config.beta, config.color_factor, seed, n)
        label = "log brightness ratio"
    sb = bounds.log_span
    return np.log(s_r), label, None, None, (-sb, sb)


def cmd_verify(args) -> int:
    config = _build_config(args)
    samples, label, ref_cdf, ref_pdf, support = _verify_samples(config)
    ref_beta = config.beta if args.reference_beta is None else args.reference_beta
    if ref_cdf is None:
        if config.mode == "joint-blur":
            bounds = RatioBounds(config.sigma_min, config.sigma_max)
        elif config.mode == "joint-color":
            bounds = RatioBounds(1.0 - config.color_factor, 1.0 + config.color_factor)
        else:
            bounds = RatioBounds(config.s_min, config.s_max)
        dist = JcDistribution(ref_beta, bounds)
        ref_cdf, ref_pdf = dist.cdf, dist.pdf
    report = gof_report(samples, ref_cdf, args.bins, support, ref_pdf)
    passed = report.ks_statistic < args.threshold
    doc = {
        "mode": config.mode,
        "beta": config.beta,
        "reference_beta": ref_beta,
        "statistic": label,
        "threshold": args.threshold,
        "passed": passed,
        **report.to_dict(),
    }
    Path(args.report).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    print(f"{'PASS' if passed else 'FAIL'} ks={report.ks_statistic:.6f} "
          f"threshold={args.threshold} ({label})")
    return 0 if passed else 1


def cmd_stats(args) -> int:
    config = _build_config(args)
    betas = [float(b) for b in args.betas.split(",")]
    bounds = RatioBounds(config.s_min, config.s_max)
    t = args.tail_t

    s1, s2, _ = independent_areas_batch(bounds, config.seed, config.count)
    ratio = s2 / s1
    empirical_tail = float(np.mean((ratio >= t) | (ratio <= 1.0 / t)))

    moments = {}
    distances = {}
    for beta in betas:
        _, _, s_r = joint_areas_batch(beta, bounds, config.seed, config.count)
        moments[str(beta)] = float(np.mean(np.abs(np.log(s_r))))
        prof = distance_profile(beta, args.distance_count, config.image_size,
                                config.image_size, bounds, config.aspect_lo,
                                config.aspect_hi, seed=config.seed,
                                centers=args.center_distance)
        distances[str(beta)] = {"mean": prof.mean_distance, "stddev": prof.stddev,
                                "n": prof.sample_count}

    doc = {
        "tail": {"t": t, "analytical": tail_probability(t, bounds),
                 "empirical": empirical_tail, "n": config.count},
        "mean_abs_log_ratio": moments,
        "distance": distances,
    }
    Path(args.report).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if args.csv_prefix:
        prefix = Path(args.csv_prefix)
        lines = ["beta,mean_abs_log_ratio,distance_mean,distance_stddev"]
        for beta in betas:
            key = str(beta)
            lines.append(f"{beta!r},{moments[key]!r},"
                         f"{distances[key]['mean']!r},{distances[key]['stddev']!r}")
        Path(f"{prefix}_per_beta.csv").write_text("\n".join(lines) + "\n",
                                                  encoding="utf-8")
    print(json.dumps(doc["tail"]))
    return 0


def _fixture_image(seed: int, size: int) -> np.ndarray:
    """Deterministic synthetic test image: smooth blobs over a gradient."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64) / size
    img = 60.0 + 80.0 * x + 40.0 * y
    img = np.repeat(img[:, :, None], 3, axis=2)
    for _ in range(6):
        cx, cy = rng.uniform(0.1, 0.9, size=2)
        r = rng.uniform(0.05, 0.3)
        amp = rng.uniform(-90.0, 90.0, size=3)
        blob = np.exp(-(((x - cx) ** 2 + (y - cy) ** 2) / (2 * r * r)))
        img += blob[:, :, None] * amp[None, None, :]
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def _centered_region(scale: float, w: int, h: int) -> CropRegion:
    side_w = max(1, min(w, int(math.floor(math.sqrt(scale * w * h) + 0.5))))
    side_h = max(1, min(h, side_w))
    return CropRegion((w - side_w) // 2, (h - side_h) // 2, side_w, side_h, w, h)


def cmd_sdf(args) -> int:
    config = _build_config(args)
    if args.input:
        images = []
        for path in _list_images(Path(args.input)):
            try:
                images.append(read_image(path))
            except (UnsupportedFormatError, ValueError) as exc:
                print(f"warning: skipping {path.name}: {exc}", file=sys.stderr)
        if not images:
            print("error: no readable images", file=sys.stderr)
            return 2
    else:
        images = [_fixture_image(s, config.image_size) for s in range(8)]

    if args.features:
        embedding = FeatureTable.load(args.features)
    else:
        embedding = toy_embedding

    def gen_pairs():
        idx = 0
        while True:
            img = images[idx % len(images)]
            h, w = img.shape[:2]
            if args.pair_mode == "identical":
                region = _centered_region(0.5, w, h)
                view = ViewParams(region)
                a = apply_view(img, view, config.out_size, config.out_size)
                yield a, a.copy()
            elif args.pair_mode == "fixed-ratio":
                r = args.fixed_ratio
                s1 = max(config.s_min, config.s_max / r)
                s2 = min(config.s_max, s1 * r)
                va = ViewParams(_centered_region(s1, w, h))
                vb = ViewParams(_centered_region(s2, w, h))
                yield (apply_view(img, va, config.out_size, config.out_size),
                       apply_view(img, vb, config.out_size, config.out_size))
            else:
                entry = make_pair_spec(config, f"img{idx}", idx, image_w=w, image_h=h)
                yield (apply_view(img, entry.view_a, config.out_size, config.out_size),
                       apply_view(img, entry.view_b, config.out_size, config.out_size))
            idx += 1

    result = sdf(gen_pairs(), embedding, args.pairs)
    doc = {
        "mode": config.mode if args.pair_mode == "sampled" else args.pair_mode,
        "beta": config.beta,
        "fixed_ratio": args.fixed_ratio if args.pair_mode == "fixed-ratio" else None,
        "sdf": result.value,
        "stderr": result.stderr,
        "pair_count": result.pair_count,
        "zero_norm_count": result.zero_norm_count,
    }
    Path(args.report).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(doc))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jointaug")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="emit a parameter-only pair manifest")
    _add_config_flags(p)
    p.add_argument("--start", type=int, default=0, help="first pair index")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("augment", help="generate augmented image pairs")
    _add_config_flags(p)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=("png", "ppm"), default="png")
    p.add_argument("--replay", type=Path, default=None,
                   help="replay an existing manifest instead of sampling")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("verify", help="goodness-of-fit against closed forms")
    _add_config_flags(p)
    p.add_argument("--threshold", type=float, default=0.002)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--reference-beta", type=float, default=None,
                   help="check against a different JC(beta) reference")
    p.add_argument("--report", type=Path, required=True)
    p.add_argument("--csv", type=Path, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="tail/moment/distance statistics")
    _add_config_flags(p)
    p.add_argument("--betas", default="-2,-1,0,1,2")
    p.add_argument("--tail-t", dest="tail_t", type=float, default=2.0)
    p.add_argument("--distance-count", type=int, default=100_000)
    p.add_argument("--center-distance", action="store_true",
                   help="measure center-to-center instead of offset distance")
    p.add_argument("--report", type=Path, required=True)
    p.add_argument("--csv-prefix", default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sdf", help="statistical difficulty of a pair sampler")
    _add_config_flags(p)
    p.add_argument("--pair-mode", choices=("sampled", "identical", "fixed-ratio"),
                   default="sampled")
    p.add_argument("--fixed-ratio", type=float, default=5.0)
    p.add_argument("--pairs", type=int, default=64)
    p.add_argument("--input", type=Path, default=None)
    p.add_argument("--features", type=Path, default=None,
                   help="external feature file (header 'dim=<D>')")
    p.add_argument("--report", type=Path, required=True)
    p.set_defaults(func=cmd_sdf)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
