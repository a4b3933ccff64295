"""Correlated paired-parameter generators.

The core trick, shared by all joint modes: draw the log of the parameter
ratio from JC(beta) first, then draw the first parameter uniformly from the
sub-interval that keeps *both* parameters inside the configured bounds, and
derive the second parameter by multiplication.  The ratio is therefore exact
by construction and neither parameter can escape its bounds.

Every draw is addressed by a (pair key, slot) pair, see `rng`.  The slot
layout below is fixed regardless of mode, so a manifest entry for pair k is
identical whether or not other pairs or other augmentations were generated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import RunConfig
from .distributions import JcDistribution, RatioBounds
from .rng import derive_key, derive_keys, unit_uniform, unit_uniforms

SCHEMA_VERSION = 1

# Fixed draw-slot layout per pair substream.
SLOT_BRANCH = 0
SLOT_AREA_RATIO = 1      # doubles as s1 in the independent path
SLOT_AREA_SCALE = 2      # doubles as s2 in the independent path
SLOT_CROP_A = (3, 4, 5)  # aspect, i, j for view a
SLOT_CROP_B = (6, 7, 8)
SLOT_SIGMA_RATIO = 9
SLOT_SIGMA_SCALE = 10
SLOT_BLUR_APPLY_A = 11
SLOT_BLUR_APPLY_B = 12
SLOT_BRIGHT_RATIO = 13
SLOT_BRIGHT_SCALE = 14
SLOT_CONTRAST_RATIO = 15
SLOT_CONTRAST_SCALE = 16


@dataclass(frozen=True)
class PairedScale:
    """A correlated (s1, s2) pair and the ratio s2/s1 that generated it."""

    s1: float
    s2: float
    ratio: float


@dataclass(frozen=True)
class CropRegion:
    """Integer crop rectangle inside an image of known dimensions."""

    i: int
    j: int
    w: int
    h: int
    image_w: int
    image_h: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0 or self.w < 1 or self.h < 1:
            raise ValueError("invalid crop rectangle")
        if self.i + self.w > self.image_w or self.j + self.h > self.image_h:
            raise ValueError("crop rectangle exceeds image bounds")


@dataclass(frozen=True)
class BlurSpec:
    sigma: float
    kernel_size: int

    def __post_init__(self):
        if self.kernel_size < 3 or self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be an odd integer >= 3")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class ColorSpec:
    brightness: float
    contrast: float


@dataclass(frozen=True)
class ViewParams:
    crop: CropRegion
    blur: Optional[BlurSpec] = None
    blur_apply: bool = False
    color: Optional[ColorSpec] = None


@dataclass(frozen=True)
class PairManifestEntry:
    """Self-contained, replayable record of one positive pair."""

    image_id: str
    index: int
    mode: str
    beta: float
    seed: int
    view_a: ViewParams
    view_b: ViewParams
    branch: Optional[str] = None
    schema_version: int = SCHEMA_VERSION


def scale_interval(s_r, bounds: RatioBounds):
    """Admissible interval for s1 given the ratio s2/s1."""
    s_r = np.asarray(s_r, dtype=np.float64)
    lo = np.maximum(bounds.v_min, bounds.v_min / s_r)
    hi = np.minimum(bounds.v_max / s_r, bounds.v_max)
    return lo, hi


def sample_joint_pair(beta: float, bounds: RatioBounds, u_ratio, u_scale):
    """Vector core of the joint sampler; returns (s1, s2, ratio) arrays."""
    dist = JcDistribution(beta, bounds)
    log_r = dist.sample(u_ratio)
    s_r = np.exp(np.asarray(log_r, dtype=np.float64))
    lo, hi = scale_interval(s_r, bounds)
    s1 = lo + np.asarray(u_scale, dtype=np.float64) * (hi - lo)
    s2 = s1 * s_r
    # FP guard only; the interval construction already keeps both in bounds.
    s1 = np.clip(s1, bounds.v_min, bounds.v_max)
    s2 = np.clip(s2, bounds.v_min, bounds.v_max)
    return s1, s2, s_r


def sample_independent_pair(bounds: RatioBounds, u1, u2):
    """Baseline sampler: both scales i.i.d. uniform on [v_min, v_max]."""
    span = bounds.v_max - bounds.v_min
    s1 = bounds.v_min + np.asarray(u1, dtype=np.float64) * span
    s2 = bounds.v_min + np.asarray(u2, dtype=np.float64) * span
    return s1, s2, s2 / s1


def sample_joint_areas(beta: float, bounds: RatioBounds, u_ratio: float,
                       u_scale: float) -> PairedScale:
    s1, s2, s_r = sample_joint_pair(beta, bounds, u_ratio, u_scale)
    return PairedScale(float(s1), float(s2), float(s_r))


def sample_independent_areas(bounds: RatioBounds, u1: float, u2: float) -> PairedScale:
    s1, s2, s_r = sample_independent_pair(bounds, u1, u2)
    return PairedScale(float(s1), float(s2), float(s_r))


def realize_crop_arrays(scale, image_w: int, image_h: int, aspect_lo: float,
                        aspect_hi: float, u_aspect, u_i, u_j):
    """Vector core of crop realization; returns (i, j, w, h) int arrays.

    `scale` is the target area as a fraction of image_w * image_h.  The
    aspect ratio is log-uniform on the intersection of the configured range
    with the feasibility interval [s*W/H, W/(s*H)]; an empty intersection
    clamps to the nearest feasible endpoint so the area is never perturbed.
    """
    if image_w < 8 or image_h < 8:
        raise ValueError(f"unsupported image size {image_w}x{image_h}; need >= 8x8")
    if not 0.0 < aspect_lo <= aspect_hi:
        raise ValueError("need 0 < aspect_lo <= aspect_hi")
    s = np.asarray(scale, dtype=np.float64)
    if np.any(s <= 0.0) or np.any(s > 1.0):
        raise ValueError("scale must lie in (0, 1]")
    feas_lo = s * image_w / image_h
    feas_hi = image_w / (s * image_h)
    lo = np.clip(np.maximum(aspect_lo, feas_lo), feas_lo, feas_hi)
    hi = np.clip(np.minimum(aspect_hi, feas_hi), feas_lo, feas_hi)
    # If lo > hi the configured range misses the feasible one entirely; both
    # ends were clamped to the same feasible endpoint above, so fix order.
    lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
    log_r = np.log(lo) + np.asarray(u_aspect, dtype=np.float64) * (np.log(hi) - np.log(lo))
    r = np.exp(log_r)
    area = s * image_w * image_h
    w = np.floor(np.sqrt(area * r) + 0.5)
    h = np.floor(np.sqrt(area / r) + 0.5)
    w = np.clip(w, 1, image_w).astype(np.int64)
    h = np.clip(h, 1, image_h).astype(np.int64)
    i = np.floor(np.asarray(u_i, dtype=np.float64) * (image_w - w + 1)).astype(np.int64)
    j = np.floor(np.asarray(u_j, dtype=np.float64) * (image_h - h + 1)).astype(np.int64)
    i = np.minimum(i, image_w - w)
    j = np.minimum(j, image_h - h)
    return i, j, w, h


def realize_crop(scale: float, image_w: int, image_h: int, aspect_lo: float,
                 aspect_hi: float, u_aspect: float, u_i: float,
                 u_j: float) -> CropRegion:
    i, j, w, h = realize_crop_arrays(scale, image_w, image_h, aspect_lo,
                                     aspect_hi, u_aspect, u_i, u_j)
    return CropRegion(int(i), int(j), int(w), int(h), image_w, image_h)


def sample_joint_sigmas(beta: float, sigma_bounds: RatioBounds, u_ratio: float,
                        u_scale: float, kernel_size: int) -> tuple[BlurSpec, BlurSpec]:
    s1, s2, _ = sample_joint_pair(beta, sigma_bounds, u_ratio, u_scale)
    return (BlurSpec(float(s1), kernel_size), BlurSpec(float(s2), kernel_size))


def sample_joint_color(beta: float, factor_range: float, u_ratio: float,
                       u_scale: float) -> tuple[float, float]:
    if not 0.0 < factor_range < 1.0:
        raise ValueError("factor_range must lie in (0, 1)")
    bounds = RatioBounds(1.0 - factor_range, 1.0 + factor_range)
    f1, f2, _ = sample_joint_pair(beta, bounds, u_ratio, u_scale)
    return float(f1), float(f2)


def _view_crop(key: int, scale: float, slots, config: RunConfig,
               image_w: int, image_h: int) -> CropRegion:
    sa, si, sj = slots
    return realize_crop(scale, image_w, image_h, config.aspect_lo,
                        config.aspect_hi, unit_uniform(key, sa),
                        unit_uniform(key, si), unit_uniform(key, sj))


def make_pair_spec(config: RunConfig, image_id: str, index: int,
                   image_w: Optional[int] = None,
                   image_h: Optional[int] = None) -> PairManifestEntry:
    """Derive the complete parameter record for one pair from (seed, index)."""
    config.validate()
    if index < 0:
        raise ValueError("index must be >= 0")
    image_w = config.image_size if image_w is None else image_w
    image_h = config.image_size if image_h is None else image_h

    key = derive_key(config.seed, index)
    u = lambda slot: unit_uniform(key, slot)
    scale_bounds = RatioBounds(config.s_min, config.s_max)

    branch = None
    crop_joint = config.mode == "joint-crop"
    blur_joint = config.mode == "joint-blur"
    if config.mode == "joint-crop-or-blur":
        branch = "crop" if u(SLOT_BRANCH) < config.crop_or_blur_p else "blur"
        crop_joint = branch == "crop"
        blur_joint = branch == "blur"

    if crop_joint:
        scales = sample_joint_areas(config.beta, scale_bounds,
                                    u(SLOT_AREA_RATIO), u(SLOT_AREA_SCALE))
    else:
        scales = sample_independent_areas(scale_bounds, u(SLOT_AREA_RATIO),
                                          u(SLOT_AREA_SCALE))

    crop_a = _view_crop(key, scales.s1, SLOT_CROP_A, config, image_w, image_h)
    crop_b = _view_crop(key, scales.s2, SLOT_CROP_B, config, image_w, image_h)

    blur_a = blur_b = None
    apply_a = apply_b = False
    if blur_joint:
        from .imageops import kernel_size_for
        ksize = kernel_size_for(config.out_size)
        sigma_bounds = RatioBounds(config.sigma_min, config.sigma_max)
        blur_a, blur_b = sample_joint_sigmas(config.beta, sigma_bounds,
                                             u(SLOT_SIGMA_RATIO),
                                             u(SLOT_SIGMA_SCALE), ksize)
        apply_a = u(SLOT_BLUR_APPLY_A) < config.blur_prob_a
        apply_b = u(SLOT_BLUR_APPLY_B) < config.blur_prob_b

    color_a = color_b = None
    if config.mode == "joint-color":
        b1, b2 = sample_joint_color(config.beta, config.color_factor,
                                    u(SLOT_BRIGHT_RATIO), u(SLOT_BRIGHT_SCALE))
        c1, c2 = sample_joint_color(config.beta, config.color_factor,
                                    u(SLOT_CONTRAST_RATIO), u(SLOT_CONTRAST_SCALE))
        color_a = ColorSpec(b1, c1)
        color_b = ColorSpec(b2, c2)

    return PairManifestEntry(
        image_id=image_id,
        index=index,
        mode=config.mode,
        beta=config.beta,
        seed=config.seed,
        view_a=ViewParams(crop_a, blur_a, apply_a, color_a),
        view_b=ViewParams(crop_b, blur_b, apply_b, color_b),
        branch=branch,
    )


# ---------------------------------------------------------------------------
# Batch helpers for statistical verification.  These route through the same
# vector cores as make_pair_spec, only with array-valued uniforms.


def _pair_slot_uniforms(seed: int, n: int, slot: int, start: int = 0):
    keys = derive_keys(seed, np.arange(start, start + n, dtype=np.uint64))
    return unit_uniforms(keys, slot)


def joint_areas_batch(beta: float, bounds: RatioBounds, seed: int, n: int,
                      start: int = 0):
    u1 = _pair_slot_uniforms(seed, n, SLOT_AREA_RATIO, start)
    u2 = _pair_slot_uniforms(seed, n, SLOT_AREA_SCALE, start)
    return sample_joint_pair(beta, bounds, u1, u2)


def independent_areas_batch(bounds: RatioBounds, seed: int, n: int,
                            start: int = 0):
    u1 = _pair_slot_uniforms(seed, n, SLOT_AREA_RATIO, start)
    u2 = _pair_slot_uniforms(seed, n, SLOT_AREA_SCALE, start)
    return sample_independent_pair(bounds, u1, u2)


def joint_sigmas_batch(beta: float, sigma_bounds: RatioBounds, seed: int,
                       n: int, start: int = 0):
    u1 = _pair_slot_uniforms(seed, n, SLOT_SIGMA_RATIO, start)
    u2 = _pair_slot_uniforms(seed, n, SLOT_SIGMA_SCALE, start)
    return sample_joint_pair(beta, sigma_bounds, u1, u2)


def crop_pairs_batch(beta: float, bounds: RatioBounds, seed: int, n: int,
                     image_w: int, image_h: int, aspect_lo: float,
                     aspect_hi: float):
    """Realized crop offsets for n joint pairs; returns two (i, j, w, h) tuples."""
    keys = derive_keys(seed, np.arange(n, dtype=np.uint64))
    s1, s2, _ = sample_joint_pair(beta, bounds,
                                  unit_uniforms(keys, SLOT_AREA_RATIO),
                                  unit_uniforms(keys, SLOT_AREA_SCALE))
    view_a = realize_crop_arrays(s1, image_w, image_h, aspect_lo, aspect_hi,
                                 unit_uniforms(keys, SLOT_CROP_A[0]),
                                 unit_uniforms(keys, SLOT_CROP_A[1]),
                                 unit_uniforms(keys, SLOT_CROP_A[2]))
    view_b = realize_crop_arrays(s2, image_w, image_h, aspect_lo, aspect_hi,
                                 unit_uniforms(keys, SLOT_CROP_B[0]),
                                 unit_uniforms(keys, SLOT_CROP_B[1]),
                                 unit_uniforms(keys, SLOT_CROP_B[2]))
    return view_a, view_b


def joint_color_batch(beta: float, factor_range: float, seed: int, n: int,
                      start: int = 0, contrast: bool = False):
    if not 0.0 < factor_range < 1.0:
        raise ValueError("factor_range must lie in (0, 1)")
    bounds = RatioBounds(1.0 - factor_range, 1.0 + factor_range)
    slot_r = SLOT_CONTRAST_RATIO if contrast else SLOT_BRIGHT_RATIO
    slot_s = SLOT_CONTRAST_SCALE if contrast else SLOT_BRIGHT_SCALE
    u1 = _pair_slot_uniforms(seed, n, slot_r, start)
    u2 = _pair_slot_uniforms(seed, n, slot_s, start)
    return sample_joint_pair(beta, bounds, u1, u2)
