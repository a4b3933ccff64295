"""Quantitative characterization of samplers.

Statistical difficulty (mean cosine similarity of embedded positive pairs),
crop-offset distance profiles, and goodness-of-fit of sampled statistics
against the closed-form references in `distributions`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .distributions import RatioBounds
from .imageops import LUMA_WEIGHTS, crop_resize
from .paired import CropRegion, crop_pairs_batch


@dataclass(frozen=True)
class SdfResult:
    value: float
    pair_count: int
    zero_norm_count: int
    stderr: float


@dataclass(frozen=True)
class DistanceProfile:
    beta: float
    sample_count: int
    mean_distance: float
    stddev: float


@dataclass(frozen=True)
class GofReport:
    sample_count: int
    ks_statistic: float
    max_cdf_deviation: float
    histogram: List[Tuple[float, float]]
    reference_density: List[Tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "ks_statistic": self.ks_statistic,
            "max_cdf_deviation": self.max_cdf_deviation,
            "histogram": [[c, d] for c, d in self.histogram],
            "reference_density": [[c, d] for c, d in self.reference_density],
        }

    def to_csv(self) -> str:
        lines = ["bin_center,empirical,analytical"]
        for (c, emp), (_, ana) in zip(self.histogram, self.reference_density):
            lines.append(f"{c!r},{emp!r},{ana!r}")
        return "\n".join(lines) + "\n"


def toy_embedding(img: np.ndarray) -> np.ndarray:
    """Downsample to 8x8 grayscale, flatten, subtract the mean."""
    img = np.asarray(img)
    if img.ndim == 2:
        img = img[:, :, None]
    h, w = img.shape[:2]
    small = crop_resize(img, CropRegion(0, 0, w, h, w, h), 8, 8).astype(np.float64)
    if small.shape[2] == 3:
        gray = (LUMA_WEIGHTS[0] * small[:, :, 0] + LUMA_WEIGHTS[1] * small[:, :, 1]
                + LUMA_WEIGHTS[2] * small[:, :, 2])
    else:
        gray = small[:, :, 0]
    flat = gray.ravel()
    return flat - flat.mean()


class FeatureTable:
    """Embedding backed by a feature file: one fixed-dim vector per view id."""

    def __init__(self, features: dict, dim: int):
        self.features = features
        self.dim = dim

    def __call__(self, view_id: str) -> np.ndarray:
        try:
            return self.features[view_id]
        except KeyError:
            raise KeyError(f"no feature record for view id {view_id!r}") from None

    @classmethod
    def load(cls, path) -> "FeatureTable":
        text = Path(path).read_text(encoding="utf-8").splitlines()
        if not text or not text[0].startswith("dim="):
            raise ValueError("feature file must start with a 'dim=<D>' header")
        dim = int(text[0][4:])
        if dim < 2:
            raise ValueError("embedding dimension must be >= 2")
        features = {}
        for lineno, line in enumerate(text[1:], start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != dim + 1:
                raise ValueError(f"feature line {lineno}: expected {dim} values "
                                 f"for {parts[0]!r}, got {len(parts) - 1}")
            vec = np.array([float(v) for v in parts[1:]], dtype=np.float64)
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"feature line {lineno}: non-finite value")
            features[parts[0]] = vec
        return cls(features, dim)


def _cosine(a: np.ndarray, b: np.ndarray) -> Optional[float]:
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    if na == 0.0 or nb == 0.0:
        return None
    return float(np.dot(a, b)) / (na * nb)


def sdf(pairs: Iterable, embedding: Callable, n: int) -> SdfResult:
    """Mean cosine similarity over the first n positive pairs.

    Zero-norm embeddings contribute cosine 0 and are counted separately.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cosines = []
    zero_norm = 0
    for idx, (a, b) in enumerate(pairs):
        if idx >= n:
            break
        try:
            fa, fb = embedding(a), embedding(b)
        except Exception as exc:
            raise RuntimeError(f"embedding failed on pair {idx}: {exc}") from exc
        c = _cosine(np.asarray(fa, dtype=np.float64), np.asarray(fb, dtype=np.float64))
        if c is None:
            zero_norm += 1
            c = 0.0
        cosines.append(c)
    if not cosines:
        raise ValueError("pair source yielded no pairs")
    arr = np.array(cosines)
    stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return SdfResult(float(arr.mean()), len(arr), zero_norm, stderr)


def pair_distance(a: CropRegion, b: CropRegion) -> float:
    """Euclidean distance between the two regions' top-left offsets."""
    if (a.image_w, a.image_h) != (b.image_w, b.image_h):
        raise ValueError("regions come from different image dimensions")
    return math.hypot(a.i - b.i, a.j - b.j)


def offset_distances(view_a, view_b, centers: bool = False) -> np.ndarray:
    """Vectorized distances for batch-realized crops ((i, j, w, h) tuples)."""
    ia, ja, wa, ha = view_a
    ib, jb, wb, hb = view_b
    if centers:
        dx = (ia + wa / 2.0) - (ib + wb / 2.0)
        dy = (ja + ha / 2.0) - (jb + hb / 2.0)
    else:
        dx = (ia - ib).astype(np.float64)
        dy = (ja - jb).astype(np.float64)
    return np.sqrt(dx * dx + dy * dy)


def distance_profile(beta: float, n: int, image_w: int, image_h: int,
                     bounds: RatioBounds, aspect_lo: float, aspect_hi: float,
                     seed: int = 0, centers: bool = False) -> DistanceProfile:
    if n < 1000:
        raise ValueError("n must be >= 1000")
    view_a, view_b = crop_pairs_batch(beta, bounds, seed, n, image_w, image_h,
                                      aspect_lo, aspect_hi)
    d = offset_distances(view_a, view_b, centers=centers)
    return DistanceProfile(beta, n, float(d.mean()), float(d.std(ddof=1)))


def ks_statistic(samples: np.ndarray, reference_cdf: Callable) -> float:
    """Max deviation between the empirical CDF and a continuous reference."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(s)
    cdf = np.asarray(reference_cdf(s), dtype=np.float64)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


def gof_report(samples: Sequence[float], reference_cdf: Callable, bins: int,
               support: Tuple[float, float],
               reference_pdf: Optional[Callable] = None) -> GofReport:
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) < 1000:
        raise ValueError("need at least 1000 samples")
    if bins < 10:
        raise ValueError("need at least 10 bins")
    lo, hi = support
    ks = ks_statistic(samples, reference_cdf)
    counts, edges = np.histogram(samples, bins=bins, range=(lo, hi))
    widths = np.diff(edges)
    density = counts / (len(samples) * widths)
    centers = 0.5 * (edges[:-1] + edges[1:])
    if reference_pdf is not None:
        ref = np.asarray(reference_pdf(centers), dtype=np.float64)
    else:
        ref = (np.asarray(reference_cdf(edges[1:]), dtype=np.float64)
               - np.asarray(reference_cdf(edges[:-1]), dtype=np.float64)) / widths
    ecdf_at_edges = np.searchsorted(np.sort(samples), edges, side="right") / len(samples)
    max_dev = float(np.max(np.abs(ecdf_at_edges - np.asarray(reference_cdf(edges)))))
    return GofReport(
        sample_count=len(samples),
        ks_statistic=ks,
        max_cdf_deviation=max_dev,
        histogram=list(zip(centers.tolist(), density.tolist())),
        reference_density=list(zip(centers.tolist(), ref.tolist())),
    )
