"""Distributions behind correlated pair sampling.

Three pieces live here:

* a truncated-normal primitive sampled by inverse CDF (one uniform per draw,
  so streams are reproducible with fixed draw accounting),
* the JC(beta) family over a symmetric log-ratio interval [-log_span,
  +log_span]: truncated Gaussian for beta > 0, exact uniform at beta = 0, and
  an edge-concentrated flipped variant for beta < 0,
* the closed-form density/CDF of the ratio s2/s1 when both scales are drawn
  independently and uniformly from [v_min, v_max] (the baseline crop sampler).

All operations accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri


def _finite(*vals) -> bool:
    return all(math.isfinite(float(v)) for v in vals)


@dataclass(frozen=True)
class RatioBounds:
    """A positive parameter interval [v_min, v_max] and its log span."""

    v_min: float
    v_max: float

    def __post_init__(self):
        if not _finite(self.v_min, self.v_max):
            raise ValueError("bounds must be finite")
        if not (0.0 < self.v_min < self.v_max):
            raise ValueError(f"need 0 < v_min < v_max, got [{self.v_min}, {self.v_max}]")

    @property
    def log_span(self) -> float:
        return math.log(self.v_max / self.v_min)


DEFAULT_SCALE_BOUNDS = RatioBounds(0.2, 1.0)
DEFAULT_SIGMA_BOUNDS = RatioBounds(0.1, 2.0)


def truncated_normal_sample(mu, sigma, lo, hi, u):
    """Inverse-CDF draw from a normal(mu, sigma) truncated to [lo, hi].

    `u` is a uniform draw in (0, 1); the result is deterministic in it.
    """
    mu, sigma, lo, hi = float(mu), float(sigma), float(lo), float(hi)
    if not _finite(mu, sigma, lo, hi):
        raise ValueError("non-finite parameter")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if lo >= hi:
        raise ValueError("need lo < hi")
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise ValueError("u must lie strictly in (0, 1)")
    p_lo = ndtr((lo - mu) / sigma)
    p_hi = ndtr((hi - mu) / sigma)
    x = mu + sigma * ndtri(p_lo + u_arr * (p_hi - p_lo))
    x = np.clip(x, lo, hi)
    return float(x) if np.isscalar(u) or x.ndim == 0 else x


def truncated_normal_pdf(x, mu, sigma, lo, hi):
    """Density of normal(mu, sigma) truncated to [lo, hi]; 0 outside."""
    mu, sigma, lo, hi = float(mu), float(sigma), float(lo), float(hi)
    if sigma <= 0.0 or lo >= hi:
        raise ValueError("invalid truncated normal parameters")
    x_arr = np.asarray(x, dtype=np.float64)
    z = (x_arr - mu) / sigma
    mass = ndtr((hi - mu) / sigma) - ndtr((lo - mu) / sigma)
    dens = np.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi) * mass)
    dens = np.where((x_arr >= lo) & (x_arr <= hi), dens, 0.0)
    return float(dens) if np.isscalar(x) or dens.ndim == 0 else dens


def _truncated_normal_cdf(x, sigma, span):
    """CDF of normal(0, sigma) truncated to [-span, span], clipped support."""
    x_arr = np.clip(np.asarray(x, dtype=np.float64), -span, span)
    p_lo = ndtr(-span / sigma)
    p_hi = ndtr(span / sigma)
    return (ndtr(x_arr / sigma) - p_lo) / (p_hi - p_lo)


@dataclass(frozen=True)
class JcDistribution:
    """The JC(beta) family of log-ratio distributions.

    Support is [-log_span, +log_span].  Larger beta concentrates mass near 0
    (similar pair parameters); beta < 0 pushes mass toward the edges by
    flipping the two halves of the |beta| distribution about -log_span/2 and
    +log_span/2 respectively.
    """

    beta: float
    bounds: RatioBounds

    def __post_init__(self):
        if not _finite(self.beta):
            raise ValueError("beta must be finite")

    @property
    def log_span(self) -> float:
        return self.bounds.log_span

    @property
    def _sigma(self) -> float:
        return self.log_span / abs(self.beta)

    @property
    def _uniform(self) -> bool:
        # exact-uniform branch; also the limit for betas so small the
        # implied sigma overflows (e.g. subnormals)
        return self.beta == 0.0 or not math.isfinite(self._sigma)

    def sample(self, u):
        """Map a uniform draw in (0, 1) to a log-ratio in the support."""
        sb = self.log_span
        u_arr = np.asarray(u, dtype=np.float64)
        if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
            raise ValueError("u must lie strictly in (0, 1)")
        if self._uniform:
            x = (2.0 * u_arr - 1.0) * sb
        else:
            y = truncated_normal_sample(0.0, self._sigma, -sb, sb, u_arr)
            if self.beta > 0.0:
                x = np.asarray(y, dtype=np.float64)
            else:
                # Flip rule: the same single draw, post-processed.
                y = np.asarray(y, dtype=np.float64)
                x = np.where(y < 0.0, -sb - y, sb - y)
        return float(x) if np.isscalar(u) or x.ndim == 0 else x

    def pdf(self, x):
        sb = self.log_span
        x_arr = np.asarray(x, dtype=np.float64)
        inside = (x_arr >= -sb) & (x_arr <= sb)
        if self._uniform:
            dens = np.where(inside, 1.0 / (2.0 * sb), 0.0)
        elif self.beta > 0.0:
            dens = truncated_normal_pdf(x_arr, 0.0, self._sigma, -sb, sb)
        else:
            # Reflection of the |beta| density about -sb/2 (left half) and
            # +sb/2 (right half).
            src = np.where(x_arr < 0.0, -sb - x_arr, sb - x_arr)
            dens = truncated_normal_pdf(src, 0.0, self._sigma, -sb, sb)
            dens = np.where(inside, dens, 0.0)
        return float(dens) if np.isscalar(x) or dens.ndim == 0 else dens

    def cdf(self, x):
        sb = self.log_span
        x_arr = np.asarray(x, dtype=np.float64)
        if self._uniform:
            c = np.clip((x_arr + sb) / (2.0 * sb), 0.0, 1.0)
        elif self.beta > 0.0:
            c = _truncated_normal_cdf(x_arr, self._sigma, sb)
        else:
            xc = np.clip(x_arr, -sb, sb)
            f = lambda t: _truncated_normal_cdf(t, self._sigma, sb)
            # x < 0 collects {y in (-sb-x, 0)}, x >= 0 adds {y in (0, sb-x]}'s
            # complement; both follow from the flip rule.
            left = f(0.0) - f(-sb - xc)
            right = 0.5 + (1.0 - f(sb - xc))
            c = np.where(xc < 0.0, left, right)
            c = np.clip(c, 0.0, 1.0)
        return float(c) if np.isscalar(x) or c.ndim == 0 else c


def randomcrop_ratio_pdf(x, bounds: RatioBounds = DEFAULT_SCALE_BOUNDS):
    """Closed-form density of s2/s1 for independent uniform scales."""
    a, b = bounds.v_min, bounds.v_max
    d2 = (b - a) ** 2
    x_arr = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        low = (b * b * x_arr * x_arr - a * a) / (2.0 * x_arr * x_arr * d2)
        high = (b * b - a * a * x_arr * x_arr) / (2.0 * x_arr * x_arr * d2)
    dens = np.where(x_arr <= 1.0, low, high)
    dens = np.where((x_arr >= a / b) & (x_arr <= b / a), dens, 0.0)
    return float(dens) if np.isscalar(x) or dens.ndim == 0 else dens


def randomcrop_ratio_cdf(x, bounds: RatioBounds = DEFAULT_SCALE_BOUNDS):
    """Antiderivative of randomcrop_ratio_pdf; 0 below the support, 1 above."""
    a, b = bounds.v_min, bounds.v_max
    d2 = (b - a) ** 2
    x_arr = np.clip(np.asarray(x, dtype=np.float64), a / b, b / a)
    with np.errstate(divide="ignore", invalid="ignore"):
        low = (0.5 * b * b * x_arr - a * b + 0.5 * a * a / x_arr) / d2
        # F(x) = F(1) + integral of the upper branch on (1, x].
        high = 0.5 + ((b * b + a * a) - (b * b / x_arr + a * a * x_arr)) / (2.0 * d2)
    c = np.where(x_arr <= 1.0, low, high)
    c = np.clip(c, 0.0, 1.0)
    return float(c) if np.isscalar(x) or c.ndim == 0 else c


def tail_probability(t: float, bounds: RatioBounds = DEFAULT_SCALE_BOUNDS) -> float:
    """P(ratio >= t or ratio <= 1/t) under the baseline ratio distribution."""
    t = float(t)
    if not _finite(t) or t <= 1.0:
        raise ValueError("t must be > 1")
    return randomcrop_ratio_cdf(1.0 / t, bounds) + 1.0 - randomcrop_ratio_cdf(t, bounds)
