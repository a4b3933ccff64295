"""Counter-based deterministic random streams.

Every uniform draw in this package is addressed, not consumed: a draw is a
pure function of (key, slot).  Keys are derived by mixing a 64-bit base seed
with a pair index, so the parameters of pair k never depend on whether pairs
0..k-1 were generated, and batch generation parallelizes trivially.

The mixer is the splitmix64 finalizer (Vigna / Steele et al.), which is a
bijection on 64-bit words.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_U64_GOLDEN = np.uint64(GOLDEN)
_U64_M1 = np.uint64(0xBF58476D1CE4E5B9)
_U64_M2 = np.uint64(0x94D049BB133111EB)

# 2**-53; draws use the top 53 bits offset by half an ulp so 0 < u < 1 always.
_INV53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """splitmix64 finalizer on a Python int (mod 2**64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64_vec(z: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer on a uint64 array."""
    z = z.astype(np.uint64, copy=True)
    z = (z ^ (z >> np.uint64(30))) * _U64_M1
    z = (z ^ (z >> np.uint64(27))) * _U64_M2
    return z ^ (z >> np.uint64(31))


def derive_key(seed: int, index: int) -> int:
    """Substream key for one pair.  Injective in index for a fixed seed."""
    if index < 0:
        raise ValueError("index must be >= 0")
    return mix64(mix64(seed) ^ mix64(((index + 1) * GOLDEN) & MASK64))


def derive_keys(seed: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized derive_key."""
    idx = np.asarray(indices)
    if np.any(idx < 0):
        raise ValueError("index must be >= 0")
    idx = idx.astype(np.uint64)
    f = mix64_vec((idx + np.uint64(1)) * _U64_GOLDEN)
    return mix64_vec(np.uint64(mix64(seed)) ^ f)


def unit_uniform(key: int, slot: int) -> float:
    """Uniform draw in the open interval (0, 1) for (key, slot)."""
    x = mix64((key + (slot + 1) * GOLDEN) & MASK64)
    return ((x >> 11) + 0.5) * _INV53


def unit_uniforms(keys: np.ndarray, slot: int) -> np.ndarray:
    """Vectorized unit_uniform: one draw per key at a fixed slot."""
    x = mix64_vec(keys + np.uint64((slot + 1) * GOLDEN & MASK64))
    return ((x >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53
