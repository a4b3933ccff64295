import numpy as np
import pytest

from jointaug.rng import (derive_key, derive_keys, mix64, mix64_vec,
                          unit_uniform, unit_uniforms)


def test_mix64_is_stable():
    # Known splitmix64 finalizer outputs (state 1, 2 with the golden step
    # applied by the reference generator are not used here; this pins our
    # exact variant so streams never drift silently).
    assert mix64(0) == 0
    assert mix64(1) == 6238072747940578789
    assert mix64(mix64(1)) != mix64(1)


def test_scalar_vector_parity():
    keys = derive_keys(12345, np.arange(257))
    for i in (0, 1, 2, 100, 256):
        assert int(keys[i]) == derive_key(12345, i)
        assert unit_uniforms(keys, 7)[i] == unit_uniform(int(keys[i]), 7)


def test_mix64_vec_matches_scalar():
    z = np.array([0, 1, 2, 2**63, 2**64 - 1], dtype=np.uint64)
    out = mix64_vec(z)
    for zi, oi in zip(z.tolist(), out.tolist()):
        assert mix64(zi) == oi


def test_uniforms_open_interval():
    keys = derive_keys(0, np.arange(10000))
    u = unit_uniforms(keys, 0)
    assert np.all(u > 0.0) and np.all(u < 1.0)
    # roughly uniform
    assert abs(u.mean() - 0.5) < 0.02


def test_index_independence():
    # The draw for index k never depends on other indices being requested.
    solo = derive_key(99, 5)
    batch = derive_keys(99, np.array([0, 1, 2, 3, 4, 5]))
    assert int(batch[5]) == solo


def test_distinct_keys_across_indices_and_seeds():
    keys = derive_keys(7, np.arange(100000))
    assert len(np.unique(keys)) == 100000
    assert derive_key(7, 0) != derive_key(8, 0)


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        derive_key(0, -1)
    with pytest.raises(ValueError):
        derive_keys(0, np.array([-1]))
