import numpy as np
import pytest

from rttc.rng import DeterministicRng, derive_seed


def test_raw_stream_deterministic():
    a = DeterministicRng(42).raw(16)
    b = DeterministicRng(42).raw(16)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, DeterministicRng(43).raw(16))


def test_raw_stream_frozen_values():
    # regression pin: the stream definition must never drift
    assert DeterministicRng(42).raw(3).tolist() == [
        13679457532755275413, 2949826092126892291, 5139283748462763858]


def test_stream_is_position_independent():
    whole = DeterministicRng(7).raw(10)
    split = DeterministicRng(7)
    parts = np.concatenate([split.raw(3), split.raw(7)])
    assert np.array_equal(whole, parts)


def test_uniform_in_unit_interval():
    u = DeterministicRng(9).uniform(100_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.01


def test_normal_moments():
    z = DeterministicRng(7).normal(200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01


def test_normal_odd_count():
    assert DeterministicRng(3).normal(5).shape == (5,)


def test_integers_bounds_and_coverage():
    x = DeterministicRng(11).integers(7, 10_000)
    assert x.min() == 0 and x.max() == 6
    counts = np.bincount(x, minlength=7)
    assert counts.min() > 10_000 / 7 * 0.8


def test_integers_bound_one():
    assert np.array_equal(DeterministicRng(0).integers(1, 5), np.zeros(5, dtype=np.int64))


def test_integers_rejects_bad_bound():
    with pytest.raises(ValueError):
        DeterministicRng(0).integers(0, 3)


def test_permutation_is_permutation():
    p = DeterministicRng(5).permutation(100)
    assert sorted(p.tolist()) == list(range(100))
    assert np.array_equal(p, DeterministicRng(5).permutation(100))


def test_derive_seed_frozen_values():
    assert derive_seed(0) == 12928013284453956020
    assert derive_seed(1, 2, 3) == 5428250122765282555
    assert derive_seed("target", 7) == 17338028336320185791


def test_derive_seed_order_and_type_sensitivity():
    assert derive_seed(1, 2) != derive_seed(2, 1)
    assert derive_seed("ab", 1) != derive_seed("ab1")
    assert derive_seed("a", "b") != derive_seed("ab")
    assert derive_seed(1) != derive_seed("1")


def test_derive_seed_rejects_other_types():
    with pytest.raises(TypeError):
        derive_seed(1.5)


def test_derive_seed_spreads_trials():
    seeds = {derive_seed(123, 4, 30, 8, 2, t) for t in range(50)}
    assert len(seeds) == 50
