import math

import numpy as np
import pytest

from conftest import random_point
from shadowlab.entropy import word_counts
from shadowlab.errors import (ConfigError, EmptySystem, HorizonExhausted, InvalidAlphabet,
                              InvalidHomeo, InvalidPoint)
from shadowlab.symbolic import SymbolicPoint, all_words, first_difference
from shadowlab.systems import (GridMap, GridMapSpec, SftSpec, make_full_shift, make_interval_homeo,
                               make_sft, orbit_segment, system_from_descriptor)


def test_full_shift_metric_examples(full2):
    x = SymbolicPoint.periodic("1", "0")
    y = SymbolicPoint.periodic("0", "010")
    assert full2.metric(x, y) == 0.25
    assert full2.metric(x, x) == 0.0
    s3 = make_full_shift(3)
    z = SymbolicPoint.periodic("012")
    assert s3.metric(z, s3.step(z)) == 1.0


def test_full_shift_rejects_small_alphabet():
    with pytest.raises(InvalidAlphabet):
        make_full_shift(1)


def test_sft_membership(golden):
    assert golden.contains(SymbolicPoint.periodic("10"))
    assert not golden.contains(SymbolicPoint.finite("0110"))
    assert word_counts(golden, 4)[3] == 8
    brute = sum(1 for w in all_words(2, 4) if "11" not in "".join(map(str, w)))
    assert brute == 8


def test_empty_sft():
    with pytest.raises(EmptySystem):
        make_sft(SftSpec(2, ("0", "1")))


def test_long_forbidden_words_are_recoded():
    s = make_sft(SftSpec(2, ("111",)))
    assert s.block == 3
    assert s.contains(SymbolicPoint.periodic("110"))
    assert not s.contains(SymbolicPoint.periodic("1110"))


def test_interval_orbits(sqrt_map):
    orb = orbit_segment(sqrt_map, 0.25, 4)
    assert orb[:3] == [0.25, 0.5, math.sqrt(0.5)]
    assert all(b > a for a, b in zip(orb, orb[1:]))
    assert orbit_segment(sqrt_map, 0.0, 5) == [0.0] * 5
    sq = make_interval_homeo("square")
    assert sq.iterate(0.9, 20) < 1e-6


def test_interval_homeo_validation():
    with pytest.raises(InvalidHomeo):
        make_interval_homeo("tent")
    with pytest.raises(InvalidHomeo):
        make_interval_homeo("nope")


def test_orbit_segment_examples(full2, golden):
    zero = SymbolicPoint.periodic("0")
    assert orbit_segment(full2, zero, 5) == [zero] * 5
    x = SymbolicPoint.periodic("01")
    assert orbit_segment(full2, x, 2) == [x, SymbolicPoint.periodic("10")]
    orb = orbit_segment(golden, SymbolicPoint.periodic("10"), 4)
    assert [p[0] for p in orb] == [1, 0, 1, 0]
    assert all(golden.contains(p) for p in orb)


def test_orbit_segment_rejects_foreign_points(golden):
    with pytest.raises(InvalidPoint):
        orbit_segment(golden, SymbolicPoint.periodic("1"), 3)


def test_finite_points_fail_loudly():
    x = SymbolicPoint.finite("0101")
    with pytest.raises(HorizonExhausted):
        x.coords(5)


@pytest.mark.parametrize("k", [2, 3])
def test_metric_axioms_and_lipschitz(k, rng):
    s = make_full_shift(k)
    for _ in range(2000):
        x, y, z = (random_point(rng, k) for _ in range(3))
        dxy = s.metric(x, y)
        assert dxy == s.metric(y, x)
        assert (dxy == 0) == (first_difference(x, y) is None)
        assert dxy <= s.metric(x, z) + s.metric(z, y)
        if x.horizon > 1 and y.horizon > 1:
            assert s.metric(s.step(x), s.step(y)) <= 2 * dxy


def test_interval_metric_axioms(sqrt_map, rng):
    pts = rng.random((10000, 3))
    for a, b, c in pts[:2000]:
        assert sqrt_map.metric(a, b) == sqrt_map.metric(b, a)
        assert sqrt_map.metric(a, b) <= sqrt_map.metric(a, c) + sqrt_map.metric(c, b) + 1e-12


def test_sft_shift_invariance(golden, rng):
    for _ in range(500):
        w = rng.integers(0, 2, size=40)
        x = SymbolicPoint.finite(w)
        if golden.contains(x):
            assert golden.contains(golden.step(x))


def test_descriptors_round_trip():
    for desc in ({"kind": "full_shift", "k": 3}, {"kind": "sft", "k": 2, "forbidden": ["11"]},
                 {"kind": "interval_homeo", "formula": "sqrt"}):
        assert system_from_descriptor(desc).describe() == desc
    with pytest.raises(ConfigError):
        system_from_descriptor({"kind": "mystery"})


def test_grid_map_translation():
    f = GridMap(4, GridMapSpec("translate", {"dx": 0.3}))
    np.testing.assert_allclose(f.step(np.array([0.8, 0.2])), [0.1, 0.2])
    assert f.lipschitz == 1.0
