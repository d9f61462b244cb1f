import math

import numpy as np
import pytest

from shadowlab.constructions import (extract_horseshoe, generate_samples, minimal_subset_check,
                                     nested_measures, proximal_entropy_check, proximal_subshift,
                                     semiconjugacy_check, separation_check, typical_words)
from shadowlab.errors import EntropyDeficit, InvalidPoint, InvalidSlack
from shadowlab.measures import MarkovMeasure
from shadowlab.symbolic import SymbolicPoint


@pytest.fixture(scope="module")
def horseshoe():
    from shadowlab.systems import make_full_shift
    full2 = make_full_shift(2)
    return extract_horseshoe(full2, MarkovMeasure.bernoulli(full2), 0.3, n=10)


def test_horseshoe_full_shift(horseshoe):
    hs = horseshoe
    assert hs.k == 10 and len(hs.connector) == 0
    assert hs.r >= 2 ** 9
    assert hs.rate == pytest.approx(math.log(hs.r - 1) / 10) and hs.rate >= 0.6


def test_typical_word_count(full2):
    words = typical_words(full2, MarkovMeasure.bernoulli(full2), 10, 0.2)
    # |#ones - 5| <= 2: C(10,3) + ... + C(10,7)
    assert len(words) == sum(math.comb(10, j) for j in range(3, 8)) == 912


def test_horseshoe_codec(horseshoe):
    xi = np.array([5, 0, 17, 300, 2])
    x = horseshoe.encode(xi)
    assert horseshoe.decode(x, 5).tolist() == xi.tolist()
    assert semiconjugacy_check(horseshoe, trials=200)["ok"]
    assert separation_check(horseshoe, pairs=100)["ok"]
    with pytest.raises(InvalidPoint):
        horseshoe.encode([horseshoe.r])
    with pytest.raises(InvalidPoint):
        horseshoe.decode(SymbolicPoint.periodic("1"), 1)


def test_horseshoe_entropy_deficit(full2):
    with pytest.raises(EntropyDeficit):
        extract_horseshoe(full2, MarkovMeasure.bernoulli(full2), 0.7)
    with pytest.raises(EntropyDeficit):
        extract_horseshoe(full2, MarkovMeasure.bernoulli(full2), 0.6, eta=0.05)


def test_horseshoe_golden(golden):
    hs = extract_horseshoe(golden, MarkovMeasure.parry(golden), 0.3, eta=0.02, n=14)
    assert hs.rate > 0.3
    assert all(golden.word_admissible(hs.block(i)) for i in range(0, hs.r, 37))
    assert semiconjugacy_check(hs, trials=100)["ok"]


def test_proximal_parameters():
    spec = proximal_subshift(2, 0.5)
    assert spec.s[:5] == [4, 32, 160, 640, 1920]
    assert spec.k[:5] == [1, 2, 3, 4, 5]
    inv = spec.check_invariants(10)
    assert inv["ok"] and max(inv["partial_sums"]) < 0.5
    with pytest.raises(InvalidSlack):
        proximal_subshift(2, 0.0)
    with pytest.raises(InvalidSlack):
        proximal_subshift(2, -1.0)


def test_proximal_membership():
    spec = proximal_subshift(2, 0.5)
    assert spec.admissible([0] * 50)
    assert not spec.admissible([1] * 7)
    # zeros every 4 satisfy level 1 but no 00 block ever appears
    assert not spec.admissible([1, 1, 1, 0] * 20)
    for row in generate_samples(spec, 20, 100, seed=1):
        assert spec.admissible(row)


def test_proximal_entropy():
    spec = proximal_subshift(2, 0.5)
    b = proximal_entropy_check(spec, 1)
    assert (b.length, b.free, b.count) == (4, 3, 8)
    assert b.equality and b.bound == pytest.approx(0.75 * math.log(2))
    for N in (2, 3, 4):
        b = proximal_entropy_check(spec, N)
        assert b.holds and b.bound < math.log(3)
    thin = proximal_entropy_check(proximal_subshift(2, 1e-3), 1)
    assert thin.bound == pytest.approx(math.log(2), rel=1e-3)


def test_minimal_subset():
    spec = proximal_subshift(2, 0.5)
    horizon = 2 * spec.s[2]
    assert minimal_subset_check(spec, np.zeros((1, horizon), dtype=int))
    assert minimal_subset_check(spec, generate_samples(spec, 200, horizon, seed=2))
    bad = np.array([[1, 1, 1, 0] * (horizon // 4)])
    assert not minimal_subset_check(spec, bad)
    with pytest.raises(ValueError):
        minimal_subset_check(spec, np.zeros((1, 10), dtype=int))


def test_nested_measures(horseshoe):
    out = nested_measures(horseshoe, proximal_subshift(2, 0.5), length=640)
    assert out["distinct"] and out["nested_support"]
    assert out["fixed_point"] == "quasi-regular-candidate"
