import math

import numpy as np
import pytest

from conftest import random_point
from shadowlab.entropy import (BowenBall, CoverSum, bernoulli_sampler, bowen_sum_upper, dirac_sampler,
                               dn_distance, is_separated, is_spanning, katok_entropy_estimate,
                               moran_lower_certificate, separated_set, spanning_set, subshift_entropy,
                               tail_cover_sum, uniform_sampler, word_counts)
from shadowlab.errors import EmptyPool, NotACover, SamplerError, ShapeError
from shadowlab.symbolic import SymbolicPoint, all_words
from shadowlab.systems import make_full_shift

# sum_{s >= 100} s e^{-s/10}, evaluated independently by direct summation (frozen)
TAIL_T01_S100 = 0.05224396476104757


def test_dn_distance_examples(full2, rng):
    x = SymbolicPoint.periodic("0")
    y = SymbolicPoint.periodic("0", "0001")
    assert dn_distance(full2, x, x, 5) == 0.0
    assert dn_distance(full2, x, y, 1) == 2.0 ** -3
    assert dn_distance(full2, x, y, 4) == 1.0
    for _ in range(200):
        a, b = random_point(rng), random_point(rng)
        assert dn_distance(full2, a, b, 1) == full2.metric(a, b)


def test_separated_examples(full2, golden):
    n = 8
    pool = [SymbolicPoint(w, "0") for w in all_words(2, n)]
    sep = separated_set(full2, pool, n, 0.5)
    assert len(sep) == 2 ** n
    assert is_separated(full2, sep.points, n, 0.5)
    assert len(separated_set(full2, pool[:20], 1, 1.5)) == 1
    gpool = [SymbolicPoint(w, "0") for w in all_words(2, 6) if golden.word_admissible(w)]
    assert len(separated_set(golden, gpool, 4, 0.5)) == 8


def test_separated_needs_pool(full2):
    with pytest.raises(EmptyPool):
        separated_set(full2, [], 3, 0.5)
    with pytest.raises(EmptyPool):
        spanning_set(full2, [], 3, 0.5)


def test_spanning_examples(full2):
    sample = [SymbolicPoint(w, "0") for w in all_words(2, 3)]
    assert len(spanning_set(full2, sample[:1], 3, 0.5)) == 1
    cover = spanning_set(full2, sample, 3, 0.5)
    assert len(cover) == 8
    assert is_spanning(full2, cover, sample, 3, 0.5)
    # closed balls of radius 1 are the whole space
    assert len(spanning_set(full2, sample, 3, 1.0)) == 1
    r, s, r2 = (len(spanning_set(full2, sample, 3, 0.5)), len(separated_set(full2, sample, 3, 0.5)),
                len(spanning_set(full2, sample, 3, 0.25)))
    assert r <= s <= r2


def test_sandwich_on_interval(sqrt_map, rng):
    for n, eps in [(1, 0.1), (2, 0.1), (3, 0.05)]:
        pool = list(rng.random(40))
        r = len(spanning_set(sqrt_map, pool, n, eps, mode="exhaustive"))
        s = len(separated_set(sqrt_map, pool, n, eps, mode="exhaustive"))
        r2 = len(spanning_set(sqrt_map, pool, n, eps / 2, mode="exhaustive"))
        assert r <= s <= r2


@pytest.mark.parametrize("k", [2, 3, 5])
def test_full_shift_entropy_exact(k):
    table = subshift_entropy(make_full_shift(k), 40)
    assert max(abs(e - math.log(k)) for e in table.estimates) < 1e-12


def test_golden_entropy(golden):
    counts = word_counts(golden, 32)
    fib = [1, 2]
    while len(fib) < 34:
        fib.append(fib[-1] + fib[-2])
    assert counts == fib[1:33]
    table = subshift_entropy(golden, 32)
    assert abs(table.value - math.log((1 + math.sqrt(5)) / 2)) < 1e-2
    for m in range(1, 16):
        for n in range(1, 16):
            assert counts[m + n - 1] <= counts[m - 1] * counts[n - 1]


def test_katok_estimates(full2):
    est = katok_entropy_estimate(full2, bernoulli_sampler(2), 10, 0.5, 0.1, 10 ** 4, seed=0)
    assert 0.55 <= est <= 0.70
    assert est <= math.log(2) + 0.05
    zero = SymbolicPoint.periodic("0")
    assert katok_entropy_estimate(full2, dirac_sampler(zero), 10, 0.5, 0.1, 100, seed=0) == 0.0
    assert katok_entropy_estimate(full2, bernoulli_sampler(2), 10, 0.5, 1.0, 100, seed=0) == 0.0


def test_katok_sampler_errors(full2):
    def broken(rng, count):
        raise RuntimeError("boom")
    with pytest.raises(SamplerError):
        katok_entropy_estimate(full2, broken, 5, 0.5, 0.1, 10, seed=0)
    with pytest.raises(SamplerError):
        katok_entropy_estimate(full2, uniform_sampler(), 5, 0.5, 0.1, 10, seed=0)


def test_cover_sums(full2):
    x = SymbolicPoint.periodic("0")
    cover = CoverSum([BowenBall(x, 10, 0.5)], math.log(2) / 10, 10, [x])
    assert bowen_sum_upper(full2, cover) == pytest.approx(0.5)
    assert bowen_sum_upper(full2, CoverSum([], 1.0, 1, [])) == 0.0
    with pytest.raises(NotACover):
        bowen_sum_upper(full2, CoverSum([BowenBall(x, 10, 0.5)], 1.0, 10, [SymbolicPoint.periodic("1")]))
    assert tail_cover_sum(0.1, 100) == pytest.approx(TAIL_T01_S100, abs=1e-12)
    direct = math.fsum(s * math.exp(-0.1 * s) for s in range(100, 100 + 10 ** 5))
    assert abs(tail_cover_sum(0.1, 100) - direct) < 1e-12


def test_moran_certificate():
    M = [3, 7, 12, 20]
    ok, margin = moran_lower_certificate([2 ** m for m in M], M, 0.5)
    assert ok and margin == pytest.approx(3 * (math.log(2) - 0.5))
    assert not moran_lower_certificate([1] * 4, M, 0.1)[0]
    with pytest.raises(ShapeError):
        moran_lower_certificate([1, 2], M, 0.1)
