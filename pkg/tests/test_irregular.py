import math
from types import SimpleNamespace

import numpy as np
import pytest

from shadowlab.errors import DepthTooLarge, ToleranceTooTight
from shadowlab.irregular import (MU, NU, IrregularConfig, assemble_pseudo_orbit, build_irregular_point,
                                 build_schedule, choose_labels, concatenation, moran_certificate,
                                 moran_set_count, schedule_sums, select_segments)
from shadowlab.measures import empirical_measure, weak_star_distance
from shadowlab.shadowing import is_pseudo_orbit
from shadowlab.symbolic import SymbolicPoint

BERNOULLI = {"kind": "bernoulli"}
ZERO = {"kind": "periodic", "word": "0"}


def test_schedule_sums():
    S, N = schedule_sums(2, 5)
    assert S[1:] == [1, 3, 9, 27, 81]
    assert N == [1, 2, 6, 18, 54]
    for lam in (2, 3, 4):
        S, N = schedule_sums(lam, 6)
        assert all(S[n] == (lam + 1) ** (n - 1) for n in range(1, 7))
        assert all(N[n - 1] == lam * (lam + 1) ** (n - 2) for n in range(2, 7))


def test_block_tags():
    sched = build_schedule(2, 2, 3, 12)
    tags = ["mu" if x == MU else "nu" for x in sched.tags[:9]]
    assert tags == ["mu"] * 5 + ["nu", "mu", "mu", "nu"]
    assert sched.omega(6) == "nu"
    assert [sched.omega(m) for m in (1, 2, 3)] == ["mu"] * 3
    assert sched.M[9] == 9 * 12


def test_schedule_limits():
    with pytest.raises(DepthTooLarge):
        build_schedule(4, 2, 40, 12)
    with pytest.raises(ValueError):
        build_schedule(1, 2, 3, 12)


def test_segment_bank(full2):
    bank = select_segments(full2, BERNOULLI, ZERO, 12, 0.15, 8)
    assert len(bank.gamma_mu) >= 400
    assert bank.z_nu.tolist() == [0] * 12
    z = SymbolicPoint(bank.z_nu, "0")
    assert weak_star_distance(empirical_measure(full2, z, 12), bank.nu.measure, 20).value == 0.0
    with pytest.raises(ToleranceTooTight):
        select_segments(full2, BERNOULLI, ZERO, 12, 1e-9, 8)


def test_assembly_is_pseudo_orbit(full2):
    bank = select_segments(full2, BERNOULLI, ZERO, 12, 0.15, 8)
    sched = build_schedule(2, 2, 3, 12, bank.connector_lengths())
    labels = choose_labels(sched, bank, seed=0)
    one = assemble_pseudo_orbit(sched, bank, labels, blocks=1)
    assert one.point.coords(12).tolist() == bank.gamma_mu[labels[0]].tolist()
    full = assemble_pseudo_orbit(sched, bank, labels)
    rep = is_pseudo_orbit(full2, full.pseudo_orbit.points, full.pseudo_orbit.delta)
    assert rep.ok
    seq = concatenation(sched, bank, labels)
    assert len(seq) == sched.M[-1]


def test_irregular_point_gap(full2):
    res = build_irregular_point(full2, IrregularConfig(lam=4, t=2, L=12, depth=5, seed=0))
    assert res.verdict == "irregular-candidate"
    odd = [a for (k, _), a in zip(res.checkpoints, res.averages) if k % 2]
    even = [a for (k, _), a in zip(res.checkpoints, res.averages) if k % 2 == 0]
    assert all(abs(a - 0.5) < 0.05 for a in odd)
    # an even checkpoint carries the previous pure-mu stretch: 1/(lam+1) of its length
    mixed = 0.5 * (1 / 5 + (4 / 5) * (2 / 3))
    assert all(abs(a - mixed) < 0.02 for a in even)
    assert res.gap >= 0.1
    assert res.certificate.epsilon < res.zeta
    assert abs(res.schedule.realized_beta() - 2 / 3) < 1e-12


def test_irregular_degenerate_cases(full2):
    assert build_irregular_point(full2, IrregularConfig(depth=1)).verdict == "inconclusive"
    res = build_irregular_point(full2, IrregularConfig(depth=4, nu=BERNOULLI))
    assert res.gap < 0.05
    assert res.verdict != "irregular-candidate"


def fake_bank(mu_size, nu_size=1):
    return SimpleNamespace(gamma_mu=[None] * mu_size, gamma_nu=[None] * nu_size,
                           bank=lambda tag: [None] * (mu_size if tag == MU else nu_size))


def test_moran_counts():
    sched = build_schedule(2, 2, 3, 12)
    tree = moran_set_count(sched, fake_bank(400), 3)
    assert tree.counts == [400, 400 ** 2, 400 ** 3]
    assert tree.h_lower == pytest.approx(math.log(400) / 12)
    assert moran_set_count(sched, fake_bank(1), 9).h_lower == 0.0
    ok, _ = moran_certificate(tree, 0.49)
    assert ok and not moran_certificate(tree, 0.5)[0]


def test_moran_asymptotic_exponent():
    sched = build_schedule(2, 2, 4, 12)
    tree = moran_set_count(sched, fake_bank(400), 30)
    assert len(tree.counts) == 30
    assert all(math.log(c) / m >= tree.asymptotic - 1e-12 for c, m in zip(tree.counts, tree.M))


def test_moran_on_construction(full2):
    res = build_irregular_point(full2, IrregularConfig(lam=4, t=2, L=12, depth=5, seed=7))
    tree = moran_set_count(res.schedule, res.bank, 20)
    assert moran_certificate(tree, 0.9 * (2 / 3) * math.log(2))[0]
