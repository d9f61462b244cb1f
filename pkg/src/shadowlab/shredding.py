"""Shredding a torus map into finitely many trapping regions.

The torus ``[0,1)^2`` is cut into ``g^2`` square cells ``R_i`` with open
cores ``R_i^delta``. A continuous map ``f`` induces ``tau: I -> I`` by where
cell centres land. Radial contractions ``h_i`` squeeze each core towards a
point ``p_i`` whose image sits deep inside the core of ``R_{tau(i)}``, so
``g = f o h`` maps every closed core into the core of the next cell. The
union of cores over a ``tau``-basin is then a trapping region whose orbits
follow a periodic cycle of cores.

Geometry is exact where it matters: core areas and diameters are compared
as fractions. Trapping inside a cell is certified by sampling plus the
declared Lipschitz budget of ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (CannotCertify, ContinuityBudgetExceeded, EmptyCore, InvalidSequence,
                     RangeError)
from .systems import GridMap, GridMapSpec

TIE = 1e-9
CANDIDATES = 17


def _frac(v) -> Fraction:
    """Exact fraction; floats are read through their shortest decimal form."""
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


# ---------------------------------------------------------------------------
# cells


@dataclass
class CellDecomposition:
    """``g x g`` square cells; cell ``i = ix * g + iy`` is ``[ix/g, (ix+1)/g] x [iy/g, (iy+1)/g]``."""

    g: int
    delta: Fraction

    @property
    def size(self) -> int:
        return self.g * self.g

    @property
    def side(self) -> Fraction:
        return Fraction(1, self.g)

    @property
    def core_side(self) -> Fraction:
        return Fraction(1, self.g) - 2 * self.delta

    @property
    def coverage(self) -> Fraction:
        """Exact Lebesgue measure of the union of cores."""
        return self.size * self.core_side ** 2

    @property
    def core_diameter_sq(self) -> Fraction:
        return 2 * self.core_side ** 2

    @property
    def cell_diameter(self) -> float:
        return math.sqrt(2) / self.g

    def lower(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        return np.stack([idx // self.g, idx % self.g], axis=-1) / self.g

    def centers(self) -> np.ndarray:
        return self.lower(np.arange(self.size)) + 0.5 / self.g

    def locate(self, pts) -> np.ndarray:
        ij = np.clip(np.floor(np.asarray(pts, dtype=float) * self.g).astype(int), 0, self.g - 1)
        return ij[..., 0] * self.g + ij[..., 1]

    def core_margin(self, pts, idx) -> np.ndarray:
        """Signed distance from ``pts`` to the complement of the core of cell ``idx`` (positive inside).

        Points are compared in wrapped coordinates relative to the cell centre.
        """
        c = self.lower(idx) + 0.5 / self.g
        d = np.asarray(pts, dtype=float) - c
        d = d - np.floor(d + 0.5)
        half = float(self.core_side) / 2
        return half - np.max(np.abs(d), axis=-1)

    def as_dict(self) -> dict:
        return {"g": self.g, "delta": str(self.delta), "cells": self.size,
                "core_side": str(self.core_side), "coverage": str(self.coverage),
                "coverage_float": float(self.coverage)}


def decompose_grid(g: int, delta) -> CellDecomposition:
    if g < 2:
        raise ValueError(f"grid size must be >= 2, got {g}")
    delta = _frac(delta)
    if delta <= 0 or delta >= Fraction(1, 2 * g):
        raise EmptyCore(f"delta={delta} must lie in (0, 1/(2g)) = (0, {Fraction(1, 2 * g)})")
    return CellDecomposition(g, delta)


# ---------------------------------------------------------------------------
# tau


@dataclass
class TauStructure:
    tau: np.ndarray
    cycles: list          # each cycle listed from its smallest index along tau
    basin: np.ndarray     # cycle id per cell
    steps: np.ndarray     # iterations of tau needed to enter the cycle
    points: np.ndarray    # the chosen p_i
    margins: np.ndarray   # core margin of f(p_i) in the target cell

    def region(self, j: int) -> list[int]:
        """Cells whose cores make up ``U_j``."""
        return [int(i) for i in np.flatnonzero(self.basin == j)]

    def cycle_sets(self, j: int) -> list[int]:
        """Cells ``tau^s(z_j)`` for ``s = 1..k_j``, whose cores are ``W_j^s``."""
        z = self.cycles[j][0]
        out = []
        cur = z
        for _ in range(len(self.cycles[j])):
            cur = int(self.tau[cur])
            out.append(cur)
        return out

    def as_dict(self) -> dict:
        return {"tau": [int(t) for t in self.tau], "cycles": self.cycles,
                "basin": [int(b) for b in self.basin], "max_steps": int(self.steps.max()),
                "points": self.points.tolist(), "margins": [float(m) for m in self.margins]}


def _target_cell(cells: CellDecomposition, y: np.ndarray) -> int:
    """Cell containing ``y``; within ``TIE`` of a boundary the smallest adjacent index wins."""
    g = cells.g
    scaled = y * g
    options = []
    for a in range(2):
        v = scaled[a]
        base = int(math.floor(v)) % g
        near = round(v)
        if abs(v - near) < TIE:
            options.append(sorted({near % g, (near - 1) % g}))
        else:
            options.append([base])
    return min(ix * g + iy for ix in options[0] for iy in options[1])


def functional_graph(tau: np.ndarray) -> tuple[list, np.ndarray, np.ndarray]:
    """Cycles, cycle id and entry time of every node of a self-map of ``range(n)``."""
    n = len(tau)
    on_cycle = np.zeros(n, dtype=bool)
    color = np.zeros(n, dtype=np.int8)
    for s in range(n):
        if color[s]:
            continue
        path = []
        cur = s
        while color[cur] == 0:
            color[cur] = 1
            path.append(cur)
            cur = int(tau[cur])
        if color[cur] == 1:
            on_cycle[path[path.index(cur):]] = True
        for p in path:
            color[p] = 2
    cycles = []
    basin = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        if on_cycle[s] and basin[s] < 0:
            cyc = [s]
            cur = int(tau[s])
            while cur != s:
                cyc.append(cur)
                cur = int(tau[cur])
            for c in cyc:
                basin[c] = len(cycles)
            cycles.append(cyc)
    steps = np.zeros(n, dtype=np.int64)
    for s in range(n):
        cur, k = s, 0
        while not on_cycle[cur]:
            cur = int(tau[cur])
            k += 1
        basin[s] = basin[cur]
        steps[s] = k
    return cycles, basin, steps


def _candidates(cells: CellDecomposition, i: int) -> np.ndarray:
    """Candidate ``p_i``: a ``17 x 17`` lattice inside the core, centre first."""
    lo = cells.lower(i) + float(cells.delta)
    side = float(cells.core_side)
    t = (np.arange(CANDIDATES) + 1) / (CANDIDATES + 1)
    grid = np.stack(np.meshgrid(t, t, indexing="ij"), axis=-1).reshape(-1, 2)
    centre = CANDIDATES * CANDIDATES // 2
    order = np.r_[centre, np.delete(np.arange(len(grid)), centre)]
    return lo + side * grid[order]


def induce_tau(system: GridMap, cells: CellDecomposition) -> TauStructure:
    """``tau(i)`` is the cell holding ``f`` of the centre of ``R_i``.

    ``p_i`` is then the lattice point of the core of ``R_i`` whose image lies
    deepest inside the core of ``R_{tau(i)}``.
    """
    centres = cells.centers()
    images = np.asarray(system.step(centres), dtype=float)
    if not np.all(np.isfinite(images)) or np.any(images < 0) or np.any(images > 1):
        bad = int(np.flatnonzero(~np.all(np.isfinite(images) & (images >= 0) & (images <= 1), axis=1))[0])
        raise RangeError(f"f(p_{bad}) = {images[bad].tolist()} lies outside [0,1]^2")
    tau = np.array([_target_cell(cells, y) for y in images], dtype=np.int64)
    points = np.zeros((cells.size, 2))
    margins = np.zeros(cells.size)
    for i in range(cells.size):
        cand = _candidates(cells, i)
        marg = cells.core_margin(np.asarray(system.step(cand), dtype=float), tau[i])
        best = int(np.argmax(marg))
        points[i] = cand[best]
        margins[i] = marg[best]
    cycles, basin, steps = functional_graph(tau)
    return TauStructure(tau, cycles, basin, steps, points, margins)


# ---------------------------------------------------------------------------
# radial contractions


@dataclass
class RadialHomeo:
    """``h_i``: slide each point of ``R_i`` along the ray from ``p`` so its relative radius ``a`` becomes ``a^beta``."""

    lo: np.ndarray
    hi: np.ndarray
    p: np.ndarray
    beta: float

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.beta < 1:
            raise ValueError("beta must be >= 1")
        if np.any(self.p <= self.lo) or np.any(self.p >= self.hi):
            raise ValueError("p must lie in the open cell")

    def inside(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lo) & (x <= self.hi), axis=-1)

    def radius(self, x) -> np.ndarray:
        """Relative radial position ``d(x, p) / d(p, q^x)``: 0 at ``p``, 1 on the boundary."""
        d = np.asarray(x, dtype=float) - self.p
        reach = np.where(d > 0, self.hi - self.p, self.p - self.lo)
        return np.max(np.abs(d) / reach, axis=-1)

    def _power(self, x, e: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a = self.radius(x)
        scale = np.where(a > 0, np.power(np.where(a > 0, a, 1.0), e - 1), 0.0)
        out = self.p + scale[..., None] * (x - self.p)
        return np.where(self.inside(x)[..., None], out, x)

    def __call__(self, x) -> np.ndarray:
        return self._power(x, self.beta)

    def inverse(self, x) -> np.ndarray:
        return self._power(x, 1.0 / self.beta)


def radial_homeo(lo, hi, p, beta: float) -> RadialHomeo:
    return RadialHomeo(lo, hi, p, beta)


@dataclass
class PerturbedMap:
    """``g = f o h`` with per-cell certificates."""

    system: GridMap
    cells: CellDecomposition
    tau: TauStructure
    beta: float
    delta_prime: float
    margins: np.ndarray         # min over sampled closed-core points of the g-image core margin
    ball_margins: np.ndarray    # min over sampled ball points of the f-image core margin
    spacing: float
    assumptions: dict = field(default_factory=dict)

    def homeo(self, i: int) -> RadialHomeo:
        lo = self.cells.lower(i)
        return RadialHomeo(lo, lo + 1.0 / self.cells.g, self.tau.points[i], self.beta)

    def _apply(self, x, e: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, 2)
        idx = self.cells.locate(flat)
        lo = self.cells.lower(idx)
        hi = lo + 1.0 / self.cells.g
        p = self.tau.points[idx]
        d = flat - p
        reach = np.where(d > 0, hi - p, p - lo)
        a = np.max(np.abs(d) / reach, axis=-1)
        scale = np.where(a > 0, np.power(np.where(a > 0, a, 1.0), e - 1), 0.0)
        return (p + scale[:, None] * d).reshape(x.shape)

    def h(self, x) -> np.ndarray:
        return self._apply(x, self.beta)

    def h_inverse(self, x) -> np.ndarray:
        return self._apply(x, 1.0 / self.beta)

    def step(self, x) -> np.ndarray:
        return np.asarray(self.system.step(self.h(x)), dtype=float)

    def as_system(self) -> GridMap:
        spec = GridMapSpec(f"perturbed:{self.system.spec.name}", dict(self.system.spec.params))
        return GridMap(self.cells.g, spec, func=self.step, lipschitz=self.system.lipschitz)

    def as_dict(self) -> dict:
        return {"beta": self.beta, "delta_prime": self.delta_prime, "spacing": self.spacing,
                "min_margin": float(self.margins.min()), "min_ball_margin": float(self.ball_margins.min()),
                "margins": [float(m) for m in self.margins],
                "ball_margins": [float(m) for m in self.ball_margins],
                "assumptions": self.assumptions}


def compose_homeos(homeos: Sequence[RadialHomeo], x, order: Sequence[int] | None = None) -> np.ndarray:
    """Apply every ``h_i`` in the given order."""
    out = np.asarray(x, dtype=float)
    for i in (range(len(homeos)) if order is None else order):
        out = homeos[i](out)
    return out


def _ball_samples(center: np.ndarray, radius: float, rings: int = 8, per_ring: int = 64) -> tuple[np.ndarray, float]:
    """Points of the closed ball on concentric rings, plus the largest gap to any ball point."""
    ang = 2 * np.pi * np.arange(per_ring) / per_ring
    radii = radius * np.arange(1, rings + 1) / rings
    pts = [center[None, :]]
    for r in radii:
        pts.append(center + r * np.stack([np.cos(ang), np.sin(ang)], axis=1))
    gap = max(radius / rings, radius * 2 * np.sin(np.pi / per_ring))
    return np.vstack(pts), float(gap)


def _core_boundary(cells: CellDecomposition, i: int, per_cell: int) -> np.ndarray:
    lo = cells.lower(i) + float(cells.delta)
    side = float(cells.core_side)
    t = np.arange(per_cell // 4) / (per_cell // 4)
    edges = [np.stack([t, np.zeros_like(t)], 1), np.stack([np.ones_like(t), t], 1),
             np.stack([1 - t, np.ones_like(t)], 1), np.stack([np.zeros_like(t), 1 - t], 1)]
    return lo + side * np.vstack(edges)


def perturb(system: GridMap, cells: CellDecomposition, tau: TauStructure, beta: float = 2.0,
            delta_prime: float | None = None, beta_max: float = 4096.0, per_cell: int = 1000) -> PerturbedMap:
    """Build ``g = f o h`` so every closed core lands inside the core of its ``tau``-image.

    ``delta_prime`` defaults to half the smallest safe radius allowed by the
    Lipschitz budget. Each ball ``B(p_i, delta_prime)`` is checked by sampling:
    every image must stay inside the target core by more than ``lipschitz``
    times the sample spacing. ``beta`` doubles until ``h`` moves the closed core
    into the ball.
    """
    lip = float(system.lipschitz)
    half = float(cells.core_side) / 2
    if delta_prime is None:
        safe = np.min(tau.margins) / lip if lip > 0 else half
        delta_prime = float(min(safe / 2, half / 2))
    if delta_prime <= 0:
        raise ContinuityBudgetExceeded("no positive radius keeps f(B(p_i)) inside the target cores")
    ball_margins = np.zeros(cells.size)
    spacing = 0.0
    for i in range(cells.size):
        pts, spacing = _ball_samples(tau.points[i], delta_prime)
        ball_margins[i] = cells.core_margin(np.asarray(system.step(pts), dtype=float), tau.tau[i]).min()
    budget = lip * spacing
    if np.any(ball_margins <= budget):
        i = int(np.argmin(ball_margins - budget))
        raise ContinuityBudgetExceeded(
            f"cell {i}: sampled margin {ball_margins[i]:.3g} does not exceed the Lipschitz budget {budget:.3g}")
    # the closed core is a square, so its largest relative radius is attained at a corner
    g = cells.g
    worst = 0.0
    reach = 0.0
    for i in range(cells.size):
        lo = cells.lower(i)
        hm = RadialHomeo(lo, lo + 1.0 / g, tau.points[i], 1.0)
        d0, d1 = float(cells.delta), float(cells.delta + cells.core_side)
        corners = lo + np.array([[d0, d0], [d0, d1], [d1, d0], [d1, d1]])
        worst = max(worst, float(hm.radius(corners).max()))
        reach = max(reach, float(np.max(np.linalg.norm(np.array(
            [[lo[0], lo[1]], [lo[0], lo[1] + 1 / g], [lo[0] + 1 / g, lo[1]], [lo[0] + 1 / g, lo[1] + 1 / g]])
            - tau.points[i], axis=1))))
    b = float(beta)
    while worst ** b * reach >= delta_prime:
        b *= 2
        if b > beta_max:
            raise CannotCertify(f"beta would exceed beta_max={beta_max} to fit cores into radius {delta_prime}")
    pm = PerturbedMap(system, cells, tau, b, float(delta_prime), np.zeros(cells.size), ball_margins, spacing,
                      {"lipschitz": lip, "modulus_budget": budget,
                       "core_radius_bound": worst ** b * reach,
                       "samples_per_cell": per_cell,
                       "note": "trapping holds if f is lipschitz-bounded as declared"})
    for i in range(cells.size):
        pts = _core_boundary(cells, i, per_cell)
        pm.margins[i] = cells.core_margin(pm.step(pts), tau.tau[i]).min()
    return pm


# ---------------------------------------------------------------------------
# certificate


@dataclass
class ShreddingReport:
    ok: bool
    failures: list
    trapping: dict
    coverage: Fraction
    diameter_sq: Fraction
    cycles: list
    reach_steps: int
    eps: Fraction

    def as_dict(self) -> dict:
        return {"ok": self.ok, "failures": self.failures, "trapping": self.trapping,
                "coverage": str(self.coverage), "coverage_float": float(self.coverage),
                "diameter": math.sqrt(self.diameter_sq), "diameter_sq": str(self.diameter_sq),
                "eps": str(self.eps), "cycles": self.cycles, "reach_steps": self.reach_steps}


def verify_shredding(pm: PerturbedMap, eps) -> ShreddingReport:
    """Check trapping, coverage, small cycle sets and reachability of the cycles."""
    eps = _frac(eps)
    cells, tau = pm.cells, pm.tau
    failures = []
    trapping = {}
    for j in range(len(tau.cycles)):
        region = tau.region(j)
        m = float(pm.margins[region].min())
        trapping[j] = {"cells": len(region), "min_margin": m}
        if m <= 0:
            failures.append(f"(i) region {j}: core image leaves the target core (margin {m:.3g})")
    cov = cells.coverage
    if not cov > 1 - eps:
        failures.append(f"(ii) coverage {cov} = {float(cov):.6f} is not above 1 - eps = {1 - eps}")
    diam_sq = cells.core_diameter_sq
    if not diam_sq < eps * eps:
        failures.append(f"(iii.a) core diameter {math.sqrt(diam_sq):.6f} is not below eps = {float(eps)}")
    for j, cyc in enumerate(tau.cycles):
        ws = tau.cycle_sets(j)
        bad = [w for w in ws if pm.margins[w] <= 0]
        if bad:
            failures.append(f"(iii.b) cycle {j}: cores {bad} are not mapped into the next cycle core")
    reach = int(tau.steps.max())
    if reach > cells.size:
        failures.append(f"(iii.c) some cell needs {reach} > |I| steps to reach its cycle")
    return ShreddingReport(not failures, failures, trapping, cov, diam_sq,
                           [list(c) for c in tau.cycles], reach, eps)


def shred(system: GridMap, g: int, delta, eps, beta: float = 2.0, delta_prime: float | None = None,
          beta_max: float = 4096.0) -> tuple[PerturbedMap, ShreddingReport]:
    cells = decompose_grid(g, delta)
    tau = induce_tau(system, cells)
    pm = perturb(system, cells, tau, beta, delta_prime, beta_max)
    return pm, verify_shredding(pm, eps)


def max_orbit_spread(pm: PerturbedMap, i: int, samples: int, steps: int, seed: int = 0) -> float:
    """Largest distance between ``g``-orbits of sampled pairs from the core of ``R_i``."""
    rng = np.random.default_rng(seed)
    lo = pm.cells.lower(i) + float(pm.cells.delta)
    side = float(pm.cells.core_side)
    z = lo + side * rng.random((samples, 2))
    w = lo + side * rng.random((samples, 2))
    worst = 0.0
    for _ in range(steps):
        d = z - w
        d = d - np.floor(d + 0.5)
        worst = max(worst, float(np.linalg.norm(d, axis=1).max()))
        z, w = pm.step(z), pm.step(w)
    return worst


# ---------------------------------------------------------------------------
# the set Lambda


def shredding_parameters(m: int) -> tuple[int, Fraction]:
    """Grid and margin for the run at scale ``1/m``: cell diameter below ``1/m``, coverage above ``1 - 1/m``."""
    g = 2
    while 2 * m * m >= g * g:
        g *= 2
    return g, Fraction(1, 8 * g * m)


@dataclass
class LambdaTruncation:
    xs: list      # Fraction breakpoints
    ys: list
    mask: np.ndarray
    coverage: Fraction
    pieces: list  # coverage of each V_m

    def rle(self) -> list[list[int]]:
        """Runs ``[start, length]`` of set cells in the row-major flattening of ``mask``."""
        flat = self.mask.reshape(-1).astype(np.int8)
        edges = np.flatnonzero(np.diff(np.r_[0, flat, 0]))
        return [[int(a), int(b - a)] for a, b in zip(edges[::2], edges[1::2])]

    def as_dict(self) -> dict:
        return {"coverage": str(self.coverage), "coverage_float": float(self.coverage),
                "pieces": [str(c) for c in self.pieces],
                "xs": [str(x) for x in self.xs], "ys": [str(y) for y in self.ys], "rle": self.rle()}


def _rectangles(cells: CellDecomposition) -> list[tuple]:
    g = cells.g
    d, s = cells.delta, cells.core_side
    return [(Fraction(ix, g) + d, Fraction(ix, g) + d + s, Fraction(iy, g) + d, Fraction(iy, g) + d + s)
            for ix in range(g) for iy in range(g)]


def lambda_truncation(pieces: Sequence) -> LambdaTruncation:
    """``bigcap_{n<=N} bigcup_{n<=m<=N} V_m`` for ``V_m`` given as core unions or rectangle lists."""
    rects = [_rectangles(p) if isinstance(p, CellDecomposition) else list(p) for p in pieces]
    if not rects:
        raise ValueError("need at least one piece")
    xs = sorted({Fraction(0), Fraction(1)} | {v for rs in rects for r in rs for v in r[:2]})
    ys = sorted({Fraction(0), Fraction(1)} | {v for rs in rects for r in rs for v in r[2:]})
    nx, ny = len(xs) - 1, len(ys) - 1
    member = np.zeros((len(rects), nx, ny), dtype=bool)
    xi = {x: i for i, x in enumerate(xs)}
    yi = {y: i for i, y in enumerate(ys)}
    for m, rs in enumerate(rects):
        for x0, x1, y0, y1 in rs:
            member[m, xi[x0]:xi[x1], yi[y0]:yi[y1]] = True
    N = len(rects)
    result = np.ones((nx, ny), dtype=bool)
    for n in range(N):
        result &= member[n:].any(axis=0)
    dx = [xs[i + 1] - xs[i] for i in range(nx)]
    dy = [ys[j + 1] - ys[j] for j in range(ny)]

    def area(mask):
        return sum((dx[i] * dy[j] for i, j in zip(*np.nonzero(mask))), Fraction(0))
    return LambdaTruncation(xs, ys, result, area(result), [area(member[m]) for m in range(N)])


# ---------------------------------------------------------------------------
# zero entropy of Lambda


@dataclass
class EntropyBound:
    t: float
    start: int
    closed_form: float
    direct: float
    terms: int

    def as_dict(self) -> dict:
        return {"t": self.t, "start": self.start, "closed_form": self.closed_form,
                "direct": self.direct, "terms": self.terms,
                "difference": abs(self.closed_form - self.direct)}


def _check_sequence(values: np.ndarray, first: int) -> None:
    if np.any(np.diff(values) <= 0):
        raise InvalidSequence("|I(n)| must be strictly increasing")
    if np.any(values < np.arange(first, first + len(values))):
        raise InvalidSequence("|I(n)| must satisfy |I(n)| >= n")


def lambda_entropy_bound(sizes: Callable[[np.ndarray], np.ndarray] | Sequence[int] | None, t: float,
                         start: int, terms: int = 10 ** 6) -> EntropyBound:
    """Tail of ``sum_j |I(j)| exp(-t |I(j)|)`` from ``j = start``, closed form and direct.

    With ``a = |I(start)|`` the closed form is the sum over all integers
    ``v >= a`` of ``v exp(-t v)``, which bounds the direct sum over the
    strictly increasing values ``|I(j)| >= a``, with equality for ``|I(n)| = n``.
    ``sizes`` is a vectorized callable, an explicit sequence indexed from 1,
    or ``None`` for ``|I(n)| = n``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if start < 1:
        raise ValueError("start must be >= 1")
    js = np.arange(start, start + terms, dtype=np.int64)
    if sizes is None:
        vals = js.astype(float)
    elif callable(sizes):
        vals = np.asarray(sizes(js), dtype=float)
    else:
        seq = np.asarray(sizes, dtype=float)
        _check_sequence(seq, 1)
        vals = seq[start - 1:]
    _check_sequence(vals, start)
    a = float(vals[0])
    r = math.exp(-t)
    closed = a * math.exp(-t * a) / (1 - r) + math.exp(-t * (a + 1)) / (1 - r) ** 2
    direct = math.fsum((vals * np.exp(-t * vals)).tolist())
    return EntropyBound(float(t), int(start), closed, direct, len(vals))


def log_entropy_bound(t: float, a: float) -> float:
    """Natural log of the closed form at ``|I| = a``, stable when the bound underflows."""
    lr = math.log1p(-math.exp(-t))
    first = math.log(a) - t * a - lr
    second = -t * (a + 1) - 2 * lr
    hi = max(first, second)
    return hi + math.log(math.exp(first - hi) + math.exp(second - hi))
