"""Bowen metrics, separated and spanning sets, word-count entropy and cover certificates.

Conventions: Bowen balls are ``{y : d_n(x, y) < eps}``; a set is
``(n, eps)``-separated when distinct points have ``d_n > eps`` and
``(n, eps)``-spanning when every target point is within ``d_n <= eps`` of it.

On a shift with the ``2^-i`` metric ``d_n(x, y) = 2^-(j-n+1)`` when the first
disagreement ``j`` is at least ``n``, and 1 otherwise. So ``d_n <= eps`` is the
equivalence relation "same prefix of length ``n - 1 + ceil(log2(1/eps))``",
and separated/spanning problems reduce to counting prefix classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyPool, NotACover, SamplerError, ShapeError
from .symbolic import SymbolicPoint, encode, first_difference
from .systems import GridMap, IntervalHomeo, Shift, System, torus_delta


# ---------------------------------------------------------------------------
# d_n


def dn_distance(system: System, x, y, n: int) -> float:
    """``max_{i<n} d(f^i x, f^i y)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(system, Shift):
        j = first_difference(x, y)
        if j is None:
            return 0.0
        return 1.0 if j <= n - 1 else 2.0 ** (-(j - n + 1))
    best = 0.0
    for _ in range(n):
        best = max(best, system.metric(x, y))
        x, y = system.step(x), system.step(y)
    return best


def closed_prefix_length(n: int, eps: float) -> int | None:
    """Prefix length ``D`` with ``d_n(x, y) <= eps`` iff ``x, y`` share ``D`` symbols.

    ``None`` when ``eps >= 1`` (every pair qualifies). Shifts only.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps >= 1:
        return None
    return n - 1 + math.ceil(-math.log2(eps) - 1e-12)


def open_prefix_length(n: int, eps: float) -> int | None:
    """Same as :func:`closed_prefix_length` for ``d_n(x, y) < eps``; ``None`` when ``eps > 1``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps > 1:
        return None
    return n + math.floor(-math.log2(eps) + 1e-12)


@dataclass(frozen=True)
class BowenBall:
    center: object
    n: int
    eps: float

    def __post_init__(self):
        if self.n < 1 or self.eps <= 0:
            raise ValueError("Bowen balls need n >= 1 and eps > 0")

    def contains(self, system: System, y) -> bool:
        return dn_distance(system, self.center, y, self.n) < self.eps


def orbit_array(system: System, pool: Sequence, n: int) -> np.ndarray:
    """``(P, n, dim)`` array of orbit points for float systems."""
    cur = np.asarray(pool, dtype=float)
    P = len(cur)
    out = np.empty((P, n, cur.reshape(P, -1).shape[1]))
    for i in range(n):
        out[:, i] = cur.reshape(P, -1)
        cur = np.asarray(system.step(cur), dtype=float)
    return out


def dn_matrix(system: System, pool: Sequence, n: int) -> np.ndarray:
    """Pairwise ``d_n`` over a pool."""
    if isinstance(system, Shift):
        P = len(pool)
        D = np.zeros((P, P))
        for a in range(P):
            for b in range(a + 1, P):
                D[a, b] = D[b, a] = dn_distance(system, pool[a], pool[b], n)
        return D
    orb = orbit_array(system, pool, n)
    diff = orb[:, None, :, :] - orb[None, :, :, :]
    if isinstance(system, GridMap):
        diff = diff - np.floor(diff + 0.5)
    return np.sqrt((diff ** 2).sum(axis=-1)).max(axis=-1)


def prefix_codes(system: Shift, pool: Sequence[SymbolicPoint], length: int) -> np.ndarray:
    """Integer code of each point's length-``length`` prefix."""
    if length == 0:
        return np.zeros(len(pool), dtype=np.int64)
    rows = np.stack([p.coords(length) for p in pool])
    if system.k ** length < 2 ** 62:
        return encode(rows, system.k)
    _, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


# ---------------------------------------------------------------------------
# separated and spanning sets


def _sort_pool(system: System, pool: Sequence) -> list:
    if isinstance(system, Shift):
        depth = int(max(1, min(min(p.horizon for p in pool), 64)))
        return sorted(pool, key=lambda p: tuple(int(c) for c in p.coords(depth)))
    return sorted(pool, key=lambda p: tuple(np.atleast_1d(np.asarray(p, dtype=float))))


@dataclass
class SeparatedSet:
    points: list
    n: int
    eps: float
    mode: str
    min_distance: float

    def __len__(self) -> int:
        return len(self.points)

    def as_dict(self) -> dict:
        return {"size": len(self.points), "n": self.n, "eps": self.eps, "mode": self.mode,
                "min_dn": self.min_distance,
                "centers": [str(p) if isinstance(p, SymbolicPoint) else np.asarray(p).tolist()
                            for p in self.points]}


def _separated_min(system: System, pts: list, n: int) -> float:
    if len(pts) < 2:
        return math.inf
    if isinstance(system, Shift) and len(pts) > 256:
        # ultrametric: the closest pair is adjacent in lexicographic order
        return min(dn_distance(system, a, b, n) for a, b in zip(pts, pts[1:]))
    D = dn_matrix(system, pts, n)
    return float(D[~np.eye(len(pts), dtype=bool)].min())


def separated_set(system: System, pool: Sequence, n: int, eps: float, mode: str = "greedy") -> SeparatedSet:
    """Greedy (maximal) or exhaustive (maximum) ``(n, eps)``-separated subset of ``pool``."""
    if len(pool) == 0:
        raise EmptyPool("candidate pool is empty")
    if mode not in ("greedy", "exhaustive"):
        raise ValueError("mode must be 'greedy' or 'exhaustive'")
    if mode == "exhaustive" and len(pool) > 2 ** 15:
        raise ValueError("exhaustive mode needs a pool of at most 2^15 points")
    pool = _sort_pool(system, pool)
    if isinstance(system, Shift):
        # classes of the equivalence d_n <= eps; any maximal choice is maximum
        D = closed_prefix_length(n, eps)
        if D is None:
            chosen = [pool[0]]
        else:
            _, first = np.unique(prefix_codes(system, pool, D), return_index=True)
            chosen = [pool[i] for i in sorted(first)]
    elif mode == "greedy":
        M = dn_matrix(system, pool, n)
        keep: list[int] = []
        for i in range(len(pool)):
            if all(M[i, j] > eps for j in keep):
                keep.append(i)
        chosen = [pool[i] for i in keep]
    else:
        M = dn_matrix(system, pool, n)
        chosen = [pool[i] for i in _max_independent(M <= eps)]
    return SeparatedSet(chosen, n, eps, mode, _separated_min(system, chosen, n))


def spanning_set(system: System, sample: Sequence, n: int, eps: float, mode: str = "greedy") -> list:
    """``(n, eps)``-spanning subset of ``sample`` (centres drawn from the sample).

    Greedy mode gives an upper bound on ``r_n``; exhaustive mode a minimum.
    """
    if len(sample) == 0:
        raise EmptyPool("target sample is empty")
    sample = _sort_pool(system, sample)
    if isinstance(system, Shift):
        D = closed_prefix_length(n, eps)
        if D is None:
            return [sample[0]]
        _, first = np.unique(prefix_codes(system, sample, D), return_index=True)
        return [sample[i] for i in sorted(first)]
    near = dn_matrix(system, sample, n) <= eps
    if mode == "exhaustive":
        return [sample[i] for i in _min_cover(near)]
    uncovered = np.ones(len(sample), dtype=bool)
    chosen = []
    while uncovered.any():
        gains = (near & uncovered[None, :]).sum(axis=1)
        i = int(np.argmax(gains))
        chosen.append(i)
        uncovered &= ~near[i]
    return [sample[i] for i in sorted(chosen)]


def is_separated(system: System, pts: Sequence, n: int, eps: float) -> bool:
    if isinstance(system, Shift):
        D = closed_prefix_length(n, eps)
        if D is None:
            return len(pts) <= 1
        codes = prefix_codes(system, list(pts), D)
        return len(np.unique(codes)) == len(codes)
    M = dn_matrix(system, list(pts), n)
    return bool(np.all(M[~np.eye(len(pts), dtype=bool)] > eps))


def is_spanning(system: System, centers: Sequence, sample: Sequence, n: int, eps: float) -> bool:
    for y in sample:
        if not any(dn_distance(system, c, y, n) <= eps for c in centers):
            return False
    return True


def _max_independent(conflict: np.ndarray) -> list[int]:
    from scipy.optimize import Bounds, LinearConstraint, milp

    P = conflict.shape[0]
    pairs = [(a, b) for a in range(P) for b in range(a + 1, P) if conflict[a, b]]
    if not pairs:
        return list(range(P))
    A = np.zeros((len(pairs), P))
    for r, (a, b) in enumerate(pairs):
        A[r, a] = A[r, b] = 1
    res = milp(-np.ones(P), constraints=LinearConstraint(A, -np.inf, 1),
               integrality=np.ones(P), bounds=Bounds(0, 1))
    if not res.success:
        raise RuntimeError(f"separated-set MILP failed: {res.message}")
    return [i for i in range(P) if res.x[i] > 0.5]


def _min_cover(near: np.ndarray) -> list[int]:
    from scipy.optimize import Bounds, LinearConstraint, milp

    P = near.shape[0]
    res = milp(np.ones(P), constraints=LinearConstraint(near.T.astype(float), 1, np.inf),
               integrality=np.ones(P), bounds=Bounds(0, 1))
    if not res.success:
        raise RuntimeError(f"spanning-set MILP failed: {res.message}")
    return [i for i in range(P) if res.x[i] > 0.5]


# ---------------------------------------------------------------------------
# word counts


@dataclass
class EntropyTable:
    counts: list[int]
    estimates: list[float]

    @property
    def value(self) -> float:
        return self.estimates[-1]

    def rows(self) -> list[list]:
        return [[n, c, e] for n, (c, e) in enumerate(zip(self.counts, self.estimates), start=1)]


def word_counts(system: Shift, n_max: int) -> list[int]:
    """Exact ``|B_1| .. |B_{n_max}|`` as Python integers."""
    v = system.block - 1
    counts = []
    for n in range(1, min(v, n_max + 1)):
        counts.append(len({vert[:n] for vert in system.vertices}))
    A = [[int(a) for a in row] for row in system.transition]
    vec = [1] * len(A)
    for n in range(v, n_max + 1):
        if n > v:
            vec = [sum(a * b for a, b in zip(row, vec)) for row in A]
        counts.append(sum(vec))
    return counts[:n_max]


def subshift_entropy(system: Shift, n_max: int) -> EntropyTable:
    """``(1/n) log |B_n|`` for ``n <= n_max`` from exact transfer-matrix counts."""
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    counts = word_counts(system, n_max)
    return EntropyTable(counts, [math.log(c) / n for n, c in enumerate(counts, start=1)])


# ---------------------------------------------------------------------------
# Katok estimator


def bernoulli_sampler(k: int, probs: Sequence[float] | None = None, horizon: int = 128) -> Callable:
    p = None if probs is None else np.asarray(probs, dtype=float)

    def sample(rng: np.random.Generator, count: int) -> list[SymbolicPoint]:
        words = rng.choice(k, size=(count, horizon), p=p)
        return [SymbolicPoint.finite(w) for w in words]
    return sample


def markov_sampler(measure, horizon: int = 128) -> Callable:
    """Sampler for a :class:`~shadowlab.measures.MarkovMeasure` in its vertex presentation."""
    system = measure.system
    v = system.block - 1
    cum = np.cumsum(measure.P, axis=1)

    def sample(rng: np.random.Generator, count: int) -> list[SymbolicPoint]:
        out = []
        starts = rng.choice(len(measure.pi), size=count, p=measure.pi / measure.pi.sum())
        for s in starts:
            word = list(system.vertices[s])
            cur = s
            while len(word) < horizon:
                cur = int(np.searchsorted(cum[cur], rng.random() * cum[cur, -1], side="right"))
                word.append(system.vertices[cur][-1])
            out.append(SymbolicPoint.finite(word[:max(horizon, v)]))
        return out
    return sample


def dirac_sampler(point) -> Callable:
    def sample(rng, count):
        return [point] * count
    return sample


def uniform_sampler(dim: int = 1) -> Callable:
    def sample(rng, count):
        pts = rng.random((count, dim))
        return list(pts[:, 0]) if dim == 1 else list(pts)
    return sample


def katok_entropy_estimate(system: System, sampler: Callable, n: int, eps: float, delta: float,
                           samples: int, seed: int) -> float:
    """Estimate of ``(1/n) log N(n, eps, delta)`` from a finite sample.

    ``N`` is the fewest Bowen balls, centred at sample points, covering at least
    ``1 - delta`` of the sample. Balls are closed (``d_n <= eps``), which on a
    shift makes them cylinders. This is a Monte-Carlo surrogate, so it is an
    estimate, not a value.
    """
    if not 0 < delta < 1 + 1e-15:
        raise ValueError("delta must lie in (0, 1]")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    try:
        pts = list(sampler(rng, samples))
    except Exception as exc:  # noqa: BLE001 - any sampler failure is reported uniformly
        raise SamplerError(f"sampler failed: {exc}") from exc
    if len(pts) != samples:
        raise SamplerError(f"sampler returned {len(pts)} points, expected {samples}")
    need = math.ceil((1 - delta) * samples - 1e-9)
    if need <= 0:
        return 0.0
    if isinstance(system, Shift):
        D = closed_prefix_length(n, eps)
        if D is None:
            return 0.0
        try:
            codes = prefix_codes(system, pts, D)
        except Exception as exc:  # noqa: BLE001
            raise SamplerError(f"sampled points unusable: {exc}") from exc
        sizes = np.sort(np.unique(codes, return_counts=True)[1])[::-1]
        N = int(np.searchsorted(np.cumsum(sizes), need) + 1)
    else:
        near = dn_matrix(system, pts, n) <= eps
        uncovered = np.ones(samples, dtype=bool)
        N = 0
        while samples - uncovered.sum() < need:
            i = int(np.argmax((near & uncovered[None, :]).sum(axis=1)))
            uncovered &= ~near[i]
            N += 1
    return math.log(N) / n if N > 1 else 0.0


# ---------------------------------------------------------------------------
# cover certificates


@dataclass
class CoverSum:
    balls: list[BowenBall]
    t: float
    n: int
    target: list = field(default_factory=list)

    def __post_init__(self):
        if any(b.n < self.n for b in self.balls):
            raise ValueError("every ball length must be >= n")


def bowen_sum_upper(system: System, cover: CoverSum) -> float:
    """``sum e^{-t u}`` over the cover, after checking it covers its target sample."""
    for y in cover.target:
        if not any(b.contains(system, y) for b in cover.balls):
            raise NotACover(f"target point {y} is not covered")
    if not cover.target and not cover.balls:
        return 0.0
    return float(math.fsum(math.exp(-cover.t * b.n) for b in cover.balls))


def tail_cover_sum(t: float, S: int) -> float:
    """Closed form of ``sum_{s >= S} s e^{-t s}``."""
    if t <= 0:
        raise ValueError("t must be positive")
    r = math.exp(-t)
    return S * r ** S / (1 - r) + r ** (S + 1) / (1 - r) ** 2


def moran_lower_certificate(counts: Sequence[int], M: Sequence[int], h: float) -> tuple[bool, float]:
    """Check ``|W_m| >= e^{M_m h}`` for every ``m``; return ``(ok, min log-margin)``."""
    if len(counts) != len(M):
        raise ShapeError(f"{len(counts)} counts but {len(M)} block ends")
    if len(M) == 0:
        raise ShapeError("no blocks given")
    if any(b <= a for a, b in zip(M, M[1:])):
        raise ValueError("block ends must be strictly increasing")
    margins = [math.log(int(c)) - m * h for c, m in zip(counts, M)]
    margin = min(margins)
    return margin >= 0, margin
