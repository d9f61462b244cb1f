"""Symbolic constructions: horseshoes onto full shifts and a proximal subshift.

A horseshoe is coded by ``r`` frequency-typical words of length ``n`` that
share entry and exit blocks, each followed by one fixed connector. Any
sequence of labels concatenates to an admissible point, so ``f^k`` with
``k = n + len(connector)`` factors onto the full shift on ``r`` symbols.

The proximal subshift is the orbit closure of the set ``A`` of sequences over
``{0..m}`` that vanish exactly on the positions ``i`` with
``i mod s_n >= s_n - k_n`` for some level ``n``, and take values in
``{1..m}`` elsewhere. Zero blocks recur syndetically, so ``0^inf`` is the
only minimal subset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import EntropyDeficit, InvalidPoint, InvalidSlack
from .measures import (MarkovMeasure, PeriodicOrbitMeasure, classify_point, empirical_measure,
                       tail_bound, weak_star_distance)
from .symbolic import SymbolicPoint, as_word, encode, first_difference, windows, word_str
from .systems import Shift

MAX_WORDS = 2 ** 20


# ---------------------------------------------------------------------------
# horseshoe


def markov_entropy(measure: MarkovMeasure) -> float:
    """Metric entropy ``-sum pi_i P_ij log P_ij`` of a stationary Markov measure."""
    P = measure.P
    pi = measure.pi / measure.pi.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * np.log(np.where(P > 0, P, 1.0)), 0.0)
    return float(-(pi[:, None] * terms).sum())


def admissible_words(system: Shift, n: int) -> np.ndarray:
    """All admissible words of length ``n`` as rows, in lexicographic order."""
    v = system.block - 1
    if system.k ** min(n, 64) > MAX_WORDS and n > 0:
        raise EntropyDeficit(f"too many words of length {n} to enumerate")
    if n <= v:
        rows = sorted({vert[:n] for vert in system.vertices})
        return np.array(rows, dtype=np.int64).reshape(len(rows), n)
    words = np.array(system.vertices, dtype=np.int64).reshape(len(system.vertices), v)
    while words.shape[1] < n:
        parts = []
        for s in range(system.k):
            keep = [i for i, row in enumerate(words)
                    if s in system.next_symbols[tuple(int(c) for c in row[words.shape[1] - v:])]]
            if keep:
                block = words[keep]
                parts.append(np.hstack([block, np.full((len(keep), 1), s, dtype=np.int64)]))
        words = np.vstack(parts)
        if len(words) > MAX_WORDS:
            raise EntropyDeficit(f"too many words of length {n} to enumerate")
    order = np.lexsort(words.T[::-1])
    return words[order]


def typical_words(system: Shift, measure: MarkovMeasure, n: int, tol: float) -> np.ndarray:
    """Words whose symbol frequencies are within ``tol`` of the one-symbol marginals of ``measure``."""
    words = admissible_words(system, n)
    marg = np.array([measure.cylinder([a]) for a in range(system.k)])
    counts = np.stack([(words == a).sum(axis=1) for a in range(system.k)], axis=1)
    ok = np.all(np.abs(counts - n * marg[None, :]) <= tol * n + 1e-9, axis=1)
    return words[ok]


@dataclass
class Horseshoe:
    """Coding of a closed ``f^k``-invariant set onto the full shift on ``r`` symbols."""

    system: Shift
    n: int
    segments: np.ndarray   # (r, n) words, lexicographic
    connector: np.ndarray
    alpha: float
    eta: float
    eps: float
    measure_entropy: float
    checks: dict = field(default_factory=dict)

    def __post_init__(self):
        self._blocks = np.hstack([self.segments,
                                  np.tile(self.connector, (len(self.segments), 1))]).astype(np.int64)
        codes = encode(self.segments, self.system.k)
        self._lookup = {int(c): i for i, c in enumerate(codes)}

    @property
    def r(self) -> int:
        return len(self.segments)

    @property
    def k(self) -> int:
        return self.n + len(self.connector)

    @property
    def rate(self) -> float:
        """``log(r - 1) / k``: entropy of the factor with one symbol spared for the proximal step."""
        return math.log(self.r - 1) / self.k if self.r > 1 else float("-inf")

    def block(self, label: int) -> np.ndarray:
        return self._blocks[label]

    def encode(self, xi) -> SymbolicPoint:
        """Section of the coding: labels (a word or an eventually periodic point) to a point of ``Lambda``."""
        if not isinstance(xi, SymbolicPoint):
            xi = SymbolicPoint.finite(xi)
        if len(xi.prefix) + len(xi.period) and (xi.min_symbol() < 0 or xi.max_symbol() >= self.r):
            raise InvalidPoint(f"labels must lie in 0..{self.r - 1}")
        pre = self._blocks[xi.prefix].reshape(-1)
        per = self._blocks[xi.period].reshape(-1)
        return SymbolicPoint(pre, per)

    def decode(self, x: SymbolicPoint, count: int) -> np.ndarray:
        """First ``count`` labels of ``pi(x)``; raises if ``x`` leaves ``Lambda``."""
        rows = x.coords(count * self.k).reshape(count, self.k).astype(np.int64)
        if len(self.connector) and np.any(rows[:, self.n:] != self.connector):
            raise InvalidPoint("point does not follow the horseshoe connector")
        codes = encode(rows[:, :self.n], self.system.k)
        out = np.empty(count, dtype=np.int64)
        for i, c in enumerate(codes):
            label = self._lookup.get(int(c))
            if label is None:
                raise InvalidPoint(f"block {word_str(rows[i, :self.n])} is not a horseshoe segment")
            out[i] = label
        return out

    def as_dict(self) -> dict:
        return {
            "k": self.k, "r": self.r, "n": self.n,
            "connector": word_str(self.connector),
            "rate": self.rate, "alpha": self.alpha, "eta": self.eta, "eps": self.eps,
            "measure_entropy": self.measure_entropy,
            "segments": [word_str(w) for w in self.segments],
            "checks": self.checks,
        }


def semiconjugacy_check(hs: Horseshoe, trials: int = 1000, length: int = 16, seed: int = 0) -> dict:
    """Round trips ``pi(encode(xi)) = xi`` and ``pi(f^k x) = sigma(pi(x))`` on random labels."""
    rng = np.random.default_rng(seed)
    round_trip = conj = 0
    for _ in range(trials):
        xi = rng.integers(0, hs.r, size=length + 1)
        x = hs.encode(xi)
        labels = hs.decode(x, length + 1)
        round_trip += bool(np.array_equal(labels, xi))
        conj += bool(np.array_equal(hs.decode(x.shift(hs.k), length), labels[1:]))
    return {"trials": trials, "round_trip": round_trip, "semiconjugacy": conj,
            "ok": round_trip == trials and conj == trials}


def separation_check(hs: Horseshoe, pairs: int = 200, length: int = 8, seed: int = 0) -> dict:
    """Distinct label sequences give points separated by more than ``eps/3`` along the orbit."""
    rng = np.random.default_rng(seed)
    worst = float("inf")
    tested = 0
    for _ in range(pairs):
        xi = rng.integers(0, hs.r, size=length)
        psi = xi.copy()
        t = int(rng.integers(0, length))
        psi[t] = (psi[t] + 1 + int(rng.integers(0, hs.r - 1))) % hs.r
        x, y = hs.encode(xi), hs.encode(psi)
        p = first_difference(x, y)
        if p is None or p >= t * hs.k + hs.n:
            worst = 0.0
            continue
        # at iterate p the two points disagree in coordinate 0
        worst = min(worst, hs.system.metric(x.shift(p), y.shift(p)))
        tested += 1
    return {"pairs": pairs, "tested": tested, "min_separation": worst,
            "threshold": hs.eps / 3, "ok": worst > hs.eps / 3}


def extract_horseshoe(system: Shift, measure: MarkovMeasure, alpha: float, eta: float = 0.05,
                      n: int = 10, tol: float = 0.2, eps: float = 0.5, trials: int = 1000,
                      seed: int = 0) -> Horseshoe:
    """Horseshoe built from frequency-typical ``n``-words of ``measure``.

    Distinct ``n``-words are ``(n, eps)``-separated for every ``eps < 1``.
    Words are grouped by entry and exit block so one connector joins any two.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    ambient = math.log(float(np.max(np.abs(np.linalg.eigvals(system.transition.astype(float))))))
    if alpha >= ambient:
        raise EntropyDeficit(f"alpha={alpha} is not below the topological entropy {ambient:.6f}")
    h = markov_entropy(measure)
    if h <= alpha + 4 * eta:
        raise EntropyDeficit(f"measure entropy {h:.6f} does not exceed alpha + 4 eta = {alpha + 4 * eta:.6f}")
    words = typical_words(system, measure, n, tol)
    if len(words) == 0:
        raise EntropyDeficit("no frequency-typical words at this length and tolerance")
    v = system.block - 1
    if system.is_full:
        group = words
        connector = words[0][:0]
    else:
        keys = encode(np.hstack([words[:, :v], words[:, n - v:]]), system.k)
        vals, counts = np.unique(keys, return_counts=True)
        best = vals[np.argmax(counts)]
        group = words[keys == best]
        connector = system.connector(group[0], group[0])
    hs = Horseshoe(system, n, group, as_word(connector), alpha, eta, eps, h)
    if hs.r < 3 or hs.rate <= alpha:
        raise EntropyDeficit(f"{hs.r} segments of step {hs.k} give log(r-1)/k = {hs.rate:.6f} <= alpha = {alpha}")
    hs.checks["semiconjugacy"] = semiconjugacy_check(hs, trials, seed=seed)
    hs.checks["separation"] = separation_check(hs, seed=seed)
    hs.checks["rate_exceeds_alpha"] = hs.rate > alpha
    return hs


# ---------------------------------------------------------------------------
# proximal subshift


@dataclass
class ProximalSubshiftSpec:
    """Parameters of the proximal subshift over ``{0..m}``.

    ``k`` and ``s`` are materialized prefixes of the level sequences; more
    levels are generated on demand by :meth:`ensure`.
    """

    m: int
    gamma: float
    k: list = field(default_factory=list)
    s: list = field(default_factory=list)

    def level_length(self, n: int) -> int:
        """Default ``s_n``: the least multiple of ``s_{n-1}`` that is at least ``2^n n^2 / gamma``."""
        need = math.ceil(Fraction(2 ** n * n * n) / Fraction(self.gamma))
        prev = self.s[n - 2] if n > 1 else 1
        return -(-need // prev) * prev

    def ensure(self, levels: int) -> None:
        while len(self.s) < levels:
            n = len(self.s) + 1
            self.s.append(self.level_length(n))
            self.k.append(n)

    def levels_below(self, length: int) -> int:
        """Number of levels whose first forced block starts before ``length``."""
        n = 0
        while True:
            self.ensure(n + 1)
            if self.s[n] - self.k[n] >= length:
                return n
            n += 1

    def slack(self, levels: int) -> Fraction:
        self.ensure(levels)
        return sum((Fraction(k, s) for k, s in zip(self.k[:levels], self.s[:levels])), Fraction(0))

    def forced(self, start: int, length: int, levels: int | None = None) -> np.ndarray:
        """Mask of forced-zero positions ``start .. start+length-1`` in a point of ``A``."""
        pos = np.arange(start, start + length, dtype=np.int64)
        if levels is None:
            levels = self.levels_below(start + length)
        self.ensure(levels)
        mask = np.zeros(length, dtype=bool)
        for kn, sn in zip(self.k[:levels], self.s[:levels]):
            mask |= pos % sn >= sn - kn
        return mask

    def check_invariants(self, levels: int = 10) -> dict:
        self.ensure(levels + 1)
        divides = all(self.s[i + 1] % self.s[i] == 0 for i in range(levels))
        spaced = all(self.k[i + 1] < self.s[i] for i in range(levels))
        partial = [float(self.slack(i)) for i in range(1, levels + 1)]
        return {"levels": levels, "divides": divides, "k_next_below_s": spaced,
                "partial_sums": partial, "below_gamma": all(p < self.gamma for p in partial),
                "ok": divides and spaced and all(p < self.gamma for p in partial)}

    def as_dict(self, levels: int = 6) -> dict:
        self.ensure(levels)
        return {"m": self.m, "gamma": self.gamma,
                "k_rule": "k_n = n",
                "s_rule": "s_n = least multiple of s_(n-1) with s_n >= 2^n n^2 / gamma",
                "k": self.k[:levels], "s": self.s[:levels]}

    # -- language membership ------------------------------------------------

    def _fit(self, word: np.ndarray, zero: np.ndarray, end: int, kmin: int, free: bool):
        """Largest forced block ending at relative ``end`` consistent with the zeros of ``word``.

        Returns the covered mask, or ``None`` if no admissible length fits.
        ``free`` allows any level at or above the base one (lengths ``kmin, kmin+1, ...``);
        otherwise the length is exactly ``kmin``.
        """
        ell = len(word)
        cover = np.zeros(ell, dtype=bool)
        if end <= ell:
            run = 0
            while run < end and zero[end - 1 - run]:
                run += 1
            if run == end and free:
                cover[:end] = True
                return cover
            if not free:
                if kmin > end:
                    if run < end:
                        return None
                    cover[:end] = True
                    return cover
                if run < kmin:
                    return None
                cover[end - kmin:end] = True
                return cover
            if run < kmin:
                return None
            cover[end - run:end] = True
            return cover
        gap = end - ell
        tail = 0
        while tail < ell and zero[ell - 1 - tail]:
            tail += 1
        if not free:
            intrude = kmin - gap
            if intrude <= 0:
                return cover
            if intrude > tail:
                return None
            cover[ell - intrude:] = True
            return cover
        if tail == ell:
            cover[:] = True
            return cover
        if gap >= kmin:
            if tail:
                cover[ell - tail:] = True
            return cover
        if gap + tail < kmin:
            return None
        cover[ell - tail:] = True
        return cover

    def admissible(self, word) -> bool:
        """True iff ``word`` occurs in some point of ``A``, i.e. lies in the language of the subshift.

        Levels whose period exceeds the word length contribute at most two
        blocks, each ending at a multiple of ``s_N``; at most one of them can
        belong to a level above ``N``, so its length is free.
        """
        word = as_word(word).astype(np.int64)
        ell = len(word)
        if ell == 0:
            return True
        if word.min() < 0 or word.max() > self.m:
            return False
        zero = word == 0
        N = 0
        while True:
            self.ensure(N + 1)
            if self.s[N] > ell:
                break
            N += 1
        sN, kN = self.s[N], self.k[N]
        for j in range(sN):
            low = self.forced(j, ell, levels=N)
            # forced blocks of lower levels ending after the window
            ends = [r for r in (-j % sN or sN, (-j % sN or sN) + sN) if r <= ell + sN]
            options = [[True] * len(ends)] if len(ends) == 1 else [[True, False], [False, True]]
            for frees in options:
                cover = low.copy()
                ok = True
                for r, free in zip(ends, frees):
                    c = self._fit(word, zero, r, kN, free)
                    if c is None:
                        ok = False
                        break
                    cover |= c
                if ok and np.array_equal(cover, zero):
                    return True
        return False


def proximal_subshift(m: int, gamma: float, levels: int = 10) -> ProximalSubshiftSpec:
    if not 0 < gamma < 1:
        raise InvalidSlack(f"gamma must lie in (0, 1), got {gamma}")
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    spec = ProximalSubshiftSpec(int(m), float(gamma))
    spec.ensure(levels + 1)
    return spec


@dataclass
class ProximalBound:
    N: int
    length: int
    free: int
    count: int
    value: float
    bound: float
    holds: bool
    equality: bool

    def as_dict(self) -> dict:
        return {"N": self.N, "length": self.length, "free": self.free,
                "count_digits": len(str(self.count)), "value": self.value,
                "bound": self.bound, "holds": self.holds, "equality": self.equality}


def proximal_entropy_check(spec: ProximalSubshiftSpec, N: int) -> ProximalBound:
    """Exact count of length-``s_N`` prefixes of ``A`` against ``(1 - sum_{i<=N} k_i/s_i) log m``.

    The count is ``m ** free``; the comparison is done on ``free`` with exact
    fractions, so equality cases are detected exactly.
    """
    if not 1 <= N <= 4:
        raise ValueError("entropy checks are limited to levels 1..4")
    spec.ensure(N)
    length = spec.s[N - 1]
    free = int(length - spec.forced(0, length).sum())
    target = length * (1 - spec.slack(N))
    logm = math.log(spec.m)
    return ProximalBound(N, length, free, spec.m ** free, free * logm / length,
                         float(1 - spec.slack(N)) * logm, free >= target, free == target)


def generate_samples(spec: ProximalSubshiftSpec, count: int, horizon: int, seed: int = 0) -> np.ndarray:
    """Random windows of length ``horizon`` from random points of ``A``."""
    rng = np.random.default_rng(seed)
    n = spec.levels_below(horizon)
    spec.ensure(n + 1)
    span = spec.s[n]
    total = span + horizon
    mask = spec.forced(0, total)
    points = rng.integers(1, spec.m + 1, size=(count, total))
    points[:, mask] = 0
    starts = rng.integers(0, span, size=count)
    idx = starts[:, None] + np.arange(horizon)[None, :]
    return np.take_along_axis(points, idx, axis=1)


def zero_block_gaps(spec: ProximalSubshiftSpec, samples: np.ndarray) -> dict:
    """Per level: whether every window of length ``2 s_n`` holds a block ``0^{k_n}``."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.int64))
    horizon = samples.shape[1]
    out = {}
    n = 0
    while True:
        spec.ensure(n + 1)
        kn, sn = spec.k[n], spec.s[n]
        if 2 * sn > horizon:
            break
        zero = (samples == 0).astype(np.int64)
        csum = np.concatenate([np.zeros((len(samples), 1), dtype=np.int64), np.cumsum(zero, axis=1)], axis=1)
        starts = (csum[:, kn:] - csum[:, :-kn]) == kn
        has = np.concatenate([np.zeros((len(samples), 1), dtype=np.int64),
                              np.cumsum(starts, axis=1)], axis=1)
        reach = 2 * sn - kn + 1
        w = np.arange(horizon - 2 * sn + 1)
        found = has[:, w + reach] - has[:, w] > 0
        out[n + 1] = bool(found.all())
        n += 1
    return out


def minimal_subset_check(spec: ProximalSubshiftSpec, samples, horizon: int | None = None) -> bool:
    """Syndetic zero blocks at every level with ``2 s_n`` within the horizon."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.int64))
    if horizon is not None:
        samples = samples[:, :horizon]
    spec.ensure(2)
    if samples.shape[1] < 2 * spec.s[1]:
        raise ValueError(f"horizon must be at least 2 s_2 = {2 * spec.s[1]}")
    return all(zero_block_gaps(spec, samples).values())


# ---------------------------------------------------------------------------
# two measures with nested supports


def orbit_visits(system: Shift, x: SymbolicPoint, n: int, target: SymbolicPoint, period: int,
                 depth: int) -> bool:
    """True iff every ``depth``-window of the periodic ``target`` occurs among the first ``n`` windows of ``x``."""
    seen = {row.tobytes() for row in windows(x, n, depth)}
    return all(row.tobytes() in seen for row in windows(target, period, depth))


def nested_measures(hs: Horseshoe, spec: ProximalSubshiftSpec, length: int | None = None,
                    seed: int = 0, J: int = 20) -> dict:
    """Lift ``0^inf`` and a point of ``A`` through the horseshoe and compare their orbit measures.

    The fixed point lifts to a periodic orbit whose measure ``nu`` is supported
    inside the orbit closure of the lifted ``A`` point; the latter's empirical
    measures converge to a different measure ``mu``.
    """
    if hs.r < spec.m + 1:
        raise EntropyDeficit(f"horseshoe has {hs.r} symbols, proximal alphabet needs {spec.m + 1}")
    spec.ensure(4)
    length = spec.s[3] if length is None else length
    labels = np.random.default_rng(seed).integers(1, spec.m + 1, size=length)
    labels[spec.forced(0, length)] = 0
    typical = hs.encode(labels)
    fixed = hs.encode(SymbolicPoint.periodic([0]))
    total = length * hs.k
    checkpoints = [total // 8, total // 4, total // 2, total - 64]
    cls_typ = classify_point(hs.system, typical, checkpoints, J)
    cls_fix = classify_point(hs.system, fixed, checkpoints, J)
    nu = PeriodicOrbitMeasure(hs.system, hs.block(0))
    mu = empirical_measure(hs.system, typical, checkpoints[-1])
    dist = weak_star_distance(mu, nu, J)
    # every cylinder charged by nu must be visited by the A point's orbit
    nested = orbit_visits(hs.system, typical, checkpoints[-1], fixed, hs.k, 2 * hs.k)
    return {
        "typical": cls_typ.verdict, "fixed_point": cls_fix.verdict,
        "distance": dist.value, "tail": tail_bound(J),
        "distinct": dist.value > 2 * tail_bound(J),
        "nested_support": nested,
        "checkpoints": checkpoints,
    }
