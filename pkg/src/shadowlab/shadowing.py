"""Pseudo-orbits, tracers and shadowing-modulus search.

Tracers are per system kind. On shifts the tracing point is read off
directly, ``y_n = (x_n)_0``, and then closed with the last point of the
pseudo-orbit; on the interval a grid search followed by local refinement
minimises the maximal deviation. Every certificate is re-verified by direct
comparison before it is returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import JunctionViolation, ModulusViolation, NoShadowFound, TracerInternalError
from .symbolic import SymbolicPoint, concat, first_difference
from .systems import IntervalHomeo, Shift, System

_WINDOW = 64


@dataclass
class PseudoOrbit:
    points: list
    delta: float

    def __len__(self) -> int:
        return len(self.points)

    def to_jsonl(self, path) -> None:
        lines = [json.dumps({"delta": self.delta})]
        for p in self.points:
            lines.append(json.dumps(str(p) if isinstance(p, SymbolicPoint) else np.asarray(p).tolist()))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "PseudoOrbit":
        rows = [json.loads(s) for s in Path(path).read_text().splitlines() if s.strip()]
        pts = [SymbolicPoint.parse(r) if isinstance(r, str) else r for r in rows[1:]]
        return cls(pts, float(rows[0]["delta"]))


@dataclass(frozen=True)
class GapReport:
    ok: bool
    index: int | None = None
    gap: float | None = None


@dataclass
class ShadowCertificate:
    point: object
    epsilon: float
    horizon: int
    worst_index: int

    def as_dict(self) -> dict:
        p = str(self.point) if isinstance(self.point, SymbolicPoint) else float(self.point)
        return {"point": p, "epsilon_achieved": self.epsilon, "horizon": self.horizon,
                "worst_index": self.worst_index}


# ---------------------------------------------------------------------------
# gap scans


def _coord_matrix(points: Sequence[SymbolicPoint], width: int) -> np.ndarray | None:
    if any(p.horizon < width for p in points):
        return None
    return np.stack([p.coords(width) for p in points])


def _first_mismatch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per row, index of the first differing column, or -1 when rows agree."""
    neq = a != b
    idx = np.argmax(neq, axis=1)
    idx[~neq.any(axis=1)] = -1
    return idx


def symbolic_gaps(points: Sequence[SymbolicPoint]) -> np.ndarray:
    """``d(sigma x_n, x_{n+1})`` for consecutive pairs."""
    n = len(points) - 1
    mat = _coord_matrix(points, _WINDOW + 1)
    out = np.empty(n)
    if mat is not None:
        j = _first_mismatch(mat[:-1, 1:], mat[1:, :_WINDOW])
    else:
        j = np.full(n, -1)
    for i in range(n):
        if j[i] >= 0:
            out[i] = 2.0 ** (-int(j[i]))
        else:
            d = first_difference(points[i].shift(1), points[i + 1])
            out[i] = 0.0 if d is None else 2.0 ** (-d)
    return out


def gaps(system: System, points: Sequence) -> np.ndarray:
    if isinstance(system, Shift):
        return symbolic_gaps(points)
    return np.array([system.metric(system.step(a), b) for a, b in zip(points, points[1:])])


def is_pseudo_orbit(system: System, seq: Sequence, delta: float) -> GapReport:
    """Check ``d(f(x_n), x_{n+1}) < delta`` for every consecutive pair."""
    if len(seq) < 2:
        raise ValueError("a pseudo-orbit needs at least 2 points")
    g = gaps(system, seq)
    bad = np.flatnonzero(g >= delta)
    if len(bad):
        i = int(bad[0])
        return GapReport(False, i, float(g[i]))
    return GapReport(True)


def concatenate(system: System, first: PseudoOrbit, second: PseudoOrbit, delta: float) -> PseudoOrbit:
    """Join two pseudo-orbits, checking the junction gap."""
    gap = float(gaps(system, [first.points[-1], second.points[0]])[0])
    if gap >= delta:
        raise JunctionViolation(f"junction gap {gap} >= {delta}", block=len(first))
    return PseudoOrbit(list(first.points) + list(second.points), delta)


# ---------------------------------------------------------------------------
# tracers


def symbolic_deviations(y: SymbolicPoint, points: Sequence[SymbolicPoint]) -> np.ndarray:
    """``d(sigma^n y, x_n)`` for every ``n``."""
    n = len(points)
    mat = _coord_matrix(points, _WINDOW)
    out = np.empty(n)
    if mat is not None:
        ywin = np.lib.stride_tricks.sliding_window_view(y.coords(n + _WINDOW - 1), _WINDOW)[:n]
        j = _first_mismatch(ywin, mat)
    else:
        j = np.full(n, -1)
    for i in range(n):
        if j[i] >= 0:
            out[i] = 2.0 ** (-int(j[i]))
        else:
            d = first_difference(y.shift(i), points[i])
            out[i] = 0.0 if d is None else 2.0 ** (-d)
    return out


def modulus_limit(system: Shift) -> float:
    """Largest delta the symbolic tracer accepts: consecutive points must share a full block."""
    return 2.0 ** (-system.block)


def trace_symbolic(system: Shift, po: PseudoOrbit) -> ShadowCertificate:
    if po.delta > modulus_limit(system):
        raise ModulusViolation(f"delta {po.delta} exceeds {modulus_limit(system)}")
    pts = po.points
    if len(pts) >= 2:
        rep = is_pseudo_orbit(system, pts, po.delta)
        if not rep.ok:
            raise JunctionViolation(f"gap {rep.gap} >= delta at index {rep.index}", block=rep.index)
    last = pts[-1]
    head = [int(p[0]) for p in pts[:-1]]
    y = SymbolicPoint(concat([head, last.prefix]), last.period)
    if not system.contains(y):
        raise TracerInternalError("trace point is not admissible")
    dev = symbolic_deviations(y, pts)
    worst = int(np.argmax(dev))
    eps = float(dev[worst])
    if len(pts) >= 2 and eps > 2 * po.delta:
        raise TracerInternalError(f"achieved {eps} exceeds 2*delta")
    return ShadowCertificate(y, eps, len(pts), worst)


def _interval_deviation(system: IntervalHomeo, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    cur = np.array(ys, dtype=float)
    worst = np.zeros_like(cur)
    for x in xs:
        worst = np.maximum(worst, np.abs(cur - x))
        cur = system.step(cur)
    return worst


def trace_interval(system: IntervalHomeo, po: PseudoOrbit, eps: float, cells: int = 2 ** 12,
                   refinements: int = 20) -> ShadowCertificate:
    """Grid search plus local refinement for a starting point minimising the max deviation."""
    xs = np.asarray(po.points, dtype=float)
    grid = np.concatenate([[xs[0]], np.linspace(0.0, 1.0, cells + 1)])
    dev = _interval_deviation(system, grid, xs)
    best = int(np.argmin(dev))
    y, d = float(grid[best]), float(dev[best])
    width = 1.0 / cells
    for _ in range(refinements):
        local = np.clip(np.linspace(y - width, y + width, 65), 0.0, 1.0)
        ldev = _interval_deviation(system, local, xs)
        i = int(np.argmin(ldev))
        if ldev[i] < d:
            y, d = float(local[i]), float(ldev[i])
        width /= 16
    # re-verify by plain iteration
    cur, worst, at = y, 0.0, 0
    for n, x in enumerate(xs):
        if abs(cur - x) > worst:
            worst, at = abs(cur - x), n
        cur = system.step(cur)
    if worst >= eps:
        raise NoShadowFound(f"best deviation {worst:.3g} >= eps {eps}", best_point=y, best_deviation=worst)
    return ShadowCertificate(y, worst, len(xs), at)


def trace(system: System, po: PseudoOrbit, eps: float | None = None) -> ShadowCertificate:
    if isinstance(system, Shift):
        return trace_symbolic(system, po)
    if isinstance(system, IntervalHomeo):
        return trace_interval(system, po, eps if eps is not None else 1.0)
    raise TypeError(f"no tracer for {system.kind}")


# ---------------------------------------------------------------------------
# random pseudo-orbits and the modulus search


def _walk_pool(system: Shift, rng, free: int, size: int = 16) -> dict:
    """Random admissible words of length ``free`` continuing each vertex, grouped by first symbol."""
    v = system.block - 1
    pool: dict = {}
    for vert in system.vertices:
        groups: dict = {}
        for _ in range(size):
            word = list(vert)
            for _ in range(free):
                nxt = system.next_symbols[tuple(word[len(word) - v:])]
                word.append(nxt[int(rng.integers(len(nxt)))])
            groups.setdefault(word[v], []).append(np.asarray(word[v:], dtype=np.int16))
        pool[vert] = groups
    return pool


def _close(system: Shift, word: np.ndarray) -> SymbolicPoint:
    bridge, cycle = system.periodic_tail(word)
    return SymbolicPoint(np.concatenate([word, bridge]) if len(bridge) else word, cycle)


def random_symbolic_pseudo_orbit(system: Shift, delta: float, length: int, rng,
                                 free: int = 64) -> PseudoOrbit:
    """Random ``delta``-pseudo-orbit.

    Each point copies the shifted previous point on a random depth (at least
    the one that forces the gap below ``delta``), then continues with a fresh
    random admissible word, differing at the first free position when the
    system allows it.
    """
    base = int(math.floor(-math.log2(delta))) + 1  # 2^-base < delta
    v = system.block - 1
    k = system.k
    agrees = base + rng.integers(0, 3, size=length)
    if system.is_full:
        fresh = rng.integers(0, k, size=(length, free)).astype(np.int16)
        flips = rng.integers(1, k, size=length)
        periods = rng.integers(0, k, size=(length, 4)).astype(np.int16)
        plens = rng.integers(1, 5, size=length)
        pts = [SymbolicPoint(fresh[0], periods[0, :plens[0]])]
        for i in range(1, length):
            prev = pts[-1].prefix
            a = int(agrees[i])
            word = np.empty(a + free, dtype=np.int16)
            word[:a] = prev[1:a + 1]
            word[a] = (prev[a + 1] + flips[i]) % k
            word[a + 1:] = fresh[i, :free - 1]
            pts.append(SymbolicPoint(word, periods[i, :plens[i]]))
        return PseudoOrbit(pts, delta)
    pool = _walk_pool(system, rng, free)
    start = system.vertices[int(rng.integers(len(system.vertices)))]
    first = pool[start]
    pts = [_close(system, concat([start, first[min(first)][0]]))]
    for i in range(1, length):
        prev = pts[-1].prefix
        a = int(agrees[i])
        groups = pool[tuple(prev[a + 1 - v:a + 1].tolist())]
        keys = [c for c in groups if c != prev[a + 1]] or list(groups)
        options = groups[keys[int(rng.integers(len(keys)))]]
        tail = options[int(rng.integers(len(options)))]
        word = np.empty(a + free, dtype=np.int16)
        word[:a] = prev[1:a + 1]
        word[a:] = tail
        pts.append(_close(system, word))
    return PseudoOrbit(pts, delta)


def random_interval_pseudo_orbit(system: IntervalHomeo, delta: float, length: int, rng) -> PseudoOrbit:
    x = float(rng.random())
    pts = [x]
    for _ in range(length - 1):
        x = float(np.clip(system.step(x) + rng.uniform(-0.99, 0.99) * delta, 0.0, 1.0))
        pts.append(x)
    return PseudoOrbit(pts, delta)


def shadowing_modulus(system: System, eps: float, trials: int, horizon: int, seed: int,
                      min_exponent: int = 30) -> float:
    """Largest ``delta`` in a halving search for which every random trial was ``eps``-traced."""
    if trials < 10:
        raise ValueError("trials must be >= 10")
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    cap = modulus_limit(system) if isinstance(system, Shift) else 0.25
    if eps >= system.diameter:
        return cap
    rng = np.random.default_rng(seed)
    delta = cap
    for _ in range(min_exponent):
        ok = True
        for _ in range(trials):
            try:
                if isinstance(system, Shift):
                    cert = trace_symbolic(system, random_symbolic_pseudo_orbit(system, delta, horizon, rng))
                else:
                    cert = trace_interval(system, random_interval_pseudo_orbit(system, delta, horizon, rng), eps)
            except NoShadowFound:
                ok = False
                break
            if cert.epsilon >= eps:
                ok = False
                break
        if ok:
            return delta
        delta /= 2
    return 0.0
