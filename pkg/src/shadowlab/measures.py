"""Empirical measures, the truncated weak* metric and Birkhoff averages.

The weak* metric is the series ``sum_j |int phi_j dxi - int phi_j dtau| / (2^j |phi_j|)``
over a fixed enumeration of test functions. It is always evaluated at a finite
truncation ``J`` and reported together with the tail bound ``2^(1-J)``, so that
``value <= rho <= value + tail``.

Test families:

* shifts: indicators of cylinder words (admissible ones only), by length then
  lexicographically;
* the interval: hat functions at dyadic centres, coarse to fine
  (0, 1, 1/2, 1/4, 3/4, 1/8, ...), half-width ``2^-level``;
* the torus: products of periodic hats on the dyadic lattice of each level.

All test functions have sup-norm 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InsufficientEvidence
from .symbolic import SymbolicPoint, all_words, as_word, encode, windows
from .systems import GridMap, IntervalHomeo, Shift, System, torus_delta


# ---------------------------------------------------------------------------
# test families


class CylinderFamily:
    """Indicators of admissible cylinder words."""

    def __init__(self, system: Shift):
        self.system = system
        self.k = system.k
        self._words: list[np.ndarray] = []
        self._length = 0

    def words(self, J: int) -> list[np.ndarray]:
        while len(self._words) < J:
            self._length += 1
            if self.k ** self._length > 2 ** 22:
                raise ValueError("cylinder enumeration too deep for this J")
            for row in all_words(self.k, self._length):
                if self.system.is_full or self.system.word_admissible(row):
                    self._words.append(row)
        return self._words[:J]

    def depth(self, J: int) -> int:
        return max(len(w) for w in self.words(J))

    def norms(self, J: int) -> np.ndarray:
        return np.ones(J)

    def evaluate_windows(self, win: np.ndarray, J: int) -> np.ndarray:
        """``(n, J)`` matrix of indicator values for atoms given by coordinate windows."""
        words = self.words(J)
        out = np.zeros((win.shape[0], J))
        by_len: dict[int, list[tuple[int, int]]] = {}
        for j, w in enumerate(words):
            by_len.setdefault(len(w), []).append((j, int(encode(w, self.k))))
        for length, items in by_len.items():
            codes = encode(win[:, :length], self.k)
            for j, c in items:
                out[:, j] = codes == c
        return out

    def word_probabilities(self, prob: Callable[[np.ndarray], float], J: int) -> np.ndarray:
        return np.array([prob(w) for w in self.words(J)])


class HatFamily:
    """Dyadic hat functions on [0, 1]."""

    def __init__(self):
        self._centers: list[float] = []
        self._widths: list[float] = []
        self._level = -1

    def _grow(self, J: int):
        while len(self._centers) < J:
            self._level += 1
            if self._level == 0:
                self._centers += [0.0, 1.0]
                self._widths += [1.0, 1.0]
            else:
                w = 2.0 ** (-self._level)
                for i in range(1, 2 ** self._level, 2):
                    self._centers.append(i * w)
                    self._widths.append(w)

    def norms(self, J: int) -> np.ndarray:
        return np.ones(J)

    def evaluate(self, xs: np.ndarray, J: int) -> np.ndarray:
        self._grow(J)
        c = np.asarray(self._centers[:J])
        w = np.asarray(self._widths[:J])
        xs = np.asarray(xs, dtype=float).reshape(-1, 1)
        return np.maximum(0.0, 1.0 - np.abs(xs - c) / w)


class TorusHatFamily:
    """Products of periodic hats centred on dyadic lattices of the torus."""

    def __init__(self):
        self._centers: list[tuple[float, float]] = []
        self._widths: list[float] = []
        self._level = -1
        self._seen: set = set()

    def _grow(self, J: int):
        while len(self._centers) < J:
            self._level += 1
            m = 2 ** self._level
            for i, j in itertools.product(range(m), repeat=2):
                key = (i * (2 ** 20 // m), j * (2 ** 20 // m))
                if key in self._seen:
                    continue
                self._seen.add(key)
                self._centers.append((i / m, j / m))
                self._widths.append(1.0 / m)

    def norms(self, J: int) -> np.ndarray:
        return np.ones(J)

    def evaluate(self, pts: np.ndarray, J: int) -> np.ndarray:
        self._grow(J)
        c = np.asarray(self._centers[:J])
        w = np.asarray(self._widths[:J])
        pts = np.asarray(pts, dtype=float).reshape(-1, 1, 2)
        d = np.abs(torus_delta(pts, c[None, :, :]))
        hat = np.maximum(0.0, 1.0 - d / w[None, :, None])
        return hat[..., 0] * hat[..., 1]


def test_family(system: System):
    fam = getattr(system, "_test_family", None)
    if fam is None:
        if isinstance(system, Shift):
            fam = CylinderFamily(system)
        elif isinstance(system, IntervalHomeo):
            fam = HatFamily()
        elif isinstance(system, GridMap):
            fam = TorusHatFamily()
        else:
            raise TypeError(f"no test family for {type(system).__name__}")
        system._test_family = fam
    return fam


def tail_bound(J: int) -> float:
    return 2.0 ** (1 - J)


# ---------------------------------------------------------------------------
# measures


class Measure:
    """Anything that can be integrated against the first ``J`` test functions."""

    system: System

    def integrals(self, J: int) -> np.ndarray:
        raise NotImplementedError


class EmpiricalMeasure(Measure):
    """Finite weighted atomic measure.

    For shifts, atoms are :class:`SymbolicPoint` objects or, for orbit
    measures, the lazy pair ``(x, n)`` standing for ``x, sx, ..., s^{n-1}x``.
    For float systems atoms are stored as an array.
    """

    def __init__(self, system: System, atoms, weights, orbit: tuple | None = None):
        self.system = system
        self.atoms = atoms
        self.weights = np.asarray(weights, dtype=float)
        self.orbit = orbit
        self._cache: dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def total_mass(self) -> float:
        return float(math.fsum(self.weights))

    def atom_matrix(self, J: int) -> np.ndarray:
        fam = test_family(self.system)
        if isinstance(self.system, Shift):
            depth = fam.depth(J)
            if self.orbit is not None:
                x, n = self.orbit
                win = windows(x, n, depth)
            else:
                win = np.stack([a.coords(depth) for a in self.atoms]) if len(self.atoms) else np.zeros((0, depth))
            return fam.evaluate_windows(win, J)
        return fam.evaluate(self.atoms, J)

    def integrals(self, J: int) -> np.ndarray:
        if J not in self._cache:
            self._cache[J] = self.weights @ self.atom_matrix(J) if len(self.weights) else np.zeros(J)
        return self._cache[J]

    def support(self) -> dict:
        """Distinct atoms mapped to their total weight."""
        out: dict = {}
        if isinstance(self.system, Shift):
            pts = self.atom_points()
            for p, w in zip(pts, self.weights):
                key = p.canonical()
                prev = out.get(key)
                out[key] = (p, (prev[1] if prev else 0.0) + w)
            return {str(p): w for p, w in out.values()}
        arr = np.asarray(self.atoms, dtype=float)
        for a, w in zip(arr.reshape(len(self.weights), -1), self.weights):
            key = tuple(float(v) for v in a)
            out[key] = out.get(key, 0.0) + w
        return out

    def atom_points(self) -> list:
        if self.orbit is not None:
            x, n = self.orbit
            return [x.shift(i) for i in range(n)]
        return list(self.atoms)


class MarkovMeasure(Measure):
    """Stationary Markov measure on a shift, in the recoded vertex presentation.

    ``P`` is a stochastic matrix over ``system.vertices`` and ``pi`` its
    stationary vector. Bernoulli and Parry measures are special cases.
    """

    def __init__(self, system: Shift, P: np.ndarray, pi: np.ndarray, name: str = "markov"):
        self.system = system
        self.P = np.asarray(P, dtype=float)
        self.pi = np.asarray(pi, dtype=float)
        self.name = name
        self._cache: dict[int, np.ndarray] = {}

    @classmethod
    def bernoulli(cls, system: Shift, probs: Sequence[float] | None = None) -> "MarkovMeasure":
        if not system.is_full:
            raise ValueError("Bernoulli measures live on full shifts")
        k = system.k
        probs = np.full(k, 1.0 / k) if probs is None else np.asarray(probs, dtype=float)
        if len(probs) != k or abs(probs.sum() - 1) > 1e-12 or np.any(probs < 0):
            raise ValueError("probabilities must be a distribution over the alphabet")
        nv = len(system.vertices)
        P = np.zeros((nv, nv))
        for i, v in enumerate(system.vertices):
            for j, u in enumerate(system.vertices):
                if system.transition[i, j]:
                    P[i, j] = probs[u[-1]]
        pi = np.array([float(np.prod([probs[s] for s in v])) for v in system.vertices])
        return cls(system, P, pi, name=f"bernoulli{tuple(float(p) for p in probs)}")

    @classmethod
    def parry(cls, system: Shift) -> "MarkovMeasure":
        """Measure of maximal entropy of an irreducible subshift of finite type."""
        A = system.transition.astype(float)
        vals, right = np.linalg.eig(A)
        i = int(np.argmax(vals.real))
        lam = vals[i].real
        v = np.abs(right[:, i].real)
        valsT, left = np.linalg.eig(A.T)
        u = np.abs(left[:, int(np.argmax(valsT.real))].real)
        P = A * v[None, :] / (lam * v[:, None])
        pi = u * v
        pi = pi / pi.sum()
        return cls(system, P, pi, name="parry")

    def cylinder(self, word) -> float:
        word = tuple(int(c) for c in as_word(word))
        v = self.system.block - 1
        idx = self.system.index
        if len(word) < v:
            return float(sum(self.pi[i] for vert, i in idx.items() if vert[:len(word)] == word))
        first = word[:v]
        if first not in idx:
            return 0.0
        p = self.pi[idx[first]]
        cur = idx[first]
        for s in range(v, len(word)):
            nxt = word[s - v + 1:s + 1]
            if nxt not in idx:
                return 0.0
            p *= self.P[cur, idx[nxt]]
            cur = idx[nxt]
        return float(p)

    def integrals(self, J: int) -> np.ndarray:
        if J not in self._cache:
            fam = test_family(self.system)
            self._cache[J] = fam.word_probabilities(self.cylinder, J)
        return self._cache[J]


class PeriodicOrbitMeasure(Measure):
    """Uniform measure on the orbit of a periodic point ``period^inf``."""

    def __init__(self, system: Shift, period):
        self.system = system
        self.period = as_word(period)
        self.point = SymbolicPoint.periodic(self.period)
        self.name = f"periodic({''.join(map(str, self.period))})"

    def integrals(self, J: int) -> np.ndarray:
        n = len(self.period)
        return EmpiricalMeasure(self.system, None, np.full(n, 1.0 / n), orbit=(self.point, n)).integrals(J)


class Mixture(Measure):
    def __init__(self, parts: Sequence[Measure], coeffs: Sequence[float]):
        self.parts = list(parts)
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.system = self.parts[0].system

    def integrals(self, J: int) -> np.ndarray:
        return sum(c * p.integrals(J) for c, p in zip(self.coeffs, self.parts))


def dirac(system: System, x) -> EmpiricalMeasure:
    if isinstance(system, Shift):
        return EmpiricalMeasure(system, [x], [1.0])
    return EmpiricalMeasure(system, np.asarray([x], dtype=float), [1.0])


# ---------------------------------------------------------------------------
# orbits


def float_orbit(system: System, x, n: int) -> tuple[np.ndarray, int]:
    """Orbit of a float system, truncated once it hits an exact fixed point.

    Returns ``(points, stop)`` where ``points`` has ``stop`` rows; if
    ``stop < n`` then ``points[-1]`` is fixed and carries the remaining mass.
    """
    pts = [np.asarray(x, dtype=float)]
    for _ in range(n - 1):
        nxt = np.asarray(system.step(pts[-1]), dtype=float)
        if np.array_equal(nxt, pts[-1]):
            break
        pts.append(nxt)
    return np.array(pts), len(pts)


def empirical_measure(system: System, x, n: int) -> EmpiricalMeasure:
    """The ``n``-th empirical measure ``(1/n) sum_{j<n} delta_{f^j x}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    system.check_point(x)
    if isinstance(system, Shift):
        x.require(n)
        return EmpiricalMeasure(system, None, np.full(n, 1.0 / n), orbit=(x, n))
    pts, stop = float_orbit(system, x, n)
    weights = np.full(stop, 1.0 / n)
    weights[-1] += (n - stop) / n
    return EmpiricalMeasure(system, pts, weights)


def checkpoint_measures(system: System, x, checkpoints: Sequence[int]) -> list[EmpiricalMeasure]:
    """Empirical measures at each checkpoint, sharing one orbit computation."""
    if isinstance(system, Shift):
        return [empirical_measure(system, x, n) for n in checkpoints]
    system.check_point(x)
    pts, stop = float_orbit(system, x, max(checkpoints))
    out = []
    for n in checkpoints:
        m = min(n, stop)
        weights = np.full(m, 1.0 / n)
        weights[-1] += (n - m) / n
        out.append(EmpiricalMeasure(system, pts[:m], weights))
    return out


# ---------------------------------------------------------------------------
# the metric


@dataclass(frozen=True)
class MeasureDistance:
    value: float
    J: int
    tail: float

    @property
    def upper(self) -> float:
        return self.value + self.tail

    def certainly_below(self, r: float) -> bool:
        return self.upper < r

    def certainly_above(self, r: float) -> bool:
        return self.value > r

    def as_dict(self) -> dict:
        return {"value": self.value, "J": self.J, "tail": self.tail}


def series_distance(a: np.ndarray, b: np.ndarray, norms: np.ndarray | None = None) -> float:
    J = len(a)
    norms = np.ones(J) if norms is None else norms
    terms = np.abs(np.asarray(a) - np.asarray(b)) / (2.0 ** np.arange(1, J + 1) * norms)
    return float(math.fsum(terms))


def weak_star_distance(xi: Measure, tau: Measure, J: int = 20) -> MeasureDistance:
    if J < 1:
        raise ValueError("J must be >= 1")
    fam = test_family(xi.system)
    value = series_distance(xi.integrals(J), tau.integrals(J), fam.norms(J))
    return MeasureDistance(value, J, tail_bound(J))


def dirac_distance_matrix(system: System, atoms_a, atoms_b, J: int = 20) -> np.ndarray:
    """Row-wise ``rho_J(delta_a, delta_b)``: the metric induced on X by the embedding ``x -> delta_x``."""
    ma = EmpiricalMeasure(system, atoms_a, np.ones(len(atoms_a))).atom_matrix(J)
    mb = EmpiricalMeasure(system, atoms_b, np.ones(len(atoms_b))).atom_matrix(J)
    return np.abs(ma - mb) @ (1.0 / 2.0 ** np.arange(1, J + 1))


def induced_bowen_distance(system: System, x, y, p: int, J: int = 20) -> float:
    """``max_{i<p} rho_J(delta_{f^i x}, delta_{f^i y})``."""
    ex = empirical_measure(system, x, p)
    ey = empirical_measure(system, y, p)
    if isinstance(system, Shift):
        ma, mb = ex.atom_matrix(J), ey.atom_matrix(J)
    else:
        ma = test_family(system).evaluate(np.array(orbit_points(system, x, p)), J)
        mb = test_family(system).evaluate(np.array(orbit_points(system, y, p)), J)
    return float(np.max(np.abs(ma - mb) @ (1.0 / 2.0 ** np.arange(1, J + 1))))


def orbit_points(system: System, x, n: int) -> list:
    out = [x]
    for _ in range(n - 1):
        out.append(system.step(out[-1]))
    return out


def birkhoff_average(system: System, phi: Callable, x, n: int) -> float:
    """``(1/n) sum_{i<n} phi(f^i x)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    system.check_point(x)
    if isinstance(system, Shift):
        x.require(n)
        vec = getattr(phi, "on_windows", None)
        if vec is not None:
            return float(math.fsum(vec(windows(x, n, phi.depth))) / n)
        return float(math.fsum(phi(x.shift(i)) for i in range(n)) / n)
    pts, stop = float_orbit(system, x, n)
    vals = [float(phi(p)) for p in pts]
    return float((math.fsum(vals) + (n - stop) * vals[-1]) / n)


class CoordinateObservable:
    """``phi(x) = x_i`` on a shift, with a vectorized window path."""

    def __init__(self, i: int = 0):
        self.i = i
        self.depth = i + 1

    def __call__(self, x: SymbolicPoint) -> float:
        return float(x[self.i])

    def on_windows(self, win: np.ndarray) -> np.ndarray:
        return win[:, self.i].astype(float)


# ---------------------------------------------------------------------------
# classification


@dataclass
class Classification:
    verdict: str
    checkpoints: list[int]
    distances: np.ndarray
    clusters: list[int]
    witness: tuple[int, int, float]
    J: int
    radius: float
    measures: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        i, j, v = self.witness
        return {
            "verdict": self.verdict,
            "checkpoints": list(self.checkpoints),
            "cluster_representatives": [self.checkpoints[c] for c in self.clusters],
            "witness": {"n1": self.checkpoints[i], "n2": self.checkpoints[j], "rho": v,
                        "tail": tail_bound(self.J)},
            "J": self.J,
            "radius": self.radius,
        }


def classify_measures(measures: Sequence[Measure], checkpoints: Sequence[int], J: int = 20,
                      radius: float = 0.02) -> Classification:
    if len(measures) < 4:
        raise InsufficientEvidence("classification needs at least 4 checkpoints")
    m = len(measures)
    D = np.zeros((m, m))
    for a in range(m):
        for b in range(a + 1, m):
            D[a, b] = D[b, a] = weak_star_distance(measures[a], measures[b], J).value
    late = list(range(m // 2, m))
    tail = tail_bound(J)
    sub = D[np.ix_(late, late)]
    a, b = np.unravel_index(int(np.argmax(sub)), sub.shape)
    witness = (late[a], late[b], float(sub[a, b]))
    if witness[2] + tail < radius:
        verdict = "quasi-regular-candidate"
    elif witness[2] > 2 * radius + 2 * tail:
        verdict = "irregular-candidate"
    else:
        verdict = "inconclusive"
    clusters: list[int] = []
    for i in range(m):
        if all(D[i, c] > radius for c in clusters):
            clusters.append(i)
    return Classification(verdict, list(checkpoints), D, clusters, witness, J, radius, list(measures))


def classify_point(system: System, x, checkpoints: Sequence[int], J: int = 20,
                   radius: float = 0.02) -> Classification:
    checkpoints = list(checkpoints)
    if len(checkpoints) < 4:
        raise InsufficientEvidence("classification needs at least 4 checkpoints")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])) or checkpoints[0] < 1:
        raise ValueError("checkpoints must be strictly increasing positive integers")
    return classify_measures(checkpoint_measures(system, x, checkpoints), checkpoints, J, radius)


def checkpoint_rows(measures: Sequence[Measure], checkpoints: Sequence[int], J: int) -> list[list]:
    """CSV rows: ``n``, the ``J`` integrals, then rho to every checkpoint measure."""
    rows = []
    for n, mu in zip(checkpoints, measures):
        ints = mu.integrals(J)
        dists = [weak_star_distance(mu, nu, J).value for nu in measures]
        rows.append([n] + [float(v) for v in ints] + dists)
    return rows


def checkpoint_header(checkpoints: Sequence[int], J: int) -> list[str]:
    return ["n"] + [f"phi_{j}" for j in range(1, J + 1)] + [f"rho_to_{n}" for n in checkpoints]


# ---------------------------------------------------------------------------
# SRB-like basins


def srb_basin_estimate(system: GridMap, mu: Measure, eps: float, samples: int, n: int,
                       seed: int, J: int = 20) -> float:
    """Fraction of uniform samples whose late checkpoint measures are certified within ``eps`` of ``mu``.

    Checkpoints are ``n//2``, ``3n//4`` and ``n``; a sample counts when
    ``value + tail < eps`` at each of them.
    """
    if not isinstance(system, GridMap):
        raise TypeError("SRB basin estimates need a grid-map system")
    if samples < 100:
        raise ValueError("samples must be >= 100")
    if n < 4:
        raise ValueError("n must be >= 4")
    rng = np.random.default_rng(seed)
    pts = rng.random((samples, 2))
    fam = test_family(system)
    target = mu.integrals(J)
    checks = sorted({n // 2, (3 * n) // 4, n})
    acc = np.zeros((samples, J))
    ok = np.ones(samples, dtype=bool)
    weights = 1.0 / 2.0 ** np.arange(1, J + 1)
    cur = pts
    for step in range(1, n + 1):
        acc += fam.evaluate(cur, J).reshape(samples, J)
        if step in checks:
            dist = np.abs(acc / step - target) @ weights
            ok &= dist + tail_bound(J) < eps
        cur = system.step(cur)
    return float(ok.mean())
