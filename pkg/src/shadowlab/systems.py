"""Dynamical systems: compact metric space plus a continuous self-map.

Four kinds are supported: the full shift, subshifts of finite type (given by
forbidden words), increasing homeomorphisms of [0, 1] fixing only the
endpoints, and maps of the 2-torus realized as the unit square with
wraparound. Systems are immutable after construction.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, EmptySystem, InvalidAlphabet, InvalidHomeo, InvalidPoint
from .symbolic import SymbolicPoint, as_word, first_difference, word_str


class System:
    kind: str = "abstract"
    diameter: float = 1.0

    def step(self, x):
        raise NotImplementedError

    def metric(self, x, y) -> float:
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def check_point(self, x):
        if not self.contains(x):
            raise InvalidPoint(f"{x!r} is not in the phase space of {self.describe()}")
        return x

    def iterate(self, x, n: int):
        for _ in range(n):
            x = self.step(x)
        return x

    def describe(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Symbolic systems


@dataclass(frozen=True)
class SftSpec:
    k: int
    forbidden: tuple = ()

    def __post_init__(self):
        words = tuple(word_str(as_word(w)) for w in self.forbidden)
        object.__setattr__(self, "forbidden", words)


class Shift(System):
    """Full shift or subshift of finite type on ``{0..k-1}^N``.

    Forbidden words of length ``w > 2`` are recoded: vertices of the transition
    graph are admissible ``(w-1)``-blocks and edges are admissible ``w``-blocks.
    Vertices without an infinite forward path are pruned.
    """

    diameter = 1.0

    def __init__(self, spec: SftSpec):
        if spec.k < 2:
            raise InvalidAlphabet(f"alphabet size must be >= 2, got {spec.k}")
        self.spec = spec
        self.k = spec.k
        self.forbidden = tuple(as_word(w) for w in spec.forbidden)
        if any(len(w) == 0 for w in self.forbidden):
            raise EmptySystem("the empty word is forbidden")
        if any(int(w.max()) >= self.k or int(w.min()) < 0 for w in self.forbidden):
            raise InvalidAlphabet("forbidden word uses symbols outside the alphabet")
        self.block = max([2] + [len(w) for w in self.forbidden])
        self._build_graph()

    @property
    def kind(self) -> str:
        return "full_shift" if not self.forbidden else "sft"

    @property
    def is_full(self) -> bool:
        return not self.forbidden

    def _avoids(self, word) -> bool:
        if len(word) > 32:
            arr = as_word(word)
            for f in self.forbidden:
                if len(f) <= len(arr):
                    win = np.lib.stride_tricks.sliding_window_view(arr, len(f))
                    if np.any(np.all(win == f, axis=1)):
                        return False
            return True
        word = tuple(int(c) for c in word)
        for f in self.forbidden:
            f = tuple(int(c) for c in f)
            for i in range(len(word) - len(f) + 1):
                if word[i:i + len(f)] == f:
                    return False
        return True

    def _build_graph(self):
        v = self.block - 1
        verts = [w for w in itertools.product(range(self.k), repeat=v) if self._avoids(w)]
        alive = set(verts)
        succ = {}
        while True:
            succ = {a: [a[1:] + (s,) for s in range(self.k)
                        if a[1:] + (s,) in alive and self._avoids(a + (s,))] for a in alive}
            dead = {a for a, nxt in succ.items() if not nxt}
            if not dead:
                break
            alive -= dead
        if not alive:
            raise EmptySystem(f"subshift with forbidden words {list(self.spec.forbidden)} is empty")
        self.vertices = sorted(alive)
        self.index = {a: i for i, a in enumerate(self.vertices)}
        n = len(self.vertices)
        A = np.zeros((n, n), dtype=np.int64)
        for a, nxt in succ.items():
            for b in nxt:
                A[self.index[a], self.index[b]] = 1
        self.transition = A
        self.next_symbols = {a: sorted(b[-1] for b in succ[a]) for a in self.vertices}
        self._tails: dict = {}

    def describe(self) -> dict:
        if self.is_full:
            return {"kind": "full_shift", "k": self.k}
        return {"kind": "sft", "k": self.k, "forbidden": list(self.spec.forbidden)}

    def step(self, x: SymbolicPoint) -> SymbolicPoint:
        return x.shift(1)

    def metric(self, x: SymbolicPoint, y: SymbolicPoint) -> float:
        i = first_difference(x, y)
        return 0.0 if i is None else 2.0 ** (-i)

    def word_admissible(self, word) -> bool:
        """Factor check plus forward extendability of the final block."""
        word = as_word(word)
        if not self._avoids(word):
            return False
        if len(word) >= self.block - 1:
            return tuple(int(c) for c in word[len(word) - self.block + 1:]) in self.index
        return any(v[:len(word)] == tuple(int(c) for c in word) for v in self.vertices)

    def contains(self, x) -> bool:
        if not isinstance(x, SymbolicPoint):
            return False
        if len(x.prefix) + len(x.period) == 0:
            return True
        if x.min_symbol() < 0 or x.max_symbol() >= self.k:
            return False
        if self.is_full:
            return True
        if x.is_finite:
            return self.word_admissible(x.prefix)
        n = len(x.prefix) + 2 * len(x.period) + self.block
        return self._avoids(x.coords(n))

    def successors(self, vertex: tuple) -> list[tuple]:
        i = self.index[vertex]
        return [self.vertices[j] for j in np.flatnonzero(self.transition[i])]

    def connector(self, left, right) -> np.ndarray:
        """Shortest word ``c`` with ``left + c + right`` admissible.

        ``left`` and ``right`` must be admissible words of length at least
        ``block - 1``. Empty on the full shift.
        """
        left = as_word(left)
        right = as_word(right)
        if self.is_full:
            return left[:0]
        v = self.block - 1
        start = tuple(int(c) for c in left[len(left) - v:])
        target = tuple(int(c) for c in right[:v])
        # states: (vertex, appended-length capped at v); path must append >= v symbols
        seen = {(start, 0): None}
        queue = deque([(start, 0)])
        while queue:
            node = queue.popleft()
            vert, depth = node
            if depth >= v and vert == target:
                out = []
                while seen[node] is not None:
                    out.append(node[0][-1])
                    node = seen[node]
                appended = out[::-1]
                return as_word(appended[:len(appended) - v])
            for nxt in self.successors(vert):
                state = (nxt, min(depth + 1, v))
                if state not in seen:
                    seen[state] = node
                    queue.append(state)
        raise EmptySystem(f"no admissible transition from {word_str(left)} to {word_str(right)}")

    def periodic_tail(self, word) -> tuple[np.ndarray, np.ndarray]:
        """(bridge, cycle): ``word + bridge + cycle^inf`` is an admissible point."""
        word = as_word(word)
        if self.is_full:
            return word[:0], as_word([0])
        v = self.block - 1
        start = tuple(int(c) for c in word[len(word) - v:])
        if start in self._tails:
            return self._tails[start]
        # walk greedily (smallest successor) until a vertex repeats
        path = [start]
        pos = {start: 0}
        while True:
            nxt = self.successors(path[-1])[0]
            if nxt in pos:
                cut = pos[nxt]
                bridge = [p[-1] for p in path[1:cut + 1]]
                cycle = [p[-1] for p in path[cut + 1:]] + [nxt[-1]]
                self._tails[start] = (as_word(bridge), as_word(cycle))
                return self._tails[start]
            pos[nxt] = len(path)
            path.append(nxt)


def make_full_shift(k: int) -> Shift:
    return Shift(SftSpec(k, ()))


def make_sft(spec: SftSpec) -> Shift:
    return Shift(spec)


GOLDEN_MEAN = SftSpec(2, ("11",))


# ---------------------------------------------------------------------------
# Interval homeomorphisms


_INTERVAL_FORMULAS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sqrt": np.sqrt,
    "square": np.square,
}


class IntervalHomeo(System):
    """Increasing homeomorphism of [0, 1] whose only fixed points are 0 and 1."""

    kind = "interval_homeo"
    diameter = 1.0

    def __init__(self, formula: str = "sqrt", func: Callable | None = None, samples: int = 4097):
        self.formula = formula
        if func is None:
            func = _resolve_interval_formula(formula)
        self.func = func
        grid = np.linspace(0.0, 1.0, samples)
        vals = np.asarray(func(grid), dtype=float)
        if abs(vals[0]) > 1e-12 or abs(vals[-1] - 1.0) > 1e-12:
            raise InvalidHomeo(f"{formula}: endpoints must be fixed")
        if np.any(np.diff(vals) <= 0):
            raise InvalidHomeo(f"{formula}: not strictly increasing")
        gap = vals[1:-1] - grid[1:-1]
        if not (np.all(gap > 0) or np.all(gap < 0)):
            raise InvalidHomeo(f"{formula}: has interior fixed points or changes side")
        self.direction = 1 if gap[0] > 0 else -1

    def describe(self) -> dict:
        return {"kind": "interval_homeo", "formula": self.formula}

    def step(self, x):
        return self.func(x) if isinstance(x, np.ndarray) else float(self.func(x))

    def metric(self, x, y) -> float:
        return abs(float(x) - float(y))

    def contains(self, x) -> bool:
        try:
            return 0.0 <= float(x) <= 1.0
        except (TypeError, ValueError):
            return False


def _resolve_interval_formula(formula: str):
    if formula in _INTERVAL_FORMULAS:
        return _INTERVAL_FORMULAS[formula]
    if formula.startswith("power:"):
        p = float(formula.split(":", 1)[1])
        if p <= 0:
            raise InvalidHomeo("power must be positive")
        return lambda x: np.power(x, p)
    if formula == "tent":
        return lambda x: 1.0 - np.abs(1.0 - 2.0 * np.asarray(x))
    raise InvalidHomeo(f"unknown interval formula {formula!r}")


def make_interval_homeo(formula: str = "sqrt") -> IntervalHomeo:
    return IntervalHomeo(formula)


# ---------------------------------------------------------------------------
# Torus maps


def torus_delta(a, b):
    """Componentwise signed difference ``a - b`` wrapped into [-1/2, 1/2)."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return d - np.floor(d + 0.5)


@dataclass(frozen=True)
class GridMapSpec:
    name: str
    params: dict = field(default_factory=dict)


def _named_torus_map(name: str, params: dict) -> Callable[[np.ndarray], np.ndarray]:
    if name == "identity":
        return lambda p: np.array(p, dtype=float)
    if name == "translate":
        shift = np.array([params.get("dx", 0.3), params.get("dy", 0.0)], dtype=float)
        return lambda p: np.mod(np.asarray(p, dtype=float) + shift, 1.0)
    if name == "constant":
        c = np.array(params.get("point", [0.5, 0.5]), dtype=float)
        return lambda p: np.broadcast_to(c, np.shape(p)).copy()
    if name == "sine_sink":
        a = float(params.get("a", 0.1))
        return lambda p: np.mod(np.asarray(p, dtype=float) + a * np.sin(2 * np.pi * np.asarray(p, dtype=float)), 1.0)
    if name == "stretch":
        a = float(params.get("a", 0.05))
        q = int(params.get("q", 40))
        return lambda p: np.mod(np.asarray(p, dtype=float) + a * np.sin(2 * np.pi * q * np.asarray(p, dtype=float)), 1.0)
    if name == "affine_table":
        table = np.asarray(params["table"], dtype=float)
        cells = int(round(math.sqrt(len(table))))
        if cells * cells != len(table) or table.shape[1] != 6:
            raise ConfigError("affine_table needs g*g rows of [a11,a12,a21,a22,b1,b2]")

        def f(p):
            p = np.asarray(p, dtype=float)
            flat = p.reshape(-1, 2)
            ij = np.minimum((flat * cells).astype(int), cells - 1)
            rows = table[ij[:, 0] * cells + ij[:, 1]]
            out = np.stack([rows[:, 0] * flat[:, 0] + rows[:, 1] * flat[:, 1] + rows[:, 4],
                            rows[:, 2] * flat[:, 0] + rows[:, 3] * flat[:, 1] + rows[:, 5]], axis=1)
            return np.mod(out, 1.0).reshape(p.shape)
        return f
    raise ConfigError(f"unknown grid map {name!r}")


class GridMap(System):
    """Continuous self-map of the 2-torus ``[0,1)^2`` with the wrapped Euclidean metric.

    ``g`` is the resolution of the companion grid decomposition; it does not
    affect the dynamics. Points are length-2 float arrays; ``step`` also
    accepts ``(n, 2)`` batches.
    """

    kind = "grid_map"
    diameter = math.sqrt(2) / 2

    def __init__(self, g: int, spec: GridMapSpec | None = None, func: Callable | None = None,
                 lipschitz: float | None = None):
        if g < 1:
            raise ConfigError("grid size must be positive")
        self.g = g
        self.spec = spec or GridMapSpec("identity")
        self.func = func if func is not None else _named_torus_map(self.spec.name, self.spec.params)
        self.lipschitz = lipschitz if lipschitz is not None else _default_lipschitz(self.spec)

    def describe(self) -> dict:
        d = {"kind": "grid_map", "g": self.g, "map": self.spec.name}
        if self.spec.params:
            d["params"] = dict(self.spec.params)
        return d

    def step(self, x):
        return self.func(x)

    def metric(self, x, y) -> float:
        return float(np.linalg.norm(torus_delta(x, y), axis=-1))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return x.shape == (2,) and bool(np.all((x >= 0) & (x <= 1)))


def _default_lipschitz(spec: GridMapSpec) -> float:
    name, p = spec.name, spec.params
    if name in ("identity", "translate", "affine_table"):
        if name == "affine_table":
            t = np.asarray(p["table"], dtype=float)
            return float(np.max(np.abs(t[:, :4]).sum(axis=1)))
        return 1.0
    if name == "constant":
        return 0.0
    if name == "sine_sink":
        return 1.0 + 2 * np.pi * abs(float(p.get("a", 0.1)))
    if name == "stretch":
        return 1.0 + 2 * np.pi * abs(float(p.get("a", 0.05))) * int(p.get("q", 40))
    return 1.0


# ---------------------------------------------------------------------------


def orbit_segment(system: System, x, n: int) -> list:
    """``(x, f(x), ..., f^{n-1}(x))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    system.check_point(x)
    out = [x]
    for _ in range(n - 1):
        x = system.step(x)
        out.append(x)
    return out


def system_from_descriptor(desc: dict) -> System:
    """Build a system from its JSON descriptor."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("system descriptor must be an object with a 'kind' field")
    kind = desc["kind"]
    if kind == "full_shift":
        return make_full_shift(int(desc.get("k", 2)))
    if kind == "sft":
        return make_sft(SftSpec(int(desc.get("k", 2)), tuple(desc.get("forbidden", ()))))
    if kind == "interval_homeo":
        return make_interval_homeo(desc.get("formula", "sqrt"))
    if kind == "grid_map":
        params = dict(desc.get("params", {}))
        return GridMap(int(desc.get("g", 16)), GridMapSpec(desc.get("map", "identity"), params))
    raise ConfigError(f"unknown system kind {kind!r}")
