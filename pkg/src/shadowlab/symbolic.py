"""One-sided symbolic sequences.

A :class:`SymbolicPoint` is either eventually periodic (``prefix`` followed by
``period`` repeated forever) or a finite horizon (``period`` empty). Shifting
is O(1): prefixes are numpy views.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import HorizonExhausted, InvalidPoint

_DTYPE = np.int16


def as_word(word) -> np.ndarray:
    """Coerce a string of digits or an iterable of ints to a symbol array."""
    if isinstance(word, np.ndarray):
        return word.astype(_DTYPE, copy=False)
    if isinstance(word, str):
        return np.array([int(c) for c in word], dtype=_DTYPE)
    return np.asarray(list(word), dtype=_DTYPE)


def word_str(word) -> str:
    return "".join(str(int(c)) for c in word)


class SymbolicPoint:
    """Point of a one-sided shift space."""

    __slots__ = ("prefix", "period", "_key")

    def __init__(self, prefix=(), period=()):
        self.prefix = as_word(prefix)
        self.period = as_word(period)
        self._key = None

    @classmethod
    def periodic(cls, period, prefix=()) -> "SymbolicPoint":
        period = as_word(period)
        if len(period) == 0:
            raise InvalidPoint("periodic point needs a nonempty period")
        return cls(prefix, period)

    @classmethod
    def finite(cls, word) -> "SymbolicPoint":
        return cls(word, ())

    @classmethod
    def parse(cls, text: str) -> "SymbolicPoint":
        """Parse ``"preperiod|period"``; a missing bar means a finite horizon."""
        if "|" in text:
            pre, per = text.split("|", 1)
            return cls(pre, per)
        return cls(text, ())

    def __str__(self) -> str:
        if self.is_finite:
            return word_str(self.prefix)
        return f"{word_str(self.prefix)}|{word_str(self.period)}"

    def __repr__(self) -> str:
        return f"SymbolicPoint({str(self)!r})"

    @property
    def is_finite(self) -> bool:
        return len(self.period) == 0

    @property
    def horizon(self) -> float:
        return len(self.prefix) if self.is_finite else math.inf

    def require(self, n: int) -> None:
        if n > self.horizon:
            raise HorizonExhausted(f"need {n} coordinates, point has horizon {len(self.prefix)}")

    def __getitem__(self, i: int) -> int:
        if i < len(self.prefix):
            return int(self.prefix[i])
        self.require(i + 1)
        return int(self.period[(i - len(self.prefix)) % len(self.period)])

    def coords(self, n: int, start: int = 0) -> np.ndarray:
        """Coordinates ``start, ..., start+n-1``."""
        stop = start + n
        if stop <= len(self.prefix):
            return self.prefix[start:stop]
        self.require(stop)
        head = self.prefix[start:] if start < len(self.prefix) else self.prefix[:0]
        offset = max(start - len(self.prefix), 0)
        need = n - len(head)
        p = len(self.period)
        reps = (offset % p + need) // p + 1
        tail = np.tile(self.period, reps)[offset % p: offset % p + need]
        return np.concatenate([head, tail])

    def shift(self, n: int = 1) -> "SymbolicPoint":
        if n <= len(self.prefix):
            return SymbolicPoint(self.prefix[n:], self.period)
        self.require(n)
        r = (n - len(self.prefix)) % len(self.period)
        return SymbolicPoint((), np.roll(self.period, -r))

    def canonical(self) -> tuple:
        """Hashable normal form; equal points have equal forms."""
        if self._key is None:
            if self.is_finite:
                self._key = (tuple(int(c) for c in self.prefix), None)
            else:
                per = _primitive(self.period)
                pre = list(int(c) for c in self.prefix)
                per = list(int(c) for c in per)
                while pre and pre[-1] == per[-1]:
                    pre.pop()
                    per = [per[-1]] + per[:-1]
                self._key = (tuple(pre), tuple(per))
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicPoint):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def max_symbol(self) -> int:
        vals = [int(self.prefix.max()) if len(self.prefix) else -1]
        if len(self.period):
            vals.append(int(self.period.max()))
        return max(vals)

    def min_symbol(self) -> int:
        vals = [int(self.prefix.min()) if len(self.prefix) else 0]
        if len(self.period):
            vals.append(int(self.period.min()))
        return min(vals)


def _primitive(period: np.ndarray) -> np.ndarray:
    p = len(period)
    for d in range(1, p + 1):
        if p % d == 0 and np.array_equal(np.tile(period[:d], p // d), period):
            return period[:d]
    return period


def decision_length(x: SymbolicPoint, y: SymbolicPoint) -> int | None:
    """Number of coordinates after which equality of ``x`` and ``y`` is settled.

    ``None`` when at least one point is a finite horizon.
    """
    if x.is_finite or y.is_finite:
        return None
    return max(len(x.prefix), len(y.prefix)) + math.lcm(len(x.period), len(y.period))


def first_difference(x: SymbolicPoint, y: SymbolicPoint, chunk: int = 256) -> int | None:
    """Smallest ``i`` with ``x_i != y_i``, or ``None`` if ``x == y``.

    Raises :class:`HorizonExhausted` when finite horizons run out before a
    difference is found.
    """
    limit = decision_length(x, y)
    if limit is None:
        limit = int(min(x.horizon, y.horizon))
        exact = False
    else:
        exact = True
    start = 0
    while start < limit:
        n = min(chunk, limit - start)
        a = x.coords(n, start)
        b = y.coords(n, start)
        diff = np.flatnonzero(a != b)
        if len(diff):
            return start + int(diff[0])
        start += n
        chunk *= 2
    if exact:
        return None
    raise HorizonExhausted(f"points agree on their common horizon {limit}; distance undetermined")


def shift_distance(x: SymbolicPoint, y: SymbolicPoint) -> float:
    """``2^-i`` for the first disagreement index ``i``; 0 for equal points."""
    i = first_difference(x, y)
    return 0.0 if i is None else 2.0 ** (-i)


def concat(words: Iterable) -> np.ndarray:
    parts = [as_word(w) for w in words]
    if not parts:
        return np.zeros(0, dtype=_DTYPE)
    return np.concatenate(parts)


def all_words(k: int, n: int) -> np.ndarray:
    """All ``k**n`` words of length ``n`` in lexicographic order, as rows."""
    if n == 0:
        return np.zeros((1, 0), dtype=_DTYPE)
    grid = np.indices((k,) * n).reshape(n, -1).T
    return grid.astype(_DTYPE)


def encode(rows: np.ndarray, k: int) -> np.ndarray:
    """Base-``k`` integer code of each row (most significant symbol first)."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[-1] == 0:
        return np.zeros(rows.shape[:-1], dtype=np.int64)
    weights = k ** np.arange(rows.shape[-1] - 1, -1, -1, dtype=np.int64)
    return rows @ weights


def windows(x: SymbolicPoint, n: int, depth: int) -> np.ndarray:
    """Matrix whose row ``i`` holds coordinates ``i .. i+depth-1`` of ``x``, for ``i < n``."""
    seq = x.coords(n + depth - 1)
    return np.lib.stride_tricks.sliding_window_view(seq, depth)[:n]


def words_in(seq: Sequence[int] | np.ndarray, w: Sequence[int] | np.ndarray) -> bool:
    """True iff ``w`` occurs as a factor of ``seq``."""
    seq = as_word(seq)
    w = as_word(w)
    if len(w) > len(seq):
        return False
    if len(w) == 0:
        return True
    win = np.lib.stride_tricks.sliding_window_view(seq, len(w))
    return bool(np.any(np.all(win == w, axis=1)))
