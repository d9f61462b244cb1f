"""Irregular points by concatenating typical segments along a growing schedule.

Blocks are orbit segments of length ``L``: ``mu``-typical words chosen
freely from a bank, and a fixed ``nu``-generic word. Super-block ``q`` holds
``N_q (t+1)`` blocks; odd super-blocks use only ``mu`` words, even ones repeat
the pattern ``(mu^t, nu)``. Each super-block is ``lambda`` times longer than
everything before it, so empirical measures swing between ``mu`` and a
mixture ``beta mu + (1 - beta) nu`` and never converge.

Everything runs on shifts, where the shadowing point of the assembled
pseudo-orbit is the concatenated word itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import moran_lower_certificate
from .errors import ConfigError, DepthTooLarge, JunctionViolation, ToleranceTooTight
from .measures import (Classification, CylinderFamily, EmpiricalMeasure, MarkovMeasure,
                       MeasureDistance, Mixture, PeriodicOrbitMeasure, classify_measures,
                       tail_bound, test_family, weak_star_distance)
from .shadowing import PseudoOrbit, ShadowCertificate, trace_symbolic
from .symbolic import SymbolicPoint, all_words, as_word, first_difference, word_str
from .systems import Shift

MU, NU = 1, 0
MAX_BLOCKS = 2 ** 22


# ---------------------------------------------------------------------------
# schedule


@dataclass
class Schedule:
    lam: int
    t: int
    depth: int
    L: int
    connectors: tuple  # (n_{j1 i1}, n_{j1 i2}, n_{j2 i1}): mu->mu, mu->nu, nu->mu
    S: list
    N: list
    tags: np.ndarray   # per block, MU or NU
    kinds: np.ndarray  # per block, 0/1/2 indexing ``connectors``
    l: np.ndarray
    M: np.ndarray      # M[0] = 0, M[m] = m L + sum_{i<=m} l_i

    @property
    def blocks(self) -> int:
        return len(self.tags)

    def omega(self, m: int) -> str:
        return "mu" if self.tags[m - 1] == MU else "nu"

    def checkpoint(self, k: int) -> int:
        """End of super-block ``k``: ``S_k (t+1) L + sum l``."""
        return int(self.M[self.S[k] * (self.t + 1)])

    def checkpoints(self) -> list[int]:
        return [self.checkpoint(k) for k in range(1, self.depth + 1)]

    def realized_beta(self) -> float:
        """Share of a mixed ``(t+1)``-group occupied by ``mu`` blocks and their connectors."""
        n11, n12, n21 = self.connectors
        t, L = self.t, self.L
        mu_part = t * L + (t - 1) * n11 + n12
        return mu_part / (mu_part + L + n21)

    def as_dict(self) -> dict:
        return {"lambda": self.lam, "t": self.t, "depth": self.depth, "L": self.L,
                "connectors": list(self.connectors), "S": self.S, "N": self.N,
                "blocks": self.blocks, "checkpoints": self.checkpoints(),
                "beta": self.realized_beta()}


def schedule_sums(lam: int, depth: int) -> tuple[list[int], list[int]]:
    """``S_0..S_depth`` and ``N_1..N_depth`` from ``N_1 = 1``, ``N_n = lam S_{n-1}``."""
    S, N = [0], []
    for n in range(1, depth + 1):
        N.append(1 if n == 1 else lam * S[n - 1])
        S.append(S[-1] + N[-1])
    return S, N


def block_tags(m: np.ndarray, S: list, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Tags and connector kinds for 1-based block indices ``m``."""
    m = np.asarray(m, dtype=np.int64)
    bounds = np.asarray(S, dtype=np.int64) * (t + 1)
    q = np.searchsorted(bounds, m, side="left")  # S_{q-1}(t+1) < m <= S_q(t+1)
    mixed = q % 2 == 0
    rt = (m - bounds[q - 1] - 1) % (t + 1) + 1
    tags = np.where(mixed & (rt == t + 1), NU, MU)
    kinds = np.zeros_like(m)
    kinds[mixed & (rt == t)] = 1
    kinds[mixed & (rt == t + 1)] = 2
    return tags.astype(np.int8), kinds.astype(np.int8)


def build_schedule(lam: int, t: int, depth: int, L: int, connectors=(0, 0, 0)) -> Schedule:
    if lam < 2 or t < 1 or depth < 2 or L < 1:
        raise ValueError("need lambda >= 2, t >= 1, depth >= 2, L >= 1")
    if any(c < 0 for c in connectors):
        raise ValueError("connector lengths must be non-negative")
    S, N = schedule_sums(lam, depth)
    if S[-1] > 2 ** 62:
        raise DepthTooLarge(f"S_{depth} = {S[-1]} overflows 2^62")
    blocks = S[-1] * (t + 1)
    if blocks > MAX_BLOCKS:
        raise DepthTooLarge(f"{blocks} blocks exceed the materialization cap {MAX_BLOCKS}")
    m = np.arange(1, blocks + 1)
    tags, kinds = block_tags(m, S, t)
    l = np.asarray(connectors, dtype=np.int64)[kinds]
    M = np.concatenate([[0], m * L + np.cumsum(l)])
    return Schedule(lam, t, depth, L, tuple(int(c) for c in connectors), S, N, tags, kinds, l, M)


# ---------------------------------------------------------------------------
# target measures and segment banks


@dataclass
class Target:
    measure: object
    entropy: float
    word: np.ndarray | None = None  # generic word for periodic targets

    @property
    def name(self) -> str:
        return getattr(self.measure, "name", "measure")


def target_from_spec(system: Shift, spec) -> Target:
    """``{"kind": "bernoulli", "p": [...]}``, ``{"kind": "parry"}`` or ``{"kind": "periodic", "word": "0"}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("measure spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "bernoulli":
        m = MarkovMeasure.bernoulli(system, spec.get("p"))
        p = np.asarray(spec.get("p") or [1.0 / system.k] * system.k)
        h = float(-sum(x * math.log(x) for x in p if x > 0))
        return Target(m, h)
    if kind == "parry":
        m = MarkovMeasure.parry(system)
        lam = float(max(np.linalg.eigvals(system.transition.astype(float)).real))
        return Target(m, math.log(lam))
    if kind == "periodic":
        word = as_word(spec.get("word", "0"))
        if not system.contains(SymbolicPoint.periodic(word)):
            raise ConfigError(f"periodic word {word_str(word)} is not admissible")
        return Target(PeriodicOrbitMeasure(system, word), 0.0, word)
    raise ConfigError(f"unknown measure kind {kind!r}")


def segment_distances(system: Shift, words: np.ndarray, target, J: int) -> np.ndarray:
    """``rho_J(E_L(p_w), target)`` where ``p_w`` is the periodic point ``(w c_w)^inf``."""
    fam = test_family(system)
    depth = fam.depth(J)
    L = words.shape[1]
    ext = np.empty((len(words), L + depth - 1), dtype=np.int16)
    for i, w in enumerate(words):
        period = w if system.is_full else np.concatenate([w, system.connector(w, w)])
        reps = (L + depth - 1) // len(period) + 1
        ext[i] = np.tile(period, reps)[:L + depth - 1]
    win = np.lib.stride_tricks.sliding_window_view(ext, depth, axis=1)  # (W, L, depth)
    vals = fam.evaluate_windows(win.reshape(-1, depth), J).reshape(len(words), L, J).mean(axis=1)
    weights = 1.0 / 2.0 ** np.arange(1, J + 1)
    return np.abs(vals - target.integrals(J)) @ weights


@dataclass
class SegmentBank:
    system: Shift
    L: int
    J: int
    tol: float
    eps: float
    gamma_mu: list
    gamma_nu: list
    connectors: dict  # "mu_mu", "mu_nu", "nu_mu" -> words
    classes: dict     # "i1", "j1", "i2", "j2" -> entry/exit blocks
    mu: Target
    nu: Target
    alpha: MeasureDistance
    distances_mu: np.ndarray = field(repr=False, default=None)

    @property
    def z_nu(self) -> np.ndarray:
        return self.gamma_nu[0]

    def connector_lengths(self) -> tuple:
        c = self.connectors
        return (len(c["mu_mu"]), len(c["mu_nu"]), len(c["nu_mu"]))

    def bank(self, tag: int) -> list:
        return self.gamma_mu if tag == MU else self.gamma_nu

    def as_dict(self) -> dict:
        return {"L": self.L, "J": self.J, "tol": self.tol, "eps": self.eps,
                "gamma_mu_size": len(self.gamma_mu), "gamma_nu_size": len(self.gamma_nu),
                "z_nu": word_str(self.z_nu),
                "connectors": {k: word_str(v) for k, v in self.connectors.items()},
                "classes": {k: word_str(v) for k, v in self.classes.items()},
                "alpha": self.alpha.as_dict(),
                "max_segment_rho_mu": float(self.distances_mu.max()) if self.distances_mu is not None else None}


def _select(system: Shift, target: Target, L: int, tol: float, J: int) -> tuple[np.ndarray, np.ndarray]:
    if system.k ** L > 2 ** 22:
        raise ValueError("segment enumeration too large; reduce L")
    words = all_words(system.k, L)
    if not system.is_full:
        keep = np.array([system.word_admissible(w) for w in words], dtype=bool)
        words = words[keep]
    dist = segment_distances(system, words, target.measure, J)
    ok = dist < tol
    return words[ok], dist[ok]


def _refine(system: Shift, words: np.ndarray, dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Keep the largest class of words sharing entry and exit blocks."""
    if system.is_full:
        return words, dist
    v = system.block - 1
    keys = [(tuple(w[:v].tolist()), tuple(w[-v:].tolist())) for w in words]
    counts: dict = {}
    for key in keys:
        counts[key] = counts.get(key, 0) + 1
    best = max(sorted(counts), key=lambda key: counts[key])
    mask = np.array([key == best for key in keys])
    return words[mask], dist[mask]


def select_segments(system: Shift, mu_spec, nu_spec, L: int, tol: float, J: int,
                    eps: float = 0.5, alpha_J: int = 20) -> SegmentBank:
    if not isinstance(system, Shift):
        raise TypeError("segment selection needs a symbolic system")
    if tol <= 0:
        raise ToleranceTooTight("tolerance must be positive")
    mu = target_from_spec(system, mu_spec)
    nu = target_from_spec(system, nu_spec)
    words, dist = _select(system, mu, L, tol, J)
    if len(words) == 0:
        raise ToleranceTooTight(f"no admissible {L}-word within {tol} of mu at J={J}; try a larger L or tol")
    words, dist = _refine(system, words, dist)
    gamma_mu = [w.copy() for w in words]
    if nu.word is not None:
        z = np.tile(nu.word, L // len(nu.word) + 1)[:L].astype(np.int16)
        gamma_nu = [z]
    else:
        nwords, _ = _select(system, nu, L, tol, J)
        if len(nwords) == 0:
            raise ToleranceTooTight(f"no admissible {L}-word within {tol} of nu at J={J}")
        gamma_nu = [w.copy() for w in _refine(system, nwords, np.zeros(len(nwords)))[0]]
    w_mu, w_nu = gamma_mu[0], gamma_nu[0]
    connectors = {
        "mu_mu": system.connector(w_mu, w_mu),
        "mu_nu": system.connector(w_mu, w_nu),
        "nu_mu": system.connector(w_nu, w_mu),
    }
    v = system.block - 1
    classes = {"i1": w_mu[:v], "j1": w_mu[-v:], "i2": w_nu[:v], "j2": w_nu[-v:]}
    alpha = weak_star_distance(mu.measure, nu.measure, alpha_J)
    return SegmentBank(system, L, J, tol, eps, gamma_mu, gamma_nu, connectors, classes, mu, nu,
                       alpha, dist)


# ---------------------------------------------------------------------------
# assembly


def choose_labels(schedule: Schedule, bank: SegmentBank, seed: int, mode: str = "random") -> np.ndarray:
    """Index into ``Gamma_{omega_m}`` for every block."""
    if mode == "lexicographic-min":
        return np.zeros(schedule.blocks, dtype=np.int64)
    if mode != "random":
        raise ConfigError(f"unknown label mode {mode!r}")
    rng = np.random.default_rng(seed)
    sizes = np.where(schedule.tags == MU, len(bank.gamma_mu), len(bank.gamma_nu))
    return (rng.random(schedule.blocks) * sizes).astype(np.int64)


def concatenation(schedule: Schedule, bank: SegmentBank, labels: np.ndarray, blocks: int | None = None) -> np.ndarray:
    """The symbol string ``x_1 c_1 x_2 c_2 ...`` over the first ``blocks`` blocks."""
    blocks = schedule.blocks if blocks is None else blocks
    if len(labels) < blocks:
        raise ValueError("not enough labels for the requested blocks")
    conn = [bank.connectors["mu_mu"], bank.connectors["mu_nu"], bank.connectors["nu_mu"]]
    parts = []
    for m in range(blocks):
        parts.append(bank.bank(schedule.tags[m])[labels[m]])
        c = conn[schedule.kinds[m]]
        if len(c):
            parts.append(c)
    seq = np.concatenate(parts).astype(np.int16)
    if len(seq) != schedule.M[blocks]:
        raise JunctionViolation("realized block lengths disagree with the schedule", block=blocks)
    return seq


def closing_tail(system: Shift, seq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return system.periodic_tail(seq)


def junction_depth(system: Shift, zeta: float) -> int:
    """Symbols ``c`` each pseudo-orbit point looks past its block end; gaps are then ``<= 2^-c``."""
    need = math.ceil(-math.log2(zeta) - 1e-12) if zeta < 1 else 0
    return max(3, system.block + 1, need)


@dataclass
class AssembledOrbit:
    point: SymbolicPoint
    pseudo_orbit: PseudoOrbit
    c: int


def assemble_pseudo_orbit(schedule: Schedule, bank: SegmentBank, labels: np.ndarray,
                          blocks: int | None = None, zeta: float = 1 / 8) -> AssembledOrbit:
    """Points ``w_u``: the suffix of the concatenation up to ``c`` symbols past the current block end.

    Consecutive points inside a block coincide after one shift; at a block end
    the gap is at most ``2^-c``, so the sequence is a ``2^{1-c}``-pseudo-orbit.
    """
    system = bank.system
    blocks = schedule.blocks if blocks is None else blocks
    seq = concatenation(schedule, bank, labels, blocks)
    bridge, cycle = closing_tail(system, seq)
    z = SymbolicPoint(np.concatenate([seq, bridge]).astype(np.int16), cycle)
    c = junction_depth(system, zeta)
    total = int(schedule.M[blocks])
    ext = z.coords(total + c)
    ends = schedule.M[1:blocks + 1]
    pts = []
    tails: dict = {}
    for m in range(blocks):
        start, end = int(schedule.M[m]), int(ends[m])
        word_end = end + c
        for u in range(start, end):
            piece = ext[u:word_end]
            key = tuple(piece[len(piece) - system.block + 1:].tolist())
            if key not in tails:
                tails[key] = system.periodic_tail(piece)
            br, cy = tails[key]
            pts.append(SymbolicPoint(np.concatenate([piece, br]) if len(br) else piece, cy))
    delta = 2.0 ** (1 - c)
    po = PseudoOrbit(pts, delta)
    from .shadowing import symbolic_gaps

    g = symbolic_gaps(pts)
    bad = np.flatnonzero(g >= delta)
    if len(bad):
        u = int(bad[0])
        block = int(np.searchsorted(schedule.M, u, side="right"))
        raise JunctionViolation(f"gap {g[u]} >= {delta} at u={u}", block=block)
    return AssembledOrbit(z, po, c)


# ---------------------------------------------------------------------------
# the irregular point


@dataclass
class IrregularConfig:
    lam: int = 4
    t: int = 2
    L: int = 12
    J: int = 20
    select_J: int = 8
    tol: float = 0.15
    depth: int = 5
    seed: int = 0
    labels: str = "random"
    eps: float = 0.5
    eta: float = 0.05
    radius: float = 0.02
    mu: dict = field(default_factory=lambda: {"kind": "bernoulli"})
    nu: dict = field(default_factory=lambda: {"kind": "periodic", "word": "0"})

    @classmethod
    def from_dict(cls, d: dict) -> "IrregularConfig":
        names = {"lambda": "lam"}
        kwargs = {}
        known = set(cls.__dataclass_fields__)
        for key, val in d.items():
            key = names.get(key, key)
            if key in known:
                kwargs[key] = val
        return cls(**kwargs)


@dataclass
class IrregularResult:
    verdict: str
    point: SymbolicPoint | None
    schedule: Schedule | None
    bank: SegmentBank | None
    labels: np.ndarray | None
    certificate: ShadowCertificate | None
    checkpoints: list = field(default_factory=list)
    averages: list = field(default_factory=list)
    rho_targets: list = field(default_factory=list)
    gap: float = 0.0
    rho_gap: float = 0.0
    zeta: float = 0.0
    classification: Classification | None = None
    advisories: dict = field(default_factory=dict)
    step3_checks: list = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {"verdict": self.verdict, "zeta": self.zeta,
               "birkhoff_gap": self.gap, "rho_gap_lower": self.rho_gap,
               "checkpoints": [
                   {"k": k, "n": n, "kind": "mu" if k % 2 else "mixture", "birkhoff_x0": a,
                    "rho_to_target": r.as_dict()}
                   for (k, n), a, r in zip(self.checkpoints, self.averages, self.rho_targets)],
               "advisories": self.advisories,
               "step3_checks": self.step3_checks}
        if self.schedule is not None:
            out["schedule"] = self.schedule.as_dict()
        if self.bank is not None:
            out["bank"] = self.bank.as_dict()
        if self.certificate is not None:
            cert = self.certificate.as_dict()
            cert.pop("point")
            out["shadow_certificate"] = cert
        if self.classification is not None:
            out["classification"] = self.classification.as_dict()
        return out


def checkpoint_pairs(depth: int) -> list[tuple[int, int]]:
    return [(k, k + 1) for k in range(1, depth)]


def build_irregular_point(system: Shift, config: IrregularConfig) -> IrregularResult:
    if config.depth < 2:
        return IrregularResult("inconclusive", None, None, None, None, None,
                               advisories={"reason": "depth < 2 gives fewer than 2 checkpoints"})
    bank = select_segments(system, config.mu, config.nu, config.L, config.tol, config.select_J,
                           eps=config.eps, alpha_J=config.J)
    if len(bank.gamma_mu) < 2:
        raise ToleranceTooTight("|Gamma_mu| < 2: a Moran set needs branching")
    schedule = build_schedule(config.lam, config.t, config.depth, config.L, bank.connector_lengths())
    labels = choose_labels(schedule, bank, config.seed, config.labels)
    alpha = bank.alpha.value
    degenerate = alpha <= 2 * bank.alpha.tail
    zeta = config.eps / 3 if degenerate else min(alpha / (12 * (config.t + 1)), config.eps / 3)
    assembled = assemble_pseudo_orbit(schedule, bank, labels, zeta=zeta)
    cert = trace_symbolic(system, assembled.pseudo_orbit)
    if cert.epsilon >= zeta:
        raise JunctionViolation(f"trace deviation {cert.epsilon} >= zeta {zeta}")
    if first_difference(cert.point, assembled.point) is not None:
        raise JunctionViolation("tracer disagrees with the concatenated point")
    z = assembled.point

    t = config.t
    beta = schedule.realized_beta()
    mixture = Mixture([bank.mu.measure, bank.nu.measure], [beta, 1 - beta])
    cps = [(k, schedule.checkpoint(k)) for k in range(1, config.depth + 1)]
    seq = z.coords(cps[-1][1])
    csum = np.cumsum(seq, dtype=np.int64)
    averages = [float(csum[n - 1] / n) for _, n in cps]
    measures = [EmpiricalMeasure(system, None, np.full(n, 1.0 / n), orbit=(z, n)) for _, n in cps]
    rho_targets = [weak_star_distance(m, bank.mu.measure if k % 2 else mixture, config.J)
                   for (k, _), m in zip(cps, measures)]
    # the deepest odd/even pair carries the certificate; shallower pairs are transients
    pair_gaps = [{"k": a, "birkhoff_gap": abs(averages[a - 1] - averages[b - 1]),
                  "rho": weak_star_distance(measures[a - 1], measures[b - 1], config.J).value}
                 for a, b in checkpoint_pairs(config.depth)]
    gap = pair_gaps[-1]["birkhoff_gap"]
    rho_gap = pair_gaps[-1]["rho"]

    step3 = []
    bound = alpha / (3 * (t + 1))
    for (k, n), r in zip(cps, rho_targets):
        if k >= 3:
            step3.append({"k": k, "n": n, "rho": r.value, "bound": bound, "holds": r.value <= bound + r.tail})
    h = bank.mu.entropy
    T = max(bank.connector_lengths())
    advisories = {
        "pair_gaps": pair_gaps,
        "alpha": bank.alpha.as_dict(),
        "beta": beta,
        "t_condition": {"holds": t * (h - 3 * config.eta) >= (t + 1) * (h - 4 * config.eta),
                        "h_mu": h, "eta": config.eta},
        "separation_margin": {"eps": config.eps, "zeta": zeta, "eps_minus_2zeta": config.eps - 2 * zeta},
        "mixture_separation": {"alpha_1_minus_beta": alpha * (1 - beta),
                               "two_step3_bounds": 2 * bound},
        "L_lower_bounds": {"48T(t+1)/alpha": 48 * T * (t + 1) / alpha if alpha > 0 else math.inf, "5T": 5 * T},
        "lambda_lower_bound": 48 * (t + 1) / alpha if alpha > 0 else math.inf,
        "degenerate_alpha": degenerate,
    }
    if len(cps) >= 4:
        classification = classify_measures(measures, [n for _, n in cps], config.J, config.radius)
        verdict = classification.verdict
    else:
        classification = None
        verdict = "irregular-candidate" if gap > 2 * config.radius and not degenerate else "inconclusive"
    return IrregularResult(verdict, z, schedule, bank, labels, cert, cps, averages, rho_targets,
                           gap, rho_gap, zeta, classification, advisories, step3)


# ---------------------------------------------------------------------------
# Moran counting


@dataclass
class LabelTree:
    counts: list[int]
    M: list[int]
    h_lower: float
    asymptotic: float

    def as_dict(self) -> dict:
        return {"log_counts": [math.log(c) for c in self.counts], "M": self.M,
                "h_lower": self.h_lower, "asymptotic_exponent": self.asymptotic}


def moran_set_count(schedule: Schedule, bank: SegmentBank, m_max: int) -> LabelTree:
    """Exact ``|W_m| = prod_{i<=m} |Gamma_{omega_i}|`` for ``m <= m_max``."""
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    m_max = min(m_max, schedule.blocks)
    counts, cur = [], 1
    for m in range(m_max):
        cur *= len(bank.bank(schedule.tags[m]))
        counts.append(cur)
    M = [int(x) for x in schedule.M[1:m_max + 1]]
    h_lower = min(math.log(c) / m for c, m in zip(counts, M))
    t = schedule.t
    asym = (t / (t + 1)) * math.log(len(bank.gamma_mu)) / (schedule.L + max(schedule.connectors))
    return LabelTree(counts, M, h_lower, asym)


def moran_certificate(tree: LabelTree, h: float) -> tuple[bool, float]:
    return moran_lower_certificate(tree.counts, tree.M, h)


def label_separation_check(schedule: Schedule, bank: SegmentBank, labels: np.ndarray, pairs: int,
                           seed: int, blocks: int | None = None, zeta: float = 1 / 8) -> dict:
    """Spot-check that labels differing in block ``i`` give points separated inside block ``i``.

    Returns the smallest observed separation, which must exceed ``eps - 2 zeta``.
    """
    blocks = min(schedule.blocks, blocks or 60)
    rng = np.random.default_rng(seed)
    base = concatenation(schedule, bank, labels, blocks)
    worst = math.inf
    checked = 0
    mu_blocks = np.flatnonzero(schedule.tags[:blocks] == MU)
    for _ in range(pairs):
        i = int(rng.choice(mu_blocks))
        other = labels.copy()
        choices = [j for j in range(len(bank.gamma_mu)) if j != labels[i]]
        other[i] = choices[int(rng.integers(len(choices)))]
        alt = concatenation(schedule, bank, other, blocks)
        start = int(schedule.M[i])
        sep = 0.0
        for l in range(start, start + schedule.L):
            if base[l] != alt[l]:
                sep = 1.0
                break
        worst = min(worst, sep)
        checked += 1
    threshold = bank.eps - 2 * zeta
    return {"pairs": checked, "min_separation": worst, "threshold": threshold, "holds": worst > threshold}
