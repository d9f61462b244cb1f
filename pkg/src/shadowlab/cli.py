"""Command line driver: ``shadowlab <command> --config <path> [--out <dir>] [--seed <n>]``.

Each run writes ``report.json`` (config echo, results, certificates,
wall-clock, version) plus CSV data files and a ``columns.json`` manifest
into the output directory. ``shadowlab replay <report>`` re-executes the
embedded config and compares certificates byte for byte.

Exit codes: 0 success, 1 failed checks or replay mismatch, 2 usage error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import (extract_horseshoe, generate_samples, minimal_subset_check,
                            nested_measures, proximal_entropy_check, proximal_subshift,
                            zero_block_gaps)
from .entropy import subshift_entropy
from .errors import ConfigError, ReplayRefused, ShadowlabError
from .irregular import IrregularConfig, build_irregular_point, moran_certificate, moran_set_count
from .measures import MarkovMeasure, checkpoint_header, checkpoint_rows, classify_point
from .shadowing import (PseudoOrbit, random_interval_pseudo_orbit, random_symbolic_pseudo_orbit,
                        trace, trace_interval, trace_symbolic)
from .shredding import (decompose_grid, induce_tau, lambda_entropy_bound, lambda_truncation, perturb,
                        shredding_parameters, verify_shredding)
from .symbolic import SymbolicPoint
from .systems import GridMap, IntervalHomeo, Shift, make_full_shift, system_from_descriptor

log = logging.getLogger("shadowlab")

COMMANDS = ("entropy", "irregular", "shadow", "horseshoe", "proximal", "shred", "classify")
STOCHASTIC = {"irregular", "shadow", "horseshoe", "proximal", "classify"}


@dataclass
class Outcome:
    results: dict
    certificates: dict
    tables: dict = field(default_factory=dict)   # name -> (header, rows)
    failures: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# config access


class Config:
    """Read-only view of a config object that names the offending field on errors."""

    def __init__(self, data: dict, path: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(f"field '{path or '<root>'}' must be an object")
        self.data = data
        self.path = path

    def _name(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def get(self, key: str, kind=float, default=None, check=None, required: bool = False):
        if key not in self.data:
            if required:
                raise ConfigError(f"field '{self._name(key)}' is required")
            return default
        raw = self.data[key]
        try:
            if kind is Fraction:
                val = Fraction(str(raw))
            elif kind is int:
                if isinstance(raw, bool) or (isinstance(raw, float) and not raw.is_integer()):
                    raise ValueError
                val = int(raw)
            elif kind is list:
                if not isinstance(raw, list):
                    raise ValueError
                val = raw
            elif kind is dict:
                if not isinstance(raw, dict):
                    raise ValueError
                val = raw
            else:
                val = kind(raw)
        except (TypeError, ValueError, ZeroDivisionError):
            raise ConfigError(f"field '{self._name(key)}' has invalid value {raw!r}") from None
        if check is not None and not check(val):
            raise ConfigError(f"field '{self._name(key)}' is out of range: {raw!r}")
        return val

    def system(self, default: dict | None = None):
        desc = self.data.get("system", default)
        if desc is None:
            raise ConfigError("field 'system' is required")
        try:
            return system_from_descriptor(desc)
        except ConfigError as e:
            raise ConfigError(f"field 'system': {e}") from None
        except (ValueError, TypeError, KeyError) as e:
            raise ConfigError(f"field 'system': {e}") from None


def thread_count() -> int:
    raw = os.environ.get("SHADOWLAB_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"SHADOWLAB_THREADS must be a positive integer, got {raw!r}")
    return n


def jsonable(obj):
    """Plain JSON types: numpy scalars and arrays unwrapped, fractions as strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, SymbolicPoint):
        return str(obj)
    return obj


def canonical(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


def measure_from_spec(system: Shift, spec: dict, where: str) -> MarkovMeasure:
    kind = spec.get("kind", "bernoulli") if isinstance(spec, dict) else None
    if kind == "bernoulli":
        try:
            return MarkovMeasure.bernoulli(system, spec.get("p"))
        except ValueError as e:
            raise ConfigError(f"field '{where}': {e}") from None
    if kind == "parry":
        return MarkovMeasure.parry(system)
    raise ConfigError(f"field '{where}.kind' must be 'bernoulli' or 'parry'")


def _require_shift(system, cmd: str) -> Shift:
    if not isinstance(system, Shift):
        raise ConfigError(f"field 'system.kind': {cmd} needs a full shift or sft")
    return system


# ---------------------------------------------------------------------------
# commands


def run_entropy(cfg: Config, seed: int | None) -> Outcome:
    system = _require_shift(cfg.system(), "entropy")
    n_max = cfg.get("n_max", int, 32, lambda v: 4 <= v <= 4096)
    table = subshift_entropy(system, n_max)
    res = {"n_max": n_max, "estimate": table.value,
           "table": [{"n": n, "log_count": math.log(c), "estimate": e} for n, c, e in table.rows()]}
    cert = {"estimate": table.value, "counts_tail": [str(c) for c in table.counts[-4:]]}
    rows = [[n, str(c), e] for n, c, e in table.rows()]
    return Outcome(res, cert, {"entropy": (["n", "count", "estimate"], rows)})


def run_irregular(cfg: Config, seed: int) -> Outcome:
    system = _require_shift(cfg.system({"kind": "full_shift", "k": 2}), "irregular")
    params = dict(cfg.data)
    params["seed"] = seed
    for key in ("lambda", "t", "L", "J", "depth"):
        if key in params:
            cfg.get(key, int, check=lambda v: v >= 1)
    conf = IrregularConfig.from_dict(params)
    res = build_irregular_point(system, conf)
    out = res.as_dict()
    cert = {"verdict": res.verdict, "birkhoff_gap": res.gap, "rho_gap_lower": res.rho_gap,
            "averages": res.averages}
    tables = {}
    m_max = cfg.get("moran_m_max", int, 20, lambda v: v >= 2)
    if res.schedule is not None:
        tree = moran_set_count(res.schedule, res.bank, m_max)
        h = 0.8 * (conf.t / (conf.t + 1)) * math.log(len(res.bank.gamma_mu)) / conf.L
        ok, margin = moran_certificate(tree, h)
        out["moran"] = dict(tree.as_dict(), h=h, certificate=ok, margin=margin)
        cert["moran"] = {"h": h, "ok": ok, "margin": margin, "h_lower": tree.h_lower}
        cert["shadow_certificate"] = out.get("shadow_certificate")
        tables["moran"] = (["m", "M_m", "count"], [[m + 1, M, str(c)] for m, (M, c) in
                                                   enumerate(zip(tree.M, tree.counts))])
    if res.classification is not None:
        cls = res.classification
        tables["checkpoints"] = (checkpoint_header(cls.checkpoints, cls.J),
                                 checkpoint_rows(cls.measures, cls.checkpoints, cls.J))
    return Outcome(out, cert, tables)


def run_shadow(cfg: Config, seed: int) -> Outcome:
    system = cfg.system({"kind": "full_shift", "k": 2})
    rng = np.random.default_rng(seed)
    if "pseudo_orbit" in cfg.data:
        path = cfg.get("pseudo_orbit", str)
        try:
            po = PseudoOrbit.from_jsonl(path)
        except (OSError, ValueError, KeyError) as e:
            raise ConfigError(f"field 'pseudo_orbit': cannot read {path}: {e}") from None
        eps = cfg.get("eps", float, None, lambda v: v > 0)
        c = trace(system, po, eps).as_dict()
        return Outcome({"certificate": c}, {"certificate": c})
    horizon = cfg.get("horizon", int, 1000, lambda v: v >= 2)
    trials = cfg.get("trials", int, 100, lambda v: v >= 1)
    rows, per_m, failures = [], [], []
    if isinstance(system, Shift):
        ms = cfg.get("m", list, list(range(2, 9)))
        for m in ms:
            if not isinstance(m, int) or m < 1:
                raise ConfigError(f"field 'm' entries must be positive integers, got {m!r}")
            delta, target = 2.0 ** -(m + 1), 2.0 ** -m
            worst, bad = 0.0, 0
            for i in range(trials):
                c = trace_symbolic(system, random_symbolic_pseudo_orbit(system, delta, horizon, rng))
                worst = max(worst, c.epsilon)
                bad += c.epsilon > target
                rows.append([m, i, c.epsilon, c.worst_index])
            per_m.append({"m": m, "delta": delta, "target": target, "max_epsilon": worst, "failures": bad})
            if bad:
                failures.append(f"m={m}: {bad} traces exceed 2^-{m}")
    elif isinstance(system, IntervalHomeo):
        eps = cfg.get("eps", float, 0.05, lambda v: v > 0)
        delta = cfg.get("delta", float, eps / 4, lambda v: v > 0)
        worst, bad = 0.0, 0
        for i in range(trials):
            c = trace_interval(system, random_interval_pseudo_orbit(system, delta, horizon, rng), eps)
            worst = max(worst, c.epsilon)
            rows.append([0, i, c.epsilon, c.worst_index])
        per_m.append({"delta": delta, "eps": eps, "max_epsilon": worst, "failures": bad})
    else:
        raise ConfigError("field 'system.kind': shadow supports shifts and interval homeomorphisms")
    res = {"horizon": horizon, "trials_per_level": trials, "levels": per_m}
    return Outcome(res, {"levels": per_m},
                   {"traces": (["m", "trial", "epsilon", "worst_index"], rows)}, failures)


def run_horseshoe(cfg: Config, seed: int) -> Outcome:
    system = _require_shift(cfg.system({"kind": "full_shift", "k": 2}), "horseshoe")
    measure = measure_from_spec(system, cfg.get("measure", dict, {"kind": "bernoulli"}), "measure")
    hs = extract_horseshoe(system, measure,
                           alpha=cfg.get("alpha", float, 0.3, lambda v: v > 0),
                           eta=cfg.get("eta", float, 0.05, lambda v: v >= 0),
                           n=cfg.get("n", int, 10, lambda v: v >= 1),
                           tol=cfg.get("tol", float, 0.2, lambda v: v >= 0),
                           eps=cfg.get("eps", float, 0.5, lambda v: 0 < v < 1),
                           trials=cfg.get("trials", int, 1000, lambda v: v >= 1),
                           seed=seed)
    res = hs.as_dict()
    failures = [f"horseshoe check '{k}' failed" for k, v in hs.checks.items()
                if (v is False) or (isinstance(v, dict) and not v.get("ok", True))]
    if "proximal" in cfg.data:
        sub = Config(cfg.get("proximal", dict), "proximal")
        spec = proximal_subshift(sub.get("m", int, 2), sub.get("gamma", float, 0.5))
        res["nested_measures"] = nested_measures(hs, spec, seed=seed)
        if not (res["nested_measures"]["distinct"] and res["nested_measures"]["nested_support"]):
            failures.append("nested measures are not distinct with nested supports")
    cert = {k: res[k] for k in ("k", "r", "rate", "checks")}
    if "nested_measures" in res:
        cert["nested_measures"] = res["nested_measures"]
    segs = [[i, w] for i, w in enumerate(res.pop("segments"))]
    res["segments_file"] = "segments.csv"
    return Outcome(res, cert, {"segments": (["label", "word"], segs)}, failures)


def run_proximal(cfg: Config, seed: int) -> Outcome:
    m = cfg.get("m", int, 2)
    gamma = cfg.get("gamma", float, 0.5)
    spec = proximal_subshift(m, gamma)
    levels = cfg.get("levels", int, 4, lambda v: 1 <= v <= 4)
    samples = cfg.get("samples", int, 1000, lambda v: v >= 1)
    horizon = cfg.get("horizon", int, 2 * spec.s[2], lambda v: v >= 1)
    bounds = [proximal_entropy_check(spec, N) for N in range(1, levels + 1)]
    inv = spec.check_invariants()
    data = generate_samples(spec, samples, horizon, seed)
    minimal = minimal_subset_check(spec, data)
    res = {"spec": spec.as_dict(), "invariants": inv,
           "bounds": [b.as_dict() for b in bounds],
           "minimal_subset": {"samples": samples, "horizon": horizon, "ok": minimal,
                              "levels": zero_block_gaps(spec, data)}}
    failures = []
    if not inv["ok"]:
        failures.append("level sequences violate divisibility or summability")
    failures += [f"level {b.N}: entropy bound fails" for b in bounds if not b.holds]
    if not minimal:
        failures.append("a sample lacks syndetic zero blocks")
    digest = hashlib.sha256(np.ascontiguousarray(data, dtype=np.int64).tobytes()).hexdigest()
    cert = {"bounds": res["bounds"], "minimal_subset": minimal, "invariants": inv["ok"],
            "samples_sha256": digest}
    rows = [[b.N, b.length, b.free, b.value, b.bound, b.equality] for b in bounds]
    return Outcome(res, cert, {"levels": (["N", "s_N", "free", "value", "bound", "equality"], rows)}, failures)


def run_shred(cfg: Config, seed: int | None) -> Outcome:
    desc = dict(cfg.data.get("system", {"kind": "grid_map", "map": "translate", "params": {"dx": 0.3}}))
    g = cfg.get("g", int, int(desc.get("g", 8)), lambda v: v >= 2)
    desc["g"] = g
    system = Config({"system": desc}).system()
    if not isinstance(system, GridMap):
        raise ConfigError("field 'system.kind': shred needs a grid_map")
    delta = cfg.get("delta", Fraction, Fraction(1, 64))
    eps = cfg.get("eps", Fraction, Fraction(1, 2), lambda v: v > 0)
    cells = decompose_grid(g, delta)
    tau = induce_tau(system, cells)
    pm = perturb(system, cells, tau, beta=cfg.get("beta", float, 2.0, lambda v: v >= 1),
                 delta_prime=cfg.get("delta_prime", float, None, lambda v: v > 0),
                 beta_max=cfg.get("beta_max", float, 4096.0, lambda v: v >= 1))
    report = verify_shredding(pm, eps)
    res = {"cells": cells.as_dict(), "tau": {"cycles": tau.cycles, "max_steps": int(tau.steps.max())},
           "perturbation": {k: v for k, v in pm.as_dict().items() if k not in ("margins", "ball_margins")},
           "report": report.as_dict()}
    cert = {"report": report.as_dict(), "beta": pm.beta, "min_margin": float(pm.margins.min())}
    if "lambda" in cfg.data:
        n_max = Config(cfg.get("lambda", dict), "lambda").get("n_max", int, 3, lambda v: 1 <= v <= 8)
        lam = lambda_truncation([decompose_grid(*shredding_parameters(m)) for m in range(1, n_max + 1)])
        res["lambda"] = {"n_max": n_max, "coverage": str(lam.coverage), "coverage_float": float(lam.coverage),
                         "pieces": [str(c) for c in lam.pieces],
                         "bound_holds": lam.coverage >= 1 - Fraction(1, n_max), "rle": lam.rle()}
        cert["lambda_coverage"] = str(lam.coverage)
    if "entropy_bound" in cfg.data:
        sub = Config(cfg.get("entropy_bound", dict), "entropy_bound")
        ts = sub.get("t", list, [0.01, 0.1, 1.0])
        start = sub.get("start", int, 10 ** 4, lambda v: v >= 1)
        res["entropy_bound"] = [lambda_entropy_bound(None, float(t), start).as_dict() for t in ts]
        cert["entropy_bound"] = res["entropy_bound"]
    rows = [[i, int(tau.tau[i]), int(tau.basin[i]), int(tau.steps[i]), float(tau.points[i, 0]),
             float(tau.points[i, 1]), float(tau.margins[i]), float(pm.ball_margins[i]), float(pm.margins[i])]
            for i in range(cells.size)]
    header = ["cell", "tau", "basin", "steps", "p_x", "p_y", "tau_margin", "ball_margin", "trap_margin"]
    return Outcome(res, cert, {"cells": (header, rows)}, list(report.failures))


def _classify_one(system, x, checkpoints, J, radius) -> str:
    return classify_point(system, x, checkpoints, J, radius).verdict


def run_classify(cfg: Config, seed: int) -> Outcome:
    system = cfg.system()
    n = cfg.get("samples", int, 100, lambda v: v >= 1)
    checkpoints = cfg.get("checkpoints", list, [100, 1000, 10000, 100000])
    if len(checkpoints) < 4 or any(not isinstance(c, int) for c in checkpoints):
        raise ConfigError("field 'checkpoints' must list at least 4 integers")
    J = cfg.get("J", int, 20, lambda v: v >= 1)
    radius = cfg.get("radius", float, 0.02, lambda v: v > 0)
    rng = np.random.default_rng(seed)
    if isinstance(system, Shift):
        horizon = max(checkpoints) + 64
        if system.is_full:
            pts = [SymbolicPoint.finite(w) for w in rng.integers(0, system.k, size=(n, horizon))]
        else:
            from .entropy import markov_sampler
            pts = markov_sampler(MarkovMeasure.parry(system), horizon)(rng, n)
    elif isinstance(system, GridMap):
        pts = list(rng.random((n, 2)))
    else:
        pts = [float(v) for v in rng.random(n)]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        verdicts = list(pool.map(lambda x: _classify_one(system, x, checkpoints, J, radius), pts))
    counts = {v: verdicts.count(v) for v in sorted(set(verdicts))}
    res = {"samples": n, "checkpoints": checkpoints, "J": J, "radius": radius, "counts": counts}
    rows = [[i, v] for i, v in enumerate(verdicts)]
    return Outcome(res, {"counts": counts, "verdicts": verdicts}, {"verdicts": (["sample", "verdict"], rows)})


RUNNERS = {"entropy": run_entropy, "irregular": run_irregular, "shadow": run_shadow,
           "horseshoe": run_horseshoe, "proximal": run_proximal, "shred": run_shred,
           "classify": run_classify}


# ---------------------------------------------------------------------------
# expectations, reports, replay


def _lookup(obj, dotted: str):
    for part in dotted.split("."):
        if isinstance(obj, list):
            obj = obj[int(part)]
        else:
            obj = obj[part]
    return obj


def check_expectations(expect: dict, results: dict) -> list[str]:
    """``{"a.b": value}`` or ``{"a.b": {"min": x, "max": y}}`` against the results tree."""
    failures = []
    for key, want in expect.items():
        try:
            got = _lookup(results, key)
        except (KeyError, IndexError, ValueError, TypeError):
            failures.append(f"expect '{key}': missing from results")
            continue
        if isinstance(want, dict):
            if "min" in want and not got >= want["min"]:
                failures.append(f"expect '{key}': {got!r} < min {want['min']!r}")
            if "max" in want and not got <= want["max"]:
                failures.append(f"expect '{key}': {got!r} > max {want['max']!r}")
        elif got != want:
            failures.append(f"expect '{key}': {got!r} != {want!r}")
    return failures


def resolve_config(command: str, data: dict, seed: int | None) -> dict:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if "command" in data and data["command"] != command:
        raise ConfigError(f"field 'command' is {data['command']!r} but the command line asks for {command!r}")
    conf = dict(data)
    conf["command"] = command
    if seed is not None:
        conf["seed"] = seed
    if command in STOCHASTIC:
        s = Config(conf).get("seed", int, required=True, check=lambda v: v >= 0)
        conf["seed"] = s
    return conf


def execute(conf: dict) -> tuple[Outcome, float]:
    command = conf["command"]
    cfg = Config(conf)
    start = time.perf_counter()
    out = RUNNERS[command](cfg, conf.get("seed"))
    if "expect" in conf:
        out.failures += check_expectations(cfg.get("expect", dict), jsonable(out.results))
    return out, time.perf_counter() - start


def build_report(conf: dict, out: Outcome, wall: float) -> dict:
    return {"version": __version__, "command": conf["command"], "config": conf,
            "results": jsonable(out.results), "certificates": jsonable(out.certificates),
            "failures": out.failures, "ok": not out.failures, "wall_clock_seconds": wall}


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in jsonable(row)])
    return buf.getvalue()


def write_outputs(outdir: Path, report: dict, tables: dict) -> Path:
    manifest = {}
    for name, (header, rows) in sorted(tables.items()):
        atomic_write(outdir / f"{name}.csv", csv_text(header, rows))
        manifest[f"{name}.csv"] = list(header)
    atomic_write(outdir / "columns.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    path = outdir / "report.json"
    atomic_write(path, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


def run(command: str, data: dict, seed: int | None = None, outdir: str | Path | None = None) -> dict:
    """Run one command from a config dict; writes files when ``outdir`` is given."""
    conf = resolve_config(command, data, seed)
    out, wall = execute(conf)
    report = build_report(conf, out, wall)
    if outdir is not None:
        write_outputs(Path(outdir), report, out.tables)
    return report


def replay(report_path: str | Path, outdir: str | Path | None = None) -> dict:
    """Re-run a report's embedded config; lists every certificate that changed."""
    try:
        old = json.loads(Path(report_path).read_text())
    except (OSError, ValueError) as e:
        raise ReplayRefused(f"cannot read report {report_path}: {e}") from None
    if not isinstance(old, dict) or "config" not in old or not isinstance(old["config"], dict):
        raise ReplayRefused("report has no embedded config")
    if old.get("version") != __version__:
        raise ReplayRefused(f"report version {old.get('version')!r} does not match {__version__}")
    conf = old["config"]
    command = conf.get("command", old.get("command"))
    new = run(command, conf, None, outdir)
    before, after = old.get("certificates", {}), new["certificates"]
    mismatches = sorted(k for k in set(before) | set(after)
                        if canonical(before.get(k)) != canonical(after.get(k)))
    return {"identical": not mismatches, "mismatches": mismatches, "report": new}


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shadowlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"shadowlab {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, help=f"run the {name} pipeline")
        s.add_argument("--config", required=True, help="JSON config file")
        s.add_argument("--out", default=None, help="output directory (default: shadowlab-out/<command>)")
        s.add_argument("--seed", type=int, default=None, help="override the config seed")
    r = sub.add_parser("replay", help="re-run a report and compare certificates")
    r.add_argument("report", help="path to report.json")
    r.add_argument("--out", default=None, help="directory for the fresh outputs")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "replay":
            out = args.out or str(Path(args.report).parent / "replay")
            res = replay(args.report, out)
            if res["identical"]:
                print(f"replay ok: certificates identical ({out})")
                return 0
            for k in res["mismatches"]:
                print(f"certificate mismatch: {k}", file=sys.stderr)
            return 1
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e.strerror}") from None
        except ValueError as e:
            raise ConfigError(f"config {args.config} is not valid JSON: {e}") from None
        outdir = args.out or str(Path("shadowlab-out") / args.command)
        report = run(args.command, data, args.seed, outdir)
    except ConfigError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except ShadowlabError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 3
    if report["failures"]:
        for f in report["failures"]:
            print(f"FAIL {f}", file=sys.stderr)
        return 1
    print(f"ok: {args.command} report written to {Path(outdir) / 'report.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
