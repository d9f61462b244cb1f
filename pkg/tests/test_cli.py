import json
import math

import pytest

from shadowlab import __version__
from shadowlab.cli import main, replay, run
from shadowlab.errors import ConfigError, ReplayRefused

GOLDEN = {"kind": "sft", "k": 2, "forbidden": ["11"]}


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_entropy_report(tmp_path):
    rep = run("entropy", {"system": GOLDEN, "n_max": 32}, outdir=tmp_path)
    assert rep["ok"] and rep["version"] == __version__
    assert abs(rep["results"]["estimate"] - math.log((1 + 5 ** 0.5) / 2)) < 1e-2
    assert (tmp_path / "entropy.csv").exists()
    cols = json.loads((tmp_path / "columns.json").read_text())
    assert cols["entropy.csv"] == ["n", "count", "estimate"]


def test_classify_interval(tmp_path):
    rep = run("classify", {"system": {"kind": "interval_homeo", "formula": "sqrt"}, "samples": 30,
                           "checkpoints": [100, 1000, 10000, 100000]}, seed=3)
    assert rep["results"]["counts"] == {"quasi-regular-candidate": 30}


def test_irregular_gap(tmp_path):
    rep = run("irregular", {"t": 2, "lambda": 4, "L": 12, "depth": 5, "seed": 7})
    assert rep["ok"] and rep["results"]["birkhoff_gap"] >= 0.1


def test_seed_required():
    with pytest.raises(ConfigError):
        run("horseshoe", {"alpha": 0.3})


def test_expectations_flag_failures():
    rep = run("entropy", {"system": GOLDEN, "n_max": 16, "expect": {"estimate": {"min": 0.9}}})
    assert not rep["ok"] and rep["failures"]


def test_csv_deterministic(tmp_path):
    conf = {"system": GOLDEN, "samples": 20, "checkpoints": [100, 200, 400, 800]}
    run("classify", conf, seed=1, outdir=tmp_path / "a")
    run("classify", conf, seed=1, outdir=tmp_path / "b")
    assert (tmp_path / "a" / "verdicts.csv").read_bytes() == (tmp_path / "b" / "verdicts.csv").read_bytes()


def test_replay(tmp_path):
    run("horseshoe", {"alpha": 0.3, "seed": 4, "proximal": {}}, outdir=tmp_path)
    report = tmp_path / "report.json"
    assert replay(report, tmp_path / "again")["identical"]
    data = json.loads(report.read_text())
    data["config"]["seed"] = 5
    report.write_text(json.dumps(data))
    res = replay(report, tmp_path / "tampered")
    assert not res["identical"] and res["mismatches"]
    data["version"] = "0.0.0"
    report.write_text(json.dumps(data))
    with pytest.raises(ReplayRefused):
        replay(report)
    del data["config"]
    report.write_text(json.dumps(data))
    with pytest.raises(ReplayRefused):
        replay(report)


def test_proximal_replay_tracks_seed(tmp_path):
    a = run("proximal", {"m": 2, "gamma": 0.5, "seed": 4, "samples": 50})
    b = run("proximal", {"m": 2, "gamma": 0.5, "seed": 5, "samples": 50})
    assert a["certificates"]["samples_sha256"] != b["certificates"]["samples_sha256"]


def test_main_exit_codes(tmp_path, capsys):
    good = write(tmp_path / "good.json", {"system": GOLDEN, "n_max": 16})
    assert main(["entropy", "--config", good, "--out", str(tmp_path / "o")]) == 0
    assert main(["replay", str(tmp_path / "o" / "report.json")]) == 0
    bad = write(tmp_path / "bad.json", {"system": GOLDEN, "n_max": "many"})
    assert main(["entropy", "--config", bad, "--out", str(tmp_path / "x")]) == 2
    assert "n_max" in capsys.readouterr().err
    assert main(["entropy", "--config", str(tmp_path / "missing.json")]) == 2
    fail = write(tmp_path / "fail.json", {"system": {"kind": "grid_map", "g": 8, "map": "translate"},
                                          "g": 8, "delta": 1 / 64, "eps": 0.05})
    assert main(["shred", "--config", fail, "--out", str(tmp_path / "s")]) == 1
    with pytest.raises(SystemExit):
        main(["nonsense"])


def test_thread_env(tmp_path, monkeypatch):
    conf = write(tmp_path / "c.json", {"system": GOLDEN, "samples": 5, "checkpoints": [10, 20, 40, 80], "seed": 0})
    monkeypatch.setenv("SHADOWLAB_THREADS", "x")
    assert main(["classify", "--config", conf, "--out", str(tmp_path / "o")]) == 2
    monkeypatch.setenv("SHADOWLAB_THREADS", "2")
    assert main(["classify", "--config", conf, "--out", str(tmp_path / "o")]) == 0
