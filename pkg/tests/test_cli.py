import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest
import yaml

from zdspectrum.cli import main
from zdspectrum.errors import InputError
from zdspectrum.files import csv_text, load_document, parse_cell, parse_game, parse_simulation, read_csv

CONFIGS = Path(__file__).resolve().parents[1] / "scripts" / "configs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def table(path):
    header, rows = read_csv(path)
    return [dict(zip(header, r)) for r in rows]


def roundtrips(path):
    header, rows = read_csv(path)
    return csv_text(header, rows) == Path(path).read_text()


# -- synthesize -------------------------------------------------------------

def test_synthesize_deterministic_strategy(tmp_path, capsys):
    code, out, _ = run(capsys, "synthesize", "--R", 1, "--theta", 0.5, "--target", 0.5, "--b", 1,
                       "--out-dir", tmp_path)
    assert code == 0
    rows = table(tmp_path / "strategy.csv")
    assert [r["probability_exact"] for r in rows] == [1, 0, 1, 1]
    assert "(0, 1/2]" in out and "(0, 1]" in out


@pytest.mark.parametrize("argv, code, needle", [
    (["--R", 1, "--theta", 0.5, "--target", 0.6], 3, "(0, 1/2]"),
    (["--R", 1, "--theta", 0.5, "--target", 0.25, "--b", 0.5], 3, "b infeasible"),
    (["--payoffs", "1,0,0.5,0.5", "--target", 0.5], 3, "not controllable"),
    (["--R", 1, "--theta", 1, "--target", 0.5], 4, "theta degenerate"),
    (["--payoffs", "1,2,x,0", "--target", 0.5], 2, "cannot parse"),
    (["--target", 0.5], 2, "give --payoffs"),
])
def test_synthesize_exit_codes(tmp_path, capsys, argv, code, needle):
    got, out, err = run(capsys, "synthesize", *argv, "--out-dir", tmp_path)
    assert got == code
    assert needle in out + err


def test_synthesize_target_infeasible_label(tmp_path, capsys):
    _, _, err = run(capsys, "synthesize", "--R", 1, "--theta", 0.5, "--target", 0.6, "--out-dir", tmp_path)
    assert err.startswith("error: target infeasible")


def test_opponent_mode_verified_by_analyze(tmp_path, capsys):
    assert run(capsys, "synthesize", "--payoffs", "3,5,0,1", "--mode", "opponent", "--target", 2,
               "--b", "auto", "--out-dir", tmp_path / "s")[0] == 0
    p = ",".join(str(r["probability_exact"]) for r in table(tmp_path / "s" / "strategy.csv"))
    for q in ("1/5,2/3,1/2,9/10", "0.9,0.1,0.3,0.05"):
        code, _, _ = run(capsys, "analyze", "--payoffs", "3,0,5,1", "--payoffs", "3,5,0,1",
                         "--strategy", p, "--strategy", q, "--out-dir", tmp_path / "a")
        assert code == 0
        assert table(tmp_path / "a" / "players.csv")[1]["payoff"] == 2


def test_synthesize_three_player_opponent_needs_of(tmp_path, capsys):
    base = ["synthesize", "--R", 1, "--alpha1", 0.5, "--alpha2", "1/3", "--mode", "opponent",
            "--target", "0.1", "--out-dir", tmp_path]
    assert run(capsys, *base)[0] == 2
    code, out, err = run(capsys, *base, "--of", 2)
    assert code == 3 and "not controllable" in err


# -- analyze ---------------------------------------------------------------

def test_analyze_example(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "--R", 1, "--theta", 0.5, "--strategy", "1,0,1,1",
                       "--strategy", "1/2,1/2,1/2,1/2", "--out-dir", tmp_path)
    assert code == 0
    rows = table(tmp_path / "players.csv")
    assert rows[0]["payoff"] == 0.5 and abs(rows[1]["payoff"] - 1 / 3) < 1e-12
    assert abs(rows[0]["access_fraction"] - 2 / 3) < 1e-12
    assert all(r["abs_diff"] <= 1e-12 for r in rows)
    assert "player 2: payoff 1/3" in out


def test_analyze_non_ergodic(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "--R", 1, "--theta", 0.5, "--strategy", "1,1,1,1",
                       "--strategy", "1,1,1,1", "--out-dir", tmp_path)
    assert code == 0 and "NOT ergodic" in out
    assert [r["pi"] for r in table(tmp_path / "stationary.csv")] == [1, 0, 0, 0]
    assert table(tmp_path / "chain.csv")[0] == {"key": "ergodic", "value": 0}


def test_analyze_several_classes(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "--R", 1, "--theta", 0.5, "--strategy", "1,1,0,0",
                       "--strategy", "1,1,0,0", "--initial", "2,1", "--out-dir", tmp_path)
    assert code == 0 and "several closed classes" in out
    assert [r["pi"] for r in table(tmp_path / "stationary.csv")] == [0, 0, 1, 0]
    assert table(tmp_path / "players.csv")[0]["payoff_determinant"] == ""


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_analyze_random(tmp_path, capsys, seed):
    assert run(capsys, "analyze", "--R", 1, "--theta", 0.5, "--random-seed", seed, "--out-dir", tmp_path)[0] == 0
    assert all(r["abs_diff"] <= 1e-9 for r in table(tmp_path / "players.csv"))


def test_analyze_arity_mismatch(tmp_path, capsys):
    assert run(capsys, "analyze", "--R", 1, "--theta", 0.5, "--strategy", "1,0,1",
               "--strategy", "1,1,1,1", "--out-dir", tmp_path)[0] == 2
    assert run(capsys, "analyze", "--R", 1, "--theta", 0.5, "--strategy", "1,0,1,1",
               "--out-dir", tmp_path)[0] == 2


# -- simulate -------------------------------------------------------------

def _config(tmp_path, name, **overrides):
    doc = yaml.safe_load((CONFIGS / name).read_text())
    doc.update(overrides)
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return path


def test_simulate_smoke(tmp_path, capsys):
    assert run(capsys, "simulate", CONFIGS / "smoke.yaml", "--out-dir", tmp_path)[0] == 0
    header, rows = read_csv(tmp_path / "trace_smoke_r0.csv")
    assert header == ["round", "state", "payoff_1", "payoff_2", "runmean_1", "runmean_2"]
    assert len(rows) == 1
    meta = json.loads((tmp_path / "trace_smoke_r0.meta.json").read_text())
    assert meta["schema_version"] == 1 and meta["seed"] == 0 and len(meta["config_hash"]) == 64


def test_simulate_fig4(tmp_path, capsys):
    assert run(capsys, "simulate", CONFIGS / "fig4_three_targets.yaml", "--out-dir", tmp_path)[0] == 0
    finals = {r["label"]: r["mean_payoff_1"] for r in table(tmp_path / "summary.csv")}
    for label, target in (("u0.5_b1", 0.5), ("u0.25_b1-3", 0.25), ("u0.1_b1-9", 0.1)):
        assert abs(finals[label] - target) <= 0.02
        header, rows = read_csv(tmp_path / f"trace_{label}_r0.csv")
        assert rows[-1][0] == 99_999 and abs(rows[-1][4] - target) <= 0.02


def test_simulate_fig6(tmp_path, capsys):
    cfg = _config(tmp_path, "fig6_three_players.yaml", replications=3, rounds=50_000, record_stride=1000)
    assert run(capsys, "simulate", cfg, "--out-dir", tmp_path / "out")[0] == 0
    for r in table(tmp_path / "out" / "summary.csv"):
        assert abs(r["mean_payoff_1"] - 1 / 3) <= 0.02
    conv = table(tmp_path / "out" / "convergence.csv")
    assert [r["label"] for r in conv] == ["b1-2", "b1-4", "b1-8"]


def test_simulate_overrides_recorded(tmp_path, capsys):
    assert run(capsys, "simulate", CONFIGS / "smoke.yaml", "--rounds", 50, "--seed", 9,
               "--out-dir", tmp_path)[0] == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["simulation"]["rounds"] == 50
    assert manifest["config"]["simulation"]["seed"] == 9
    assert len(read_csv(tmp_path / "trace_smoke_r0.csv")[1]) == 50


def test_simulate_invalid_field_path(tmp_path, capsys):
    cfg = _config(tmp_path, "smoke.yaml", runs=[{"label": "x", "strategies": [[1, 0, 1], [1, 1, 1, 1]]}])
    code, _, err = run(capsys, "simulate", cfg, "--out-dir", tmp_path / "o")
    assert code == 2 and "simulation.runs[0].strategies[0]" in err
    code, _, err = run(capsys, "simulate", tmp_path / "missing.yaml", "--out-dir", tmp_path / "o")
    assert code == 2


# -- sweep ----------------------------------------------------------------

def test_sweep(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--R", 1, "--theta", 0.5, "--targets", "0.5,0.25",
                       "--b-grid", "0:1:0.1", "--opponent", "2/3,0,1/3,1/3", "--opponent-b", "1/9",
                       "--cap", 2, "--out-dir", tmp_path)
    assert code == 0 and "skipping b1=0" in err
    rows = table(tmp_path / "sweep.csv")
    assert len(rows) == 10 and rows[0]["b1"] == 0.1 and rows[-1]["b1"] == 1
    first = [k for k in rows[0] if k.startswith("access")][0]
    assert abs(rows[-1][first] - 0.625) < 1e-12
    assert roundtrips(tmp_path / "sweep.csv")


def test_sweep_single_point(tmp_path, capsys):
    assert run(capsys, "sweep", "--R", 1, "--theta", 0.5, "--targets", "0.5,0.25", "--b-grid", "1",
               "--opponent", "1/2,1/2,1/2,1/2", "--out-dir", tmp_path)[0] == 0
    (row,) = table(tmp_path / "sweep.csv")
    assert abs(row["access[q=1/2 1/2 1/2 1/2]"] - 2 / 3) < 1e-12


# -- spectrum ---------------------------------------------------------------

def test_spectrum_symmetric(tmp_path, capsys):
    code, out, _ = run(capsys, "spectrum", CONFIGS / "symmetric_pair.yaml", "--out-dir", tmp_path)
    assert code == 0 and "FAILED" not in out
    matrix, params = parse_game(load_document(tmp_path / "game.yaml", "game"))
    assert float(params.rates[0]) == pytest.approx(1) and float(params.theta[0]) == pytest.approx(0.5849625, abs=1e-7)
    assert float(params.targets[0]) == pytest.approx(1)


def test_spectrum_degenerate(tmp_path, capsys):
    code, _, err = run(capsys, "spectrum", CONFIGS / "silent_interferer.yaml", "--out-dir", tmp_path)
    assert code == 4 and "theta degenerate" in err


def test_spectrum_asymmetric_checks(tmp_path, capsys):
    code, out, _ = run(capsys, "spectrum", CONFIGS / "asymmetric_two_user.yaml", "--out-dir", tmp_path)
    assert code == 0 and out.count(" ok") == 4
    assert roundtrips(tmp_path / "allocations.csv")


def test_spectrum_schema_errors(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("schema_version: 2\nkind: scenario\n")
    assert run(capsys, "spectrum", bad, "--out-dir", tmp_path)[0] == 2
    doc = yaml.safe_load((CONFIGS / "symmetric_pair.yaml").read_text())
    doc["providers"][0]["users"][0]["gain"] = 3
    bad.write_text(yaml.safe_dump(doc))
    code, _, err = run(capsys, "spectrum", bad, "--out-dir", tmp_path)
    assert code == 2 and "providers[0].users[0]" in err


# -- manifests, replay, CSV -------------------------------------------------------

def test_manifest_contents(tmp_path, capsys):
    run(capsys, "spectrum", CONFIGS / "symmetric_pair.yaml", "--out-dir", tmp_path)
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert set(m) >= {"command", "config", "inputs", "outputs", "tool_version", "timestamp", "schema_version"}
    assert sorted(m["outputs"]) == ["allocations.csv", "game.yaml"]
    assert list(m["inputs"].values())[0] and m["command"] == "spectrum"


def test_replay_identical_and_detects_tampering(tmp_path, capsys):
    cfg = _config(tmp_path, "fig5_b_family.yaml", replications=3, rounds=2000)
    run(capsys, "simulate", cfg, "--jobs", 2, "--out-dir", tmp_path / "a")
    code, out, _ = run(capsys, "replay", tmp_path / "a" / "manifest.json", "--jobs", 1, "--out-dir", tmp_path / "b")
    assert code == 0 and "DIFFERS" not in out
    m = json.loads((tmp_path / "a" / "manifest.json").read_text())
    m["outputs"]["summary.csv"] = "0" * 64
    (tmp_path / "a" / "manifest.json").write_text(json.dumps(m))
    code, out, _ = run(capsys, "replay", tmp_path / "a" / "manifest.json", "--out-dir", tmp_path / "c")
    assert code == 1 and "DIFFERS" in out


def test_env_out_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ZDSPECTRUM_OUT", str(tmp_path / "env"))
    assert run(capsys, "synthesize", "--payoffs", "1,2,0,0", "--target", 1, "--b", 1)[0] == 0
    assert (tmp_path / "env" / "strategy.csv").exists()


def test_all_outputs_roundtrip(tmp_path, capsys):
    run(capsys, "analyze", "--R", 1, "--theta", 0.5, "--random-seed", 4, "--out-dir", tmp_path / "a")
    run(capsys, "synthesize", "--R", 1, "--theta", 0.5, "--target", "1/10", "--out-dir", tmp_path / "s")
    run(capsys, "simulate", CONFIGS / "fig4_three_targets.yaml", "--rounds", 3000, "--out-dir", tmp_path / "m")
    files = list(tmp_path.rglob("*.csv"))
    assert len(files) > 8
    for f in files:
        assert roundtrips(f), f


def test_parse_cell():
    assert parse_cell("3") == 3 and parse_cell("0.25") == 0.25 and parse_cell("1-2") == "1-2"
    assert parse_cell("") == ""


def test_parse_errors_name_fields():
    with pytest.raises(InputError, match="game.payoffs\\[1\\]"):
        parse_game({"payoffs": [[1, 2, 3, 4], [1, 2]]})
    with pytest.raises(InputError, match="simulation.rounds"):
        parse_simulation({"game": {"payoffs": [[1, 2, 3, 4], [1, 2, 3, 4]]}, "rounds": "ten",
                          "runs": [{"strategies": [[1, 1, 1, 1], [1, 1, 1, 1]]}]})


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "zdspectrum.cli", "synthesize", "--R", "1", "--theta", "0.5",
                           "--target", "0.6", "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 3
    proc = subprocess.run([sys.executable, "-m", "zdspectrum.cli", "synthesize", "--bogus"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
