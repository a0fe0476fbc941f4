import json

import numpy as np
import pytest

from fockgen import __version__
from fockgen import cli
from fockgen.errors import ConfigError, StepSizeTooLarge, UnknownTag


def _write(tmp_path, payload, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return p


def _run(args):
    return cli.main([*map(str, args), "--quiet"])


def test_config_defaults_and_rejection():
    cfg = cli.ScenarioConfig.from_dict({})
    assert cfg.scenario == "optimize" and cfg.target == 5
    assert cli.ScenarioConfig.from_dict({"n_bar": 10}).target_list == list(range(1, 26))
    for bad in ({"nbar": 5}, {"n_atoms": 4}, {"scenario": "fit"}, {"metric": "bures"},
                {"branches": []}, {"post_select": "eg"}, {"resolution": [3]}, {"dt": -1},
                {"targets": [0, 1]}, {"lossy": "yes"}):
        with pytest.raises(ConfigError):
            cli.ScenarioConfig.from_dict(bad)


def test_config_hash_ignores_output_dir():
    a = cli.ScenarioConfig.from_dict({"out": "x"})
    b = cli.ScenarioConfig.from_dict({"out": "y"})
    assert cli.config_hash(a.canonical()) == cli.config_hash(b.canonical())
    c = cli.ScenarioConfig.from_dict({"n_bar": 6})
    assert cli.config_hash(a.canonical()) != cli.config_hash(c.canonical())


def test_exit_codes(tmp_path, capsys, monkeypatch):
    assert _run(["--config", _write(tmp_path, {"bogus": 1}), "--out", tmp_path / "o"]) == 2
    assert "ConfigError" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{not json")
    assert _run(["--config", tmp_path / "broken.json"]) == 2
    assert _run(["--figure", "fig9z", "--out", tmp_path / "f"]) == 2
    assert "UnknownTag" in capsys.readouterr().err

    def boom(*a, **k):
        raise StepSizeTooLarge("trace drift 1e-3")
    monkeypatch.setattr(cli, "_scenario_optimize", boom)
    monkeypatch.setitem(cli._SCENARIO_FUNCS, "optimize", boom)
    assert _run(["--out", tmp_path / "n"]) == 3
    assert "StepSizeTooLarge" in capsys.readouterr().err


def test_optimize_scenario_outputs(tmp_path):
    out = tmp_path / "run"
    assert _run(["--config", _write(tmp_path, {"scenario": "optimize", "n_bar": 5, "target_n": 5}),
                 "--out", out]) == 0
    res = json.loads((out / "result.json").read_text())
    assert res["result"]["fidelity"] >= 0.80
    assert res["header"][0] == f"fockgen {__version__}"
    man = json.loads((out / "manifest.json").read_text())
    assert set(man["outputs"]) == {"result.json", "branches.csv"}
    text = (out / "branches.csv").read_text()
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0].startswith("# fockgen") and lines[1].startswith("# config_sha256")
    assert lines[2].startswith("# basis:")


def test_determinism(tmp_path):
    cfg = _write(tmp_path, {"scenario": "distribution", "n_bar": 4})
    for d in ("a", "b"):
        assert _run(["--config", cfg, "--out", tmp_path / d]) == 0
    for name in ("distribution.csv", "result.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_csv_round_trip_precision(tmp_path):
    w = cli.Writer(tmp_path, "0" * 64)
    vals = [0.1, 1 / 3, np.pi * 1e-17, -2.5e300]
    w.csv("t.csv", ["v"], [(v,) for v in vals])
    back = cli.read_table(tmp_path / "t.csv")["v"]
    assert list(back) == vals


def test_wigner_scenario_negative(tmp_path):
    cfg = _write(tmp_path, {"scenario": "wigner", "n_bar": 5, "wigner_points": 61, "wigner_extent": 5.0})
    assert _run(["--config", cfg, "--out", tmp_path / "w"]) == 0
    lines = [ln for ln in (tmp_path / "w" / "wigner.csv").read_text().splitlines() if not ln.startswith("#")]
    grid = np.array([[float(v) for v in ln.split(",")[1:]] for ln in lines[1:]])
    assert grid.shape == (61, 61)
    assert grid.min() < 0
    assert "W(x,p)" in (tmp_path / "w" / "wigner.csv").read_text()


def test_evolve_and_robustness(tmp_path):
    cfg = _write(tmp_path, {"scenario": "evolve", "n_bar": 3, "t_max": 10, "t_points": 11})
    assert _run(["--config", cfg, "--out", tmp_path / "e"]) == 0
    t = cli.read_table(tmp_path / "e" / "evolve.csv")
    assert np.ptp(t["e_total"]) < 1e-8
    cfg = _write(tmp_path, {"scenario": "robustness", "n_bar": 3, "resolution": [3, 4]}, "r.json")
    assert _run(["--config", cfg, "--out", tmp_path / "r", "--threads", "2"]) == 0
    assert len(cli.read_table(tmp_path / "r" / "robustness.csv")["fidelity"]) == 12


def test_lossy_evolve(tmp_path):
    cfg = _write(tmp_path, {"scenario": "evolve", "n_bar": 2, "t_max": 2, "t_points": 3, "lossy": True,
                            "kappa": 0.05})
    assert _run(["--config", cfg, "--out", tmp_path / "l"]) == 0
    t = cli.read_table(tmp_path / "l" / "evolve.csv")
    assert t["e_total"][-1] < t["e_total"][0]


def test_sweep_decoherence_scenarios(tmp_path):
    cfg = _write(tmp_path, {"scenario": "sweep-n", "n_bar": 3, "targets": [2, 3, 4], "branches": [0, 1]})
    assert _run(["--config", cfg, "--out", tmp_path / "s", "--threads", "0"]) == 0
    t = cli.read_table(tmp_path / "s" / "sweep_n.csv")
    assert list(t["n"]) == [2, 3, 4]
    cfg = _write(tmp_path, {"scenario": "decoherence", "n_bar": 2, "branches": [1], "kappa": 0.01,
                            "gamma": 0.01}, "d.json")
    assert _run(["--config", cfg, "--out", tmp_path / "d"]) == 0
    t = cli.read_table(tmp_path / "d" / "decoherence.csv")
    assert t["fidelity"][1] < t["fidelity"][0]


def test_seed_check():
    assert cli.seed_check() < 1e-9


def test_reproduce_figure_energy(tmp_path):
    out = cli.reproduce_figure("sm_fig5", tmp_path / "f")
    t = cli.read_table(out / "sm_fig5.csv")
    assert np.ptp(t["e_total"]) < 1e-8
    man = json.loads((out / "manifest.json").read_text())
    assert man["inputs"]["tag"] == "sm_fig5"
    with pytest.raises(UnknownTag):
        cli.reproduce_figure("fig5", tmp_path / "g")


def test_reproduce_figure_displaced_distributions(tmp_path):
    out = cli.reproduce_figure("sm_fig4", tmp_path / "f4")
    t = cli.read_table(out / "sm_fig4_branches_l12.csv")
    betas = sorted(set(np.round(t["beta_f"], 3)))
    assert betas[0] == pytest.approx(-0.477, abs=0.02)
    assert betas[1] == pytest.approx(0.649, abs=0.02)
