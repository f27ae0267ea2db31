import csv
import json
import math

import numpy as np
import pytest

from spin_dephasing import __version__
from spin_dephasing.cli import main
from spin_dephasing.config import ConfigError, RunConfig, load_config

INI = """
[model]
n_sites = 3
beta = 2.0

[pointer]
s = 0.5, 1/3

[run]
seed = 7
"""


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def ini(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(INI)
    return path


def test_defaults():
    c = load_config()
    assert c == RunConfig()
    assert c.model().gamma == math.pi


def test_file_and_overrides(ini):
    c = load_config(ini)
    assert (c.n_sites, c.beta, c.seed) == (3, 2.0, 7)
    assert c.s_values == (0.5, 1 / 3)
    c = load_config(ini, {"model.beta": "0.5", "model.n_sites": None})
    assert (c.n_sites, c.beta) == (3, 0.5)


@pytest.mark.parametrize("overrides", [{"model.spin": "1"}, {"model.beta": "-1"}, {"model.beta": "hot"},
                                       {"cutoff.family": "lorentzian"}, {"pointer.s": "1.5"}, {"pointer.s": "1/0"}])
def test_bad_config(overrides):
    with pytest.raises(ConfigError):
        load_config(None, overrides)


def test_to_dict_roundtrips_through_overrides():
    c = load_config(None, {"model.n_sites": "5", "cutoff.family": "algebraic", "cutoff.exponent": "4"})
    flat = {f"{s}.{k}": v for s, body in c.to_dict().items() for k, v in body.items()}
    assert load_config(None, flat) == c


@pytest.mark.parametrize("argv", [["theorem", "--beta", "0"], ["coefficients", "--set", "model.spin=1"],
                                  ["pointer", "--set", "nokey"], ["theorem", "--n-sites", "13"]])
def test_cli_config_errors(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == 1


def test_cli_missing_config_file(tmp_path):
    assert main(["pointer", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == 1


@pytest.mark.parametrize(
    "command, files",
    [
        ("coefficients", ["coefficients.csv", "coefficients.json"]),
        ("decoherence-map", ["decoherence_map.csv", "decoherence_map.json"]),
        ("theorem", ["theorem.csv", "theorem.json"]),
        ("pointer", ["pointer.csv", "pointer.json"]),
    ],
)
def test_cli_deterministic(command, files, tmp_path, ini):
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main([command, "--config", str(ini), "--out", str(out)]) == 0
        outputs.append([(out / f).read_bytes() for f in files])
    assert outputs[0] == outputs[1]
    report = json.loads((tmp_path / "a" / files[1]).read_text())
    assert report["version"] == __version__
    assert report["config"]["model"]["n_sites"] == 3
    assert report["config"]["run"]["seed"] == 7


def test_cli_seed_changes_theorem(tmp_path):
    for seed in ("1", "2"):
        assert main(["theorem", "--n-sites", "3", "--seed", seed, "--out", str(tmp_path / seed)]) == 0
    assert (tmp_path / "1" / "theorem.csv").read_bytes() != (tmp_path / "2" / "theorem.csv").read_bytes()


def test_cli_coefficients_identity(tmp_path):
    assert main(["coefficients", "--all-families", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "coefficients.json").read_text())
    assert [c["identity"] for c in report["identity_check"]] == ["PASS"] * 3
    rows = read_csv(tmp_path / "coefficients.csv")
    assert len(rows) == 18
    a = [float(r["value"]) for r in rows if r["quantity"] == "a" and r["method"] == "closed_form"]
    assert a == [2 * math.pi] * 3


def rates(path):
    return {int(r["distance"]): (float(r["analytic_rate"]), float(r["fitted_rate"])) for r in read_csv(path)}


def test_cli_decoherence_map_laws(tmp_path):
    assert main(["decoherence-map", "--n-sites", "4", "--out", str(tmp_path / "cold")]) == 0
    assert main(["decoherence-map", "--n-sites", "4", "--beta", "0.5", "--out", str(tmp_path / "hot")]) == 0
    cold, hot = rates(tmp_path / "cold" / "decoherence_map.csv"), rates(tmp_path / "hot" / "decoherence_map.csv")
    assert sorted(cold) == list(range(1, 16))
    for d, (analytic, fitted) in cold.items():
        assert fitted / analytic == pytest.approx(1, abs=1e-9)
        assert hot[d][1] / fitted == pytest.approx(2, rel=1e-9)
    for d in range(1, 8):
        assert cold[2 * d][1] / cold[d][1] == pytest.approx(4, rel=1e-9)
    assert cold[1][0] == pytest.approx(math.pi / 64, rel=1e-15)


def test_cli_theorem_outputs(tmp_path):
    assert main(["theorem", "--n-sites", "3", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "theorem.json").read_text())
    assert report["status"] == "ok"
    assert report["t_tol"] > 0
    assert report["envelope_log_slope"] == pytest.approx(-math.pi / 16, rel=1e-15)
    rows = read_csv(tmp_path / "theorem.csv")
    assert all(float(r["distance"]) <= float(r["envelope"]) * (1 + 1e-12) + 1e-14 for r in rows)


def test_cli_theorem_horizon_exceeded(tmp_path):
    assert main(["theorem", "--set", "theorem.horizon=5", "--out", str(tmp_path)]) == 2
    report = json.loads((tmp_path / "theorem.json").read_text())
    assert report["status"] == "horizon_exceeded"
    assert report["distance_at_horizon"] > 1e-8


def test_cli_pointer_one_third(tmp_path):
    assert main(["pointer", "--n-sites", "10", "--s", "1/3", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "pointer.csv")
    assert len(rows) == 10
    last = rows[-1]
    assert int(last["rank"]) == 341
    assert float(last["abs_error"]) == pytest.approx(3.2552e-4, abs=1e-8)
    assert last["invariant"] == ""
    assert all(float(r["abs_error"]) <= float(r["bound"]) for r in rows)
    assert all(r["invariant"] == "true" for r in rows[:8])
    assert json.loads((tmp_path / "pointer.json").read_text())["all_invariant"] is True


def test_cli_csv_round_trips_floats(tmp_path):
    assert main(["decoherence-map", "--n-sites", "2", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "decoherence_map.csv")
    assert float(rows[0]["analytic_rate"]) == math.pi / 4
    assert np.isfinite([float(r["crossing_time"]) for r in rows]).all()
