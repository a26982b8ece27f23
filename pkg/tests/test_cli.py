import json

import numpy as np
import pytest

from competprop.cli import main
from competprop.errors import ConfigInvalidError
from competprop.experiments import ExperimentConfig, run_experiment
from competprop.io import read_csv_rows

DELTA = [[0.6, 0.4, 0.0, 0.0], [0.3, 0.7, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.8, 0.0, 0.2]]


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def compare_cfg(tmp_path, **kw):
    doc = {"experiment": "compare_mc_ncpm", "graph": {"kind": "erdos_renyi", "n": 6, "p": 0.5},
           "delta": DELTA, "horizon": 5, "samples": 200, "seed": 3, "output_dir": str(tmp_path / "out")}
    doc.update(kw)
    return doc


def test_empty_config_is_invalid(tmp_path):
    with pytest.raises(ConfigInvalidError):
        ExperimentConfig.from_dict({})
    assert main(["compare", "--config", write(tmp_path, {})]) == 2


@pytest.mark.parametrize("patch, field", [
    ({"graph": {"kind": "erdos_renyi", "n": 6}}, "graph.p"),
    ({"alpha": {"kind": "uniform", "lo": 0.5, "hi": 1.5}}, "alpha"),
    ({"samples": 0}, "samples"),
    ({"horizon": 2.5}, "horizon"),
    ({"model": "other"}, "model"),
    ({"P0": {"kind": "dirichlet"}}, "P0.kind"),
])
def test_field_paths(tmp_path, patch, field):
    with pytest.raises(ConfigInvalidError) as info:
        ExperimentConfig.from_dict(compare_cfg(tmp_path, **patch))
    assert info.value.path == field


def test_resolved_config_records_seeds(tmp_path):
    cfg = ExperimentConfig.from_dict(compare_cfg(tmp_path))
    r = cfg.resolved
    assert r["graph"]["seed"] == 3 and r["alpha"]["seed"] == 4 and r["P0"]["seed"] == 5


def test_compare_outputs_are_byte_reproducible(tmp_path):
    files = run_experiment(compare_cfg(tmp_path))
    first = {f.name: f.read_bytes() for f in files}
    run_experiment(compare_cfg(tmp_path))
    assert {f.name: f.read_bytes() for f in files} == first
    config, rows = read_csv_rows(tmp_path / "out" / "compare.csv")
    assert config["seed"] == 3
    assert len(rows) == 6 * 6 * 4
    gaps = [float(r["abs_gap"]) for r in rows]
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["max_gap"] == max(gaps)


def test_cli_overrides(tmp_path):
    path = write(tmp_path, compare_cfg(tmp_path))
    out = tmp_path / "other"
    assert main(["compare", "--config", path, "--seed", "9", "--samples", "50", "--horizon", "3",
                 "--out-dir", str(out)]) == 0
    config, rows = read_csv_rows(out / "compare.csv")
    assert (config["seed"], config["samples"], config["horizon"]) == (9, 50, 3)
    assert len(rows) == 4 * 6 * 4


def test_asymptotics_run(tmp_path):
    doc = {"graph": {"kind": "erdos_renyi", "n": 5, "p": 0.6}, "delta": DELTA,
           "P0": {"kind": "random", "zero_products": [2]}, "output_dir": str(tmp_path)}
    assert main(["asymptotics", "--config", write(tmp_path, doc)]) == 0
    pred = json.loads((tmp_path / "prediction.json").read_text())
    assert pred["case"] == "Case4" and pred["gamma_provenance"] == "simulated"
    np.testing.assert_allclose(pred["limit"][0], [3 / 7, 4 / 7, 0, 0], atol=1e-6)


def test_asymptotics_nonconvergence_exit_code(tmp_path, monkeypatch):
    import competprop.experiments as ex
    real = ex.predict_asymptotics
    monkeypatch.setattr(ex, "predict_asymptotics", lambda *a, **k: real(*a, horizon_cap=2))
    doc = {"graph": {"kind": "complete", "n": 4}, "delta": DELTA, "output_dir": str(tmp_path)}
    assert main(["asymptotics", "--config", write(tmp_path, doc)]) == 3


def test_stability_run(tmp_path):
    doc = {"graph": {"kind": "complete", "n": 6}, "delta": [[0.3, 0.7], [0.5, 0.5]],
           "output_dir": str(tmp_path)}
    assert main(["stability", "--config", write(tmp_path, doc)]) == 0
    rep = json.loads((tmp_path / "stability.json").read_text())
    assert rep["stability"]["local_threshold"] == pytest.approx(1.2 / 1.24)
    assert rep["bounds"]["interval_holds"] and rep["bounds"]["gap_holds"]
    bad = dict(doc, delta=[[0.6, 0.4], [0.6, 0.4]])
    assert main(["stability", "--config", write(tmp_path, bad, "bad.json")]) == 2


def test_game_run(tmp_path):
    doc = {"graph": {"kind": "erdos_renyi", "n": 5, "p": 0.6}, "alpha": [0.8, 0.85, 0.75, 0.84, 0.76],
           "game": {"budgets": [600, 900], "gamma": 100}, "output_dir": str(tmp_path)}
    assert main(["game", "--config", write(tmp_path, doc)]) == 0
    _, rows = read_csv_rows(tmp_path / "payoffs.csv")
    last = [r for r in rows if r["t"] == "60"]
    assert [round(float(r["p_avg"]), 10) for r in last] == [0.4, 0.6]
    game = json.loads((tmp_path / "game.json").read_text())
    assert game["budget_condition"]["ok"] and game["seed"] == 0
    _, alloc = read_csv_rows(tmp_path / "allocations.csv")
    assert list(alloc[0]) == ["t", "node", "company", "x"]
    only = dict(doc, game={"mode": "seeding_only", "budgets": [600, 900], "gamma": 100})
    assert main(["game", "--config", write(tmp_path, only, "only.json")]) == 2


def test_gen_graph(tmp_path):
    doc = {"graph": {"kind": "power_law", "n": 100}, "seed": 2, "output_dir": str(tmp_path)}
    assert main(["gen-graph", "--config", write(tmp_path, doc)]) == 0
    g = json.loads((tmp_path / "graph.json").read_text())
    assert len(g["adjacency"]) == 100 and g["config"]["graph"]["seed"] == 2
    assert (tmp_path / "edges.txt").read_text().startswith("# config: ")
