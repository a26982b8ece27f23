import json

import numpy as np
import pytest

from competprop.errors import CompetPropError, GenerationFailedError
from competprop.generators import complete, erdos_renyi, generate_graph, natural_cutoff, power_law, star
from competprop.io import (
    load_graph_json,
    read_csv_rows,
    read_edge_list,
    write_csv,
    write_edge_list,
    write_json,
    write_trajectory_csv,
)


def test_complete_and_star():
    A = complete(5).adjacency
    assert np.array_equal(A, np.ones((5, 5), dtype=np.int8) - np.eye(5, dtype=np.int8))
    assert star(10).degrees.tolist() == [9] + [1] * 9


def test_erdos_renyi_reproducible_and_connected():
    a = erdos_renyi(50, 0.1, seed=4)
    b = erdos_renyi(50, 0.1, seed=4)
    assert np.array_equal(a.adjacency, b.adjacency)
    assert not np.array_equal(a.adjacency, erdos_renyi(50, 0.1, seed=5).adjacency)
    with pytest.raises(GenerationFailedError) as info:
        erdos_renyi(40, 0.01, seed=0)
    assert info.value.attempts == 100


def test_power_law_graph():
    net = power_law(100, 2.87, seed=0)
    assert net.n == 100
    assert net.degrees.min() >= 1
    assert natural_cutoff(100, 2.87) == 11
    assert np.array_equal(net.adjacency, power_law(100, 2.87, seed=0).adjacency)
    with pytest.raises(GenerationFailedError):
        power_law(20, 2.5, seed=0, k_min=1, k_max=1, max_attempts=20)


def test_generate_graph_dispatch():
    assert generate_graph({"kind": "star", "n": 4}).n == 4
    assert generate_graph({"kind": "erdos_renyi", "n": 10, "p": 0.5}, seed=1).n == 10
    with pytest.raises(CompetPropError):
        generate_graph({"kind": "ring", "n": 4})


def test_graph_json_roundtrip(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"adjacency": star(4).adjacency.tolist(),
                                "delta": [[0.6, 0.4], [0.3, 0.7]], "alpha": [0.1, 0.2, 0.3, 0.4]}))
    net, pcg, alpha = load_graph_json(path)
    assert net.n == 4 and pcg.case == 1 and alpha.tolist() == [0.1, 0.2, 0.3, 0.4]


def test_edge_list_roundtrip(tmp_path):
    net = erdos_renyi(12, 0.3, seed=2)
    path = tmp_path / "edges.txt"
    write_edge_list(path, net)
    with open(path, "a") as fh:
        fh.write("# trailing comment\n\n")
    assert np.array_equal(read_edge_list(path).adjacency, net.adjacency)


def test_csv_round_trip_exact(tmp_path):
    x = np.random.default_rng(0).random((3, 2, 2))
    path = write_trajectory_csv(tmp_path / "t.csv", x, config={"seed": 1})
    config, rows = read_csv_rows(path)
    assert config == {"seed": 1}
    assert list(rows[0]) == ["t", "node", "product", "p"]
    back = np.array([float(r["p"]) for r in rows]).reshape(3, 2, 2)
    np.testing.assert_array_equal(back, x)
    plain = write_csv(tmp_path / "plain.csv", ["a"], [[1]])
    assert read_csv_rows(plain) == (None, [{"a": "1"}])


def test_json_handles_numpy(tmp_path):
    path = write_json(tmp_path / "r.json", {"a": np.arange(3), "b": np.float64(0.5), "c": np.bool_(True)})
    assert json.loads(path.read_text()) == {"a": [0, 1, 2], "b": 0.5, "c": True}
