"""File formats: graph JSON, edge lists and the plot-ready CSV outputs.

CSV numbers are written with 17 significant digits, so re-running a
configuration reproduces every file byte for byte. Each CSV may start with a
``# config: {...}`` comment line holding the resolved configuration; read it
back with ``pandas.read_csv(path, comment="#")`` or :func:`read_csv_rows`.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .graphs import SocialNetwork, build_social_network, decompose_conversion_graph, network_from_edges

FLOAT_FMT = "{:.17g}"


def load_graph_json(path):
    """Read ``{"adjacency": ..., "delta": ..., "alpha": ...}``; missing keys come back as None."""
    with open(path) as fh:
        doc = json.load(fh)
    net = build_social_network(doc["adjacency"]) if "adjacency" in doc else None
    pcg = decompose_conversion_graph(doc["delta"]) if "delta" in doc else None
    alpha = np.asarray(doc["alpha"], dtype=float) if "alpha" in doc else None
    return net, pcg, alpha


def dump_graph_json(path, net: SocialNetwork | None = None, delta=None, alpha=None, extra=None):
    doc = dict(extra or {})
    if net is not None:
        doc["adjacency"] = net.adjacency.tolist()
    if delta is not None:
        doc["delta"] = np.asarray(delta).tolist()
    if alpha is not None:
        doc["alpha"] = np.asarray(alpha).tolist()
    write_json(path, doc)


def read_edge_list(path, n=None) -> SocialNetwork:
    """One ``i j`` pair per line, 0-indexed; blank lines and ``#`` comments are skipped."""
    edges = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                i, j = line.split()[:2]
                edges.append((int(i), int(j)))
    return network_from_edges(edges, n=n)


def write_edge_list(path, net: SocialNetwork):
    with open(path, "w") as fh:
        for i, j in net.edges():
            fh.write(f"{i} {j}\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT.format(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows, config=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        if config is not None:
            fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv_rows(path):
    """Return ``(config, rows)``; ``config`` is None when there is no header comment."""
    config = None
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("# config: "):
            config = json.loads(first[len("# config: "):])
        else:
            fh.seek(0)
        rows = list(csv.DictReader(fh))
    return config, rows


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def tensor_rows(tensor):
    """Flatten a ``(T+1, n, R)`` array into ``(t, node, product, value)`` rows."""
    T1, n, R = tensor.shape
    for t in range(T1):
        for i in range(n):
            for r in range(R):
                yield t, i, r, float(tensor[t, i, r])


def write_trajectory_csv(path, tensor, value_name="p", config=None):
    return write_csv(path, ["t", "node", "product", value_name], tensor_rows(tensor), config=config)
