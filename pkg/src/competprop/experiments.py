"""Configuration-driven experiments that write plot-ready CSV and JSON.

A configuration is one JSON document. Run parameters (``seed``,
``horizon``, ``samples``, ``tol``, ``max_iter``, ``output_dir``) are
top-level fields so command-line flags can override them directly::

    {
      "experiment": "compare_mc_ncpm",
      "graph": {"kind": "erdos_renyi", "n": 50, "p": 0.1},
      "alpha": {"kind": "uniform", "lo": 0.05, "hi": 0.95},
      "delta": [[0.6, 0.4, 0.0, 0.0], ...],
      "P0": {"kind": "random"},
      "model": "social_self",
      "horizon": 50, "samples": 10000, "seed": 7
    }

Every random ingredient without its own seed gets one derived from
``seed``; the derived values are written back into the resolved
configuration, which is embedded in every output file.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import check_stability, fixed_point_bounds, predict_asymptotics
from .errors import ConfigInvalidError
from .games import MODES, GameConfig, Preset, run_closed_loop, verify_budget_conditions
from .generators import generate_graph
from .graphs import build_social_network, decompose_conversion_graph
from .io import dump_graph_json, write_csv, write_json
from .markov_sim import estimate_trajectories
from .ncpm import MODELS, SOCIAL_SELF, TwoProduct, solve_two_product_fixed_point, trajectory

KINDS = ("compare_mc_ncpm", "asymptotics", "stability", "game", "gen_graph")
GRAPH_KINDS = ("matrix", "complete", "erdos_renyi", "power_law", "star")

DEFAULTS = {
    "compare_mc_ncpm": {"horizon": 50, "samples": 10_000},
    "asymptotics": {"horizon": 200},
    "stability": {},
    "game": {"horizon": 60},
    "gen_graph": {},
}


def _require(cond, path, msg):
    if not cond:
        raise ConfigInvalidError(path, msg)


def _number(doc, key, path, kind=float, default=None, positive=False):
    v = doc.get(key, default)
    _require(v is not None, f"{path}{key}", "required")
    try:
        if kind is int and not float(v).is_integer():
            raise ValueError
        v = kind(v)
    except (TypeError, ValueError):
        raise ConfigInvalidError(f"{path}{key}", f"expected {kind.__name__}, got {v!r}") from None
    if positive:
        _require(v > 0, f"{path}{key}", "must be positive")
    return v


def _matrix(v, path):
    try:
        M = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigInvalidError(path, "expected a numeric matrix") from None
    _require(M.ndim == 2 and M.size > 0, path, "expected a non-empty 2-d list")
    return M


def _resolve_graph(g, seed):
    _require(isinstance(g, dict), "graph", "expected an object")
    g = dict(g)
    if "adjacency" in g and "kind" not in g:
        g["kind"] = "matrix"
    kind = g.get("kind")
    _require(kind in GRAPH_KINDS, "graph.kind", f"expected one of {GRAPH_KINDS}")
    if kind == "matrix":
        _matrix(g.get("adjacency"), "graph.adjacency")
        return g
    g["n"] = _number(g, "n", "graph.", int, positive=True)
    if kind == "erdos_renyi":
        g["p"] = _number(g, "p", "graph.")
        _require(0 < g["p"] <= 1, "graph.p", "must lie in (0, 1]")
    if kind == "power_law":
        g["exponent"] = _number(g, "exponent", "graph.", default=2.87)
        _require(g["exponent"] > 1, "graph.exponent", "must exceed 1")
    if kind in ("erdos_renyi", "power_law"):
        g["seed"] = _number(g, "seed", "graph.", int, default=seed)
    return g


def _resolve_alpha(a, seed):
    if a is None:
        a = {"kind": "uniform", "lo": 0.05, "hi": 0.95}
    if isinstance(a, list):
        return {"kind": "values", "values": a}
    _require(isinstance(a, dict), "alpha", "expected a list or an object")
    a = dict(a)
    kind = a.get("kind")
    if kind == "uniform":
        a["lo"] = _number(a, "lo", "alpha.")
        a["hi"] = _number(a, "hi", "alpha.")
        _require(0 < a["lo"] <= a["hi"] < 1, "alpha", "need 0 < lo <= hi < 1")
        a["seed"] = _number(a, "seed", "alpha.", int, default=seed)
    elif kind == "constant":
        a["value"] = _number(a, "value", "alpha.")
    elif kind == "values":
        _require(isinstance(a.get("values"), list), "alpha.values", "expected a list")
    else:
        raise ConfigInvalidError("alpha.kind", "expected uniform, constant or values")
    return a


def _resolve_P0(p, seed):
    if p is None:
        p = {"kind": "random"}
    if isinstance(p, list):
        return {"kind": "matrix", "values": p}
    _require(isinstance(p, dict), "P0", "expected a list or an object")
    p = dict(p)
    kind = p.get("kind")
    _require(kind in ("uniform", "random", "matrix"), "P0.kind", "expected uniform, random or matrix")
    if kind == "random":
        p["seed"] = _number(p, "seed", "P0.", int, default=seed)
    if kind == "matrix":
        _matrix(p.get("values"), "P0.values")
    zero = p.get("zero_products", [])
    _require(isinstance(zero, list) and all(isinstance(z, int) for z in zero),
             "P0.zero_products", "expected a list of product indices")
    p["zero_products"] = zero
    return p


def _resolve_game(g, delta):
    _require(isinstance(g, dict), "game", "required for game experiments")
    g = dict(g)
    g["mode"] = g.get("mode", "seeding_quality")
    _require(g["mode"] in MODES, "game.mode", f"expected one of {MODES}")
    b = g.get("budgets")
    _require(isinstance(b, list) and len(b) >= 2, "game.budgets", "expected a list with one budget per company")
    g["gamma"] = _number(g, "gamma", "game.", positive=True)
    pol = g.get("policies", ["nash"] * len(b))
    _require(isinstance(pol, list) and len(pol) == len(b) and all(x in ("nash", "random") for x in pol),
             "game.policies", "expected 'nash' or 'random' for every company")
    g["policies"] = pol
    if g["mode"] == "seeding_only":
        _require(delta is not None, "delta", "required for the seeding-only game")
    return g


@dataclass
class ExperimentConfig:
    """Validated configuration; ``resolved`` is the JSON form written to outputs."""

    resolved: dict

    @property
    def kind(self) -> str:
        return self.resolved["experiment"]

    @property
    def seed(self) -> int:
        return self.resolved["seed"]

    @property
    def output_dir(self) -> Path:
        return Path(self.resolved["output_dir"])

    @classmethod
    def from_dict(cls, raw, overrides=None) -> "ExperimentConfig":
        """Validate ``raw`` (with ``overrides`` applied on top) and fill in defaults.

        Raises
        ------
        ConfigInvalidError
            With the dotted path of the first offending field.
        """
        _require(isinstance(raw, dict) and raw, "<root>", "empty configuration")
        doc = copy.deepcopy(raw)
        for k, v in (overrides or {}).items():
            if v is not None:
                doc[k] = v
        kind = doc.get("experiment")
        _require(kind in KINDS, "experiment", f"expected one of {KINDS}")
        for k, v in DEFAULTS[kind].items():
            doc.setdefault(k, v)
        seed = doc["seed"] = _number(doc, "seed", "", int, default=0)
        doc["output_dir"] = str(doc.get("output_dir", "out"))
        _require("graph" in doc, "graph", "required")
        # independent sub-seeds, so changing one ingredient leaves the others alone
        doc["graph"] = _resolve_graph(doc["graph"], seed)
        if kind == "gen_graph":
            return cls(doc)
        doc["alpha"] = _resolve_alpha(doc.get("alpha"), seed + 1)
        if "delta" in doc:
            _matrix(doc["delta"], "delta")
        if kind in ("compare_mc_ncpm", "asymptotics", "stability"):
            _require("delta" in doc, "delta", "required")
        if kind == "stability":
            _require(np.shape(doc["delta"]) == (2, 2), "delta", "stability needs a 2x2 matrix")
        if kind in ("compare_mc_ncpm", "asymptotics", "game"):
            doc["P0"] = _resolve_P0(doc.get("P0"), seed + 2)
            doc["horizon"] = _number(doc, "horizon", "", int)
            _require(doc["horizon"] >= 0, "horizon", "must be >= 0")
        if kind == "compare_mc_ncpm":
            doc["samples"] = _number(doc, "samples", "", int, positive=True)
            doc["model"] = doc.get("model", SOCIAL_SELF)
            _require(doc["model"] in MODELS, "model", f"expected one of {MODELS}")
        if kind == "stability":
            doc["tol"] = _number(doc, "tol", "", default=1e-10, positive=True)
            doc["max_iter"] = _number(doc, "max_iter", "", int, default=10**6, positive=True)
        if kind == "game":
            doc["game"] = _resolve_game(doc.get("game"), doc.get("delta"))
        return cls(doc)

    @classmethod
    def load(cls, path, overrides=None) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalidError("<file>", str(exc)) from None
        return cls.from_dict(raw, overrides)


# -- building model inputs ----------------------------------------------------


def build_network(cfg: ExperimentConfig):
    g = cfg.resolved["graph"]
    if g["kind"] == "matrix":
        return build_social_network(g["adjacency"])
    return generate_graph(g)


def build_alpha(cfg: ExperimentConfig, n: int) -> np.ndarray:
    a = cfg.resolved["alpha"]
    if a["kind"] == "uniform":
        return np.random.default_rng(a["seed"]).uniform(a["lo"], a["hi"], size=n)
    if a["kind"] == "constant":
        return np.full(n, a["value"])
    v = np.asarray(a["values"], dtype=float)
    if v.shape != (n,):
        raise ConfigInvalidError("alpha.values", f"expected {n} entries, got {v.size}")
    return v


def build_P0(cfg: ExperimentConfig, n: int, R: int) -> np.ndarray:
    p = cfg.resolved["P0"]
    if p["kind"] == "uniform":
        P = np.full((n, R), 1.0)
    elif p["kind"] == "random":
        P = np.random.default_rng(p["seed"]).dirichlet(np.ones(R), size=n)
    else:
        P = np.asarray(p["values"], dtype=float)
        if P.shape != (n, R):
            raise ConfigInvalidError("P0.values", f"expected shape ({n}, {R}), got {P.shape}")
    zero = p["zero_products"]
    if any(not 0 <= z < R for z in zero):
        raise ConfigInvalidError("P0.zero_products", f"indices must lie in 0..{R - 1}")
    if len(zero) == R:
        raise ConfigInvalidError("P0.zero_products", "cannot zero every product")
    P = P.copy()
    P[:, zero] = 0.0
    return P / P.sum(axis=1, keepdims=True)


# -- experiments ---------------------------------------------------------------


def _compare(cfg, out):
    c = cfg.resolved
    net = build_network(cfg)
    pcg = decompose_conversion_graph(c["delta"])
    alpha = build_alpha(cfg, net.n)
    P0 = build_P0(cfg, net.n, pcg.R)
    mc = estimate_trajectories(c["model"], net, alpha, pcg, P0, c["horizon"], c["samples"], c["seed"])
    ncpm = trajectory(c["model"], net, alpha, pcg, P0, c["horizon"])
    est = mc.estimates
    gap = np.abs(est - ncpm)
    T1, n, R = gap.shape
    rows = ((t, i, r, est[t, i, r], ncpm[t, i, r], gap[t, i, r])
            for t in range(T1) for i in range(n) for r in range(R))
    files = [write_csv(out / "compare.csv", ["t", "node", "product", "p_hat", "p", "abs_gap"], rows, config=c)]
    summary = {
        "config": c,
        "max_gap": float(gap.max()),
        "max_gap_by_product": gap.max(axis=(0, 1)).tolist(),
        "max_standard_error": float(mc.standard_error().max()),
        "alpha": alpha,
        "P0": P0,
    }
    files.append(write_json(out / "summary.json", summary))
    return files


def _asymptotics(cfg, out):
    c = cfg.resolved
    net = build_network(cfg)
    pcg = decompose_conversion_graph(c["delta"])
    alpha = build_alpha(cfg, net.n)
    P0 = build_P0(cfg, net.n, pcg.R)
    pred = predict_asymptotics(net, alpha, pcg, P0)
    traj = trajectory(SOCIAL_SELF, net, alpha, pcg, P0, c["horizon"])
    doc = pred.to_dict()
    doc.update({
        "config": c,
        "sccs": [s.tolist() for s in pcg.sccs],
        "transient": pcg.transient.tolist(),
        "final_gap": float(np.abs(traj[-1] - pred.limit).max()),
        "alpha": alpha,
        "P0": P0,
    })
    if pred.gammas is not None:
        doc["gamma_sum"] = float(pred.gammas.sum())
    return [
        write_json(out / "prediction.json", doc),
        write_csv(out / "trajectory.csv", ["t", "node", "product", "p"],
                  ((t, i, r, traj[t, i, r]) for t in range(traj.shape[0])
                   for i in range(net.n) for r in range(pcg.R)), config=c),
    ]


def _stability(cfg, out):
    c = cfg.resolved
    net = build_network(cfg)
    alpha = build_alpha(cfg, net.n)
    params = TwoProduct.from_matrix(c["delta"])
    p, res = solve_two_product_fixed_point(params, net, alpha, tol=c["tol"], max_iter=c["max_iter"],
                                           full_output=True)
    bounds = fixed_point_bounds(params, alpha)
    gap = p - net.normalized @ p
    report = check_stability(net, alpha, params, p)
    doc = res.report()
    doc.update({
        "config": c,
        "alpha": alpha,
        "bounds": {
            "lower": bounds.lower,
            "upper": bounds.upper,
            "node_gap_bound": bounds.node_gap_bound,
            "interval_holds": bool(np.all((p >= bounds.lower - c["tol"]) & (p <= bounds.upper + c["tol"]))),
            "gap_holds": bool(np.all(gap <= bounds.node_gap_bound + c["tol"])),
        },
        "stability": report.to_dict(),
    })
    return [write_json(out / "stability.json", doc)]


def _game(cfg, out):
    c = cfg.resolved
    g = c["game"]
    net = build_network(cfg)
    alpha = build_alpha(cfg, net.n)
    preset = None
    if g.get("preset"):
        preset = Preset(np.asarray(g["preset"]["xi"], dtype=float), float(g["preset"]["u"]))
    gc = GameConfig(net, alpha, np.asarray(g["budgets"], dtype=float), g["gamma"], mode=g["mode"],
                    delta=None if c.get("delta") is None else np.asarray(c["delta"], dtype=float),
                    preset=preset)
    P0 = build_P0(cfg, net.n, gc.R)
    check = verify_budget_conditions(gc)
    run = run_closed_loop(gc, P0, c["horizon"], policies=g["policies"], seed=c["seed"])
    avg, pay = run.average_adoption, run.payoffs
    R = gc.R
    files = [
        write_json(out / "game.json", {
            "config": c,
            "mode": g["mode"], "budgets": g["budgets"], "gamma": g["gamma"],
            "horizon": c["horizon"], "seed": c["seed"], "policies": g["policies"],
            "budget_condition": {"ok": check.ok, "thresholds": check.thresholds},
            "final_average_adoption": avg[-1],
            "alpha": alpha,
        }),
        write_csv(out / "payoffs.csv", ["t", "company", "payoff", "p_avg"],
                  ((t, r, pay[t, r], avg[t, r]) for t in range(avg.shape[0]) for r in range(R)), config=c),
        write_csv(out / "allocations.csv", ["t", "node", "company", "x"],
                  ((t, i, r, a.X[i, r]) for t, a in enumerate(run.allocations)
                   for i in range(net.n) for r in range(R)), config=c),
        write_csv(out / "quality.csv", ["t", "company", "w"],
                  ((t, r, a.w[r]) for t, a in enumerate(run.allocations) for r in range(R)), config=c),
    ]
    return files


def _gen_graph(cfg, out):
    net = build_network(cfg)
    c = cfg.resolved
    path = out / "graph.json"
    dump_graph_json(path, net, delta=c.get("delta"), extra={"config": c})
    edges = out / "edges.txt"
    with open(edges, "w") as fh:
        fh.write("# config: " + json.dumps(c, sort_keys=True) + "\n")
    with open(edges, "a") as fh:
        for i, j in net.edges():
            fh.write(f"{i} {j}\n")
    return [path, edges]


RUNNERS = {
    "compare_mc_ncpm": _compare,
    "asymptotics": _asymptotics,
    "stability": _stability,
    "game": _game,
    "gen_graph": _gen_graph,
}


def run_experiment(config, overrides=None) -> list[Path]:
    """Run one experiment and return the paths of the files it wrote.

    ``config`` may be an :class:`ExperimentConfig`, a dict or a path to a
    JSON file.
    """
    if not isinstance(config, ExperimentConfig):
        if isinstance(config, (str, Path)):
            config = ExperimentConfig.load(config, overrides)
        else:
            config = ExperimentConfig.from_dict(config, overrides)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return RUNNERS[config.kind](config, out)
