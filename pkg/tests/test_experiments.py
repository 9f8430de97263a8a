import json

from wclplan.experiments import (SOC_GRID, ExperimentReport, soc_distribution,
                                 random_isoc_study, velocity_study,
                                 warmstart_study, write_report)
from wclplan.routing import RoutePopulation, enumerate_all_routes, make_route
from wclplan.soc import EMPTY_INSTALLATION, Installation, SocParams
from wclplan.solvers import branch_and_bound

from helpers import make_grid_network, make_line_graph

import pytest


def setup_small():
    g = make_grid_network(3, 3, length=8.0)
    pop = enumerate_all_routes(g, min_segments=2)
    routes = [r for r in pop.routes][:8]
    routes = [make_route(g, r.segment_ids, initial_soc=0.35)
              for r in routes]
    p = SocParams(alpha=0.2)
    return g, pop, routes, p


def test_report_validates_column_lengths():
    with pytest.raises(Exception):
        ExperimentReport(kind="x", config={},
                         series={"a": [1, 2], "b": [1]})


def test_csv_bytes_deterministic():
    rep = ExperimentReport(kind="x", config={"seed": 3},
                           series={"a": [1, 2], "b": [0.5, 1.0 / 3.0]})
    assert rep.csv_bytes() == rep.csv_bytes()
    text = rep.csv_bytes().decode()
    assert text.splitlines()[0] == "a,b"
    # floats are written with repr for exact round-tripping
    assert repr(1.0 / 3.0) in text


def test_write_report_files(tmp_path):
    rep = ExperimentReport(kind="x", config={"seed": 3, "z": 1},
                           series={"a": [1]}, summary={"s": 2})
    paths = write_report(rep, tmp_path)
    assert paths["csv"].endswith("x_seed3.csv")
    cfg = json.loads((tmp_path / "x_seed3.config.json").read_text())
    assert cfg["config"] == {"seed": 3, "z": 1}
    assert cfg["summary"] == {"s": 2}


def test_soc_distribution_counts():
    g, _, routes, p = setup_small()
    rep = soc_distribution(routes, [("none", EMPTY_INSTALLATION)], p, g)
    col = rep.series["none"]
    assert rep.series["soc"] == SOC_GRID
    assert col[-1] == len(routes)                 # everything ends <= 1.0
    assert all(a <= b for a, b in zip(col, col[1:]))
    assert rep.summary["none"] == col[20]         # count at alpha = 0.2


def test_soc_distribution_install_shifts_mass_right():
    g, _, routes, p = setup_small()
    everything = Installation.from_ids(g, g.node_ids())
    rep = soc_distribution(
        routes, [("none", EMPTY_INSTALLATION), ("all", everything)], p, g)
    assert all(a >= b for a, b in
               zip(rep.series["none"], rep.series["all"]))


def test_random_isoc_study_deterministic():
    g, pop, _, p = setup_small()
    kw = dict(l=0.5, n_routes=4, a=0.3, seed=9, budget=20.0, p=p, g=g)
    a = random_isoc_study(pop, **kw)
    b = random_isoc_study(pop, **kw)
    assert a.csv_bytes() == b.csv_bytes()
    lam = dict(zip(a.series["label"], a.series["lambda"]))
    assert lam["model"] >= lam["none"] - 1e-12


def test_velocity_zero_eps_has_zero_spread():
    g, _, routes, p = setup_small()
    inst = Installation.from_ids(g, list(g.node_ids())[:3])
    rep = velocity_study(routes, [0.0, 0.2], trials=6, seed=4,
                         installation=inst, p=p, g=g)
    zero = [v for e, v in zip(rep.series["eps"],
                              rep.series["avg_final_soc"]) if e == 0.0]
    assert max(zero) == min(zero)
    s = rep.summary["0.0"]
    assert s["q1"] == s["median"] == s["q3"]
    assert rep.csv_bytes() == velocity_study(
        routes, [0.0, 0.2], trials=6, seed=4,
        installation=inst, p=p, g=g).csv_bytes()


def test_warmstart_ratio_under_zero_node_limit():
    g, pop, _, p = setup_small()
    low = RoutePopulation.from_routes(
        [make_route(g, r.segment_ids, initial_soc=0.3)
         for r in pop.routes])
    rep = warmstart_study(low, ks=[3], node_limit=0, repeats=4, seed=2,
                          p=p, g=g, budget=25.0)
    for ratio in rep.series["ratio"]:
        assert ratio == "dominant" or ratio >= 1.0 - 1e-12
    assert rep.summary["dominant_count"] >= 0


def test_velocity_rerun_from_config_sidecar(tmp_path):
    g, _, routes, p = setup_small()
    inst = Installation.from_ids(g, list(g.node_ids())[:2])
    rep = velocity_study(routes, [0.1], trials=3, seed=8,
                         installation=inst, p=p, g=g)
    paths = write_report(rep, tmp_path)
    cfg = json.loads(open(paths["config"]).read())["config"]
    again = velocity_study(
        routes, cfg["eps_values"], cfg["trials"], cfg["seed"],
        Installation.from_ids(g, cfg["installation"]),
        SocParams(alpha=cfg["alpha"], n_layers=cfg["n_layers"],
                  soc_function=cfg["soc_function"]), g)
    assert again.csv_bytes() == open(paths["csv"], "rb").read()
