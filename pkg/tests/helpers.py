"""Shared fixtures: small graph builders and random instance generators."""

from __future__ import annotations

import random

from wclplan.network import SegmentGraph, graph_from_records
from wclplan.routing import Route, enumerate_all_routes, make_route
from wclplan.soc import SocParams


def make_line_graph(n: int, length: float = 5.0, category: int = 2,
                    setting: str = "urban",
                    lengths: list[float] | None = None) -> SegmentGraph:
    """n segments chained a -> b -> c -> ... (ids u1..un)."""
    if lengths is None:
        lengths = [length] * n
    records = [
        {"id": f"u{i + 1}", "length_mi": lengths[i], "category": category,
         "start": f"n{i}", "end": f"n{i + 1}"}
        for i in range(n)]
    return graph_from_records(records, setting)


def make_cycle_graph(n: int, length: float = 5.0, category: int = 2,
                     setting: str = "urban") -> SegmentGraph:
    """Directed cycle of n segments (ids c1..cn)."""
    records = [
        {"id": f"c{i + 1}", "length_mi": length, "category": category,
         "start": f"n{i}", "end": f"n{(i + 1) % n}"}
        for i in range(n)]
    return graph_from_records(records, setting)


def make_grid_network(rows: int, cols: int, length: float = 4.0,
                      setting: str = "urban",
                      rng: random.Random | None = None) -> SegmentGraph:
    """One-way street grid: eastbound/westbound rows and alternating
    north/south columns, one segment per block."""
    rng = rng or random.Random(0)
    records = []

    def add(sid, start, end):
        records.append({
            "id": sid,
            "length_mi": round(length * (0.5 + rng.random()), 3),
            "category": rng.choice([2, 3, 3, 4]),
            "start": start, "end": end})

    for i in range(rows):
        for j in range(cols - 1):
            if i % 2 == 0:
                add(f"e_{i}_{j}", f"x_{i}_{j}", f"x_{i}_{j + 1}")
            else:
                add(f"w_{i}_{j}", f"x_{i}_{j + 1}", f"x_{i}_{j}")
    for j in range(cols):
        for i in range(rows - 1):
            if j % 2 == 0:
                add(f"s_{i}_{j}", f"x_{i}_{j}", f"x_{i + 1}_{j}")
            else:
                add(f"n_{i}_{j}", f"x_{i + 1}_{j}", f"x_{i}_{j}")
    return graph_from_records(records, setting)


def random_instance(seed: int, max_candidates: int = 12,
                    max_routes: int = 20):
    """A desk-scale instance: (graph, routes, params, budget, scheme).

    Graphs are small strongly-reachable grids; routes carry random initial
    SOCs low enough that installation decisions matter.
    """
    rng = random.Random(seed)
    g = make_grid_network(rng.choice([2, 3]), rng.choice([2, 3]),
                         length=rng.uniform(6.0, 14.0), rng=rng)
    pop = enumerate_all_routes(g, min_segments=2)
    if not pop.routes:
        return random_instance(seed + 10_000, max_candidates, max_routes)
    routes = []
    seen: set[str] = set()
    for r in rng.sample(pop.routes, len(pop.routes)):
        new = seen | set(r.segment_ids)
        if len(new) > max_candidates:
            continue
        seen = new
        routes.append(Route(r.segment_ids, r.distance,
                            demand=rng.uniform(0.5, 2.0),
                            initial_soc=rng.uniform(0.05, 0.6)))
        if len(routes) == max_routes:
            break
    p = SocParams(alpha=rng.choice([0.1, 0.2, 0.3]),
                  n_layers=rng.choice([4, 6, 11]),
                  eps_tol=0.05,
                  soc_function=rng.choice(["realistic", "simplistic"]))
    total = sum(g.segment(sid).cost for sid in seen)
    budget = rng.uniform(0.2, 0.8) * total
    scheme = rng.choice(["binary", "penalty", "tolerance"])
    return g, routes, p, budget, scheme


def random_single_route(seed: int, max_segments: int = 10):
    """(graph, route, params) with one random route on a line graph."""
    rng = random.Random(seed)
    m = rng.randint(2, max_segments)
    g = make_line_graph(m, lengths=[rng.uniform(3.0, 15.0) for _ in range(m)],
                        category=rng.choice([2, 3, 4]))
    route = make_route(g, [f"u{i + 1}" for i in range(m)],
                       initial_soc=rng.uniform(0.1, 0.9))
    p = SocParams(alpha=rng.choice([0.1, 0.2, 0.3, 0.4]),
                  n_layers=rng.choice([4, 5, 8, 11]),
                  soc_function="simplistic")
    return g, route, p
