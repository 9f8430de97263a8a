"""Travel-time routing: shortest routes, enumeration, sampling, Omega_l.

Shortest paths minimize total edge weight, where the weight of edge (u, v)
is the traversal time of segment u.  Ties between equal-time paths are
broken by the lexicographically smallest id sequence, which makes every
routing result (and everything built on top of it) deterministic.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, replace
from heapq import heappush, heappop
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import EnumerationCapError, RouteError, SamplingError
from .network import SegmentGraph, traversal_time

import random


@dataclass(frozen=True)
class Route:
    """Ordered sequence of adjacent segments with demand and initial SOC.

    demand is the route's weight in the objective (default 1).  Values
    above 1 are allowed so that demand rescaling experiments work.
    """

    segment_ids: tuple[str, ...]
    distance: float
    demand: float = 1.0
    initial_soc: float = 1.0

    def __post_init__(self):
        if len(self.segment_ids) < 1:
            raise RouteError("route must contain at least one segment")
        if self.demand <= 0:
            raise RouteError(f"demand {self.demand} must be positive")
        if not 0.0 <= self.initial_soc <= 1.0:
            raise RouteError(f"initial_soc {self.initial_soc} outside [0, 1]")

    @property
    def num_segments(self) -> int:
        return len(self.segment_ids)


def make_route(g: SegmentGraph, segment_ids: Sequence[str],
               demand: float = 1.0, initial_soc: float = 1.0) -> Route:
    """Build a Route from ids, validating adjacency against the graph."""
    ids = tuple(segment_ids)
    for sid in ids:
        if sid not in g:
            raise RouteError(f"route references unknown segment {sid!r}")
    for u, v in zip(ids, ids[1:]):
        if v not in g.successors(u):
            raise RouteError(f"segments {u!r} -> {v!r} are not adjacent")
    dist = sum(g.segment(sid).length for sid in ids)
    return Route(segment_ids=ids, distance=dist,
                 demand=demand, initial_soc=initial_soc)


# -- shortest paths ------------------------------------------------------

def _reconstruct(parent: dict[str, str | None], dest: str) -> list[str]:
    out = []
    node: str | None = dest
    while node is not None:
        out.append(node)
        node = parent[node]
    out.reverse()
    return out


def _path_less(parent, u1: str, u2: str, v: str) -> bool:
    """True if path(u1)+[v] is lexicographically before path(u2)+[v]."""
    p1 = _reconstruct(parent, u1)
    p1.append(v)
    p2 = _reconstruct(parent, u2)
    p2.append(v)
    return p1 < p2


def shortest_paths_from(g: SegmentGraph, origin: str):
    """Single-source shortest paths with lexicographic tie-breaking.

    Returns (dist, parent, order): time-distance and chosen parent per
    reachable node, plus nodes in settlement order (origin first).  The
    parent pointers spell out, for every destination, the unique
    lexicographically-smallest minimum-time path.
    """
    if origin not in g:
        raise RouteError(f"unknown segment id {origin!r}")
    times = {sid: traversal_time(seg) for sid, seg in g.segments.items()}
    dist: dict[str, float] = {origin: 0.0}
    parent: dict[str, str | None] = {origin: None}
    settled: set[str] = set()
    order: list[str] = []
    heap: list[tuple[float, str]] = [(0.0, origin)]
    while heap:
        d, u = heappop(heap)
        if u in settled or d > dist[u]:
            continue
        settled.add(u)
        order.append(u)
        nd = d + times[u]
        for v in g.successors(u):
            if v in settled:
                continue
            cur = dist.get(v)
            if cur is None or nd < cur:
                dist[v] = nd
                parent[v] = u
                heappush(heap, (nd, v))
            elif nd == cur and parent[v] != u:
                # Equal-time alternative: keep the lex-smaller path.
                if _path_less(parent, u, parent[v], v):
                    parent[v] = u
    return dist, parent, order


def shortest_route(g: SegmentGraph, origin: str, dest: str,
                   demand: float = 1.0,
                   initial_soc: float = 1.0) -> Route | None:
    """Minimum-travel-time route from origin to dest, or None if unreachable."""
    if dest not in g:
        raise RouteError(f"unknown segment id {dest!r}")
    dist, parent, _ = shortest_paths_from(g, origin)
    if dest not in dist:
        return None
    ids = tuple(_reconstruct(parent, dest))
    length = sum(g.segment(sid).length for sid in ids)
    return Route(segment_ids=ids, distance=length,
                 demand=demand, initial_soc=initial_soc)


# -- route populations ---------------------------------------------------

@dataclass
class RoutePopulation:
    """A set of routes with mean distance tau and population std sigma."""

    routes: list[Route]
    tau: float
    sigma: float

    @classmethod
    def from_routes(cls, routes: Iterable[Route]) -> "RoutePopulation":
        rs = list(routes)
        if not rs:
            return cls(routes=[], tau=0.0, sigma=0.0)
        dists = [r.distance for r in rs]
        return cls(routes=rs, tau=statistics.fmean(dists),
                   sigma=statistics.pstdev(dists))


def enumerate_all_routes(g: SegmentGraph, min_segments: int = 2,
                         node_cap: int = 2000) -> RoutePopulation:
    """One shortest route per ordered reachable pair with >= min_segments."""
    if len(g) > node_cap:
        raise EnumerationCapError(
            f"graph has {len(g)} nodes, above the enumeration cap {node_cap}")
    lengths = {sid: seg.length for sid, seg in g.segments.items()}
    routes: list[Route] = []
    for origin in g.node_ids():
        dist, parent, order = shortest_paths_from(g, origin)
        for dest in order:
            ids = tuple(_reconstruct(parent, dest))
            if len(ids) < min_segments:
                continue
            routes.append(Route(
                segment_ids=ids,
                distance=sum(lengths[sid] for sid in ids)))
    routes.sort(key=lambda r: r.segment_ids)
    return RoutePopulation.from_routes(routes)


def sample_routes(pop: RoutePopulation, n: int, seed: int,
                  predicate: Callable[[Route], bool] | None = None
                  ) -> list[Route]:
    """Uniform sample of n distinct routes satisfying the predicate."""
    candidates = [r for r in pop.routes
                  if predicate is None or predicate(r)]
    if n > len(candidates):
        raise SamplingError(
            f"requested {n} routes but only {len(candidates)} candidates")
    return random.Random(seed).sample(candidates, n)


def omega_l(pop: RoutePopulation, l: float) -> list[Route]:
    """Routes with distance strictly greater than tau + l * sigma."""
    if not pop.routes:
        raise SamplingError("empty route population")
    cutoff = pop.tau + l * pop.sigma
    return [r for r in pop.routes if r.distance > cutoff]


# -- sampling predicates -------------------------------------------------

def min_distance_predicate(d: float) -> Callable[[Route], bool]:
    return lambda r: r.distance >= d


def min_segments_predicate(k: int) -> Callable[[Route], bool]:
    return lambda r: r.num_segments >= k


def omega_predicate(pop: RoutePopulation, l: float) -> Callable[[Route], bool]:
    cutoff = pop.tau + l * pop.sigma
    return lambda r: r.distance > cutoff


def infeasible_predicate(g: SegmentGraph, params) -> Callable[[Route], bool]:
    """Routes infeasible with no installation at the params' threshold."""
    from .soc import simulate_route
    def pred(r: Route) -> bool:
        return not simulate_route(r, frozenset(), params, g).feasible
    return pred


# -- routes file i/o -----------------------------------------------------

def load_routes(source: str | Path, g: SegmentGraph) -> list[Route]:
    """Read the routes JSON file: [{"segments": [...], ...}, ...]."""
    data = json.loads(Path(source).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise RouteError("routes file must be a JSON array")
    routes = []
    for rec in data:
        routes.append(make_route(
            g, rec["segments"],
            demand=float(rec.get("demand", 1.0)),
            initial_soc=float(rec.get("initial_soc", 1.0))))
    return routes


def save_routes(routes: Iterable[Route], sink: str | Path) -> None:
    data = [{"segments": list(r.segment_ids), "demand": r.demand,
             "initial_soc": r.initial_soc} for r in routes]
    Path(sink).write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")


def with_initial_socs(routes: Sequence[Route],
                      socs: Sequence[float]) -> list[Route]:
    """Copies of routes with replaced initial SOC values."""
    if len(routes) != len(socs):
        raise RouteError("routes and socs length mismatch")
    return [replace(r, initial_soc=s) for r, s in zip(routes, socs)]
