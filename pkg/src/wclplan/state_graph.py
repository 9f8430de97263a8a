"""Per-route SOC-state graph: layered DAG of (segment position, SOC level).

Node (i, j) is the SOC state before traversing the i-th segment, for
i = 1..m+1 (layer m+1 is the artificial segment capturing the final SOC)
and j = 1..n_layers, where j = 1 is the maximum level and j = n_layers the
empty one.  Internally levels count up from 0 = empty; the bijection is
level = n_layers - j.  Dummy nodes s and t bracket the grid.

Weight-1 edges represent traversing a segment with a charging lane
installed, weight-0 edges without.  Both are always present (they may point
at the same target).  Empty-battery states have no onward transitions; in
the fixed-budget variant they get a weight-0 escape edge to t so an s-t
path exists for every budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import InsufficientChargingPowerError, NoPathError, WclError
from .network import SegmentGraph
from .routing import Route
from .soc import (SIMPLISTIC, SocParams, delta_soc, discretize, level_value,
                  simplistic_step)

S = "s"
T = "t"

MIN_BUDGET = "min_budget"
FIXED_BUDGET = "fixed_budget"


@dataclass(frozen=True)
class StateEdge:
    tail: object            # node: (i, j) or "s"
    head: object            # node: (i, j) or "t"
    weight: int             # 1 = install on the traversed segment
    installed: bool
    layer: int | None       # 1-based segment position, None for s/t edges
    segment_id: str | None


class SocStateGraph:
    """SOC-state graph for one route (immutable after construction)."""

    def __init__(self, route: Route, params: SocParams, variant: str,
                 edges: list[StateEdge], prefix_distance: list[float]):
        self.route = route
        self.params = params
        self.variant = variant
        self.m = route.num_segments
        self.n_layers = params.n_layers
        self.edges = tuple(edges)
        # Distance from the origin through the end of segment i (1-based);
        # prefix_distance[0] = 0.
        self.prefix_distance = tuple(prefix_distance)

        out: dict[object, list[StateEdge]] = {}
        for e in self.edges:
            out.setdefault(e.tail, []).append(e)
        self._out = {k: tuple(v) for k, v in out.items()}
        self.boundary = tuple(sorted(
            {e.tail for e in self.edges if e.head == T},
            key=lambda n: (n[0], n[1])))

    @property
    def nodes(self) -> list[object]:
        grid = [(i, j) for i in range(1, self.m + 2)
                for j in range(1, self.n_layers + 1)]
        return [S] + grid + [T]

    def out_edges(self, node) -> tuple[StateEdge, ...]:
        return self._out.get(node, ())

    def node_soc(self, node) -> float:
        """Discretized SOC value represented by a grid node."""
        if node in (S, T):
            raise WclError(f"node {node!r} carries no SOC value")
        _, j = node
        return level_value(self.n_layers - j, self.n_layers)

    def stall_distance_of(self, node) -> float:
        """d(r, .): distance completed when the route ends at this node.

        A node in layer i <= m stalls while attempting segment i, after
        completing i-1 segments; layer m+1 means the whole route was driven.
        """
        i, _ = node
        if i == self.m + 1:
            return self.route.distance
        return self.prefix_distance[i - 1]


def build_state_graph(r: Route, p: SocParams, g: SegmentGraph,
                      variant: str = FIXED_BUDGET) -> SocStateGraph:
    """Expand a route into its SOC-state graph."""
    if variant not in (MIN_BUDGET, FIXED_BUDGET):
        raise WclError(f"unknown variant {variant!r}")
    n = p.n_layers
    m = r.num_segments
    segs = [g.segment(sid) for sid in r.segment_ids]
    prefix = [0.0]
    for seg in segs:
        prefix.append(prefix[-1] + seg.length)

    edges: list[StateEdge] = []
    j_star = n - discretize(r.initial_soc, n)
    edges.append(StateEdge(S, (1, j_star), 0, False, None, None))

    for i in range(1, m + 1):
        seg = segs[i - 1]
        for j in range(1, n + 1):
            level = n - j
            if level == 0:
                continue  # empty battery: the route ends here
            for installed in (False, True):
                if p.soc_function == SIMPLISTIC:
                    new_level = simplistic_step(level, installed, n)
                else:
                    soc = level_value(level, n) + delta_soc(seg, installed, p)
                    new_level = discretize(min(1.0, max(0.0, soc)), n)
                edges.append(StateEdge(
                    (i, j), (i + 1, n - new_level),
                    weight=int(installed), installed=installed,
                    layer=i, segment_id=seg.id))

    if variant == FIXED_BUDGET:
        for j in range(1, n + 1):
            edges.append(StateEdge((m + 1, j), T, 0, False, None, None))
        for i in range(1, m + 1):
            edges.append(StateEdge((i, n), T, 0, False, None, None))
    else:
        for j in range(1, n + 1):
            if level_value(n - j, n) >= p.alpha:
                edges.append(StateEdge((m + 1, j), T, 0, False, None, None))

    sg = SocStateGraph(r, p, variant, edges, prefix)
    if variant == MIN_BUDGET and not _t_reachable(sg):
        raise InsufficientChargingPowerError(
            f"route {r.segment_ids}: no feasible boundary is reachable "
            f"even with every segment installed")
    return sg


def _t_reachable(sg: SocStateGraph) -> bool:
    seen = {S}
    stack = [S]
    while stack:
        node = stack.pop()
        for e in sg.out_edges(node):
            if e.head not in seen:
                if e.head == T:
                    return True
                seen.add(e.head)
                stack.append(e.head)
    return False


def boundary_weight(sg: SocStateGraph, node, scheme: str) -> float:
    """Weight of a boundary node under one of the three schemes."""
    if node not in sg.boundary:
        raise WclError(f"node {node!r} is not a boundary node")
    p = sg.params
    s = sg.node_soc(node)
    r_len = sg.route.distance
    d = sg.stall_distance_of(node)
    if scheme == "binary":
        return 1.0 if s >= p.alpha else 0.0
    if scheme == "penalty":
        return 1.0 if s >= p.alpha else (d - r_len) / r_len
    if scheme == "tolerance":
        if s >= p.alpha + p.eps_tol:
            return 1.0
        if p.alpha - p.eps_tol < s < p.alpha + p.eps_tol:
            return 0.0
        return (d - r_len) / r_len
    raise WclError(f"unknown weighting scheme {scheme!r}")


@dataclass(frozen=True)
class MinCostPath:
    nodes: tuple
    install_ids: frozenset[str]
    install_positions: tuple[int, ...]
    cost: int


def min_cost_path(sg: SocStateGraph) -> MinCostPath:
    """Minimum-weight s-t path: the fewest installations that reach t.

    Ties are broken toward installing at later segments (the
    lexicographically latest install-position set).
    """
    # Backward DP in reverse topological order.  Value at a node is
    # (cost, key) where key is the path's install positions sorted
    # descending; minimize cost, then maximize key lexicographically.
    value: dict[object, tuple[int, tuple[int, ...]]] = {T: (0, ())}
    choice: dict[object, StateEdge] = {}

    def relax(node) -> None:
        best = None
        best_edge = None
        for e in sg.out_edges(node):
            tail_val = value.get(e.head)
            if tail_val is None:
                continue
            cost = e.weight + tail_val[0]
            key = tail_val[1] + (e.layer,) if e.installed else tail_val[1]
            if (best is None or cost < best[0]
                    or (cost == best[0] and key > best[1])):
                best = (cost, key)
                best_edge = e
        if best is not None:
            value[node] = best
            choice[node] = best_edge

    for i in range(sg.m + 1, 0, -1):
        for j in range(1, sg.n_layers + 1):
            relax((i, j))
    relax(S)

    if S not in value:
        raise NoPathError("state graph has no s-t path")

    nodes = [S]
    install_ids = []
    node = S
    while node != T:
        e = choice[node]
        if e.installed:
            install_ids.append(e.segment_id)
        node = e.head
        nodes.append(node)
    cost, key = value[S]
    return MinCostPath(nodes=tuple(nodes),
                       install_ids=frozenset(install_ids),
                       install_positions=tuple(sorted(key)),
                       cost=cost)


def trace_path(sg: SocStateGraph, installation) -> tuple | None:
    """The s-t path induced by a fixed install set.

    Follows, at every layer, the edge whose installed flag matches whether
    the segment carries a WCL; takes the escape edge on an empty battery.
    Returns None when the walk dead-ends (possible only in the min-budget
    variant).
    """
    from .soc import _installed_set
    installed = _installed_set(installation)
    path = [S]
    node = sg.out_edges(S)[0].head
    path.append(node)
    while node != T:
        out = sg.out_edges(node)
        if not out:
            return None
        i, j = node
        if j == sg.n_layers or i == sg.m + 1:
            # Empty battery or final layer: the only move is toward t
            # (in the fixed-budget variant, the escape edge).
            nxt = next((e for e in out if e.head == T), None)
            if nxt is None:
                return None
            node = T
            path.append(node)
            continue
        want = sg.route.segment_ids[i - 1] in installed
        edge = next(e for e in out if e.installed == want)
        node = edge.head
        path.append(node)
    return tuple(path)


def traced_final_soc(sg: SocStateGraph, installation) -> float | None:
    """Discretized final SOC of the induced path (None on a dead end)."""
    path = trace_path(sg, installation)
    if path is None:
        return None
    return sg.node_soc(path[-2])


def min_weighted_install_cost(
        sg: SocStateGraph,
        cost_of: Callable[[str], float | None]) -> float:
    """Cheapest total install cost of any s-t path, under per-segment costs.

    cost_of returns the price of installing on a segment, or None when
    installation there is forbidden.  Returns inf if no path survives.
    Used as an admissible per-route bound by the min-budget solver.
    """
    value: dict[object, float] = {T: 0.0}

    def relax(node) -> None:
        best = math.inf
        for e in sg.out_edges(node):
            tail = value.get(e.head, math.inf)
            if tail == math.inf:
                continue
            if e.installed:
                c = cost_of(e.segment_id)
                if c is None:
                    continue
                tail += c
            best = min(best, tail)
        if best < math.inf:
            value[node] = best

    for i in range(sg.m + 1, 0, -1):
        for j in range(1, sg.n_layers + 1):
            relax((i, j))
    relax(S)
    return value.get(S, math.inf)


def to_dot(sg: SocStateGraph) -> str:
    """DOT dump for documentation figures."""
    lines = ["digraph soc_state {", "  rankdir=LR;"]
    lines.append('  s [label="s"]; t [label="t"];')
    for i in range(1, sg.m + 2):
        for j in range(1, sg.n_layers + 1):
            lines.append(
                f'  "mu_{i}_{j}" [label="({i},{j},'
                f'{sg.node_soc((i, j)):.3f})"];')

    def name(node) -> str:
        if node in (S, T):
            return node
        return f'"mu_{node[0]}_{node[1]}"'

    for e in sg.edges:
        lines.append(f"  {name(e.tail)} -> {name(e.head)} "
                     f'[label="{e.weight}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
