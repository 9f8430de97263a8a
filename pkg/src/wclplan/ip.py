"""Integer-program assembly for the two placement problems, plus MPS export.

Variables are R_<segid> (install a WCL on a candidate segment) and one
binary per SOC-state-graph edge.  Edge variable names follow
X_<route>_<i>_<j>_<i2>_<j2>_<w>: grid coordinates of the endpoints in
(layer, level-index) form, with s encoded as 0_0 and t as
(m+2)_0, and a trailing install flag to keep parallel edges distinct.

Constraints: one budget row (fixed-budget problem only), one flow-
conservation row per (route, node), and the two linking rows
R_k <= p(u_k) and M*R_k >= p(u_k) per candidate segment, with M = number
of routes (tight, since p(u_k) cannot exceed it).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import WclError
from .network import SegmentGraph
from .routing import Route
from .soc import Installation, SocParams, _installed_set
from .state_graph import (FIXED_BUDGET, MIN_BUDGET, S, T, SocStateGraph,
                          StateEdge, boundary_weight, build_state_graph,
                          trace_path)


@dataclass
class Row:
    name: str
    sense: str            # "<=", ">=", "="
    rhs: float
    coefs: dict[str, float]


@dataclass
class IpInstance:
    sense: str                                   # "max" | "min"
    objective: dict[str, float]
    rows: list[Row]
    binaries: list[str]                          # all variables, in order
    big_m: float
    budget: float | None
    problem: str                                 # "fixed_budget" | "min_budget"
    routes: list[Route] = field(default_factory=list)
    graphs: list[SocStateGraph] = field(default_factory=list)
    candidates: list[str] = field(default_factory=list)
    # (route index, tail, head, installed) -> variable name
    edge_vars: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"vars": len(self.binaries), "cons": len(self.rows),
                "budget": self.budget, "routes": len(self.routes)}


def _node_code(node, m: int) -> str:
    if node == S:
        return "0_0"
    if node == T:
        return f"{m + 2}_0"
    return f"{node[0]}_{node[1]}"


def _edge_var(ridx: int, e: StateEdge, m: int) -> str:
    return (f"X_{ridx}_{_node_code(e.tail, m)}_"
            f"{_node_code(e.head, m)}_{e.weight}")


def _assemble(routes: Sequence[Route], g: SegmentGraph, p: SocParams,
              variant: str, budget: float | None, scheme: str,
              demands: Sequence[float] | None) -> IpInstance:
    if not routes:
        raise WclError("cannot build an IP over an empty route set")
    routes = list(routes)
    if demands is None:
        demands = [r.demand for r in routes]
    elif len(demands) != len(routes):
        raise WclError("demands length must match routes")

    graphs = [build_state_graph(r, p, g, variant) for r in routes]
    candidates = sorted({sid for r in routes for sid in r.segment_ids})
    big_m = float(len(routes))

    r_vars = [f"R_{sid}" for sid in candidates]
    edge_vars: dict = {}
    var_order = list(r_vars)
    for ridx, sg in enumerate(graphs):
        for e in sg.edges:
            name = _edge_var(ridx, e, sg.m)
            edge_vars[(ridx, e.tail, e.head, e.installed)] = name
            var_order.append(name)

    objective: dict[str, float] = {}
    if variant == MIN_BUDGET:
        sense = "min"
        for sid, rv in zip(candidates, r_vars):
            objective[rv] = g.segment(sid).cost
    else:
        sense = "max"
        for ridx, sg in enumerate(graphs):
            for e in sg.edges:
                if e.head == T:
                    name = edge_vars[(ridx, e.tail, e.head, e.installed)]
                    objective[name] = (demands[ridx]
                                       * boundary_weight(sg, e.tail, scheme))

    rows: list[Row] = []
    if variant == FIXED_BUDGET:
        rows.append(Row("BUDGET", "<=", float(budget),
                        {f"R_{sid}": g.segment(sid).cost
                         for sid in candidates}))

    # Flow conservation, ordered s, grid (layer, j), t per route.
    for ridx, sg in enumerate(graphs):
        out_coefs: dict[object, dict[str, float]] = {}
        for e in sg.edges:
            name = edge_vars[(ridx, e.tail, e.head, e.installed)]
            out_coefs.setdefault(e.tail, {})[name] = 1.0
            out_coefs.setdefault(e.head, {})[name] = -1.0
        for node in [S] + [(i, j) for i in range(1, sg.m + 2)
                           for j in range(1, sg.n_layers + 1)] + [T]:
            rhs = 1.0 if node == S else (-1.0 if node == T else 0.0)
            rows.append(Row(f"F_{ridx}_{_node_code(node, sg.m)}", "=",
                            rhs, out_coefs.get(node, {})))

    # Linking rows, in candidate-segment order.
    install_edges: dict[str, dict[str, float]] = {sid: {} for sid in candidates}
    for ridx, sg in enumerate(graphs):
        for e in sg.edges:
            if e.installed:
                name = edge_vars[(ridx, e.tail, e.head, e.installed)]
                install_edges[e.segment_id][name] = -1.0
    for sid, rv in zip(candidates, r_vars):
        p_coefs = install_edges[sid]
        rows.append(Row(f"LA_{sid}", "<=", 0.0, {rv: 1.0, **p_coefs}))
        rows.append(Row(f"LB_{sid}", ">=", 0.0, {rv: big_m, **p_coefs}))

    return IpInstance(sense=sense, objective=objective, rows=rows,
                      binaries=var_order, big_m=big_m, budget=budget,
                      problem=variant, routes=routes, graphs=graphs,
                      candidates=candidates, edge_vars=edge_vars)


def build_fixed_budget_ip(routes: Sequence[Route], g: SegmentGraph,
                          p: SocParams, budget: float,
                          scheme: str = "binary",
                          demands: Sequence[float] | None = None
                          ) -> IpInstance:
    """Maximize total demand-weighted boundary value within a budget."""
    if budget < 0:
        raise WclError("budget must be nonnegative")
    return _assemble(routes, g, p, FIXED_BUDGET, budget, scheme, demands)


def build_min_budget_ip(routes: Sequence[Route], g: SegmentGraph,
                        p: SocParams) -> IpInstance:
    """Minimize install cost subject to every route reaching a feasible end."""
    return _assemble(routes, g, p, MIN_BUDGET, None, "binary", None)


def empty_instance() -> IpInstance:
    """Degenerate instance with an objective row and nothing else."""
    return IpInstance(sense="min", objective={}, rows=[], binaries=[],
                      big_m=0.0, budget=None, problem=FIXED_BUDGET)


# -- MPS export ----------------------------------------------------------

_ROW_TYPE = {"<=": "L", ">=": "G", "=": "E"}


def export_mps(ip: IpInstance) -> bytes:
    """Deterministic MPS text for the instance.

    Uses the fixed 8-character layout when every name fits; otherwise falls
    back to free-format (whitespace-delimited) with a header comment.
    """
    names = ["OBJ"] + [r.name for r in ip.rows] + list(ip.binaries)
    fixed = all(len(n) <= 8 for n in names)
    width = 8 if fixed else max((len(n) for n in names), default=8)

    lines: list[str] = []
    if not fixed:
        lines.append("* free-format MPS: names exceed the fixed-format "
                     "8-character limit")
    lines.append(f"{'NAME':<14}WCLPLAN")
    lines.append("OBJSENSE")
    lines.append(f"    {'MAX' if ip.sense == 'max' else 'MIN'}")
    lines.append("ROWS")
    lines.append(" N  OBJ")
    for row in ip.rows:
        lines.append(f" {_ROW_TYPE[row.sense]}  {row.name}")
    lines.append("COLUMNS")
    by_var: dict[str, list] = {var: [] for var in ip.binaries}
    for var, val in ip.objective.items():
        by_var[var].append(("OBJ", val))
    for row in ip.rows:
        for var, val in row.coefs.items():
            by_var[var].append((row.name, val))
    for var in ip.binaries:
        for rname, val in by_var[var]:
            lines.append(f"    {var:<{width}}  {rname:<{width}}  {val!r}")
    lines.append("RHS")
    for row in ip.rows:
        if row.rhs != 0.0:
            lines.append(f"    {'RHS':<{width}}  {row.name:<{width}}  "
                         f"{row.rhs!r}")
    lines.append("BOUNDS")
    for var in ip.binaries:
        lines.append(f" BV {'BND':<{width}}  {var}")
    lines.append("ENDATA")
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- assignments ---------------------------------------------------------

def induce_assignment(ip: IpInstance, installation) -> dict[str, float]:
    """0/1 assignment of the IP induced by a concrete installation.

    Each route follows its state-graph transitions under the install set;
    R_k is then set for installed segments that at least one route actually
    charges on (otherwise R_k = 1 would violate R_k <= p(u_k)).
    """
    installed = _installed_set(installation)
    assignment = {var: 0.0 for var in ip.binaries}
    used_install: set[str] = set()
    for ridx, sg in enumerate(ip.graphs):
        path = trace_path(sg, installed)
        if path is None:
            raise WclError("installation induces no s-t path "
                           "(min-budget variant with an unfixable route)")
        for a, b in zip(path, path[1:]):
            if a == S or b == T:
                flag = False
            else:
                i = a[0]
                sid = sg.route.segment_ids[i - 1]
                flag = sid in installed
                if flag:
                    used_install.add(sid)
            assignment[ip.edge_vars[(ridx, a, b, flag)]] = 1.0
    for sid in used_install:
        assignment[f"R_{sid}"] = 1.0
    return assignment


def objective_value(ip: IpInstance, assignment: dict[str, float]) -> float:
    return sum(c * assignment.get(v, 0.0) for v, c in ip.objective.items())


def installation_from_assignment(ip: IpInstance, g: SegmentGraph,
                                 assignment: dict[str, float]) -> Installation:
    ids = [sid for sid in ip.candidates
           if assignment.get(f"R_{sid}", 0.0) > 0.5]
    return Installation.from_ids(g, ids)
