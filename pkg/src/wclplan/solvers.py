"""Placement solvers: exact brute force, branch-and-bound, and heuristics.

The exact solvers search the space of install decisions directly and score
each candidate installation with the route simulator; the x-variables of
the integer program are implied once the install set is fixed.  This keeps
the search simple and doubles as an independent check on the IP encoding.

The optimistic bound installs every undecided segment for free, which is
admissible because extra charging never lowers any route's final SOC.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (CandidateLimitError, InsufficientChargingPowerError,
                     WclError)
from .network import SegmentGraph
from .parallel import map_ordered
from .routing import Route, shortest_paths_from
from .soc import (EMPTY_INSTALLATION, Installation, RouteOutcome, SIMPLISTIC,
                  SocParams, outcome_weight, simulate_route)
from .state_graph import (MIN_BUDGET, build_state_graph, min_cost_path,
                          min_weighted_install_cost)

_TINY = 1e-12


@dataclass
class SolveResult:
    installation: Installation
    objective: float
    per_route: list[RouteOutcome]
    status: str                  # "optimal" | "feasible" | "infeasible"
    bound: float
    gap: float
    nodes: int = 0

    def infeasible_count(self) -> int:
        return sum(1 for o in self.per_route if not o.feasible)


@dataclass
class CentralityScores:
    measure: str
    scores: dict[str, float]
    ranking: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.ranking:
            reverse = self.measure != "closeness"
            if reverse:
                self.ranking = sorted(self.scores,
                                      key=lambda k: (-self.scores[k], k))
            else:
                self.ranking = sorted(self.scores,
                                      key=lambda k: (self.scores[k], k))


def evaluate_installation(inst: Installation, routes: Sequence[Route],
                          p: SocParams, g: SegmentGraph, scheme: str,
                          threads: int = 1):
    """(objective, infeasible count, outcomes) for a fixed installation."""
    outcomes = map_ordered(
        lambda r: simulate_route(r, inst, p, g), routes, threads)
    objective = sum(r.demand * outcome_weight(o, r, p, scheme)
                    for r, o in zip(routes, outcomes))
    infeasible = sum(1 for o in outcomes if not o.feasible)
    return objective, infeasible, outcomes


def _candidate_segments(routes: Sequence[Route]) -> list[str]:
    return sorted({sid for r in routes for sid in r.segment_ids})


def brute_force(routes: Sequence[Route], g: SegmentGraph, p: SocParams,
                budget: float, scheme: str = "binary",
                threads: int = 1) -> SolveResult:
    """Exhaustive search over install subsets within the budget.

    Ties go to the lexicographically smallest sorted id set.
    """
    candidates = _candidate_segments(routes)
    if len(candidates) > 20:
        raise CandidateLimitError(
            f"{len(candidates)} candidate segments exceed the brute-force "
            f"cap of 20")
    costs = [g.segment(sid).cost for sid in candidates]
    best = None
    for mask in range(1 << len(candidates)):
        ids = tuple(candidates[i] for i in range(len(candidates))
                    if mask >> i & 1)
        cost = sum(costs[i] for i in range(len(candidates)) if mask >> i & 1)
        if cost > budget:
            continue
        obj, _, outcomes = evaluate_installation(
            Installation(frozenset(ids), cost), routes, p, g, scheme,
            threads)
        if best is None or obj > best[0] or (obj == best[0] and ids < best[1]):
            best = (obj, ids, cost, outcomes)
    obj, ids, cost, outcomes = best
    return SolveResult(installation=Installation(frozenset(ids), cost),
                       objective=obj, per_route=outcomes, status="optimal",
                       bound=obj, gap=0.0)


def branch_and_bound(routes: Sequence[Route], g: SegmentGraph, p: SocParams,
                     budget: float, scheme: str = "binary",
                     incumbent: Installation | None = None,
                     node_limit: int | None = None,
                     time_limit_s: float | None = None,
                     threads: int = 1) -> SolveResult:
    """Best-first search over install decisions with a simulation oracle.

    Branching order is by descending route coverage.  With no limits the
    result is exact; under limits the best incumbent is returned together
    with the optimality gap against the strongest open bound.
    """
    coverage: dict[str, int] = {}
    for r in routes:
        for sid in set(r.segment_ids):
            coverage[sid] = coverage.get(sid, 0) + 1
    candidates = sorted(coverage, key=lambda sid: (-coverage[sid], sid))
    costs = {sid: g.segment(sid).cost for sid in candidates}
    n = len(candidates)

    def evaluate(ids: frozenset[str]):
        inst = Installation(ids, sum(costs[s] for s in ids))
        obj, _, outcomes = evaluate_installation(
            inst, routes, p, g, scheme, threads)
        return inst, obj, outcomes

    best_inst, best_obj, best_out = evaluate(frozenset())
    if incumbent is not None:
        # Warm start: the incumbent may include non-candidate segments.
        inc_obj, _, inc_out = evaluate_installation(
            incumbent, routes, p, g, scheme, threads)
        if inc_obj > best_obj:
            best_inst, best_obj, best_out = incumbent, inc_obj, inc_out

    def bound_of(included: frozenset[str], depth: int) -> float:
        optimistic = included.union(candidates[depth:])
        obj, _, _ = evaluate_installation(
            Installation(optimistic, 0.0), routes, p, g, scheme, threads)
        return obj

    seq = 0
    heap: list[tuple[float, int, int, frozenset[str], float]] = []
    root_bound = bound_of(frozenset(), 0)
    heapq.heappush(heap, (-root_bound, seq, 0, frozenset(), 0.0))
    expanded = 0
    deadline = (time.monotonic() + time_limit_s
                if time_limit_s is not None else None)
    exhausted = True

    while heap:
        if node_limit is not None and expanded >= node_limit:
            exhausted = False
            break
        if deadline is not None and time.monotonic() > deadline:
            exhausted = False
            break
        neg_bound, _, depth, included, cost = heapq.heappop(heap)
        if -neg_bound <= best_obj:
            continue  # cannot strictly improve
        expanded += 1
        if depth == n:
            inst, obj, outcomes = evaluate(included)
            if obj > best_obj or (obj == best_obj and
                                  sorted(inst.installed_ids)
                                  < sorted(best_inst.installed_ids)):
                best_inst, best_obj, best_out = inst, obj, outcomes
            continue
        sid = candidates[depth]
        children = [included]
        if cost + costs[sid] <= budget:
            children.append(included | {sid})
        for child in children:
            child_cost = sum(costs[s] for s in child)
            b = bound_of(child, depth + 1)
            # Realized value of the child's decided-in set: keeps the
            # incumbent honest long before leaves are reached.
            inst, obj, outcomes = evaluate(child)
            if obj > best_obj:
                best_inst, best_obj, best_out = inst, obj, outcomes
            if b > best_obj:
                seq += 1
                heapq.heappush(heap, (-b, seq, depth + 1, child, child_cost))

    open_bound = max((-item[0] for item in heap), default=best_obj)
    bound = max(best_obj, open_bound if not exhausted else best_obj)
    gap = (bound - best_obj) / max(abs(bound), _TINY) if bound > best_obj \
        else 0.0
    return SolveResult(installation=best_inst, objective=best_obj,
                       per_route=best_out,
                       status="optimal" if exhausted else "feasible",
                       bound=bound, gap=gap, nodes=expanded)


def solve_min_budget(routes: Sequence[Route], g: SegmentGraph,
                     p: SocParams, threads: int = 1) -> SolveResult:
    """Exact minimum installation cost making every route feasible.

    Branch-and-bound over install decisions, seeded with the union of the
    per-route minimum-cost paths, with an admissible per-route lower bound
    from the SOC-state graphs (simplistic SOC function only, where the
    discretized graph and the simulator agree exactly).
    """
    # Extra charging never hurts a route, so routes that pass with no
    # installation stay feasible under any install set; the search only
    # has to fix the rest.
    _, _, base_outcomes = evaluate_installation(
        EMPTY_INSTALLATION, routes, p, g, "binary", threads)
    work = [r for r, o in zip(routes, base_outcomes) if not o.feasible]

    def all_feasible(ids: frozenset[str]):
        _, infeasible, outcomes = evaluate_installation(
            Installation(ids, 0.0), work, p, g, "binary", threads)
        return infeasible == 0, outcomes

    coverage: dict[str, int] = {}
    for r in work:
        for sid in set(r.segment_ids):
            coverage[sid] = coverage.get(sid, 0) + 1
    candidates = sorted(coverage, key=lambda sid: (-coverage[sid], sid))
    costs = {sid: g.segment(sid).cost for sid in candidates}
    n = len(candidates)

    ok, _ = all_feasible(frozenset(candidates))
    if not ok:
        raise InsufficientChargingPowerError(
            "some route stays infeasible even with every candidate "
            "segment installed")

    graphs = [build_state_graph(r, p, g, MIN_BUDGET) for r in work]

    # Seed: union of per-route minimum-install paths.  More installs never
    # hurt, so the union is feasible whenever the simulator agrees with the
    # state graphs; fall back to installing everything otherwise.
    seed = frozenset().union(*(min_cost_path(sg).install_ids
                               for sg in graphs)) if graphs else frozenset()
    ok, _ = all_feasible(seed)
    if not ok:
        seed = frozenset(candidates)
    best_ids = seed
    best_cost = sum(costs[s] for s in seed)

    use_dp_bound = p.soc_function == SIMPLISTIC

    def lower_bound(included: frozenset[str], depth: int) -> float:
        base = sum(costs[s] for s in included)
        if not use_dp_bound:
            return base
        undecided = set(candidates[depth:])

        def cost_of(sid: str):
            if sid in included:
                return 0.0
            if sid in undecided:
                return costs[sid]
            return None  # decided out

        extra = 0.0
        for sg in graphs:
            extra = max(extra, min_weighted_install_cost(sg, cost_of))
            if base + extra >= best_cost:
                break
        return base + extra

    seq = 0
    heap: list[tuple[float, int, int, frozenset[str]]] = []
    heapq.heappush(heap, (lower_bound(frozenset(), 0), seq, 0, frozenset()))
    expanded = 0

    while heap:
        lb, _, depth, included = heapq.heappop(heap)
        if lb >= best_cost:
            continue
        expanded += 1
        ok, _ = all_feasible(included)
        if ok:
            cost = sum(costs[s] for s in included)
            if cost < best_cost:
                best_ids, best_cost = included, cost
            continue
        if depth == n:
            continue
        sid = candidates[depth]
        for child in (included | {sid}, included):
            if child is included:
                # Decided out: prune if no completion can ever be feasible.
                ok, _ = all_feasible(child.union(candidates[depth + 1:]))
                if not ok:
                    continue
            b = lower_bound(child, depth + 1)
            if b < best_cost:
                seq += 1
                heapq.heappush(heap, (b, seq, depth + 1, child))

    installation = Installation.from_ids(g, best_ids)
    _, _, outcomes = evaluate_installation(
        installation, routes, p, g, "binary", threads)
    return SolveResult(installation=installation, objective=best_cost,
                       per_route=outcomes, status="optimal",
                       bound=best_cost, gap=0.0, nodes=expanded)


# -- centrality heuristics ----------------------------------------------

def centrality_scores(g: SegmentGraph, measure: str) -> CentralityScores:
    """Betweenness, closeness, or eigenvector scores for every segment."""
    if len(g) == 0:
        raise WclError("empty graph")
    if measure == "betweenness":
        scores = _betweenness(g)
    elif measure == "closeness":
        scores = _closeness(g)
    elif measure == "eigenvector":
        scores = _eigenvector(g)
    else:
        raise WclError(f"unknown centrality measure {measure!r}")
    return CentralityScores(measure=measure, scores=scores)


def _betweenness(g: SegmentGraph) -> dict[str, float]:
    # Each ordered pair contributes its unique chosen shortest path (ties
    # broken as in routing); a node's score counts the pairs it sits
    # strictly inside.  Computed per source via subtree sizes of the
    # shortest-path tree.
    scores = {sid: 0.0 for sid in g.node_ids()}
    for source in g.node_ids():
        _, parent, order = shortest_paths_from(g, source)
        counts = {v: 1 for v in order}
        for v in reversed(order):
            u = parent[v]
            if u is not None:
                counts[u] += counts[v]
        for v in order:
            if v != source:
                scores[v] += counts[v] - 1
    return scores


def _closeness(g: SegmentGraph) -> dict[str, float]:
    scores = {}
    for source in g.node_ids():
        dist, _, _ = shortest_paths_from(g, source)
        scores[source] = sum(d for v, d in dist.items() if v != source)
    return scores


def _eigenvector(g: SegmentGraph, tol: float = 1e-10,
                 max_iter: int = 10000) -> dict[str, float]:
    # Dominant eigenvector of the symmetrized adjacency (directed road
    # segment graphs are frequently acyclic, which makes the raw adjacency
    # nilpotent).  The +I shift rules out period-two oscillation on
    # bipartite structures without changing the eigenvectors.
    if g.num_edges() == 0:
        raise WclError("eigenvector centrality needs at least one edge")
    nbrs: dict[str, set[str]] = {sid: set() for sid in g.node_ids()}
    for u, v in g.edges():
        nbrs[u].add(v)
        nbrs[v].add(u)
    x = {sid: 1.0 for sid in g.node_ids()}
    from .errors import NonconvergenceError
    for _ in range(max_iter):
        y = {v: x[v] + sum(x[u] for u in nbrs[v]) for v in x}
        top = max(y.values())
        y = {v: val / top for v, val in y.items()}
        if max(abs(y[v] - x[v]) for v in x) <= tol:
            return y
        x = y
    raise NonconvergenceError(max_iter)


def heuristic_fill(g: SegmentGraph, budget: float,
                   scores: CentralityScores | None = None,
                   seed: int | None = None) -> Installation:
    """Greedy prefix of the ranking (or a seeded shuffle) within budget."""
    if scores is not None:
        ranking = scores.ranking
    else:
        import random
        ranking = list(g.node_ids())
        random.Random(0 if seed is None else seed).shuffle(ranking)
    chosen: list[str] = []
    total = 0.0
    for sid in ranking:
        c = g.segment(sid).cost
        if total + c > budget:
            break
        chosen.append(sid)
        total += c
    return Installation(frozenset(chosen), total)


def heuristic_min_budget(g: SegmentGraph, routes: Sequence[Route],
                         p: SocParams, scores: CentralityScores,
                         threads: int = 1) -> tuple[Installation, float]:
    """Smallest ranking prefix with zero infeasible routes, and its cost."""
    chosen: list[str] = []
    total = 0.0
    _, infeasible, _ = evaluate_installation(
        EMPTY_INSTALLATION, routes, p, g, "binary", threads)
    if infeasible == 0:
        return EMPTY_INSTALLATION, 0.0
    for sid in scores.ranking:
        chosen.append(sid)
        total += g.segment(sid).cost
        inst = Installation(frozenset(chosen), total)
        _, infeasible, _ = evaluate_installation(
            inst, routes, p, g, "binary", threads)
        if infeasible == 0:
            return inst, total
    raise InsufficientChargingPowerError(
        "no ranking prefix makes every route feasible")


def heuristic_result(inst: Installation, routes: Sequence[Route],
                     p: SocParams, g: SegmentGraph, scheme: str,
                     threads: int = 1) -> SolveResult:
    """Wrap a heuristic installation in a SolveResult (no bound claim)."""
    obj, _, outcomes = evaluate_installation(
        inst, routes, p, g, scheme, threads)
    return SolveResult(installation=inst, objective=obj, per_route=outcomes,
                       status="feasible", bound=math.inf, gap=math.inf)


def solution_dict(result: SolveResult, routes: Sequence[Route]) -> dict:
    """Solution JSON structure for files and the CLI."""
    return {
        "installed": sorted(result.installation.installed_ids),
        "cost": result.installation.total_cost,
        "objective": result.objective,
        "status": result.status,
        "gap": None if math.isinf(result.gap) else result.gap,
        "per_route": [
            {"route": i, "final_soc": o.final_soc, "feasible": o.feasible}
            for i, o in enumerate(result.per_route)],
    }
