"""Experiment suites: SOC distributions, random initial SOC, velocity
perturbation, and warm-start comparison.  Reports are plot-ready CSV plus a
JSON config sidecar holding every input (seeds included) so any report can
be regenerated bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import SamplingError, WclError
from .network import SegmentGraph, with_speeds
from .routing import (Route, RoutePopulation, omega_predicate, sample_routes,
                      with_initial_socs)
from .soc import EMPTY_INSTALLATION, Installation, SocParams, simulate_route
from .solvers import (branch_and_bound, centrality_scores,
                      evaluate_installation, heuristic_fill)

SOC_GRID = [round(0.01 * i, 2) for i in range(101)]


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    series: dict[str, list] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(col) for col in self.series.values()}
        if len(lengths) > 1:
            raise WclError("series columns must have equal length")

    def csv_bytes(self) -> bytes:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = list(self.series)
        writer.writerow(cols)
        for row in zip(*(self.series[c] for c in cols)):
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in row])
        return buf.getvalue().encode("utf-8")


def write_report(report: ExperimentReport, outdir: str | Path) -> dict:
    """Write <kind>_seed<seed>.csv and its config sidecar; returns paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    seed = report.config.get("seed", 0)
    stem = f"{report.kind}_seed{seed}"
    csv_path = outdir / f"{stem}.csv"
    cfg_path = outdir / f"{stem}.config.json"
    csv_path.write_bytes(report.csv_bytes())
    cfg_path.write_text(json.dumps(
        {"kind": report.kind, "config": report.config,
         "summary": report.summary}, indent=1, sort_keys=True) + "\n",
        encoding="utf-8")
    return {"csv": str(csv_path), "config": str(cfg_path)}


def _boundary_soc(outcome) -> float:
    return outcome.final_soc if outcome.completed else 0.0


def soc_distribution(routes: Sequence[Route],
                     installations: Sequence[tuple[str, Installation]],
                     p: SocParams, g: SegmentGraph) -> ExperimentReport:
    """Cumulative count of routes ending at or below each grid SOC value."""
    if not routes:
        raise WclError("route set must be nonempty")
    series: dict[str, list] = {"soc": list(SOC_GRID)}
    for label, inst in installations:
        finals = sorted(_boundary_soc(simulate_route(r, inst, p, g))
                        for r in routes)
        counts = []
        for x in SOC_GRID:
            counts.append(sum(1 for s in finals if s <= x))
        series[label] = counts
    return ExperimentReport(
        kind="distribution",
        config={"alpha": p.alpha, "n_layers": p.n_layers,
                "soc_function": p.soc_function, "routes": len(routes),
                "installations": {label: sorted(inst.installed_ids)
                                  for label, inst in installations},
                "seed": 0},
        series=series,
        summary={label: series[label][int(round(p.alpha * 100))]
                 for label, _ in installations})


def random_isoc_study(pop: RoutePopulation, l: float, n_routes: int,
                      a: float, seed: int, budget: float, p: SocParams,
                      g: SegmentGraph,
                      scheme: str = "binary") -> ExperimentReport:
    """lambda_l (mean final SOC over long routes) before and after install."""
    chosen = sample_routes(pop, n_routes, seed,
                           predicate=omega_predicate(pop, l))
    if not chosen:
        raise SamplingError("Omega_l selection is empty")
    rng = random.Random(f"isoc-{seed}")
    socs = [a + (1.0 - a) * rng.random() for _ in chosen]
    routes = with_initial_socs(chosen, socs)

    def lam(inst: Installation) -> float:
        return float(np.mean([_boundary_soc(simulate_route(r, inst, p, g))
                              for r in routes]))

    model = branch_and_bound(routes, g, p, budget, scheme)
    btn = heuristic_fill(g, budget, centrality_scores(g, "betweenness"))
    series = {
        "label": ["none", "model", "betweenness"],
        "lambda": [lam(EMPTY_INSTALLATION), lam(model.installation),
                   lam(btn)],
        "budget_used": [0.0, model.installation.total_cost, btn.total_cost],
    }
    return ExperimentReport(
        kind="random_isoc",
        config={"l": l, "n_routes": n_routes, "a": a, "seed": seed,
                "budget": budget, "scheme": scheme, "alpha": p.alpha,
                "n_layers": p.n_layers, "soc_function": p.soc_function},
        series=series,
        summary=dict(zip(series["label"], series["lambda"])))


def velocity_study(routes: Sequence[Route], eps_values: Sequence[float],
                   trials: int, seed: int, installation: Installation,
                   p: SocParams, g: SegmentGraph) -> ExperimentReport:
    """Average final SOC under random per-segment velocity perturbation."""
    eps_col: list[float] = []
    trial_col: list[int] = []
    avg_col: list[float] = []
    sids = sorted({sid for r in routes for sid in r.segment_ids})
    for ie, eps in enumerate(eps_values):
        for trial in range(trials):
            rng = random.Random(f"vel-{seed}-{ie}-{trial}")
            speeds = {}
            for sid in sids:
                base = g.segment(sid).speed
                new = 0.0
                while new <= 0.0:
                    u = rng.uniform(-abs(eps), abs(eps))
                    new = base * (1.0 + u)
                speeds[sid] = new
            pg = with_speeds(g, speeds)
            finals = [_boundary_soc(simulate_route(r, installation, p, pg))
                      for r in routes]
            eps_col.append(eps)
            trial_col.append(trial)
            avg_col.append(float(np.mean(finals)))
    summary = {}
    for eps in dict.fromkeys(eps_values):
        vals = [v for e, v in zip(eps_col, avg_col) if e == eps]
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        summary[repr(eps)] = {"q1": float(q1), "median": float(med),
                              "q3": float(q3)}
    return ExperimentReport(
        kind="velocity",
        config={"eps_values": list(eps_values), "trials": trials,
                "seed": seed, "alpha": p.alpha, "n_layers": p.n_layers,
                "soc_function": p.soc_function,
                "installation": sorted(installation.installed_ids)},
        series={"eps": eps_col, "trial": trial_col,
                "avg_final_soc": avg_col},
        summary=summary)


def warmstart_study(pop: RoutePopulation, ks: Sequence[int],
                    node_limit: int, repeats: int, seed: int, p: SocParams,
                    g: SegmentGraph, budget: float,
                    scheme: str = "binary") -> ExperimentReport:
    """Warm vs cold branch-and-bound objectives under a node limit."""
    scores = centrality_scores(g, "betweenness")
    incumbent = heuristic_fill(g, budget, scores)
    k_col: list[int] = []
    rep_col: list[int] = []
    warm_col: list[float] = []
    cold_col: list[float] = []
    ratio_col: list = []
    for k in ks:
        for rep in range(repeats):
            child_seed = seed * 1_000_003 + k * 1009 + rep
            routes = sample_routes(pop, k, child_seed)
            warm = branch_and_bound(routes, g, p, budget, scheme,
                                    incumbent=incumbent,
                                    node_limit=node_limit)
            cold = branch_and_bound(routes, g, p, budget, scheme,
                                    node_limit=node_limit)
            if warm.objective == 0.0 and cold.objective == 0.0:
                ratio = 1.0
            elif cold.objective == 0.0:
                ratio = "dominant"
            else:
                ratio = warm.objective / cold.objective
            k_col.append(k)
            rep_col.append(rep)
            warm_col.append(warm.objective)
            cold_col.append(cold.objective)
            ratio_col.append(ratio)
    numeric = [r for r in ratio_col if isinstance(r, float)]
    summary = {"median_ratio": float(np.median(numeric)) if numeric else None,
               "dominant_count": sum(1 for r in ratio_col if r == "dominant")}
    return ExperimentReport(
        kind="warmstart",
        config={"ks": list(ks), "node_limit": node_limit,
                "repeats": repeats, "seed": seed, "budget": budget,
                "scheme": scheme, "alpha": p.alpha,
                "n_layers": p.n_layers, "soc_function": p.soc_function},
        series={"k": k_col, "repeat": rep_col, "obj_warm": warm_col,
                "obj_cold": cold_col, "ratio": ratio_col},
        summary=summary)
