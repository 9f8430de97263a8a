"""Command-line surface: build, sample, solve, export, evaluate, experiment.

Every command is deterministic given its flags (seeds default to 0).
Exit codes: 0 success, 1 input/usage error, 2 model infeasibility.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import experiments as exp
from .errors import InsufficientChargingPowerError, NoPathError, WclError
from .ip import build_fixed_budget_ip, build_min_budget_ip, export_mps
from .network import (budget_from_fraction, filter_categories, load_network)
from .routing import (RoutePopulation, enumerate_all_routes,
                      infeasible_predicate, load_routes,
                      min_distance_predicate, min_segments_predicate,
                      omega_predicate, sample_routes, save_routes)
from .soc import EMPTY_INSTALLATION, Installation, SocParams
from .solvers import (SolveResult, branch_and_bound, brute_force,
                      centrality_scores, evaluate_installation,
                      heuristic_fill, heuristic_min_budget,
                      heuristic_result, solution_dict, solve_min_budget)

_BATTERY_FIELDS = ("e_cap", "p1", "p2", "eta", "n_layers", "alpha",
                   "eps_tol", "soc_function")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def _params(cfg: dict, **overrides) -> SocParams:
    battery = dict(cfg.get("battery", {}))
    for key, val in overrides.items():
        if val is not None:
            battery[key] = val
    unknown = set(battery) - set(_BATTERY_FIELDS)
    if unknown:
        raise WclError(f"unknown battery config keys: {sorted(unknown)}")
    return SocParams(**battery)


def _resolve_budget(g, beta, budget) -> float:
    if (beta is None) == (budget is None):
        raise WclError("exactly one of --beta or --budget is required")
    return budget_from_fraction(g, beta) if beta is not None else budget


def battery_options(fn):
    for opt in reversed([
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="JSON/TOML config with a [battery] "
                     "section; flags override."),
        click.option("--e-cap", type=float, default=None),
        click.option("--p1", type=float, default=None),
        click.option("--p2", type=float, default=None),
        click.option("--eta", type=float, default=None),
        click.option("--layers", "n_layers", type=int, default=None),
        click.option("--alpha", type=float, default=None),
        click.option("--eps-tol", type=float, default=None),
        click.option("--soc-function",
                     type=click.Choice(["realistic", "simplistic"]),
                     default=None),
    ]):
        fn = opt(fn)
    return fn


@click.group()
def cli():
    """Wireless charging lane placement toolkit."""


@cli.command("build-graph")
@click.option("--network", required=True, type=click.Path(exists=True))
@click.option("--max-category", type=int, default=None,
              help="Keep only segments with category <= this value.")
@click.option("--out", type=click.Path(), default=None,
              help="Write the summary JSON here as well as stdout.")
def cmd_build_graph(network, max_category, out):
    """Load a network file and report its basic statistics."""
    g = load_network(network)
    if max_category is not None:
        g = filter_categories(g, max_category)
    summary = {"nodes": len(g), "edges": g.num_edges(),
               "total_length_mi": g.total_length,
               "total_cost": g.total_cost}
    text = json.dumps(summary, indent=1)
    click.echo(text)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")


@cli.command("sample-routes")
@click.option("--network", required=True, type=click.Path(exists=True))
@click.option("--n", required=True, type=int)
@click.option("--seed", type=int, default=0)
@click.option("--min-segments", type=int, default=2)
@click.option("--min-distance", type=float, default=None)
@click.option("--omega-l", type=float, default=None)
@click.option("--infeasible-only", is_flag=True,
              help="Keep only routes infeasible with no installation.")
@click.option("--node-cap", type=int, default=2000)
@click.option("--out", required=True, type=click.Path())
@battery_options
def cmd_sample_routes(network, n, seed, min_segments, min_distance, omega_l,
                      infeasible_only, node_cap, out, config_path, **battery):
    """Enumerate shortest routes and sample a subset to a routes file."""
    g = load_network(network)
    pop = enumerate_all_routes(g, min_segments=min_segments,
                               node_cap=node_cap)
    preds = []
    if min_distance is not None:
        preds.append(min_distance_predicate(min_distance))
    if omega_l is not None:
        preds.append(omega_predicate(pop, omega_l))
    if infeasible_only:
        p = _params(_load_config(config_path), **battery)
        preds.append(infeasible_predicate(g, p))
    predicate = (lambda r: all(q(r) for q in preds)) if preds else None
    chosen = sample_routes(pop, n, seed, predicate)
    save_routes(chosen, out)
    click.echo(json.dumps({"routes": len(chosen), "out": out,
                           "tau": pop.tau, "sigma": pop.sigma}))


def _solve(mode, solver, routes, g, p, budget, scheme, warmstart, seed,
           node_limit, time_limit_s, threads) -> SolveResult:
    if mode == "min-budget":
        if solver in ("exact", "bb"):
            return solve_min_budget(routes, g, p, threads=threads)
        if solver == "random":
            raise WclError("random solver has no min-budget mode")
        scores = centrality_scores(g, solver)
        inst, cost = heuristic_min_budget(g, routes, p, scores, threads)
        res = heuristic_result(inst, routes, p, g, scheme, threads)
        res.objective = cost
        return res
    if solver == "exact":
        return brute_force(routes, g, p, budget, scheme, threads)
    if solver == "bb":
        incumbent = None
        if warmstart:
            data = json.loads(Path(warmstart).read_text(encoding="utf-8"))
            ids = data["installed"] if isinstance(data, dict) else data
            incumbent = Installation.from_ids(g, ids)
        return branch_and_bound(routes, g, p, budget, scheme,
                                incumbent=incumbent, node_limit=node_limit,
                                time_limit_s=time_limit_s, threads=threads)
    if solver == "random":
        inst = heuristic_fill(g, budget, seed=seed)
    else:
        inst = heuristic_fill(g, budget, centrality_scores(g, solver))
    return heuristic_result(inst, routes, p, g, scheme, threads)


@cli.command("solve")
@click.option("--network", required=True, type=click.Path(exists=True))
@click.option("--routes", "routes_path", required=True,
              type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["fixed-budget", "min-budget"]),
              default="fixed-budget")
@click.option("--solver",
              type=click.Choice(["exact", "bb", "betweenness", "closeness",
                                 "eigenvector", "random"]),
              default="bb")
@click.option("--beta", type=float, default=None)
@click.option("--budget", type=float, default=None)
@click.option("--scheme",
              type=click.Choice(["binary", "penalty", "tolerance"]),
              default="binary")
@click.option("--warmstart", type=click.Path(exists=True), default=None,
              help="Solution JSON whose install set seeds the search.")
@click.option("--seed", type=int, default=0)
@click.option("--threads", type=int, default=1)
@click.option("--node-limit", type=int, default=None)
@click.option("--time-limit-s", type=float, default=None)
@click.option("--out", type=click.Path(), default=None)
@battery_options
def cmd_solve(network, routes_path, mode, solver, beta, budget, scheme,
              warmstart, seed, threads, node_limit, time_limit_s, out,
              config_path, **battery):
    """Solve the placement problem and write a solution JSON."""
    g = load_network(network)
    p = _params(_load_config(config_path), **battery)
    routes = load_routes(routes_path, g)
    b = _resolve_budget(g, beta, budget) if mode == "fixed-budget" else None
    result = _solve(mode, solver, routes, g, p, b, scheme, warmstart, seed,
                    node_limit, time_limit_s, threads)
    sol = solution_dict(result, routes)
    text = json.dumps(sol, indent=1)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    click.echo(text)
    click.echo(
        f"# status={result.status} objective={result.objective:.6g} "
        f"cost={result.installation.total_cost:.6g} "
        f"infeasible={result.infeasible_count()}/{len(routes)}",
        err=True)


@cli.command("export")
@click.option("--network", required=True, type=click.Path(exists=True))
@click.option("--routes", "routes_path", required=True,
              type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["fixed-budget", "min-budget"]),
              default="fixed-budget")
@click.option("--beta", type=float, default=None)
@click.option("--budget", type=float, default=None)
@click.option("--scheme",
              type=click.Choice(["binary", "penalty", "tolerance"]),
              default="binary")
@click.option("--out", required=True, type=click.Path())
@battery_options
def cmd_export(network, routes_path, mode, beta, budget, scheme, out,
               config_path, **battery):
    """Build the integer program and export it as an MPS file."""
    g = load_network(network)
    p = _params(_load_config(config_path), **battery)
    routes = load_routes(routes_path, g)
    if mode == "fixed-budget":
        b = _resolve_budget(g, beta, budget)
        ip = build_fixed_budget_ip(routes, g, p, b, scheme)
    else:
        ip = build_min_budget_ip(routes, g, p)
    Path(out).write_bytes(export_mps(ip))
    summary = ip.summary()
    Path(str(out) + ".summary.json").write_text(
        json.dumps(summary, indent=1) + "\n", encoding="utf-8")
    click.echo(json.dumps(summary))


@cli.command("evaluate")
@click.option("--network", required=True, type=click.Path(exists=True))
@click.option("--routes", "routes_path", required=True,
              type=click.Path(exists=True))
@click.option("--installation", "inst_path", required=True,
              type=click.Path(exists=True),
              help="Solution JSON or a plain JSON list of segment ids.")
@click.option("--scheme",
              type=click.Choice(["binary", "penalty", "tolerance"]),
              default="binary")
@click.option("--threads", type=int, default=1)
@battery_options
def cmd_evaluate(network, routes_path, inst_path, scheme, threads,
                 config_path, **battery):
    """Evaluate an installation file against a route set."""
    g = load_network(network)
    p = _params(_load_config(config_path), **battery)
    routes = load_routes(routes_path, g)
    data = json.loads(Path(inst_path).read_text(encoding="utf-8"))
    ids = data["installed"] if isinstance(data, dict) else data
    inst = Installation.from_ids(g, ids)
    obj, infeasible, _ = evaluate_installation(inst, routes, p, g, scheme,
                                               threads)
    click.echo(json.dumps({"objective": obj, "infeasible": infeasible,
                           "routes": len(routes),
                           "cost": inst.total_cost}))


@cli.command("experiment")
@click.option("--kind", required=True,
              type=click.Choice(["distribution", "random-isoc", "velocity",
                                 "warmstart"]))
@click.option("--network", required=True, type=click.Path(exists=True))
@click.option("--routes", "routes_path", required=True,
              type=click.Path(exists=True))
@click.option("--beta", type=float, default=None)
@click.option("--budget", type=float, default=None)
@click.option("--scheme",
              type=click.Choice(["binary", "penalty", "tolerance"]),
              default="binary")
@click.option("--seed", type=int, default=0)
@click.option("--node-limit", type=int, default=None)
@click.option("--l", "l_value", type=float, default=2.0)
@click.option("--n-routes", type=int, default=30)
@click.option("--a", "a_value", type=float, default=0.4)
@click.option("--eps", "eps_values", type=float, multiple=True,
              default=(0.0, 0.1, 0.2))
@click.option("--trials", type=int, default=50)
@click.option("--ks", default="5",
              help="Comma-separated route counts for the warm-start study.")
@click.option("--repeats", type=int, default=30)
@click.option("--out", required=True, type=click.Path())
@battery_options
def cmd_experiment(kind, network, routes_path, beta, budget, scheme, seed,
                   node_limit, l_value, n_routes, a_value, eps_values,
                   trials, ks, repeats, out, config_path, **battery):
    """Run one of the experiment suites and write CSV + config sidecar."""
    g = load_network(network)
    p = _params(_load_config(config_path), **battery)
    routes = load_routes(routes_path, g)
    pop = RoutePopulation.from_routes(routes)
    b = _resolve_budget(g, beta, budget)
    if kind == "distribution":
        model = branch_and_bound(routes, g, p, b, scheme,
                                 node_limit=node_limit)
        btn = heuristic_fill(g, b, centrality_scores(g, "betweenness"))
        report = exp.soc_distribution(
            routes,
            [("none", EMPTY_INSTALLATION), ("model", model.installation),
             ("betweenness", btn)], p, g)
    elif kind == "random-isoc":
        report = exp.random_isoc_study(pop, l_value, n_routes, a_value,
                                       seed, b, p, g, scheme)
    elif kind == "velocity":
        model = branch_and_bound(routes, g, p, b, scheme,
                                 node_limit=node_limit)
        report = exp.velocity_study(routes, list(eps_values), trials, seed,
                                    model.installation, p, g)
    else:
        k_list = [int(x) for x in ks.split(",") if x.strip()]
        limit = 0 if node_limit is None else node_limit
        report = exp.warmstart_study(pop, k_list, limit, repeats, seed, p,
                                     g, b, scheme)
    paths = exp.write_report(report, out)
    click.echo(json.dumps(paths))


def main() -> None:
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Exit as e:
        sys.exit(e.exit_code)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.ClickException as e:
        e.show()
        sys.exit(1)
    except (InsufficientChargingPowerError, NoPathError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    except WclError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
