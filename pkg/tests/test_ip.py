import pytest

from wclplan.errors import WclError
from wclplan.ip import (build_fixed_budget_ip, build_min_budget_ip,
                        empty_instance, export_mps, induce_assignment,
                        installation_from_assignment, objective_value)
from wclplan.mps import MpsParseError, parse_mps
from wclplan.routing import make_route
from wclplan.soc import EMPTY_INSTALLATION, Installation, SocParams

from helpers import make_line_graph, random_instance


def small_instance():
    g = make_line_graph(3, length=8.0, category=3)
    routes = [make_route(g, ["u1", "u2", "u3"], initial_soc=0.5),
              make_route(g, ["u2", "u3"], initial_soc=0.4, demand=2.0)]
    p = SocParams(n_layers=4, alpha=0.3, soc_function="simplistic")
    return g, routes, p


def test_summary_counts():
    g, routes, p = small_instance()
    ip = build_fixed_budget_ip(routes, g, p, budget=16.0)
    s = ip.summary()
    # R vars: 3 candidates; edge vars: one per state-graph edge
    n_edges = sum(len(sg.edges) for sg in ip.graphs)
    assert s["vars"] == 3 + n_edges
    # one budget row, one flow row per (route, node), two links per candidate
    n_nodes = sum((sg.m + 1) * sg.n_layers + 2 for sg in ip.graphs)
    assert s["cons"] == 1 + n_nodes + 2 * 3
    assert s["budget"] == 16.0 and s["routes"] == 2


def test_big_m_is_route_count():
    g, routes, p = small_instance()
    ip = build_fixed_budget_ip(routes, g, p, budget=16.0)
    assert ip.big_m == 2.0
    lb = next(r for r in ip.rows if r.name == "LB_u2")
    assert lb.coefs["R_u2"] == 2.0


def test_min_budget_objective_is_cost():
    g, routes, p = small_instance()
    ip = build_min_budget_ip(routes, g, p)
    assert ip.sense == "min"
    assert ip.objective == {"R_u1": 8.0, "R_u2": 8.0, "R_u3": 8.0}
    assert ip.budget is None


def test_fixed_budget_objective_weights_demand():
    g, routes, p = small_instance()
    ip = build_fixed_budget_ip(routes, g, p, budget=16.0, scheme="binary")
    # only edges into t carry objective coefficients
    assert ip.sense == "max"
    assert all(v in ip.binaries for v in ip.objective)
    # the second route has demand 2: its passing boundary edges score 2
    assert 2.0 in set(ip.objective.values())


def test_export_is_deterministic():
    g, routes, p = small_instance()
    ip = build_fixed_budget_ip(routes, g, p, budget=16.0)
    assert export_mps(ip) == export_mps(ip)
    ip2 = build_fixed_budget_ip(routes, g, p, budget=16.0)
    assert export_mps(ip) == export_mps(ip2)


def test_mps_roundtrip():
    g, routes, p = small_instance()
    ip = build_fixed_budget_ip(routes, g, p, budget=16.0)
    parsed = parse_mps(export_mps(ip))
    assert parsed.sense == "max"
    assert parsed.n_vars == len(ip.binaries)
    assert parsed.n_constraints == len(ip.rows)
    assert parsed.objective_coefs() == pytest.approx(ip.objective)
    for row in ip.rows:
        assert parsed.row_types[row.name] == \
            {"<=": "L", ">=": "G", "=": "E"}[row.sense]
        assert parsed.rhs.get(row.name, 0.0) == row.rhs


def test_fixed_format_when_names_fit():
    ip = empty_instance()
    text = export_mps(ip).decode()
    assert not text.startswith("*")
    parsed = parse_mps(text)
    assert parsed.n_vars == 0 and parsed.n_constraints == 0


def test_free_format_header_comment():
    g, routes, p = small_instance()
    text = export_mps(build_fixed_budget_ip(routes, g, p, 16.0)).decode()
    assert text.startswith("* free-format")


def test_induced_assignment_satisfies_rows():
    g, routes, p = small_instance()
    ip = build_fixed_budget_ip(routes, g, p, budget=24.0)
    parsed = parse_mps(export_mps(ip))
    for ids in ([], ["u2"], ["u1", "u3"], ["u1", "u2", "u3"]):
        asg = induce_assignment(ip, Installation.from_ids(g, ids))
        assert parsed.row_violations(asg) == [], ids
        back = installation_from_assignment(ip, g, asg)
        assert back.installed_ids <= frozenset(ids)


def test_induced_objective_matches_traced_weights():
    from wclplan.state_graph import boundary_weight, trace_path
    g, routes, p = small_instance()
    ip = build_fixed_budget_ip(routes, g, p, budget=16.0, scheme="penalty")
    inst = Installation.from_ids(g, ["u2"])
    asg = induce_assignment(ip, inst)
    expected = 0.0
    for r, sg in zip(routes, ip.graphs):
        path = trace_path(sg, inst)
        expected += r.demand * boundary_weight(sg, path[-2], "penalty")
    assert objective_value(ip, asg) == pytest.approx(expected)


def test_row_violations_detects_breakage():
    g, routes, p = small_instance()
    ip = build_fixed_budget_ip(routes, g, p, budget=0.0)
    parsed = parse_mps(export_mps(ip))
    asg = induce_assignment(ip, EMPTY_INSTALLATION)
    asg["R_u1"] = 1.0            # breaks BUDGET and LA_u1
    bad = parsed.row_violations(asg)
    assert any(v.startswith("BUDGET:") for v in bad)
    assert any(v.startswith("LA_u1:") for v in bad)


def test_empty_routes_rejected():
    g, _, p = small_instance()
    with pytest.raises(WclError):
        build_fixed_budget_ip([], g, p, 1.0)
    with pytest.raises(WclError):
        build_fixed_budget_ip([make_route(g, ["u1", "u2"])], g, p, -1.0)


def test_parse_mps_rejects_garbage():
    with pytest.raises(MpsParseError):
        parse_mps("GARBAGE\n    x y z\n")


def test_random_instances_roundtrip():
    for seed in (1, 2, 3):
        g, routes, p, budget, scheme = random_instance(seed)
        ip = build_fixed_budget_ip(routes, g, p, budget, scheme)
        parsed = parse_mps(export_mps(ip))
        assert parsed.n_vars == len(ip.binaries)
        assert parsed.objective_coefs() == pytest.approx(ip.objective)
