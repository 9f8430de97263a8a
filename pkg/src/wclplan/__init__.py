"""Planning toolkit for wireless charging lane placement on road networks."""

from .errors import (CandidateLimitError, EnumerationCapError,
                     InsufficientChargingPowerError, NetworkFormatError,
                     NoPathError, NonconvergenceError, RouteError,
                     SamplingError, WclError)
from .ip import (build_fixed_budget_ip, build_min_budget_ip, export_mps,
                 induce_assignment)
from .mps import ParsedMps, parse_mps
from .network import (RoadSegment, SegmentGraph, budget_from_fraction,
                      filter_categories, graph_from_records, load_network,
                      traversal_time, with_speeds)
from .routing import (Route, RoutePopulation, enumerate_all_routes,
                      load_routes, make_route, sample_routes, save_routes,
                      shortest_route)
from .soc import (EMPTY_INSTALLATION, Installation, RouteOutcome, SocParams,
                  simulate_route)
from .solvers import (SolveResult, branch_and_bound, brute_force,
                      centrality_scores, evaluate_installation,
                      heuristic_fill, heuristic_min_budget, solution_dict,
                      solve_min_budget)
from .state_graph import (SocStateGraph, boundary_weight, build_state_graph,
                          min_cost_path, trace_path)

__version__ = "0.1.0"
