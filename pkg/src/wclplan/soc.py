"""State-of-charge model: per-segment transitions and full-route simulation.

Two SOC functions are supported.  The realistic one follows the battery
energy balance: crossing a segment in time t costs P1*t of consumption and,
if a charging lane is installed, recovers P2*eta*t, all relative to the
battery capacity.  The simplistic one moves exactly one discrete level up
(installed) or down (not installed) and is used for toy instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Collection

from .errors import RouteError, WclError
from .network import RoadSegment, SegmentGraph, traversal_time

if TYPE_CHECKING:
    from .routing import Route

REALISTIC = "realistic"
SIMPLISTIC = "simplistic"


@dataclass(frozen=True)
class SocParams:
    """Battery / charging parameters.

    The numeric defaults are overridable placeholders; nothing in the test
    suite depends on them.
    """

    e_cap: float = 30.0        # battery capacity, kWh
    p1: float = 10.0           # consumption power, kW
    p2: float = 40.0           # WCL power delivered, kW
    eta: float = 0.8           # charging efficiency
    n_layers: int = 4          # discrete SOC levels
    alpha: float = 0.0         # global SOC feasibility threshold
    eps_tol: float = 0.0       # tolerance band half-width around alpha
    soc_function: str = REALISTIC

    def __post_init__(self):
        if self.e_cap <= 0:
            raise WclError("e_cap must be positive")
        if self.p1 <= 0:
            raise WclError("p1 must be positive")
        if self.p2 < 0:
            raise WclError("p2 must be nonnegative")
        if not 0 < self.eta <= 1:
            raise WclError("eta must be in (0, 1]")
        if self.n_layers < 2:
            raise WclError("n_layers must be at least 2")
        if not 0 <= self.alpha <= 1:
            raise WclError("alpha must be in [0, 1]")
        if self.eps_tol < 0:
            raise WclError("eps_tol must be nonnegative")
        if self.soc_function not in (REALISTIC, SIMPLISTIC):
            raise WclError(f"unknown soc_function {self.soc_function!r}")


@dataclass(frozen=True)
class Installation:
    """A chosen set of segments to electrify, with its total cost."""

    installed_ids: frozenset[str]
    total_cost: float

    @classmethod
    def from_ids(cls, g: SegmentGraph, ids: Collection[str]) -> "Installation":
        idset = frozenset(ids)
        cost = sum(g.segment(sid).cost for sid in sorted(idset))
        return cls(installed_ids=idset, total_cost=cost)


EMPTY_INSTALLATION = Installation(installed_ids=frozenset(), total_cost=0.0)


@dataclass(frozen=True)
class RouteOutcome:
    """Result of simulating one route under an installation."""

    final_soc: float
    trajectory: tuple[float, ...]   # SOC after each traversed segment
    completed: bool
    stall_distance: float           # = route distance when completed
    feasible: bool                  # completed and final_soc > alpha


def delta_soc(seg: RoadSegment, installed: bool, p: SocParams) -> float:
    """SOC change for one segment under the realistic energy model."""
    t = traversal_time(seg)
    charge = p.p2 * p.eta if installed else 0.0
    return (charge - p.p1) * t / p.e_cap


def level_value(level: int, n_layers: int) -> float:
    """SOC represented by a level index (0 = empty .. n_layers-1 = full)."""
    return level / (n_layers - 1)


def discretize(soc: float, n_layers: int) -> int:
    """Nearest level index for a SOC value; exact ties round down."""
    if not 0.0 <= soc <= 1.0:
        raise WclError(f"soc {soc} outside [0, 1]")
    x = soc * (n_layers - 1)
    lo = math.floor(x)
    level = lo + 1 if x - lo > 0.5 else lo
    return min(level, n_layers - 1)


def simplistic_step(level: int, installed: bool, n_layers: int) -> int:
    """One-level step of the simplistic SOC function, clamped at both ends."""
    if installed:
        return min(level + 1, n_layers - 1)
    return max(level - 1, 0)


def _installed_set(installation) -> frozenset[str]:
    if isinstance(installation, Installation):
        return installation.installed_ids
    return frozenset(installation)


def simulate_route(route: "Route", installation, p: SocParams,
                   g: SegmentGraph) -> RouteOutcome:
    """Simulate the route's SOC trajectory under the given installation.

    SOC is clamped to [0, 1] after every segment.  Reaching 0 before the
    final segment stalls the vehicle: the route is not completed and the
    stall distance is the distance covered through the last finished
    segment.  Feasibility is final SOC strictly above alpha.
    """
    installed = _installed_set(installation)
    ids = route.segment_ids
    m = len(ids)
    segs = [g.segment(sid) for sid in ids]

    trajectory: list[float] = []
    covered = 0.0
    if p.soc_function == SIMPLISTIC:
        level = discretize(route.initial_soc, p.n_layers)
        soc = level_value(level, p.n_layers)
    else:
        soc = route.initial_soc

    if soc <= 0.0:
        # Empty battery at the origin: stalls before the first segment.
        return RouteOutcome(final_soc=0.0, trajectory=(),
                            completed=False, stall_distance=0.0,
                            feasible=False)

    for i, seg in enumerate(segs):
        inst = seg.id in installed
        if p.soc_function == SIMPLISTIC:
            level = simplistic_step(level, inst, p.n_layers)
            soc = level_value(level, p.n_layers)
        else:
            soc = min(1.0, max(0.0, soc + delta_soc(seg, inst, p)))
        trajectory.append(soc)
        covered += seg.length
        if soc <= 0.0 and i < m - 1:
            return RouteOutcome(final_soc=0.0, trajectory=tuple(trajectory),
                                completed=False, stall_distance=covered,
                                feasible=False)

    return RouteOutcome(final_soc=soc, trajectory=tuple(trajectory),
                        completed=True, stall_distance=route.distance,
                        feasible=soc > p.alpha)


def outcome_weight(outcome: RouteOutcome, route: "Route", p: SocParams,
                   scheme: str) -> float:
    """Boundary-style weight of a simulated outcome (continuous analogue).

    binary:    1 if final SOC >= alpha, else 0.
    penalty:   1 if final SOC >= alpha, else (d - |r|)/|r| where d is the
               distance completed (0 for a completed-but-low route).
    tolerance: like penalty but with a neutral band of width 2*eps_tol
               around alpha that scores 0.
    """
    s = outcome.final_soc if outcome.completed else 0.0
    d = outcome.stall_distance
    r_len = route.distance
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
