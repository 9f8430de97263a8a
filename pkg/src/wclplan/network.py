"""Road segment graph: ingestion, adjacency, travel times, costs, budgets.

A road segment is a one-way portion of road between two intersections.  The
graph's nodes are segments; a directed edge (u, v) exists exactly when u's
end intersection is v's start intersection.  Edge weights are the traversal
time of the source segment, which is what route choice is based on.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .errors import NetworkFormatError

# Category -> speed (mph) for urban and rural settings.
URBAN_SPEEDS = {1: 60, 2: 45, 3: 30, 4: 20, 5: 15, 6: 8, 7: 5, 8: 5}
RURAL_SPEEDS = {1: 70, 2: 55, 3: 50, 4: 45, 5: 35, 6: 25, 7: 10, 8: 10}


@dataclass(frozen=True)
class RoadSegment:
    """One-way road segment with the attributes the model needs.

    cost defaults to length (installation cost proportional to length);
    an explicit cost in the input overrides it.
    """

    id: str
    length: float          # miles
    category: int          # 1..8
    speed: float           # mph
    cost: float            # installation cost, defaults to length
    start: str             # start intersection token
    end: str               # end intersection token

    def __post_init__(self):
        if not self.id:
            raise NetworkFormatError("segment with empty id")
        if self.length <= 0:
            raise NetworkFormatError(f"segment {self.id!r}: nonpositive length")
        if self.category not in range(1, 9):
            raise NetworkFormatError(
                f"segment {self.id!r}: category {self.category} outside 1-8")
        if self.speed <= 0:
            raise NetworkFormatError(f"segment {self.id!r}: nonpositive speed")
        if self.cost < 0:
            raise NetworkFormatError(f"segment {self.id!r}: negative cost")
        if not self.start or not self.end:
            raise NetworkFormatError(
                f"segment {self.id!r}: missing intersection reference")


def traversal_time(seg: RoadSegment) -> float:
    """Average traversal time of the segment, in hours."""
    return seg.length / seg.speed


class SegmentGraph:
    """Immutable directed graph over road segments, keyed by segment id.

    Iteration order is always lexicographic in segment id, so identical
    inputs produce identical graphs and identical downstream artifacts.
    """

    def __init__(self, segments: Iterable[RoadSegment]):
        by_id: dict[str, RoadSegment] = {}
        for seg in segments:
            if seg.id in by_id:
                raise NetworkFormatError(f"duplicate segment id {seg.id!r}")
            by_id[seg.id] = seg
        self.segments: dict[str, RoadSegment] = {
            sid: by_id[sid] for sid in sorted(by_id)}

        starts: dict[str, list[str]] = {}
        for sid, seg in self.segments.items():
            starts.setdefault(seg.start, []).append(sid)
        succ: dict[str, tuple[str, ...]] = {}
        pred: dict[str, list[str]] = {sid: [] for sid in self.segments}
        for sid, seg in self.segments.items():
            out = tuple(v for v in starts.get(seg.end, ()) )
            succ[sid] = out
            for v in out:
                pred[v].append(sid)
        self._succ = succ
        self._pred = {sid: tuple(ps) for sid, ps in pred.items()}

    # -- basic queries ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.segments)

    def __contains__(self, sid: str) -> bool:
        return sid in self.segments

    def node_ids(self) -> tuple[str, ...]:
        return tuple(self.segments)

    def segment(self, sid: str) -> RoadSegment:
        try:
            return self.segments[sid]
        except KeyError:
            raise NetworkFormatError(f"unknown segment id {sid!r}") from None

    def successors(self, sid: str) -> tuple[str, ...]:
        return self._succ[sid]

    def predecessors(self, sid: str) -> tuple[str, ...]:
        return self._pred[sid]

    def edges(self):
        for u, outs in self._succ.items():
            for v in outs:
                yield (u, v)

    def num_edges(self) -> int:
        return sum(len(v) for v in self._succ.values())

    def edge_weight(self, u: str, v: str) -> float:
        """Weight of edge (u, v): traversal time of segment u, hours."""
        if v not in self._succ[u]:
            raise NetworkFormatError(f"no edge {u!r} -> {v!r}")
        return traversal_time(self.segments[u])

    @property
    def total_length(self) -> float:
        return sum(seg.length for seg in self.segments.values())

    @property
    def total_cost(self) -> float:
        return sum(seg.cost for seg in self.segments.values())


def _segment_from_record(rec: dict, setting: str) -> RoadSegment:
    try:
        sid = str(rec["id"])
        length = float(rec["length_mi"])
        category = int(rec["category"])
        start = str(rec["start"])
        end = str(rec["end"])
    except KeyError as exc:
        raise NetworkFormatError(f"segment record missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise NetworkFormatError(f"bad segment record: {exc}") from None
    speed = rec.get("speed_mph")
    if speed in (None, ""):
        table = RURAL_SPEEDS if setting == "rural" else URBAN_SPEEDS
        if category not in table:
            raise NetworkFormatError(
                f"segment {sid!r}: category {category} outside 1-8")
        speed = table[category]
    cost = rec.get("cost")
    if cost in (None, ""):
        cost = length
    return RoadSegment(id=sid, length=length, category=category,
                       speed=float(speed), cost=float(cost),
                       start=start, end=end)


def graph_from_records(records: Iterable[dict],
                       setting: str = "urban") -> SegmentGraph:
    if setting not in ("urban", "rural"):
        raise NetworkFormatError(f"unknown setting {setting!r}")
    return SegmentGraph(_segment_from_record(r, setting) for r in records)


def load_network(source: str | Path) -> SegmentGraph:
    """Load a network from the JSON schema or the equivalent CSV.

    JSON: {"setting": "urban"|"rural", "segments": [{...}]}.
    CSV: header row with the same column names; setting defaults to urban.
    """
    path = Path(source)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        reader = csv.DictReader(io.StringIO(text))
        return graph_from_records(list(reader), "urban")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict) or "segments" not in data:
        raise NetworkFormatError(f"{path}: expected object with 'segments'")
    return graph_from_records(data["segments"], data.get("setting", "urban"))


def filter_categories(g: SegmentGraph, max_category: int) -> SegmentGraph:
    """Induced subgraph on segments with category <= max_category."""
    if not 1 <= max_category <= 8:
        raise NetworkFormatError(f"max_category {max_category} outside 1-8")
    return SegmentGraph(seg for seg in g.segments.values()
                        if seg.category <= max_category)


def budget_from_fraction(g: SegmentGraph, beta: float) -> float:
    """Absolute budget B = beta * total installation cost."""
    if not 0 <= beta <= 1:
        raise NetworkFormatError(f"beta {beta} outside [0, 1]")
    return beta * g.total_cost


def with_speeds(g: SegmentGraph, speeds: dict[str, float]) -> SegmentGraph:
    """Copy of g with per-segment speed overrides (velocity experiments)."""
    return SegmentGraph(
        replace(seg, speed=speeds.get(sid, seg.speed))
        for sid, seg in g.segments.items())
