"""Parsing and summary statistics for discrete-time weighted time-varying graphs.

Raw input is a plain-text contact list (`timestamp id1 id2` per line).
Timestamps are binned into fixed-size windows, repeated contacts inside a
window become one weighted event, empty windows are dropped and the remaining
windows re-indexed contiguously.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from hosgns.errors import EmptyGraphError, ParseError


@dataclass(frozen=True)
class Event:
    """One undirected weighted event (i, j, k), stored with i < j."""

    i: int
    j: int
    k: int
    weight: float

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError(f"self-event at node {self.i}")
        if self.weight <= 0:
            raise ValueError(f"non-positive weight {self.weight}")
        if self.i > self.j:
            raise ValueError("events must be stored canonically with i < j")


@dataclass
class TimeVaryingGraph:
    """Event set over dense 0-based node and time-slice indices.

    ``id_map`` and ``time_map`` record the remapping from raw ids / raw window
    indices so that parsed graphs can be traced back to their source data.
    """

    num_nodes: int
    num_times: int
    events: list[Event]
    node_labels: list[str] | None = None
    id_map: dict[int, int] = field(default_factory=dict)
    time_map: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for e in self.events:
            if not (0 <= e.i < self.num_nodes and 0 <= e.j < self.num_nodes):
                raise ValueError(f"event {e} references an invalid node index")
            if not (0 <= e.k < self.num_times):
                raise ValueError(f"event {e} references an invalid time index")
        self._active_pairs: frozenset[tuple[int, int]] | None = None

    @property
    def active_pairs(self) -> frozenset[tuple[int, int]]:
        """Set of (node, time) pairs participating in at least one event."""
        if self._active_pairs is None:
            pairs = set()
            for e in self.events:
                pairs.add((e.i, e.k))
                pairs.add((e.j, e.k))
            self._active_pairs = frozenset(pairs)
        return self._active_pairs

    @property
    def num_events(self) -> int:
        return len(self.events)

    @property
    def num_active(self) -> int:
        return len(self.active_pairs)

    def active_times_of(self, node: int) -> list[int]:
        """Sorted time slices at which ``node`` participates in an event."""
        times = {e.k for e in self.events if node in (e.i, e.j)}
        return sorted(times)

    def to_json(self) -> str:
        doc = {
            "num_nodes": self.num_nodes,
            "num_times": self.num_times,
            "events": [[e.i, e.j, e.k, e.weight] for e in self.events],
            "id_map": {str(k): v for k, v in self.id_map.items()},
            "time_map": {str(k): v for k, v in self.time_map.items()},
        }
        if self.node_labels is not None:
            doc["node_labels"] = self.node_labels
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TimeVaryingGraph":
        doc = json.loads(text)
        return cls(
            num_nodes=doc["num_nodes"],
            num_times=doc["num_times"],
            events=[Event(i, j, k, w) for i, j, k, w in doc["events"]],
            node_labels=doc.get("node_labels"),
            id_map={int(k): v for k, v in doc.get("id_map", {}).items()},
            time_map={int(k): v for k, v in doc.get("time_map", {}).items()},
        )


@dataclass(frozen=True)
class GraphStats:
    num_nodes: int
    num_times: int
    num_events: int
    num_active: int
    avg_weight: float
    node_density: float
    link_density: float

    def to_dict(self) -> dict:
        return {
            "num_nodes": self.num_nodes,
            "num_times": self.num_times,
            "num_events": self.num_events,
            "num_active": self.num_active,
            "avg_weight": self.avg_weight,
            "node_density": self.node_density,
            "link_density": self.link_density,
        }


def parse_contact_lines(
    lines: Iterable[str] | IO[str], window_seconds: int
) -> TimeVaryingGraph:
    """Parse `timestamp id1 id2` lines into a weighted time-varying graph.

    Timestamps are binned into floor(timestamp / window_seconds) windows;
    repeated contacts between the same pair inside a window accumulate into
    one event whose weight is the contact count.  Comment lines starting with
    `#` and blank lines are skipped.
    """
    if window_seconds <= 0:
        raise ValueError(f"window_seconds must be positive, got {window_seconds}")

    counts: dict[tuple[int, int, int], int] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ParseError(lineno, line, "expected `timestamp id1 id2`")
        try:
            ts, a, b = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(lineno, line, "non-integer field") from None
        if a == b:
            raise ParseError(lineno, line, "self-contact")
        window = ts // window_seconds
        key = (min(a, b), max(a, b), window)
        counts[key] = counts.get(key, 0) + 1

    if not counts:
        raise EmptyGraphError("no usable events in input")

    raw_ids = sorted({a for a, _, _ in counts} | {b for _, b, _ in counts})
    raw_windows = sorted({w for _, _, w in counts})
    id_map = {raw: idx for idx, raw in enumerate(raw_ids)}
    time_map = {raw: idx for idx, raw in enumerate(raw_windows)}

    events = []
    for (a, b, w), count in sorted(counts.items()):
        i, j = id_map[a], id_map[b]
        if i > j:
            i, j = j, i
        events.append(Event(i, j, time_map[w], float(count)))
    events.sort(key=lambda e: (e.k, e.i, e.j))

    return TimeVaryingGraph(
        num_nodes=len(raw_ids),
        num_times=len(raw_windows),
        events=events,
        id_map=id_map,
        time_map=time_map,
    )


def stats(g: TimeVaryingGraph) -> GraphStats:
    """Summary statistics of a non-empty time-varying graph."""
    if not g.events:
        raise EmptyGraphError("graph has no events")
    n, t, m = g.num_nodes, g.num_times, g.num_events
    total_weight = sum(e.weight for e in g.events)
    return GraphStats(
        num_nodes=n,
        num_times=t,
        num_events=m,
        num_active=g.num_active,
        avg_weight=total_weight / m,
        node_density=g.num_active / (n * t),
        link_density=2 * m / (n * (n - 1) * t),
    )


def graph_volume(g: TimeVaryingGraph) -> float:
    """Total event weight under the ordered-pair convention (factor 2)."""
    if not g.events:
        raise EmptyGraphError("graph has no events")
    return 2.0 * sum(e.weight for e in g.events)
