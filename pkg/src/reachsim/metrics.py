"""Quantitative evaluation: soft-reachability coverage against the
loop-free-path oracle, traffic split ratios, loop statistics, convergence
detection, and report serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional, Sequence

import numpy as np

from .tables import ProbTable
from .topology import RouterId, Topology, enumerate_loop_free_paths


class OracleTruncation(RuntimeError):
    """The path oracle hit its bound; coverage would be unreliable."""


def valid_first_hops(t: Topology, r: RouterId, d: RouterId,
                     max_paths: Optional[int] = None) -> set[str]:
    """Interfaces at r that start at least one loop-free r->d path."""
    paths = enumerate_loop_free_paths(t, r, d, max_paths)
    if paths.truncated:
        raise OracleTruncation(f"path enumeration truncated for pair ({r}, {d})")
    return {p.hops[0][1] for p in paths if p.hops}


def reachability_coverage(tables: dict[RouterId, ProbTable], t: Topology,
                          eps: float = 1e-3, max_paths: Optional[int] = None) -> float:
    """Fraction of (router, destination, interface) triples such that the
    interface begins some loop-free path and carries table probability >= eps.
    eps must sit strictly between 0 and 1/max-degree so a uniform row always
    counts as covered."""
    max_deg = max(t.degree(r) for r in t.routers)
    if not (0 < eps < 1.0 / max_deg):
        raise ValueError(f"eps must be in (0, 1/{max_deg})")
    total = 0
    covered = 0
    for r in t.sorted_routers():
        table = tables[r]
        for d in t.sorted_routers():
            if d == r:
                continue
            for iface in valid_first_hops(t, r, d, max_paths):
                total += 1
                k = t.iface_index(r, iface)
                if table.row(d)[k] >= eps:
                    covered += 1
    return covered / total if total else 1.0


@dataclass
class SplitRatio:
    count_a: int
    count_b: int

    @property
    def ratio(self) -> Optional[float]:
        """a:b as a float, or None when either group is empty (undefined)."""
        if self.count_a == 0 or self.count_b == 0:
            return None
        return self.count_a / self.count_b

    @property
    def undefined_side(self) -> Optional[str]:
        if self.count_a == 0 and self.count_b == 0:
            return "both"
        if self.count_a == 0:
            return "A"
        if self.count_b == 0:
            return "B"
        return None

    def merged(self, other: "SplitRatio") -> "SplitRatio":
        return SplitRatio(self.count_a + other.count_a, self.count_b + other.count_b)


def split_ratio(traces: Sequence, partition: Callable) -> SplitRatio:
    """Count delivered traces into group A (partition(trace) is truthy) and
    group B; empty groups leave the ratio undefined rather than zero."""
    a = 0
    b = 0
    for trace in traces:
        if partition(trace):
            a += 1
        else:
            b += 1
    return SplitRatio(a, b)


def _max_row_l1(snap_a: dict, snap_b: dict) -> float:
    worst = 0.0
    for r, rows in snap_a.items():
        for d, row in rows.items():
            other = snap_b[r][d]
            worst = max(worst, sum(abs(p - q) for p, q in zip(row, other)))
    return worst


def convergence_time(snapshots: Sequence[tuple[float, dict]], delta: float,
                     window: float = 0.0) -> Optional[float]:
    """Earliest snapshot time after which every pair of later snapshots stays
    within a max row-wise L1 distance of delta, with at least `window` ms of
    evidence; None when the run never settles.  Snapshots are
    (time, {router: {dest: row}}) pairs."""
    if len(snapshots) < 2:
        raise ValueError("need at least two snapshots")
    times = [s[0] for s in snapshots]
    end = times[-1]
    # a lone trailing snapshot is no evidence: the suffix needs a comparison
    for i, (t_i, _) in enumerate(snapshots[:-1]):
        if end - t_i < window:
            break
        tail = snapshots[i:]
        stable = all(_max_row_l1(tail[0][1], later[1]) < delta for later in tail[1:])
        # require pairwise stability, not just against the anchor
        if stable:
            stable = all(_max_row_l1(a[1], b[1]) < delta
                         for x, a in enumerate(tail) for b in tail[x + 1:])
        if stable:
            return t_i
    return None


@dataclass
class LoopStats:
    packets_entering_loop: int = 0
    mean_extra_hops: float = 0.0
    max_loop_length: int = 0


def _loop_erased_len(trace: Sequence[RouterId]) -> int:
    path: list[RouterId] = []
    for r in trace:
        if r in path:
            del path[path.index(r) + 1:]
        else:
            path.append(r)
    return len(path)


def loop_statistics(traces: Sequence[Sequence[RouterId]]) -> LoopStats:
    """First-repeat loop detection per trace: how many packets looped, the
    mean hops wasted relative to the loop-erased walk, and the longest first
    loop observed."""
    looped = 0
    extra_total = 0
    max_len = 0
    for trace in traces:
        seen: dict[RouterId, int] = {}
        first_loop = None
        for i, r in enumerate(trace):
            if r in seen:
                first_loop = i - seen[r]
                break
            seen[r] = i
        if first_loop is None:
            continue
        looped += 1
        max_len = max(max_len, first_loop)
        extra_total += len(trace) - _loop_erased_len(trace)
    mean_extra = extra_total / looped if looped else 0.0
    return LoopStats(looped, mean_extra, max_len)


@dataclass
class MetricsReport:
    """Everything one scenario run reports.  convergence_time None means the
    tables never settled under the configured criterion; split ratios with a
    None value had an empty group."""

    scenario: str = ""
    seed: int = 0
    duration_ms: float = 0.0
    coverage: Optional[float] = None
    split_ratios: dict = field(default_factory=dict)
    loop_stats: LoopStats = field(default_factory=LoopStats)
    message_counts: dict = field(default_factory=dict)
    convergence_time_ms: Optional[float] = None
    packets_generated: int = 0
    packets_delivered: int = 0
    packets_dropped_ttl: int = 0
    packets_dropped_no_route: int = 0
    packets_in_flight: int = 0
    ants_generated: int = 0
    ants_delivered: int = 0
    ants_discarded: int = 0
    delay_percentiles: dict = field(default_factory=dict)
    event_log_hash: str = ""

    def conservation_ok(self) -> bool:
        return (self.packets_generated
                == self.packets_delivered + self.packets_dropped_ttl
                + self.packets_dropped_no_route + self.packets_in_flight)

    def to_json(self) -> str:
        data = asdict(self)
        return json.dumps(data, sort_keys=True, indent=2, default=str)

    def to_csv(self) -> str:
        """Flat key,value CSV in sorted key order (nested keys dotted)."""
        flat: dict[str, object] = {}

        def put(prefix, value):
            if isinstance(value, dict):
                for k in sorted(value, key=str):
                    put(f"{prefix}.{k}", value[k])
            else:
                flat[prefix] = value

        for k, v in sorted(asdict(self).items()):
            put(k, v)
        lines = ["key,value"]
        lines += [f"{k},{'' if v is None else v}" for k, v in flat.items()]
        return "\n".join(lines) + "\n"


def delay_percentiles(delays_by_dest: dict[RouterId, list[float]]) -> dict:
    """p50/p90/p99 delivery delay per destination."""
    out = {}
    for d in sorted(delays_by_dest):
        delays = delays_by_dest[d]
        if not delays:
            continue
        p50, p90, p99 = np.percentile(delays, [50, 90, 99])
        out[d] = {"p50": float(p50), "p90": float(p90), "p99": float(p99)}
    return out
