"""Constructive deterministic baselines: link-state (per-router shortest path
trees plus flood accounting), synchronous-round distance-vector with an
infinity bound (and its count-to-infinity pathology), and path-vector with
explicit loop filtering."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .tables import DetTable, PathVectorRoute, PathVectorTable
from .topology import DisconnectedError, RouterId, Topology, is_connected

DEFAULT_INFINITY_BOUND = 16   # RIP-style hop bound


# -- link state -----------------------------------------------------------


def dijkstra(t: Topology, src: RouterId) -> DetTable:
    """Single-source shortest paths by forward cost with first-hop extraction.
    Equal-cost ties resolve to the lowest (next-hop router, interface)."""
    table = DetTable(src)
    best: dict[RouterId, tuple] = {}
    # heap entries: (dist, next-hop router of first hop, first interface, node)
    heap = []
    for link in t.out_links(src):
        heapq.heappush(heap, (link.cost_forward, link.dst, link.out_interface, link.dst))
    while heap:
        dist, fh_router, fh_iface, node = heapq.heappop(heap)
        if node in best:
            continue
        best[node] = (dist, fh_router, fh_iface)
        table.set(node, fh_iface, dist)
        for link in t.out_links(node):
            if link.dst not in best and link.dst != src:
                heapq.heappush(heap, (dist + link.cost_forward, fh_router, fh_iface, link.dst))
    return table


def _flood_traversals(t: Topology, origin: RouterId) -> int:
    """Pruned flooding of one advertisement: the originator sends on every
    link; every other router forwards on all links but the arrival link the
    first time it hears the advertisement.  Returns link traversals."""
    sends = t.degree(origin)
    frontier = [link.dst for link in t.out_links(origin)]
    heard = {origin}
    while frontier:
        nxt = []
        for r in frontier:
            if r in heard:
                continue
            heard.add(r)
            sends += t.degree(r) - 1
            nxt.extend(link.dst for link in t.out_links(r))
        frontier = nxt
    return sends


@dataclass
class LinkStateResult:
    tables: dict[RouterId, DetTable]
    message_count: int              # payload-weighted: sum of N_r * traversals
    flood_link_traversals: int


def run_link_state(t: Topology) -> LinkStateResult:
    """Flood every router's local connectivity, then run Dijkstra at each
    router.  message_count charges each advertisement its payload size (the
    originator's neighbor count) per link traversal."""
    if not is_connected(t):
        raise DisconnectedError("link-state requires a connected topology")
    tables = {r: dijkstra(t, r) for r in t.sorted_routers()}
    traversals = 0
    cost = 0
    for r in t.sorted_routers():
        trav = _flood_traversals(t, r)
        traversals += trav
        cost += t.degree(r) * trav
    return LinkStateResult(tables, cost, traversals)


# -- distance vector ------------------------------------------------------


def _advertisement(table: DetTable) -> dict[RouterId, Fraction]:
    """What a router tells its neighbors: its table plus itself at cost 0."""
    adv = {d: e.cost for d, e in table.entries.items()}
    adv[table.router] = Fraction(0)
    return adv


def dv_round(states: dict[RouterId, DetTable], t: Topology,
             infinity_bound=DEFAULT_INFINITY_BOUND) -> tuple[dict[RouterId, DetTable], bool]:
    """One synchronous round: every router advertises its full table to all
    neighbors, every router rebuilds each entry as the min over neighbors of
    (link cost + advertised cost), capped at infinity_bound.  A router always
    trusts the fresh advertisement of its current next hop, which is what
    lets stale hearsay re-poison entries after a failure."""
    bound = Fraction(infinity_bound)
    adverts = {r: _advertisement(states[r]) for r in t.sorted_routers()}
    # destinations can outlive the routers that carry them (stale entries for
    # a removed router keep circulating: that is the count-to-infinity fuel)
    dests = set(t.routers)
    for adv in adverts.values():
        dests.update(adv)
    new_states: dict[RouterId, DetTable] = {}
    changed = False
    for r in t.sorted_routers():
        table = DetTable(r)
        # cheapest link per neighbor (multigraph: advertisement rides the best wire)
        best_link: dict[RouterId, tuple] = {}
        for link in t.out_links(r):
            key = (link.cost_forward, link.out_interface)
            if link.dst not in best_link or key < best_link[link.dst]:
                best_link[link.dst] = key
        for d in sorted(dests):
            if d == r:
                continue
            cand = None   # (cost, neighbor, iface)
            for y, (c_link, iface) in sorted(best_link.items()):
                adv_cost = adverts[y].get(d)
                if adv_cost is None:
                    continue
                cost = min(c_link + adv_cost, bound)
                if cand is None or (cost, y, iface) < cand:
                    cand = (cost, y, iface)
            if cand is None:
                continue
            # keep the current next hop on a cost tie (routes only switch for
            # a strictly better offer, RIP-style); otherwise lowest
            # (cost, neighbor, interface) wins
            prev = states[r].get(d)
            if prev is not None and t.has_interface(r, prev.out_interface):
                y_prev = t.link(r, prev.out_interface).dst
                if y_prev in best_link:
                    c_link, iface = best_link[y_prev]
                    adv_cost = adverts[y_prev].get(d)
                    if adv_cost is not None and min(c_link + adv_cost, bound) == cand[0]:
                        cand = (cand[0], y_prev, iface)
            table.set(d, cand[2], cand[0])
        old = states[r].entries
        if (set(old) != set(table.entries)
                or any(old[d].cost != table.entries[d].cost
                       or old[d].out_interface != table.entries[d].out_interface
                       for d in table.entries)):
            changed = True
        new_states[r] = table
    return new_states, changed


def fresh_dv_states(t: Topology) -> dict[RouterId, DetTable]:
    return {r: DetTable(r) for r in t.sorted_routers()}


@dataclass
class DistanceVectorResult:
    tables: dict[RouterId, DetTable]
    rounds_used: int
    per_round_message_count: list[int]
    converged: bool


def dv_message_units(states: dict[RouterId, DetTable], t: Topology) -> int:
    """One unit per (destination, cost) pair sent to one neighbor router."""
    return sum(len({l.dst for l in t.out_links(r)}) * len(states[r].entries)
               for r in t.sorted_routers())


def run_distance_vector(t: Topology, infinity_bound=DEFAULT_INFINITY_BOUND,
                        max_rounds: int = 1000,
                        states: Optional[dict[RouterId, DetTable]] = None) -> DistanceVectorResult:
    """Iterate dv_round from a cold start (or the given states) to fixpoint.
    Non-convergence within max_rounds is reported, not raised; the message
    list includes the final confirming round."""
    states = fresh_dv_states(t) if states is None else states
    per_round: list[int] = []
    rounds_used = 0
    converged = False
    for _ in range(max_rounds):
        per_round.append(dv_message_units(states, t))
        states, changed = dv_round(states, t, infinity_bound)
        if not changed:
            converged = True
            break
        rounds_used += 1
    return DistanceVectorResult(states, rounds_used, per_round, converged)


def invalidate_removed(states: dict[RouterId, DetTable], t_after: Topology,
                       removed: RouterId, infinity_bound=DEFAULT_INFINITY_BOUND
                       ) -> dict[RouterId, DetTable]:
    """Carry converged tables across a router removal: drop the removed
    router's own table and push to the bound any entry whose outgoing
    interface no longer exists."""
    bound = Fraction(infinity_bound)
    out: dict[RouterId, DetTable] = {}
    for r, table in states.items():
        if r == removed:
            continue
        nt = DetTable(r)
        live = set(t_after.interfaces(r))
        for d, e in table.entries.items():
            if e.out_interface in live:
                nt.set(d, e.out_interface, e.cost)
            else:
                nt.set(d, t_after.interfaces(r)[0], bound)
        out[r] = nt
    return out


@dataclass
class CountToInfinityTrace:
    removed: RouterId
    routers: list[RouterId]                 # surviving routers, sorted
    rows: list[tuple[int, dict[RouterId, Fraction]]]   # (round, cost-to-removed)

    def costs_at(self, router: RouterId) -> list[Fraction]:
        return [row[router] for _, row in self.rows]

    def to_csv(self) -> str:
        lines = ["round,router,destination,cost,next_hop"]
        for rnd, row in self.rows:
            for r in self.routers:
                lines.append(f"{rnd},{r},{self.removed},{row[r]},")
        return "\n".join(lines) + "\n"


def simulate_count_to_infinity(t: Topology, remove: RouterId,
                               infinity_bound=DEFAULT_INFINITY_BOUND,
                               max_rounds: int = 200) -> CountToInfinityTrace:
    """Converge DV, remove a router, and record each surviving router's cost
    to the removed destination round by round until everyone reports the
    infinity bound (or the destination was already unreachable: empty trace)."""
    if remove not in t.routers:
        raise DisconnectedError(f"router {remove} not in topology")
    bound = Fraction(infinity_bound)
    before = run_distance_vector(t, infinity_bound).tables
    if all(before[r].cost(remove) in (None, bound) for r in before if r != remove):
        return CountToInfinityTrace(remove, sorted(r for r in t.routers if r != remove), [])
    t_after = t.removed(remove)
    states = invalidate_removed(before, t_after, remove, infinity_bound)
    survivors = t_after.sorted_routers()
    rows = []
    for rnd in range(1, max_rounds + 1):
        states, changed = dv_round(states, t_after, infinity_bound)
        rows.append((rnd, {r: states[r].cost(remove) if states[r].cost(remove) is not None
                           else bound for r in survivors}))
        if all(rows[-1][1][r] >= bound for r in survivors):
            break
        if not changed:
            break
    return CountToInfinityTrace(remove, survivors, rows)


# -- path vector ----------------------------------------------------------


@dataclass
class PathVectorResult:
    tables: dict[RouterId, PathVectorTable]
    rounds_used: int
    converged: bool


def _pv_round(tables: dict[RouterId, PathVectorTable], t: Topology
              ) -> tuple[dict[RouterId, PathVectorTable], bool]:
    """One synchronous round: each router advertises its best route per
    destination (plus the trivial route to itself); receivers prepend
    themselves, discard any vector already containing them, and rebuild
    their per-neighbor stores from this round's advertisements."""
    adverts: dict[RouterId, dict[RouterId, PathVectorRoute]] = {}
    for r in t.sorted_routers():
        adv = {d: tables[r].best(d) for d in tables[r].destinations()}
        adv[r] = PathVectorRoute(Fraction(0), (r,))
        adverts[r] = adv
    new_tables: dict[RouterId, PathVectorTable] = {}
    changed = False
    for r in t.sorted_routers():
        nt = PathVectorTable(r)
        best_link: dict[RouterId, tuple] = {}
        for link in t.out_links(r):
            key = (link.cost_forward, link.out_interface)
            if link.dst not in best_link or key < best_link[link.dst]:
                best_link[link.dst] = key
        for y, (c_link, _) in sorted(best_link.items()):
            for d, route in adverts[y].items():
                if route is None or d == r or r in route.path:
                    continue
                nt.insert(d, y, PathVectorRoute(route.cost + c_link, (r,) + route.path))
        olds = {d: tables[r].best(d) for d in tables[r].destinations()}
        news = {d: nt.best(d) for d in nt.destinations()}
        if olds != news:
            changed = True
        new_tables[r] = nt
    return new_tables, changed


def run_path_vector(t: Topology, max_rounds: int = 1000,
                    tables: Optional[dict[RouterId, PathVectorTable]] = None) -> PathVectorResult:
    """Iterate synchronous path-vector rounds to fixpoint; selection is by
    total path cost with lexicographic-path tie-break."""
    if not is_connected(t):
        raise DisconnectedError("path-vector requires a connected topology")
    tables = tables if tables is not None else {r: PathVectorTable(r) for r in t.sorted_routers()}
    rounds_used = 0
    converged = False
    for _ in range(max_rounds):
        tables, changed = _pv_round(tables, t)
        if not changed:
            converged = True
            break
        rounds_used += 1
    return PathVectorResult(tables, rounds_used, converged)


@dataclass
class PathVectorFailureTrace:
    removed: RouterId
    rows: list[tuple[int, dict[RouterId, Optional[Fraction]]]]  # None = unreachable
    rounds_to_withdraw: int


def path_vector_failure_trace(t: Topology, remove: RouterId,
                              max_rounds: int = 200) -> PathVectorFailureTrace:
    """Converge path-vector, remove a router, and watch the withdrawal
    propagate.  Loop filtering means costs never count up: entries simply
    disappear, within a number of rounds bounded by the hop distance."""
    before = run_path_vector(t).tables
    t_after = t.removed(remove)
    survivors = t_after.sorted_routers()
    tables = {r: before[r] for r in survivors}
    # only the vanished wire is locally observable: drop routes whose next
    # hop was the removed router and let the withdrawal propagate in rounds
    for r in survivors:
        nt = PathVectorTable(r)
        for d in tables[r].destinations():
            for rt in tables[r].routes(d):
                next_hop = rt.path[1] if len(rt.path) > 1 else d
                if next_hop != remove:
                    nt.insert(d, next_hop, rt)
        tables[r] = nt
    rows = []
    rounds_to_withdraw = 0
    for rnd in range(1, max_rounds + 1):
        tables, changed = _pv_round(tables, t_after)
        snapshot = {}
        for r in survivors:
            best = tables[r].best(remove)
            snapshot[r] = None if best is None else best.cost
        rows.append((rnd, snapshot))
        if all(v is None for v in snapshot.values()):
            rounds_to_withdraw = rnd
            break
        if not changed:
            rounds_to_withdraw = rnd
            break
    return PathVectorFailureTrace(remove, rows, rounds_to_withdraw)


def round_trace_csv(result_rows, destination) -> str:
    """CSV form `round,router,destination,cost,next_hop` of a round trace."""
    lines = ["round,router,destination,cost,next_hop"]
    for rnd, row in result_rows:
        for r in sorted(row):
            v = row[r]
            lines.append(f"{rnd},{r},{destination},{'' if v is None else v},")
    return "\n".join(lines) + "\n"
