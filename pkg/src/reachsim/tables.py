"""Routing-table types shared by all protocols: deterministic next-hop tables,
probability tables, Q-value tables, path-vector tables and the forwarding
policies that pick an outgoing interface from a probability row."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .topology import InterfaceId, RouterId, Topology

NORM_TOL = 1e-9


class ForwardPolicy(enum.Enum):
    ARGMAX = "argmax"
    PROPORTIONAL = "proportional"
    UNIFORM = "uniform"
    DEFLECTION = "deflection"


class TableError(ValueError):
    pass


@dataclass
class DetEntry:
    out_interface: InterfaceId
    cost: Fraction


class DetTable:
    """Deterministic table for one router: destination -> (interface, cost)."""

    def __init__(self, router: RouterId):
        self.router = router
        self.entries: dict[RouterId, DetEntry] = {}

    def set(self, dest: RouterId, iface: InterfaceId, cost) -> None:
        if dest == self.router:
            raise TableError("no entry for self")
        if cost < 0:
            raise TableError("negative cost")
        self.entries[dest] = DetEntry(iface, Fraction(cost))

    def get(self, dest: RouterId) -> Optional[DetEntry]:
        return self.entries.get(dest)

    def cost(self, dest: RouterId) -> Optional[Fraction]:
        e = self.entries.get(dest)
        return None if e is None else e.cost

    def copy(self) -> "DetTable":
        t = DetTable(self.router)
        t.entries = {d: DetEntry(e.out_interface, e.cost) for d, e in self.entries.items()}
        return t


class ProbTable:
    """Probability table for one router: destination -> probability vector
    over the router's outgoing interfaces (in topology interface order)."""

    def __init__(self, topology: Topology, router: RouterId):
        if topology.degree(router) < 1:
            raise TableError(f"router {router} has no interfaces")
        self.router = router
        self.interfaces = list(topology.interfaces(router))
        n = len(self.interfaces)
        self.rows: dict[RouterId, list[float]] = {
            d: [1.0 / n] * n for d in topology.sorted_routers() if d != router}

    def row(self, dest: RouterId) -> list[float]:
        return self.rows[dest]

    def set_row(self, dest: RouterId, probs: Sequence[float]) -> None:
        if len(probs) != len(self.interfaces):
            raise TableError("row length does not match interface count")
        if any(p < 0 for p in probs):
            raise TableError("negative probability")
        if abs(sum(probs) - 1.0) > NORM_TOL:
            raise TableError("row does not sum to 1")
        self.rows[dest] = list(probs)

    def renormalize(self, dest: RouterId) -> None:
        row = self.rows[dest]
        s = sum(row)
        if s <= 0:
            raise TableError("cannot renormalize an all-zero row")
        self.rows[dest] = [p / s for p in row]

    def copy(self) -> "ProbTable":
        t = object.__new__(ProbTable)
        t.router = self.router
        t.interfaces = list(self.interfaces)
        t.rows = {d: list(r) for d, r in self.rows.items()}
        return t


def init_uniform(topology: Topology, router: RouterId) -> ProbTable:
    """Exactly uniform rows (1/degree) for every destination of one router."""
    return ProbTable(topology, router)


def init_uniform_tables(topology: Topology) -> dict[RouterId, ProbTable]:
    return {r: init_uniform(topology, r) for r in topology.sorted_routers()}


class QTable:
    """Per-router Q estimates: destination -> vector of cost-metric estimates
    (one per interface, same order as ProbTable rows)."""

    def __init__(self, topology: Topology, router: RouterId, initial=0):
        if initial < 0:
            raise TableError("Q values must be nonnegative")
        self.router = router
        self.interfaces = list(topology.interfaces(router))
        self.rows: dict[RouterId, list] = {
            d: [initial] * len(self.interfaces)
            for d in topology.sorted_routers() if d != router}

    def row(self, dest: RouterId) -> list:
        return self.rows[dest]

    def best_index(self, dest: RouterId) -> int:
        """Index of the best (lowest-estimate) interface, lowest index on ties."""
        row = self.rows[dest]
        return min(range(len(row)), key=lambda i: (row[i], i))

    def best_value(self, dest: RouterId):
        return self.rows[dest][self.best_index(dest)]


@dataclass(frozen=True)
class PathVectorRoute:
    cost: Fraction
    path: tuple[RouterId, ...]   # starts at the owning router, ends at dest

    def sort_key(self):
        return (self.cost, self.path)


class PathVectorTable:
    """Per-router list of explicit loop-free paths per destination, ordered by
    (total cost, lexicographic path); the head of the list is advertised."""

    def __init__(self, router: RouterId):
        self.router = router
        # dest -> advertising neighbor -> route; one live route per neighbor
        self._routes: dict[RouterId, dict[RouterId, PathVectorRoute]] = {}

    def insert(self, dest: RouterId, neighbor: RouterId, route: PathVectorRoute) -> None:
        if len(set(route.path)) != len(route.path):
            raise TableError("path-vector contains a repeated router")
        self._routes.setdefault(dest, {})[neighbor] = route

    def routes(self, dest: RouterId) -> list[PathVectorRoute]:
        return sorted(self._routes.get(dest, {}).values(), key=PathVectorRoute.sort_key)

    def best(self, dest: RouterId) -> Optional[PathVectorRoute]:
        rs = self.routes(dest)
        return rs[0] if rs else None

    def destinations(self) -> list[RouterId]:
        return sorted(d for d, by_n in self._routes.items() if by_n)


def choose_interface(row: Sequence[float], policy: ForwardPolicy, rng=None,
                     exclude: Optional[set[int]] = None) -> int:
    """Pick an interface index from a probability row.

    argmax is purely deterministic (lowest index among maxima); proportional
    samples by the probabilities renormalized over non-excluded entries;
    uniform ignores the row; deflection takes the argmax if it is free and
    otherwise a uniform pick among free interfaces.  `exclude` holds indices
    that may not be used (busy links, pruned interfaces)."""
    n = len(row)
    excl = exclude or set()
    allowed = [i for i in range(n) if i not in excl]
    if not allowed:
        raise TableError("all interfaces excluded")
    if policy is ForwardPolicy.ARGMAX:
        return min(allowed, key=lambda i: (-row[i], i))
    if policy is ForwardPolicy.DEFLECTION:
        best = min(range(n), key=lambda i: (-row[i], i))
        if best in allowed:
            return best
        return allowed[rng.randrange(len(allowed))]
    if policy is ForwardPolicy.UNIFORM:
        return allowed[rng.randrange(len(allowed))]
    if policy is ForwardPolicy.PROPORTIONAL:
        total = sum(row[i] for i in allowed)
        if total <= 0:
            # degenerate all-zero mass over the allowed set: fall back to uniform
            return allowed[rng.randrange(len(allowed))]
        x = rng.random() * total
        acc = 0.0
        for i in allowed:
            acc += row[i]
            if x < acc:
                return i
        return allowed[-1]
    raise TableError(f"unknown policy {policy!r}")


def prob_from_q(q_row: Sequence) -> list[float]:
    """Probability vector i -> Q_i / sum(Q); rejects all-zero rows."""
    if any(q < 0 for q in q_row):
        raise TableError("negative Q value")
    total = sum(q_row)
    if total == 0:
        raise TableError("all-zero Q row")
    return [float(q) / float(total) for q in q_row]


def dump_prob_tables(tables: dict[RouterId, ProbTable]) -> str:
    """Golden-test dump: one line per (router, destination) with probabilities
    printed to 6 decimals."""
    lines = []
    for r in sorted(tables):
        table = tables[r]
        for d in sorted(table.rows):
            vals = ",".join(f"{p:.6f}" for p in table.rows[d])
            lines.append(f"r={r} d={d} p=[{vals}]")
    return "\n".join(lines) + "\n"


def prob_view_of_det(topology: Topology, det: dict[RouterId, DetTable]) -> dict[RouterId, ProbTable]:
    """One-hot probability view of deterministic tables (for coverage math).
    Destinations without an entry keep an all-zero row."""
    view: dict[RouterId, ProbTable] = {}
    for r, table in det.items():
        pt = ProbTable(topology, r)
        for d in list(pt.rows):
            pt.rows[d] = [0.0] * len(pt.interfaces)
            e = table.get(d)
            if e is not None:
                pt.rows[d][topology.iface_index(r, e.out_interface)] = 1.0
        view[r] = pt
    return view
