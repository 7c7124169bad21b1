"""Destructive probabilistic protocols: Q-value updates, ant-driven
probability reinforcement (uniform and regular ants with backward learning),
stack-carrying backward ants with cycle discard, and negative reinforcement
at three qualification levels."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Optional

from .tables import ForwardPolicy, ProbTable, choose_interface, init_uniform_tables
from .topology import (InterfaceId, RouterId, Topology, diameter,
                       enumerate_loop_free_paths)


class RLError(ValueError):
    pass


# -- update algebra -------------------------------------------------------


def q_update(q, neighbor_best, zeta, eta):
    """Relax a Q estimate toward (neighbor's best estimate + local queue and
    transmission cost): q + eta * ((neighbor_best + zeta) - q).

    Exact over rationals; eta must lie in (0, 1]."""
    if not (0 < eta <= 1):
        raise RLError(f"eta must be in (0, 1], got {eta}")
    if q < 0 or neighbor_best < 0 or zeta < 0:
        raise RLError("Q inputs must be nonnegative")
    return q + eta * ((neighbor_best + zeta) - q)


def ant_prob_update(row, k: int, delta):
    """Reinforce entry k of a probability row:
    p_k -> (p_k + d) / (1 + d), every other p_j -> p_j / (1 + d)."""
    if not (0 <= k < len(row)):
        raise RLError(f"interface index {k} out of range")
    if delta < 0:
        raise RLError("delta must be nonnegative")
    denom = 1.0 + delta
    return [(p + delta) / denom if i == k else p / denom for i, p in enumerate(row)]


@dataclass(frozen=True)
class CostFunction:
    """Reinforcement size: delta = gain / f(cost), with f non-decreasing.
    Kinds: identity f(c)=c, affine f(c)=a*c+b, power f(c)=c**gamma."""

    kind: str = "affine"
    a: float = 1.0
    b: float = 1.0
    gamma: float = 1.0
    gain: float = 1.0

    def f(self, c: float) -> float:
        if self.kind == "identity":
            return c
        if self.kind == "affine":
            return self.a * c + self.b
        if self.kind == "power":
            return c ** self.gamma
        raise RLError(f"unknown cost function kind {self.kind!r}")

    def delta(self, c: float) -> float:
        fc = self.f(c)
        if fc <= 0:
            raise RLError(f"f({c}) = {fc} is not positive")
        return self.gain / fc


def parse_cost_function(spec: str, gain: float = 1.0) -> CostFunction:
    """Parse 'identity', 'affine:a,b' or 'power:gamma'."""
    kind, _, rest = spec.partition(":")
    params = [float(p) for p in rest.split(",") if p.strip()] if rest else []
    if kind == "identity" and not params:
        return CostFunction("identity", gain=gain)
    if kind == "affine" and len(params) == 2:
        return CostFunction("affine", a=params[0], b=params[1], gain=gain)
    if kind == "power" and len(params) == 1:
        return CostFunction("power", gamma=params[0], gain=gain)
    raise RLError(f"bad cost function spec {spec!r}")


# -- ants -----------------------------------------------------------------

UNIFORM = "uniform"
REGULAR = "regular"


@dataclass
class Ant:
    source: RouterId
    destination: RouterId
    mode: str = UNIFORM
    cost: float = 0.0
    hop_budget: int = 64
    # backward ants carry (router, cost to reach it, chosen interface)
    stack: Optional[list[tuple[RouterId, float, InterfaceId]]] = None


@dataclass
class ReinforcementUpdate:
    router: RouterId
    row_dest: RouterId
    interface: InterfaceId
    delta: float
    p_after: float


@dataclass
class ForwardOutcome:
    update: Optional[ReinforcementUpdate]
    action: str                       # "forward" | "delivered" | "discarded"
    out_interface: Optional[InterfaceId] = None


# systems nudge probabilities gently by default; the paper's updates are
# "slight" and large steps make the multiplicative dynamics needlessly noisy
DEFAULT_ANT_GAIN = 0.1


def default_ant_cost_fn() -> CostFunction:
    return CostFunction(gain=DEFAULT_ANT_GAIN)


def default_hop_budget(t: Topology) -> int:
    """Uniform ants on loopy graphs walk long; give them 4x the diameter."""
    return max(4, 4 * diameter(t))


class AntSystem:
    """Forward ants with backward learning: each arrival reinforces the
    receiving router's row for the ant's *source* along the arrival
    interface, using the accumulated reverse-direction cost."""

    def __init__(self, topology: Topology, tables=None,
                 cost_fn: Optional[CostFunction] = None, hop_budget: Optional[int] = None):
        self.topology = topology
        self.tables: dict[RouterId, ProbTable] = tables or init_uniform_tables(topology)
        self.cost_fn = cost_fn if cost_fn is not None else default_ant_cost_fn()
        self.hop_budget = hop_budget if hop_budget is not None else default_hop_budget(topology)
        self.delivered = 0
        self.discarded = 0
        self.updates_applied = 0

    def make_ant(self, source, destination, mode) -> Ant:
        return Ant(source, destination, mode, 0.0, self.hop_budget)

    def process_forward_ant(self, router: RouterId, ant: Ant,
                            arrival_interface: Optional[InterfaceId], rng) -> ForwardOutcome:
        """Handle one ant arrival: account the reverse cost of the arrival
        link, reinforce the row for the ant's source, then deliver, discard
        (budget) or pick the next interface per the ant's mode."""
        update = None
        if arrival_interface is not None:
            link_in = self.topology.link(router, arrival_interface)
            ant.cost += float(link_in.cost_reverse)
            if router != ant.source:
                delta = self.cost_fn.delta(ant.cost)
                k = self.topology.iface_index(router, arrival_interface)
                table = self.tables[router]
                row = ant_prob_update(table.row(ant.source), k, delta)
                table.rows[ant.source] = row
                update = ReinforcementUpdate(router, ant.source, arrival_interface,
                                             delta, row[k])
                self.updates_applied += 1
        if router == ant.destination:
            self.delivered += 1
            return ForwardOutcome(update, "delivered")
        if ant.hop_budget <= 0:
            self.discarded += 1
            return ForwardOutcome(update, "discarded")
        ant.hop_budget -= 1
        if ant.mode == REGULAR:
            row = self.tables[router].row(ant.destination)
            k = choose_interface(row, ForwardPolicy.PROPORTIONAL, rng)
        else:
            k = choose_interface([0.0] * self.topology.degree(router),
                                 ForwardPolicy.UNIFORM, rng)
        iface = self.topology.interfaces(router)[k]
        return ForwardOutcome(update, "forward", iface)

    def walk(self, ant: Ant, rng) -> str:
        """Drive one ant from its source until delivery or discard."""
        at = ant.source
        arrival = None
        while True:
            out = self.process_forward_ant(at, ant, arrival, rng)
            if out.action != "forward":
                return out.action
            link = self.topology.link(at, out.out_interface)
            at = link.dst
            arrival = link.peer_interface

    def train(self, n_ants: int, seed: int, mix: float = 1.0,
              dest_weights: Optional[dict[RouterId, float]] = None) -> "AntSystem":
        """Release n_ants sequentially: uniform random source, destination per
        dest_weights (uniform by default), mode uniform with probability mix."""
        rng = random.Random(seed)
        routers = self.topology.sorted_routers()
        for _ in range(n_ants):
            src = routers[rng.randrange(len(routers))]
            dst = _draw_destination(routers, src, dest_weights, rng)
            mode = UNIFORM if rng.random() < mix else REGULAR
            self.walk(self.make_ant(src, dst, mode), rng)
        return self


def _draw_destination(routers, src, weights, rng) -> RouterId:
    if weights:
        pool = [(r, w) for r, w in sorted(weights.items()) if r != src and w > 0]
        total = sum(w for _, w in pool)
        x = rng.random() * total
        acc = 0.0
        for r, w in pool:
            acc += w
            if x < acc:
                return r
        return pool[-1][0]
    while True:
        d = routers[rng.randrange(len(routers))]
        if d != src:
            return d


class BackwardAntSystem:
    """Stack-carrying ants: the forward walk records (router, cost so far,
    chosen interface) and applies no updates; reaching the destination spawns
    a backward pass that reinforces the forward-direction choice at every
    stacked router with a delta from the cost still to go.  Any revisit on
    the forward walk discards the ant."""

    def __init__(self, topology: Topology, tables=None,
                 cost_fn: Optional[CostFunction] = None, hop_budget: Optional[int] = None):
        self.topology = topology
        self.tables: dict[RouterId, ProbTable] = tables or init_uniform_tables(topology)
        self.cost_fn = cost_fn if cost_fn is not None else default_ant_cost_fn()
        self.hop_budget = hop_budget if hop_budget is not None else default_hop_budget(topology)
        self.delivered = 0
        self.discarded_cycle = 0
        self.discarded_budget = 0

    def walk_forward(self, ant: Ant, rng) -> Optional[Ant]:
        """Forward phase.  Returns the ant ready for its backward pass, or
        None if it was discarded (cycle or budget)."""
        ant.stack = []
        at = ant.source
        visited = {at}
        budget = ant.hop_budget
        while at != ant.destination:
            if budget <= 0:
                self.discarded_budget += 1
                return None
            budget -= 1
            if ant.mode == REGULAR:
                row = self.tables[at].row(ant.destination)
                k = choose_interface(row, ForwardPolicy.PROPORTIONAL, rng)
            else:
                k = choose_interface([0.0] * self.topology.degree(at),
                                     ForwardPolicy.UNIFORM, rng)
            link = self.topology.out_links(at)[k]
            ant.stack.append((at, ant.cost, link.out_interface))
            ant.cost += float(link.cost_forward)
            at = link.dst
            if at in visited:
                self.discarded_cycle += 1
                return None
            visited.add(at)
        return ant

    def process_backward_ant(self, ant: Ant) -> list[ReinforcementUpdate]:
        """Apply the backward pass of an ant that reached its destination.
        A stack with a repeated router means the forward walk cycled: the ant
        is discarded with zero updates.  Structurally broken stacks raise."""
        if ant.stack is None:
            raise RLError("backward ant without a stack")
        routers_seen = [r for r, _, _ in ant.stack]
        if ant.destination in routers_seen or len(set(routers_seen)) != len(routers_seen):
            self.discarded_cycle += 1
            return []
        updates = []
        prev_cost = None
        for router, cost_at, iface in ant.stack:
            if prev_cost is not None and cost_at < prev_cost:
                raise RLError("malformed stack: recorded costs decrease")
            prev_cost = cost_at
            if iface not in self.topology.interfaces(router):
                raise RLError(f"malformed stack: router {router} has no interface {iface!r}")
        for router, cost_at, iface in reversed(ant.stack):
            cost_to_go = ant.cost - cost_at
            delta = self.cost_fn.delta(cost_to_go)
            k = self.topology.iface_index(router, iface)
            table = self.tables[router]
            row = ant_prob_update(table.row(ant.destination), k, delta)
            table.rows[ant.destination] = row
            updates.append(ReinforcementUpdate(router, ant.destination, iface,
                                               delta, row[k]))
        self.delivered += 1
        return updates

    def run_ant(self, source, destination, mode, rng) -> list[ReinforcementUpdate]:
        ant = Ant(source, destination, mode, 0.0, self.hop_budget, stack=[])
        done = self.walk_forward(ant, rng)
        if done is None:
            return []
        return self.process_backward_ant(done)

    def train(self, n_ants: int, seed: int, mix: float = 1.0,
              dest_weights=None) -> "BackwardAntSystem":
        rng = random.Random(seed)
        routers = self.topology.sorted_routers()
        for _ in range(n_ants):
            src = routers[rng.randrange(len(routers))]
            dst = _draw_destination(routers, src, dest_weights, rng)
            mode = UNIFORM if rng.random() < mix else REGULAR
            self.run_ant(src, dst, mode, rng)
        return self


def train_uniform_ants(t: Topology, n_ants: int, seed: int, **kw) -> AntSystem:
    return AntSystem(t, **kw).train(n_ants, seed, mix=1.0)


def train_regular_ants(t: Topology, n_ants: int, seed: int, **kw) -> AntSystem:
    return AntSystem(t, **kw).train(n_ants, seed, mix=0.0)


# -- negative reinforcement -----------------------------------------------


class NegQualifier(enum.Enum):
    DESTINATION_ONLY = "destination_only"
    SOURCE_DESTINATION = "source_destination"
    SOURCE_DESTINATION_INCOMING_LINK = "source_destination_incoming_link"


@dataclass(frozen=True)
class NegSignal:
    """'Destination `dest` is definitely not reachable through `interface`',
    addressed to `router` and qualified (per level) by the probe's source and
    by the interface the probe arrived on at `router` (None at its origin)."""

    router: RouterId
    dest: RouterId
    source: RouterId
    arrival_interface: Optional[InterfaceId]
    interface: InterfaceId


@dataclass
class SignalRecord:
    signal: NegSignal
    applied: bool


class NegTable:
    """Probability rows keyed by the qualification level: destination alone,
    (source, destination), or (source, destination, arrival interface)."""

    def __init__(self, topology: Topology, router: RouterId, level: NegQualifier):
        self.topology = topology
        self.router = router
        self.level = level
        self.interfaces = list(topology.interfaces(router))
        self.rows: dict[tuple, list[float]] = {}

    def key(self, dest, source=None, arrival_interface=None) -> tuple:
        if self.level is NegQualifier.DESTINATION_ONLY:
            return (dest,)
        if self.level is NegQualifier.SOURCE_DESTINATION:
            return (source, dest)
        return (source, dest, arrival_interface)

    def row(self, dest, source=None, arrival_interface=None) -> list[float]:
        k = self.key(dest, source, arrival_interface)
        if k not in self.rows:
            n = len(self.interfaces)
            self.rows[k] = [1.0 / n] * n
        return self.rows[k]

    def apply_signal(self, sig: NegSignal) -> bool:
        """Zero the signalled interface in the qualified row and renormalize.
        Rejected (False) when that would empty the row: soft reachability
        must never lose its last usable interface to an instruction."""
        row = self.row(sig.dest, sig.source, sig.arrival_interface)
        k = self.topology.iface_index(self.router, sig.interface)
        rest = sum(p for i, p in enumerate(row) if i != k)
        if rest <= 0:
            return False
        newrow = [0.0 if i == k else p / rest for i, p in enumerate(row)]
        self.rows[self.key(sig.dest, sig.source, sig.arrival_interface)] = newrow
        return True


def negative_reinforce(table: NegTable, qualifier: NegQualifier, signal: NegSignal) -> bool:
    """Apply a negative-reinforcement signal to a table; the table must be
    keyed at the given qualification level.  Returns False on rejection."""
    if table.level is not qualifier:
        raise RLError("table level does not match the signal qualifier")
    return table.apply_signal(signal)


class NegReinforcementSystem:
    """Uniformly exploring probe ants with full hop history; a probe that
    reaches a non-destination leaf or revisits a router triggers a negative
    reinforcement signal back to the router that forwarded it."""

    def __init__(self, topology: Topology, level: NegQualifier,
                 hop_budget: Optional[int] = None):
        self.topology = topology
        self.level = level
        self.hop_budget = hop_budget if hop_budget is not None else default_hop_budget(topology)
        self.tables = {r: NegTable(topology, r, level) for r in topology.sorted_routers()}
        self.records: list[SignalRecord] = []
        self.delivered = 0
        self.discarded = 0

    def _emit(self, sig: NegSignal) -> None:
        applied = self.tables[sig.router].apply_signal(sig)
        self.records.append(SignalRecord(sig, applied))

    def probe(self, source: RouterId, dest: RouterId, rng) -> str:
        """Walk one probe ant; returns 'delivered' or 'discarded'."""
        at = source
        arrival: Optional[InterfaceId] = None   # at current router
        visited = {source}
        # (router, its arrival interface, chosen out interface) per hop
        hops: list[tuple[RouterId, Optional[InterfaceId], InterfaceId]] = []
        for _ in range(self.hop_budget):
            k = rng.randrange(self.topology.degree(at))
            link = self.topology.out_links(at)[k]
            hops.append((at, arrival, link.out_interface))
            nxt = link.dst
            nxt_arrival = link.peer_interface
            if nxt == dest:
                self.delivered += 1
                return "delivered"
            prev_router, prev_arrival, prev_out = hops[-1]
            if nxt in visited:
                # the revisited router tells the forwarding router its exit
                # cannot lead to the destination
                self._emit(NegSignal(prev_router, dest, source, prev_arrival, prev_out))
                self.discarded += 1
                return "discarded"
            if self.topology.degree(nxt) == 1:
                # non-destination leaf: definitive dead end
                self._emit(NegSignal(prev_router, dest, source, prev_arrival, prev_out))
                self.discarded += 1
                return "discarded"
            visited.add(nxt)
            at, arrival = nxt, nxt_arrival
        self.discarded += 1
        return "discarded"

    def run_probes(self, source: RouterId, dest: RouterId, n_ants: int, seed: int) -> None:
        rng = random.Random(seed)
        for _ in range(n_ants):
            self.probe(source, dest, rng)

    def applied_signals(self) -> list[NegSignal]:
        seen = []
        for rec in self.records:
            if rec.applied and rec.signal not in seen:
                seen.append(rec.signal)
        return seen


def signal_is_false_negative(t: Topology, sig: NegSignal, level: NegQualifier) -> bool:
    """Check a zeroed interface against the loop-free-path oracle: True when
    some loop-free path consistent with the signal's qualification does use
    that interface (the signal forbade a legitimate route)."""
    if level is NegQualifier.DESTINATION_ONLY:
        for path in enumerate_loop_free_paths(t, sig.router, sig.dest):
            if path.hops and path.hops[0] == (sig.router, sig.interface):
                return True
        return False
    for path in enumerate_loop_free_paths(t, sig.source, sig.dest):
        for i, (r, iface) in enumerate(path.hops):
            if r != sig.router or iface != sig.interface:
                continue
            if level is NegQualifier.SOURCE_DESTINATION:
                return True
            # incoming-link level: the path must also enter via the same
            # interface the probe arrived on (None = the path starts here)
            if i == 0:
                entered = None
            else:
                prev_r, prev_iface = path.hops[i - 1]
                entered = t.link(prev_r, prev_iface).peer_interface
            if entered == sig.arrival_interface:
                return True
    return False
