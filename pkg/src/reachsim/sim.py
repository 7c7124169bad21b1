"""Deterministic seeded discrete-event engine: stable-priority event queue,
per-interface FIFO transmission queues, data and ant traffic generators, and
pluggable protocol engines (deterministic rounds, Q-routing, ants, negative
reinforcement)."""

from __future__ import annotations

import hashlib
import heapq
import random
from dataclasses import dataclass, field
from typing import Optional, Union

from . import deterministic as det
from .metrics import (MetricsReport, convergence_time, delay_percentiles,
                      loop_statistics, reachability_coverage, split_ratio)
from .rl import (REGULAR, UNIFORM, Ant, AntSystem, BackwardAntSystem, CostFunction,
                 NegQualifier, NegReinforcementSystem, default_ant_cost_fn, q_update)
from .tables import (DetTable, ForwardPolicy, PathVectorTable, ProbTable, QTable,
                     TableError, choose_interface, prob_from_q, prob_view_of_det)
from .topology import (DisconnectedError, GeneratorSpec, InterfaceId, RouterId,
                       Topology, diameter, generate, is_connected)


class ConfigError(ValueError):
    pass


# -- configuration ---------------------------------------------------------


@dataclass
class AntsConfig:
    mix: float = 1.0                  # fraction of uniform ants (rest regular)
    rate: float = 0.1                 # ants per ms (exponential interarrival)
    dest_weights: Optional[dict[RouterId, float]] = None   # None = uniform
    cost_fn: CostFunction = field(default_factory=default_ant_cost_fn)
    backward: bool = False            # stack-carrying ants with cycle discard
    initial_tables: Optional[dict[RouterId, ProbTable]] = None
    kind: str = "ants"


@dataclass
class QRoutingConfig:
    eta: float = 0.5
    variant: str = "argmax"           # "argmax" (deterministic) or "ratio"
    zeta_model: str = "measured"      # queue wait + transmission, or "service_only"
    initial_q: float = 0.0
    initial_tables: Optional[dict[RouterId, QTable]] = None
    kind: str = "q_routing"


@dataclass
class NegReinfConfig:
    level: NegQualifier = NegQualifier.DESTINATION_ONLY
    rate: float = 0.1                 # probe ants per ms
    probe_pairs: Optional[list[tuple[RouterId, RouterId]]] = None  # None = random
    kind: str = "neg_reinforcement"


@dataclass
class DeterministicConfig:
    kind: str = "distance_vector"     # link_state | distance_vector | path_vector
    round_interval: float = 1.0       # ms between synchronous rounds
    infinity_bound: int = det.DEFAULT_INFINITY_BOUND


ProtocolConfig = Union[AntsConfig, QRoutingConfig, NegReinfConfig, DeterministicConfig]


@dataclass
class ScenarioConfig:
    topology: Union[Topology, GeneratorSpec, str]
    protocol: ProtocolConfig
    duration_ms: float
    seed: int = 0
    forward_policy: ForwardPolicy = ForwardPolicy.PROPORTIONAL
    traffic: dict[tuple[RouterId, RouterId], float] = field(default_factory=dict)
    delay: Union[str, float] = "cost"     # "cost" or a fixed per-hop delay in ms
    hop_budget: int = 64
    ant_hop_budget: Optional[int] = None  # None = 4 x diameter
    snapshot_interval: Optional[float] = None
    split_first_hop: Optional[tuple[RouterId, InterfaceId]] = None
    ants_share_fifo: bool = True
    trace_updates: bool = False
    remove_router_at: Optional[tuple[float, RouterId]] = None
    convergence_delta: float = 0.05
    convergence_window: float = 0.0
    name: str = ""


def resolve_topology(source: Union[Topology, GeneratorSpec, str]) -> Topology:
    if isinstance(source, Topology):
        return source
    return generate(source)


EVENT_KINDS = ("packet_arrival", "ant_arrival", "ant_generation",
               "data_generation", "round_tick", "scenario_end", "router_removal")


@dataclass
class Event:
    time: float
    seq: int
    kind: str
    payload: dict


@dataclass
class Packet:
    pid: int
    source: RouterId
    destination: RouterId
    hop_budget: int
    created_at: float
    trace: list[RouterId]
    iface_trace: list[InterfaceId] = field(default_factory=list)
    delivered_at: Optional[float] = None

    def hops_made(self) -> int:
        return len(self.trace) - 1


@dataclass
class PacketRecord:
    source: RouterId
    destination: RouterId
    trace: tuple[RouterId, ...]
    iface_trace: tuple[InterfaceId, ...]
    delivered: bool
    created_at: float
    delivered_at: Optional[float]


@dataclass
class RunResult:
    report: MetricsReport
    prob_tables: Optional[dict[RouterId, ProbTable]]
    records: list[PacketRecord]
    snapshots: list[tuple[float, dict]]
    update_trace: list
    q_tables: Optional[dict[RouterId, QTable]] = None


# -- protocol engines ------------------------------------------------------


class _AntProtocol:
    def __init__(self, engine: "Engine", cfg: AntsConfig):
        self.engine = engine
        self.cfg = cfg
        budget = engine.ant_hop_budget
        tables = None
        if cfg.initial_tables is not None:
            tables = {r: t.copy() for r, t in cfg.initial_tables.items()}
        cls = BackwardAntSystem if cfg.backward else AntSystem
        self.system = cls(engine.topology, tables=tables, cost_fn=cfg.cost_fn,
                          hop_budget=budget)

    def start(self):
        if self.cfg.rate > 0:
            self.engine.schedule(self.engine.rng.expovariate(self.cfg.rate),
                                 "ant_generation", {})

    def data_row(self, router, packet, arrival_iface):
        return self.system.tables[router].row(packet.destination)

    def on_packet_arrival(self, router, packet, payload):
        pass   # data traffic never mutates ant tables

    def on_ant_generation(self, now):
        eng = self.engine
        routers = eng.topology.sorted_routers()
        src = routers[eng.rng.randrange(len(routers))]
        dst = _draw_dest(routers, src, self.cfg.dest_weights, eng.rng)
        mode = UNIFORM if eng.rng.random() < self.cfg.mix else REGULAR
        eng.ants_generated += 1
        if self.cfg.backward:
            ant = Ant(src, dst, mode, 0.0, eng.ant_hop_budget, stack=[])
            ant_state = {"ant": ant, "visited": {src}}
            self._forward_hop(now, src, ant_state)
        else:
            ant = self.system.make_ant(src, dst, mode)
            self._drive(now, src, None, ant)
        if self.cfg.rate > 0:
            eng.schedule(now + eng.rng.expovariate(self.cfg.rate), "ant_generation", {})

    # forward-ant (backward learning) path
    def _drive(self, now, router, arrival_iface, ant):
        out = self.system.process_forward_ant(router, ant, arrival_iface, self.engine.rng)
        if out.update is not None and self.engine.cfg.trace_updates:
            self.engine.update_trace.append(
                (now, out.update.router, out.update.row_dest,
                 out.update.interface, out.update.delta, out.update.p_after))
        if out.action == "forward":
            self.engine.send_ant(now, router, out.out_interface,
                                 {"ant": ant})

    def on_ant_arrival(self, now, payload):
        if payload.get("phase") == "backward":
            self._backward_hop(now, payload)
        elif self.cfg.backward:
            self._forward_hop(now, payload["router"], payload,
                              arrival_iface=payload.get("arrival_iface"))
        else:
            self._drive(now, payload["router"], payload.get("arrival_iface"),
                        payload["ant"])

    # stack-carrying (backward-ant) path
    def _forward_hop(self, now, router, payload, arrival_iface=None):
        ant = payload["ant"]
        visited = payload["visited"]
        sys = self.system
        if arrival_iface is not None:     # every hop after the origin
            if router in visited:
                sys.discarded_cycle += 1
                return
            visited.add(router)
        if router == ant.destination:
            updates = sys.process_backward_ant(ant)
            if not updates:
                return
            # retrace the path applying one update per reverse hop
            self._schedule_backward(now, router, list(reversed(ant.stack)), updates, 0)
            return
        if ant.hop_budget <= 0:
            sys.discarded_budget += 1
            return
        ant.hop_budget -= 1
        if ant.mode == REGULAR:
            row = sys.tables[router].row(ant.destination)
            k = choose_interface(row, ForwardPolicy.PROPORTIONAL, self.engine.rng)
        else:
            k = choose_interface([0.0] * self.engine.topology.degree(router),
                                 ForwardPolicy.UNIFORM, self.engine.rng)
        link = self.engine.topology.out_links(router)[k]
        ant.stack.append((router, ant.cost, link.out_interface))
        ant.cost += float(link.cost_forward)
        self.engine.send_ant(now, router, link.out_interface,
                             {"ant": ant, "visited": visited})

    def _schedule_backward(self, now, at_router, rev_stack, updates, idx):
        # updates[idx] belongs to rev_stack[idx].router; travel back one hop
        if idx >= len(rev_stack):
            return
        router, _, iface = rev_stack[idx]
        link = self.engine.topology.link(router, iface)
        # the backward ant travels dst -> router over the reverse direction
        delay = self.engine.link_delay(link, reverse=True)
        self.engine.schedule(now + delay, "ant_arrival", {
            "phase": "backward", "router": router,
            "rev_stack": rev_stack, "updates": updates, "idx": idx})

    def _backward_hop(self, now, payload):
        idx = payload["idx"]
        upd = payload["updates"][idx]
        if self.engine.cfg.trace_updates:
            self.engine.update_trace.append(
                (now, upd.router, upd.row_dest, upd.interface, upd.delta, upd.p_after))
        self._schedule_backward(now, payload["router"], payload["rev_stack"],
                                payload["updates"], idx + 1)

    def on_round_tick(self):
        pass

    def on_router_removal(self, removed):
        raise ConfigError("router removal is only supported under deterministic protocols")

    def prob_tables(self):
        return self.system.tables

    def message_counts(self):
        sys = self.system
        counts = {"ants_generated": self.engine.ants_generated,
                  "ant_updates": getattr(sys, "updates_applied", None)}
        if self.cfg.backward:
            counts["ants_discarded_cycle"] = sys.discarded_cycle
            counts["ants_discarded_budget"] = sys.discarded_budget
        return counts

    def ant_counters(self):
        sys = self.system
        if self.cfg.backward:
            return sys.delivered, sys.discarded_cycle + sys.discarded_budget
        return sys.delivered, sys.discarded


def _draw_dest(routers, src, weights, rng):
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


class _QRoutingProtocol:
    """Data-driven Q-routing: every forwarded data packet makes the sender
    relax its estimate toward the receiver's best estimate plus the measured
    queue-plus-transmission cost.  Routing overhead therefore tracks the data
    rate, and paths that carry no data are never re-estimated."""

    def __init__(self, engine: "Engine", cfg: QRoutingConfig):
        self.engine = engine
        self.cfg = cfg
        if cfg.initial_tables is not None:
            self.qtables = {r: _copy_qtable(t) for r, t in cfg.initial_tables.items()}
        else:
            self.qtables = {r: QTable(engine.topology, r, cfg.initial_q)
                            for r in engine.topology.sorted_routers()}
        self.updates = 0

    def start(self):
        pass

    def _row_for(self, router, dest):
        q_row = self.qtables[router].row(dest)
        if self.cfg.variant == "argmax":
            row = [0.0] * len(q_row)
            row[self.qtables[router].best_index(dest)] = 1.0
            return row
        try:
            return prob_from_q(q_row)
        except TableError:
            n = len(q_row)
            return [1.0 / n] * n

    def data_row(self, router, packet, arrival_iface):
        return self._row_for(router, packet.destination)

    def on_packet_arrival(self, router, packet, payload):
        sender = payload.get("from_router")
        if sender is None:
            return
        idx = payload["out_index"]
        zeta = payload["service"] if self.cfg.zeta_model == "service_only" \
            else payload["zeta"]
        dest = packet.destination
        if router == dest:
            neighbor_best = 0.0
        else:
            neighbor_best = float(self.qtables[router].best_value(dest))
        row = self.qtables[sender].rows[dest]
        row[idx] = q_update(row[idx], neighbor_best, zeta, self.cfg.eta)
        self.updates += 1

    def on_ant_generation(self, now):
        pass

    def on_ant_arrival(self, now, payload):
        pass

    def on_round_tick(self):
        pass

    def on_router_removal(self, removed):
        raise ConfigError("router removal is only supported under deterministic protocols")

    def prob_tables(self):
        view = {}
        for r, qt in self.qtables.items():
            pt = ProbTable(self.engine.topology, r)
            for d in list(pt.rows):
                pt.rows[d] = self._row_for(r, d)
            view[r] = pt
        return view

    def message_counts(self):
        return {"q_updates": self.updates}

    def ant_counters(self):
        return 0, 0


def _copy_qtable(qt: QTable) -> QTable:
    new = object.__new__(QTable)
    new.router = qt.router
    new.interfaces = list(qt.interfaces)
    new.rows = {d: list(r) for d, r in qt.rows.items()}
    return new


class _NegReinforcementProtocol:
    """Uniform probe ants carrying full hop history; dead ends and revisits
    trigger negative reinforcement signals, applied immediately over a
    zero-delay control channel.  Data packets consult rows keyed at the
    configured qualification level."""

    def __init__(self, engine: "Engine", cfg: NegReinfConfig):
        self.engine = engine
        self.cfg = cfg
        self.system = NegReinforcementSystem(engine.topology, cfg.level,
                                             hop_budget=engine.ant_hop_budget)

    def start(self):
        if self.cfg.rate > 0:
            self.engine.schedule(self.engine.rng.expovariate(self.cfg.rate),
                                 "ant_generation", {})

    def data_row(self, router, packet, arrival_iface):
        return self.system.tables[router].row(packet.destination, packet.source,
                                              arrival_iface)

    def on_packet_arrival(self, router, packet, payload):
        pass

    def on_ant_generation(self, now):
        eng = self.engine
        self.engine.ants_generated += 1
        if self.cfg.probe_pairs:
            src, dst = self.cfg.probe_pairs[eng.rng.randrange(len(self.cfg.probe_pairs))]
        else:
            routers = eng.topology.sorted_routers()
            src = routers[eng.rng.randrange(len(routers))]
            dst = _draw_dest(routers, src, None, eng.rng)
        self.system.probe(src, dst, eng.rng)
        if self.cfg.rate > 0:
            eng.schedule(now + eng.rng.expovariate(self.cfg.rate), "ant_generation", {})

    def on_ant_arrival(self, now, payload):
        pass

    def on_round_tick(self):
        pass

    def on_router_removal(self, removed):
        raise ConfigError("router removal is only supported under deterministic protocols")

    def prob_tables(self):
        return None   # rows are qualification-keyed; coverage is not defined

    def message_counts(self):
        return {"probes": self.engine.ants_generated,
                "signals": len(self.system.records),
                "signals_applied": sum(1 for r in self.system.records if r.applied)}

    def ant_counters(self):
        return self.system.delivered, self.system.discarded


class _DeterministicProtocol:
    """Synchronous-round constructive protocols driven by round_tick events.
    Link-state performs its whole flood-and-compute phase on the first tick;
    distance-vector and path-vector advance one round per tick."""

    def __init__(self, engine: "Engine", cfg: DeterministicConfig):
        if cfg.kind not in ("link_state", "distance_vector", "path_vector"):
            raise ConfigError(f"unknown deterministic protocol {cfg.kind!r}")
        self.engine = engine
        self.cfg = cfg
        self.topology = engine.topology
        self.rounds = 0
        self.message_count = 0
        self.flood_traversals = 0
        self.per_round_messages: list[int] = []
        self.converged = False
        if cfg.kind == "distance_vector":
            self.dv_states = det.fresh_dv_states(self.topology)
        elif cfg.kind == "path_vector":
            self.pv_result = det.run_path_vector(self.topology, max_rounds=0)
            self.pv_tables = self.pv_result.tables
        self.ls_tables = None

    def start(self):
        self.engine.schedule(0.0, "round_tick", {"role": "protocol_round"})

    def on_round_tick(self):
        kind = self.cfg.kind
        if kind == "link_state":
            if self.ls_tables is None:
                res = det.run_link_state(self.topology)
                self.ls_tables = res.tables
                self.message_count = res.message_count
                self.flood_traversals = res.flood_link_traversals
                self.converged = True
            return
        if kind == "distance_vector":
            self.per_round_messages.append(det.dv_message_units(self.dv_states, self.topology))
            self.message_count += self.per_round_messages[-1]
            self.dv_states, changed = det.dv_round(self.dv_states, self.topology,
                                                   self.cfg.infinity_bound)
        else:
            self.pv_tables, changed = det._pv_round(self.pv_tables, self.topology)
        if changed:
            self.rounds += 1
        else:
            self.converged = True
        self.engine.schedule(self.engine.clock + self.cfg.round_interval,
                             "round_tick", {"role": "protocol_round"})

    def data_row(self, router, packet, arrival_iface):
        t = self.topology
        if self.cfg.kind == "path_vector":
            best = self.pv_tables[router].best(packet.destination)
            if best is None or len(best.path) < 2:
                return None
            next_hop = best.path[1]
            links = [l for l in t.out_links(router) if l.dst == next_hop]
            iface = min(links, key=lambda l: (l.cost_forward, l.out_interface)).out_interface
        else:
            tables = self.ls_tables if self.cfg.kind == "link_state" else self.dv_states
            if tables is None:
                return None
            entry = tables[router].get(packet.destination)
            if entry is None or entry.cost >= self.cfg.infinity_bound:
                return None
            iface = entry.out_interface
        row = [0.0] * t.degree(router)
        row[t.iface_index(router, iface)] = 1.0
        return row

    def on_packet_arrival(self, router, packet, payload):
        pass

    def on_ant_generation(self, now):
        pass

    def on_ant_arrival(self, now, payload):
        pass

    def on_router_removal(self, removed):
        self.topology = self.topology.removed(removed)
        if self.cfg.kind == "distance_vector":
            self.dv_states = det.invalidate_removed(self.dv_states, self.topology,
                                                    removed, self.cfg.infinity_bound)
        elif self.cfg.kind == "path_vector":
            for r in self.topology.sorted_routers():
                old = self.pv_tables[r]
                nt = PathVectorTable(r)
                for d in old.destinations():
                    for rt in old.routes(d):
                        if removed not in rt.path:
                            nt.insert(d, rt.path[1] if len(rt.path) > 1 else d, rt)
                self.pv_tables[r] = nt
            self.pv_tables.pop(removed, None)
        elif self.ls_tables is not None:
            self.ls_tables = None   # next tick refloods on the new topology

    def prob_tables(self):
        if self.cfg.kind == "link_state":
            if self.ls_tables is None:
                return prob_view_of_det(self.topology, det.fresh_dv_states(self.topology))
            return prob_view_of_det(self.topology, self.ls_tables)
        if self.cfg.kind == "distance_vector":
            live = {r: t for r, t in self.dv_states.items() if r in self.topology.routers}
            bounded = {}
            for r, table in live.items():
                copy = table.copy()
                for d in list(copy.entries):
                    if copy.entries[d].cost >= self.cfg.infinity_bound or d not in self.topology.routers:
                        del copy.entries[d]
                bounded[r] = copy
            return prob_view_of_det(self.topology, bounded)
        view = {}
        for r in self.topology.sorted_routers():
            table = DetTable(r)
            for d in self.pv_tables[r].destinations():
                best = self.pv_tables[r].best(d)
                if best is None or len(best.path) < 2 or d not in self.topology.routers:
                    continue
                next_hop = best.path[1]
                links = [l for l in self.topology.out_links(r) if l.dst == next_hop]
                iface = min(links, key=lambda l: (l.cost_forward, l.out_interface)).out_interface
                table.set(d, iface, best.cost)
            view[r] = table
        return prob_view_of_det(self.topology, view)

    def message_counts(self):
        out = {"rounds": self.rounds, "converged": self.converged}
        if self.cfg.kind == "link_state":
            out["message_count"] = self.message_count
            out["flood_link_traversals"] = self.flood_traversals
        elif self.cfg.kind == "distance_vector":
            out["message_units"] = self.message_count
            out["per_round_message_units"] = list(self.per_round_messages)
        return out

    def ant_counters(self):
        return 0, 0


def _build_protocol(engine: "Engine", cfg: ProtocolConfig):
    if isinstance(cfg, AntsConfig):
        return _AntProtocol(engine, cfg)
    if isinstance(cfg, QRoutingConfig):
        return _QRoutingProtocol(engine, cfg)
    if isinstance(cfg, NegReinfConfig):
        return _NegReinforcementProtocol(engine, cfg)
    if isinstance(cfg, DeterministicConfig):
        return _DeterministicProtocol(engine, cfg)
    raise ConfigError(f"unknown protocol config {type(cfg).__name__}")


# -- engine ----------------------------------------------------------------


class Engine:
    """One scenario: one event loop, one seeded RNG, fully deterministic."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.topology = resolve_topology(cfg.topology)
        self._validate()
        self.rng = random.Random(cfg.seed)
        self.clock = 0.0
        self.end_time = cfg.duration_ms
        self.running = True
        self._heap: list[tuple[float, int, Event]] = []
        self._seq = 0
        self._hash = hashlib.sha256()
        self._busy: dict[tuple[RouterId, InterfaceId], float] = {}
        self.ant_hop_budget = (cfg.ant_hop_budget if cfg.ant_hop_budget is not None
                               else max(4, 4 * diameter(self.topology)))
        self.packets_generated = 0
        self.packets_delivered = 0
        self.packets_dropped_ttl = 0
        self.packets_dropped_no_route = 0
        self.ants_generated = 0
        self.records: list[PacketRecord] = []
        self.delays_by_dest: dict[RouterId, list[float]] = {}
        self.snapshots: list[tuple[float, dict]] = []
        self.update_trace: list = []
        self._pid = 0
        self.protocol = _build_protocol(self, cfg.protocol)
        # scenario_end is scheduled first so it wins time ties deterministically
        self.schedule(cfg.duration_ms, "scenario_end", {})
        if cfg.remove_router_at is not None:
            when, router = cfg.remove_router_at
            self.schedule(when, "router_removal", {"router": router})
        for (s, d) in sorted(cfg.traffic):
            rate = cfg.traffic[(s, d)]
            if rate > 0:
                self.schedule(self.rng.expovariate(rate), "data_generation",
                              {"src": s, "dst": d, "rate": rate})
        if cfg.snapshot_interval:
            self.schedule(0.0, "round_tick", {"role": "snapshot"})
        self.protocol.start()

    def _validate(self):
        cfg = self.cfg
        if cfg.duration_ms <= 0:
            raise ConfigError("duration must be positive")
        if isinstance(cfg.protocol, AntsConfig) and not (0 <= cfg.protocol.mix <= 1):
            raise ConfigError("ant mix must be in [0, 1]")
        for (s, d), rate in cfg.traffic.items():
            if rate < 0:
                raise ConfigError("traffic rates must be nonnegative")
            if s not in self.topology.routers or d not in self.topology.routers:
                raise ConfigError(f"traffic pair ({s}, {d}) references unknown router")
            if s == d:
                raise ConfigError("traffic source equals destination")
        if not is_connected(self.topology):
            raise DisconnectedError("topology is not connected")
        if isinstance(cfg.delay, str) and cfg.delay != "cost":
            raise ConfigError(f"unknown delay model {cfg.delay!r}")

    # -- plumbing ----------------------------------------------------------

    def schedule(self, time: float, kind: str, payload: dict) -> None:
        ev = Event(time, self._seq, kind, payload)
        heapq.heappush(self._heap, (time, self._seq, ev))
        self._seq += 1

    def link_delay(self, link, reverse: bool = False) -> float:
        if self.cfg.delay == "cost":
            return float(link.cost_reverse if reverse else link.cost_forward)
        return float(self.cfg.delay)

    def _log(self, ev: Event) -> None:
        detail = ev.payload.get("log", "")
        self._hash.update(f"{ev.time!r}|{ev.kind}|{detail}\n".encode())

    def event_log_hash(self) -> str:
        return self._hash.hexdigest()

    # -- event loop ---------------------------------------------------------

    def step(self) -> Optional[Event]:
        """Process the earliest event; None when exhausted or ended."""
        if not self.running or not self._heap:
            return None
        _, _, ev = heapq.heappop(self._heap)
        self.clock = ev.time
        self._log(ev)
        handler = getattr(self, "_on_" + ev.kind)
        handler(ev)
        return ev

    def run(self) -> RunResult:
        while self.step() is not None:
            pass
        return self._finish()

    # -- handlers ------------------------------------------------------------

    def _on_scenario_end(self, ev: Event) -> None:
        self.running = False

    def _on_router_removal(self, ev: Event) -> None:
        removed = ev.payload["router"]
        self.protocol.on_router_removal(removed)
        self.topology = self.protocol.topology if hasattr(self.protocol, "topology") \
            else self.topology.removed(removed)

    def _on_round_tick(self, ev: Event) -> None:
        if ev.payload.get("role") == "snapshot":
            tables = self.protocol.prob_tables()
            if tables is not None:
                snap = {r: {d: list(row) for d, row in tables[r].rows.items()}
                        for r in tables}
                self.snapshots.append((ev.time, snap))
            nxt = ev.time + self.cfg.snapshot_interval
            if nxt <= self.end_time:
                self.schedule(nxt, "round_tick", {"role": "snapshot"})
        else:
            self.protocol.on_round_tick()

    def _on_data_generation(self, ev: Event) -> None:
        src, dst, rate = ev.payload["src"], ev.payload["dst"], ev.payload["rate"]
        self._pid += 1
        packet = Packet(self._pid, src, dst, self.cfg.hop_budget, ev.time, [src])
        self.packets_generated += 1
        ev.payload["log"] = f"p{packet.pid}@{src}"
        self._handle_packet(src, packet, None, ev.time)
        self.schedule(ev.time + self.rng.expovariate(rate), "data_generation",
                      {"src": src, "dst": dst, "rate": rate})

    def _on_packet_arrival(self, ev: Event) -> None:
        packet = ev.payload["packet"]
        router = ev.payload["router"]
        packet.trace.append(router)
        ev.payload["log"] = f"p{packet.pid}@{router}"
        self.protocol.on_packet_arrival(router, packet, ev.payload)
        self._handle_packet(router, packet, ev.payload.get("arrival_iface"), ev.time)

    def _on_ant_generation(self, ev: Event) -> None:
        self.protocol.on_ant_generation(ev.time)

    def _on_ant_arrival(self, ev: Event) -> None:
        self.protocol.on_ant_arrival(ev.time, ev.payload)

    # -- forwarding ----------------------------------------------------------

    def _record(self, packet: Packet, delivered: bool) -> None:
        self.records.append(PacketRecord(
            packet.source, packet.destination, tuple(packet.trace),
            tuple(packet.iface_trace), delivered, packet.created_at,
            packet.delivered_at))

    def _handle_packet(self, router: RouterId, packet: Packet,
                       arrival_iface: Optional[InterfaceId], now: float) -> None:
        if router == packet.destination:
            packet.delivered_at = now
            self.packets_delivered += 1
            self.delays_by_dest.setdefault(packet.destination, []).append(
                now - packet.created_at)
            self._record(packet, True)
            return
        if packet.hops_made() >= packet.hop_budget:
            self.packets_dropped_ttl += 1
            self._record(packet, False)
            return
        row = self.protocol.data_row(router, packet, arrival_iface)
        if row is None:
            self.packets_dropped_no_route += 1
            self._record(packet, False)
            return
        busy = {i for i, iface in enumerate(self.topology.interfaces(router))
                if self._busy.get((router, iface), 0.0) > now}
        policy = self.cfg.forward_policy
        try:
            exclude = busy if policy is ForwardPolicy.DEFLECTION else None
            k = choose_interface(row, policy, self.rng, exclude)
        except TableError:
            # every interface busy: fall back to queueing on the best one
            k = choose_interface(row, ForwardPolicy.ARGMAX, self.rng)
        link = self.topology.out_links(router)[k]
        packet.iface_trace.append(link.out_interface)
        self._transmit(router, link, now, "packet_arrival", {
            "packet": packet, "router": link.dst,
            "arrival_iface": link.peer_interface,
            "from_router": router, "out_index": k})

    def _transmit(self, router, link, now, kind, payload, share_fifo=True):
        delay = self.link_delay(link)
        key = (router, link.out_interface)
        if share_fifo:
            start = max(now, self._busy.get(key, 0.0))
            self._busy[key] = start + delay
        else:
            start = now
        payload["zeta"] = (start - now) + delay
        payload["service"] = delay
        self.schedule(start + delay, kind, payload)

    def send_ant(self, now, router, out_iface, payload):
        link = self.topology.link(router, out_iface)
        payload = dict(payload)
        payload["router"] = link.dst
        payload["arrival_iface"] = link.peer_interface
        payload["log"] = f"ant@{link.dst}"
        self._transmit(router, link, now, "ant_arrival", payload,
                       share_fifo=self.cfg.ants_share_fifo)

    # -- reporting -----------------------------------------------------------

    def anytime_snapshot(self) -> tuple[float, Optional[float]]:
        """Soft-reachability coverage of the current tables, without stopping."""
        tables = self.protocol.prob_tables()
        if tables is None:
            return (self.clock, None)
        return (self.clock, reachability_coverage(tables, self.topology))

    def _finish(self) -> RunResult:
        cfg = self.cfg
        ants_delivered, ants_discarded = self.protocol.ant_counters()
        tables = self.protocol.prob_tables()
        coverage = None
        if tables is not None:
            coverage = reachability_coverage(tables, self.topology)
        conv = None
        if len(self.snapshots) >= 2:
            conv = convergence_time(self.snapshots, cfg.convergence_delta,
                                    cfg.convergence_window)
        split_ratios = {}
        if cfg.split_first_hop is not None:
            r0, iface0 = cfg.split_first_hop
            delivered = [rec for rec in self.records if rec.delivered]
            sr = split_ratio(delivered, lambda rec: rec.trace[0] == r0
                             and rec.iface_trace and rec.iface_trace[0] == iface0)
            split_ratios["first_hop"] = {"a": sr.count_a, "b": sr.count_b,
                                         "ratio": sr.ratio}
        report = MetricsReport(
            scenario=cfg.name,
            seed=cfg.seed,
            duration_ms=cfg.duration_ms,
            coverage=coverage,
            split_ratios=split_ratios,
            loop_stats=loop_statistics([rec.trace for rec in self.records]),
            message_counts=self.protocol.message_counts(),
            convergence_time_ms=conv,
            packets_generated=self.packets_generated,
            packets_delivered=self.packets_delivered,
            packets_dropped_ttl=self.packets_dropped_ttl,
            packets_dropped_no_route=self.packets_dropped_no_route,
            packets_in_flight=(self.packets_generated - self.packets_delivered
                               - self.packets_dropped_ttl - self.packets_dropped_no_route),
            ants_generated=self.ants_generated,
            ants_delivered=ants_delivered,
            ants_discarded=ants_discarded,
            delay_percentiles=delay_percentiles(self.delays_by_dest),
            event_log_hash=self.event_log_hash(),
        )
        q_tables = getattr(self.protocol, "qtables", None)
        return RunResult(report, tables, self.records, self.snapshots,
                         self.update_trace, q_tables)


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    """Run one scenario to completion; identical (config, seed) pairs produce
    byte-identical reports and event-log hashes."""
    return Engine(cfg).run()


def step(engine: Engine) -> Optional[Event]:
    """Process one event; None when the queue is exhausted or the run ended."""
    return engine.step()


def anytime_snapshot(engine: Engine) -> tuple[float, Optional[float]]:
    return engine.anytime_snapshot()
