"""Directed multigraph substrate: construction, file I/O, generators and the
exhaustive loop-free-path oracle used to validate every routing protocol."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

RouterId = int
InterfaceId = str


class TopologyError(ValueError):
    """Malformed topology (bad file syntax, self loop, duplicate interface...)."""


class DisconnectedError(ValueError):
    """Operation requires a connected topology."""


@dataclass(frozen=True)
class Link:
    """One direction of a wire.  `cost_forward` is the cost of traversing the
    link src->dst; `cost_reverse` is the cost of the paired dst->src direction
    (needed by backward-learning ants).  `peer_interface` is the interface
    name the wire carries at the dst router."""

    src: RouterId
    dst: RouterId
    out_interface: InterfaceId
    peer_interface: InterfaceId
    cost_forward: Fraction
    cost_reverse: Fraction


class Topology:
    """Routers plus directed links.  Wires are declared bidirectionally (two
    Link records, one per direction) and kept in declaration order."""

    def __init__(self, routers: Iterable[RouterId], links: Iterable[Link]):
        self.routers = frozenset(routers)
        self.links = tuple(links)
        if not self.routers:
            raise TopologyError("router set is empty")
        for r in self.routers:
            if not isinstance(r, int) or r < 0:
                raise TopologyError(f"router ids must be nonnegative integers, got {r!r}")
        self._out: dict[RouterId, list[Link]] = {r: [] for r in self.routers}
        self._by_iface: dict[tuple[RouterId, InterfaceId], Link] = {}
        for link in self.links:
            if link.src not in self.routers or link.dst not in self.routers:
                raise TopologyError(f"link {link.src}->{link.dst} references unknown router")
            if link.src == link.dst:
                raise TopologyError(f"self-loop link at router {link.src}")
            if link.cost_forward < 0 or link.cost_reverse < 0:
                raise TopologyError(f"negative cost on link {link.src}->{link.dst}")
            key = (link.src, link.out_interface)
            if key in self._by_iface:
                raise TopologyError(
                    f"duplicate interface {link.out_interface!r} at router {link.src}")
            self._by_iface[key] = link
            self._out[link.src].append(link)
        self._iface_index: dict[tuple[RouterId, InterfaceId], int] = {}
        for r in self.routers:
            for i, link in enumerate(self._out[r]):
                self._iface_index[(r, link.out_interface)] = i

    # -- read access ------------------------------------------------------

    def sorted_routers(self) -> list[RouterId]:
        return sorted(self.routers)

    def out_links(self, r: RouterId) -> list[Link]:
        return self._out[r]

    def interfaces(self, r: RouterId) -> list[InterfaceId]:
        return [l.out_interface for l in self._out[r]]

    def degree(self, r: RouterId) -> int:
        return len(self._out[r])

    def neighbors(self, r: RouterId) -> list[RouterId]:
        return sorted({l.dst for l in self._out[r]})

    def link(self, r: RouterId, iface: InterfaceId) -> Link:
        try:
            return self._by_iface[(r, iface)]
        except KeyError:
            raise TopologyError(f"router {r} has no interface {iface!r}") from None

    def has_interface(self, r: RouterId, iface: InterfaceId) -> bool:
        return (r, iface) in self._by_iface

    def iface_index(self, r: RouterId, iface: InterfaceId) -> int:
        return self._iface_index[(r, iface)]

    @property
    def router_count(self) -> int:
        return len(self.routers)

    @property
    def link_count(self) -> int:
        """Number of directed links (two per declared wire)."""
        return len(self.links)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Topology)
                and self.routers == other.routers and self.links == other.links)

    def __hash__(self):
        return hash((self.routers, self.links))

    def __repr__(self):
        return f"Topology(routers={len(self.routers)}, links={len(self.links)})"

    def removed(self, r: RouterId) -> "Topology":
        """Copy with router `r` and all its links removed."""
        if r not in self.routers:
            raise TopologyError(f"router {r} not in topology")
        keep = [l for l in self.links if r not in (l.src, l.dst)]
        return Topology(self.routers - {r}, keep)


@dataclass(frozen=True)
class Path:
    """A loop-free directed path: (router, out-interface) hops plus the
    terminal router and the summed forward cost."""

    hops: tuple[tuple[RouterId, InterfaceId], ...]
    terminal: RouterId
    total_cost: Fraction

    def routers(self) -> tuple[RouterId, ...]:
        return tuple(r for r, _ in self.hops) + (self.terminal,)

    def first_hop(self) -> tuple[RouterId, InterfaceId]:
        return self.hops[0]

    def validate(self, t: Topology) -> None:
        seen = set()
        cost = Fraction(0)
        at = self.hops[0][0] if self.hops else self.terminal
        for r, iface in self.hops:
            if r != at:
                raise TopologyError("path hops are not consecutive")
            if r in seen:
                raise TopologyError("path repeats a router")
            seen.add(r)
            link = t.link(r, iface)
            cost += link.cost_forward
            at = link.dst
        if at != self.terminal or self.terminal in seen:
            raise TopologyError("path terminal mismatch")
        if cost != self.total_cost:
            raise TopologyError("path cost mismatch")


class PathEnumeration(Sequence):
    """Sequence of Path objects with a truncation flag (set when a max_paths
    bound stopped the exhaustive search early)."""

    def __init__(self, paths: list[Path], truncated: bool):
        self.paths = paths
        self.truncated = truncated

    def __len__(self) -> int:
        return len(self.paths)

    def __getitem__(self, i):
        return self.paths[i]

    def __iter__(self) -> Iterator[Path]:
        return iter(self.paths)


# -- file format ----------------------------------------------------------
#
# UTF-8 lines.  `node <id>` declares a router.
# `link <a>:<ifa> <b>:<ifb> <cost_ab> <cost_ba>` declares a bidirectional
# wire with per-direction costs.  `#` starts a comment.


def _parse_cost(token: str, lineno: int) -> Fraction:
    try:
        cost = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise TopologyError(f"line {lineno}: bad cost {token!r}") from None
    if cost < 0:
        raise TopologyError(f"line {lineno}: negative cost {token!r}")
    return cost


def _parse_endpoint(token: str, lineno: int) -> tuple[RouterId, InterfaceId]:
    if ":" not in token:
        raise TopologyError(f"line {lineno}: expected <router>:<interface>, got {token!r}")
    rid, iface = token.split(":", 1)
    if not rid.isdigit():
        raise TopologyError(f"line {lineno}: router id must be an unsigned integer, got {rid!r}")
    if not iface.isalnum():
        raise TopologyError(f"line {lineno}: interface name must be alphanumeric, got {iface!r}")
    return int(rid), iface


def load_topology(text: str) -> Topology:
    """Parse a topology file.  Raises TopologyError with a line number on any
    syntax or consistency problem; link order is preserved exactly."""
    routers: list[RouterId] = []
    links: list[Link] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "node":
            if len(fields) != 2 or not fields[1].isdigit():
                raise TopologyError(f"line {lineno}: expected 'node <id>'")
            routers.append(int(fields[1]))
        elif fields[0] == "link":
            if len(fields) != 5:
                raise TopologyError(
                    f"line {lineno}: expected 'link a:ifa b:ifb cost_ab cost_ba'")
            a, ifa = _parse_endpoint(fields[1], lineno)
            b, ifb = _parse_endpoint(fields[2], lineno)
            if a == b:
                raise TopologyError(f"line {lineno}: self-loop link at router {a}")
            cab = _parse_cost(fields[3], lineno)
            cba = _parse_cost(fields[4], lineno)
            links.append(Link(a, b, ifa, ifb, cab, cba))
            links.append(Link(b, a, ifb, ifa, cba, cab))
        else:
            raise TopologyError(f"line {lineno}: unknown directive {fields[0]!r}")
    try:
        return Topology(routers, links)
    except TopologyError:
        raise


def dump_topology(t: Topology) -> str:
    """Emit the file form of a topology; load_topology(dump_topology(t)) == t.
    Only the forward record of each wire pair is written."""
    lines = [f"node {r}" for r in t.sorted_routers()]
    emitted = set()
    for link in t.links:
        key = (link.dst, link.src, link.peer_interface, link.out_interface)
        if key in emitted:
            continue
        emitted.add((link.src, link.dst, link.out_interface, link.peer_interface))
        lines.append(
            f"link {link.src}:{link.out_interface} {link.dst}:{link.peer_interface} "
            f"{link.cost_forward} {link.cost_reverse}")
    return "\n".join(lines) + "\n"


# -- generators -----------------------------------------------------------


@dataclass
class GeneratorSpec:
    kind: str
    params: tuple = ()

    def __str__(self):
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(str(p) for p in self.params)


class _Builder:
    """Incremental construction with automatic per-router interface names."""

    def __init__(self):
        self.routers: list[RouterId] = []
        self.links: list[Link] = []
        self._next_iface: dict[RouterId, int] = {}

    def node(self, r: RouterId) -> RouterId:
        self.routers.append(r)
        self._next_iface[r] = 1
        return r

    def _auto(self, r: RouterId) -> InterfaceId:
        name = f"i{self._next_iface[r]}"
        self._next_iface[r] += 1
        return name

    def wire(self, a, b, cost_ab, cost_ba=None, ifa=None, ifb=None):
        cost_ab = Fraction(cost_ab)
        cost_ba = cost_ab if cost_ba is None else Fraction(cost_ba)
        ifa = ifa if ifa is not None else self._auto(a)
        ifb = ifb if ifb is not None else self._auto(b)
        self.links.append(Link(a, b, ifa, ifb, cost_ab, cost_ba))
        self.links.append(Link(b, a, ifb, ifa, cost_ba, cost_ab))

    def build(self) -> Topology:
        return Topology(self.routers, self.links)


def linear_chain(n: int) -> Topology:
    """Routers 0..n-1 in a line with symmetric unit-cost wires."""
    if n < 1:
        raise TopologyError("linear_chain needs n >= 1")
    b = _Builder()
    for r in range(n):
        b.node(r)
    for r in range(n - 1):
        b.wire(r, r + 1, 1)
    return b.build()


def ring(n: int) -> Topology:
    """Routers 0..n-1 in a cycle with symmetric unit-cost wires."""
    if n < 3:
        raise TopologyError("ring needs n >= 3")
    b = _Builder()
    for r in range(n):
        b.node(r)
    for r in range(n):
        b.wire(r, (r + 1) % n, 1)
    return b.build()


def complete(n: int) -> Topology:
    """Fully meshed topology on n routers, symmetric unit costs."""
    if n < 1:
        raise TopologyError("complete needs n >= 1")
    b = _Builder()
    for r in range(n):
        b.node(r)
    for a in range(n):
        for bb in range(a + 1, n):
            b.wire(a, bb, 1)
    return b.build()


def velcro(direct_cost, loop_section_count: int, loop_section_cost) -> Topology:
    """Router 0 (A) and router 1 (B) joined by one direct wire of cost
    `direct_cost` (A-side interface named 'direct') plus a looped alternative
    region: a chain of `loop_section_count` sections of cost
    `loop_section_cost` each, every section doubled by a two-hop detour so
    the region is full of cycles.  The cheapest alternative A->B traversal
    costs loop_section_count * loop_section_cost."""
    direct_cost = Fraction(direct_cost)
    loop_section_cost = Fraction(loop_section_cost)
    if direct_cost <= 0 or loop_section_count < 1 or loop_section_cost <= 0:
        raise TopologyError("velcro parameters must be strictly positive")
    b = _Builder()
    a = b.node(0)
    bb = b.node(1)
    spine = [a]
    for j in range(1, loop_section_count):
        spine.append(b.node(1 + j))
    spine.append(bb)
    detours = [b.node(loop_section_count + 1 + j) for j in range(loop_section_count)]
    b.wire(a, bb, direct_cost, ifa="direct", ifb="direct")
    for j in range(loop_section_count):
        u, v, w = spine[j], spine[j + 1], detours[j]
        b.wire(u, v, loop_section_cost)
        b.wire(u, w, loop_section_cost)
        b.wire(w, v, loop_section_cost)
    return b.build()


def neg_reinf_left() -> Topology:
    """A(0)--B(1) plus a leaf C(2) hanging off A.  An ant for B that strays to
    C lets the leaf announce that B cannot be reached via A's interface i2."""
    b = _Builder()
    for r in range(3):
        b.node(r)
    b.wire(0, 1, 1, ifa="i1", ifb="i1")   # A--B
    b.wire(0, 2, 1, ifa="i2", ifb="i1")   # A--C, C is a leaf
    return b.build()


def neg_reinf_middle() -> Topology:
    """Cycle A(0)-B(1)-D(3)-C(2) plus E(4) off B.  Supports the walk
    (A,i1)(B,i4)(D,i5)(C,i3) that revisits B."""
    b = _Builder()
    for r in range(5):
        b.node(r)
    b.wire(0, 1, 1, ifa="i1", ifb="i1")   # A--B
    b.wire(1, 4, 1, ifa="i2", ifb="i1")   # B--E
    b.wire(1, 2, 1, ifa="i3", ifb="i3")   # B--C
    b.wire(1, 3, 1, ifa="i4", ifb="i4")   # B--D
    b.wire(3, 2, 1, ifa="i5", ifb="i5")   # D--C
    return b.build()


def neg_reinf_right() -> Topology:
    """Middle topology plus an extra A--C wire (C-side interface i7), so a
    packet from A can arrive at C directly and still legally exit via i3."""
    b = _Builder()
    for r in range(5):
        b.node(r)
    b.wire(0, 1, 1, ifa="i1", ifb="i1")
    b.wire(1, 4, 1, ifa="i2", ifb="i1")
    b.wire(1, 2, 1, ifa="i3", ifb="i3")
    b.wire(1, 3, 1, ifa="i4", ifb="i4")
    b.wire(3, 2, 1, ifa="i5", ifb="i5")
    b.wire(0, 2, 1, ifa="i2", ifb="i7")   # the extra inbound link to C
    return b.build()


def random_connected(n: int, edge_prob: float, cost_range: tuple[int, int],
                     seed: int, symmetric: bool = True) -> Topology:
    """Random connected topology: a random spanning tree plus each remaining
    pair with probability edge_prob.  Integer costs drawn uniformly from
    cost_range; deterministic for a fixed seed."""
    if n < 1:
        raise TopologyError("random_connected needs n >= 1")
    if not (0 < edge_prob <= 1):
        raise TopologyError("edge_prob must be in (0, 1]")
    lo, hi = cost_range
    if lo < 0 or hi < lo:
        raise TopologyError(f"bad cost range {cost_range!r}")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    b = _Builder()
    for r in range(n):
        b.node(r)
    wired = set()

    def add(u, v):
        cab = rng.randint(lo, hi)
        cba = cab if symmetric else rng.randint(lo, hi)
        b.wire(u, v, cab, cba)
        wired.add((min(u, v), max(u, v)))

    for k in range(1, n):
        add(order[k], order[rng.randrange(k)])
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in wired and rng.random() < edge_prob:
                add(u, v)
    return b.build()


_GENERATORS = {
    "linear_chain": (linear_chain, (int,)),
    "ring": (ring, (int,)),
    "complete": (complete, (int,)),
    "velcro": (lambda d, k, c: velcro(d, int(k), c), (Fraction, int, Fraction)),
    "neg_reinf_left": (neg_reinf_left, ()),
    "neg_reinf_middle": (neg_reinf_middle, ()),
    "neg_reinf_right": (neg_reinf_right, ()),
    "random_connected": (
        lambda n, p, lo, hi, seed: random_connected(int(n), float(p), (int(lo), int(hi)), int(seed)),
        (int, float, int, int, int)),
}


def parse_generator_spec(spec: str) -> GeneratorSpec:
    """Parse 'kind:p1,p2,...' into a GeneratorSpec (e.g. 'velcro:10,5,2')."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip()
    if kind not in _GENERATORS:
        raise TopologyError(f"unknown generator {kind!r}")
    _, types = _GENERATORS[kind]
    raw = [p for p in rest.split(",") if p.strip()] if rest else []
    if len(raw) != len(types):
        raise TopologyError(f"generator {kind!r} takes {len(types)} parameters, got {len(raw)}")
    params = tuple(ty(p.strip()) for ty, p in zip(types, raw))
    return GeneratorSpec(kind, params)


def generate(spec: GeneratorSpec | str) -> Topology:
    """Build the topology named by a GeneratorSpec (or its string form)."""
    if isinstance(spec, str):
        spec = parse_generator_spec(spec)
    fn, _ = _GENERATORS[spec.kind]
    return fn(*spec.params)


# -- oracles --------------------------------------------------------------


def enumerate_loop_free_paths(t: Topology, src: RouterId, dst: RouterId,
                              max_paths: Optional[int] = None) -> PathEnumeration:
    """Exhaustive DFS over all simple directed src->dst paths, in lexicographic
    order of the (router, interface) hop sequence.  Unreachable pairs yield an
    empty enumeration; max_paths truncates and sets the flag."""
    if src not in t.routers or dst not in t.routers:
        raise TopologyError(f"unknown router in pair ({src}, {dst})")
    paths: list[Path] = []
    truncated = False
    if src == dst:
        return PathEnumeration([Path((), dst, Fraction(0))], False)
    hops: list[tuple[RouterId, InterfaceId]] = []
    visited = {src}

    def walk(at: RouterId, cost: Fraction) -> bool:
        nonlocal truncated
        for link in sorted(t.out_links(at), key=lambda l: (l.dst, l.out_interface)):
            if link.dst in visited:
                continue
            hops.append((at, link.out_interface))
            if link.dst == dst:
                paths.append(Path(tuple(hops), dst, cost + link.cost_forward))
                if max_paths is not None and len(paths) >= max_paths:
                    hops.pop()
                    truncated = True
                    return False
            else:
                visited.add(link.dst)
                keep_going = walk(link.dst, cost + link.cost_forward)
                visited.discard(link.dst)
                if not keep_going:
                    hops.pop()
                    return False
            hops.pop()
        return True

    walk(src, Fraction(0))
    return PathEnumeration(paths, truncated)


def hop_distances(t: Topology, src: RouterId) -> dict[RouterId, int]:
    """BFS hop counts from src along directed links."""
    dist = {src: 0}
    q = deque([src])
    while q:
        u = q.popleft()
        for link in t.out_links(u):
            if link.dst not in dist:
                dist[link.dst] = dist[u] + 1
                q.append(link.dst)
    return dist


def is_connected(t: Topology) -> bool:
    """True when every router reaches every other along directed links."""
    return all(len(hop_distances(t, r)) == t.router_count for r in t.sorted_routers())


def diameter(t: Topology) -> int:
    """Max over ordered pairs of the min-hop distance; raises on disconnect."""
    worst = 0
    for r in t.sorted_routers():
        dist = hop_distances(t, r)
        if len(dist) != t.router_count:
            raise DisconnectedError(f"topology is disconnected (seen from router {r})")
        if dist:
            worst = max(worst, max(dist.values()))
    return worst
