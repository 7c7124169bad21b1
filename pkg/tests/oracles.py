"""Independent brute-force oracles and fixed corpora shared by the test
modules.  Everything here stays deliberately separate from the library's own
algorithms: Floyd-Warshall instead of Dijkstra/Bellman-Ford, min-plus matrix
iteration instead of round counting."""

from fractions import Fraction
from functools import lru_cache
import random

from reachsim.topology import (Link, Topology, enumerate_loop_free_paths,
                               load_topology, random_connected, ring)


def fw_costs(t):
    """All-pairs shortest costs by Floyd-Warshall over exact rationals."""
    rs = t.sorted_routers()
    dist = {(a, b): (Fraction(0) if a == b else None) for a in rs for b in rs}
    for link in t.links:
        cur = dist[(link.src, link.dst)]
        if cur is None or link.cost_forward < cur:
            dist[(link.src, link.dst)] = link.cost_forward
    for k in rs:
        for a in rs:
            ak = dist[(a, k)]
            if ak is None:
                continue
            for b in rs:
                kb = dist[(k, b)]
                if kb is None:
                    continue
                ab = dist[(a, b)]
                if ab is None or ak + kb < ab:
                    dist[(a, b)] = ak + kb
    return dist


def best_path_hop_bound(t):
    """Max over pairs of the fewest edges among minimum-cost paths, computed
    by min-plus matrix iteration; equals the synchronous Bellman-Ford round
    count needed to reach the shortest-cost fixpoint."""
    rs = t.sorted_routers()
    final = fw_costs(t)
    cur = {(a, b): (Fraction(0) if a == b else None) for a in rs for b in rs}
    k = 0
    while any(cur[p] != final[p] for p in cur):
        k += 1
        nxt = dict(cur)
        for link in t.links:
            for b in rs:
                tail = cur[(link.dst, b)]
                if tail is None:
                    continue
                cand = link.cost_forward + tail
                if nxt[(link.src, b)] is None or cand < nxt[(link.src, b)]:
                    nxt[(link.src, b)] = cand
        cur = nxt
        assert k <= t.router_count, "min-plus iteration failed to settle"
    return k


CORPUS_SEED = 20260810
CORPUS_SIZE = 200


@lru_cache(maxsize=1)
def corpus() -> tuple:
    """200 random connected topologies, 2 <= n <= 12, integer costs 1..9."""
    rng = random.Random(CORPUS_SEED)
    graphs = []
    for i in range(CORPUS_SIZE):
        n = rng.randint(2, 12)
        p = rng.choice([0.2, 0.3, 0.45, 0.6, 0.8])
        graphs.append(random_connected(n, p, (1, 9), seed=1000 + i))
    return tuple(graphs)


def unit_cost_version(t: Topology) -> Topology:
    return Topology(t.routers, [Link(l.src, l.dst, l.out_interface, l.peer_interface,
                                     Fraction(1), Fraction(1)) for l in t.links])


def unique_shortest_first_hops(t, require_min_hop=False):
    """(router, dest) -> first-hop interface of the unique minimum-cost path,
    or None if any pair has a cost tie (or, optionally, a min-cost path that
    is not also minimum-hop)."""
    out = {}
    for r in t.sorted_routers():
        for d in t.sorted_routers():
            if r == d:
                continue
            paths = enumerate_loop_free_paths(t, r, d)
            best = min(p.total_cost for p in paths)
            winners = [p for p in paths if p.total_cost == best]
            if len(winners) != 1:
                return None
            if require_min_hop and len(winners[0].hops) != min(len(p.hops) for p in paths):
                return None
            out[(r, d)] = winners[0].hops[0][1]
    return out


def ring_with_hub(m: int) -> Topology:
    """Ring of m routers plus a hub router (id m) wired to every ring node;
    each ring node's hub-side interface is named 'exit'."""
    base = ring(m)
    links = list(base.links)
    for r in range(m):
        links.append(Link(r, m, "exit", f"h{r}", Fraction(1), Fraction(1)))
        links.append(Link(m, r, f"h{r}", "exit", Fraction(1), Fraction(1)))
    return Topology(set(range(m + 1)), links)


def two_disjoint_paths(alt_leg_cost) -> Topology:
    """0->1->3 with legs of cost 5 (total 10) and 0->2->3 with legs of
    alt_leg_cost (total 2*alt_leg_cost); the two branches share no links."""
    return load_topology(
        "node 0\nnode 1\nnode 2\nnode 3\n"
        "link 0:a 1:a 5 5\nlink 1:b 3:a 5 5\n"
        f"link 0:b 2:a {alt_leg_cost} {alt_leg_cost}\n"
        f"link 2:b 3:b {alt_leg_cost} {alt_leg_cost}\n")
