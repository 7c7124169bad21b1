import math
from fractions import Fraction

import pytest

from reachsim.topology import (DisconnectedError, Topology, TopologyError, complete,
                               diameter, dump_topology, enumerate_loop_free_paths,
                               generate, is_connected, linear_chain, load_topology,
                               neg_reinf_left, neg_reinf_middle, neg_reinf_right,
                               parse_generator_spec, random_connected, ring, velcro)

MINIMAL = "node 0\nnode 1\nlink 0:i1 1:i1 1 1\n"


def hop_matrix(t):
    """Independent all-pairs min-hop oracle (Floyd-Warshall over hops)."""
    rs = t.sorted_routers()
    inf = math.inf
    d = {(a, b): (0 if a == b else inf) for a in rs for b in rs}
    for link in t.links:
        d[(link.src, link.dst)] = min(d[(link.src, link.dst)], 1)
    for k in rs:
        for a in rs:
            for b in rs:
                if d[(a, k)] + d[(k, b)] < d[(a, b)]:
                    d[(a, b)] = d[(a, k)] + d[(k, b)]
    return d


class TestLoad:
    def test_smallest_valid_file(self):
        t = load_topology(MINIMAL)
        assert t.routers == {0, 1}
        assert t.link_count == 2  # one wire, two directions
        link = t.link(0, "i1")
        assert link.dst == 1
        assert link.cost_forward == link.cost_reverse == Fraction(1)

    def test_self_loop_rejected(self):
        with pytest.raises(TopologyError, match="self-loop"):
            load_topology("node 0\nlink 0:i1 0:i2 1 1")

    def test_four_node_chain_diameter(self):
        text = dump_topology(linear_chain(4))
        t = load_topology(text)
        assert diameter(t) == 3

    def test_errors_carry_line_numbers(self):
        with pytest.raises(TopologyError, match="line 2"):
            load_topology("node 0\nfrobnicate 1 2")
        with pytest.raises(TopologyError, match="line 3"):
            load_topology("node 0\nnode 1\nlink 0:i1 1:i1 -2 1")

    def test_duplicate_interface_rejected(self):
        text = ("node 0\nnode 1\nnode 2\n"
                "link 0:i1 1:i1 1 1\n"
                "link 0:i1 2:i1 1 1\n")
        with pytest.raises(TopologyError, match="duplicate interface"):
            load_topology(text)

    def test_comments_and_blank_lines(self):
        t = load_topology("# top\nnode 0\n\nnode 1\nlink 0:i1 1:i1 2 3 # asym\n")
        assert t.link(0, "i1").cost_forward == 2
        assert t.link(0, "i1").cost_reverse == 3
        assert t.link(1, "i1").cost_forward == 3

    def test_order_preserving(self):
        text = ("node 0\nnode 1\nnode 2\n"
                "link 0:b 1:x 1 1\n"
                "link 0:a 2:y 1 1\n")
        t = load_topology(text)
        assert t.interfaces(0) == ["b", "a"]


class TestGenerators:
    def test_linear_chain_4(self):
        t = linear_chain(4)
        assert t.routers == {0, 1, 2, 3}
        assert t.link_count == 6
        assert all(l.cost_forward == 1 for l in t.links)

    def test_complete_1(self):
        t = complete(1)
        assert t.router_count == 1 and t.link_count == 0

    def test_ring_needs_three(self):
        with pytest.raises(TopologyError):
            ring(2)

    def test_velcro_direct_and_loopy_costs(self):
        t = velcro(10, 1, 10)
        direct = t.link(0, "direct")
        assert direct.dst == 1 and direct.cost_forward == 10
        alt = [p for p in enumerate_loop_free_paths(t, 0, 1)
               if p.hops[0] != (0, "direct")]
        assert min(p.total_cost for p in alt) == 10

    @pytest.mark.parametrize("k,c", [(5, 2), (3, 1), (10, 1)])
    def test_velcro_parametric(self, k, c):
        t = velcro(10, k, c)
        alt = [p for p in enumerate_loop_free_paths(t, 0, 1)
               if p.hops[0] != (0, "direct")]
        assert min(p.total_cost for p in alt) == k * c
        # the alternative region is genuinely loopy: many distinct paths
        assert len(alt) >= 2 ** k

    def test_velcro_rejects_bad_params(self):
        with pytest.raises(TopologyError):
            velcro(0, 1, 1)
        with pytest.raises(TopologyError):
            velcro(1, 0, 1)

    def test_neg_reinf_left_leaf(self):
        t = neg_reinf_left()
        assert t.degree(2) == 1              # C is a leaf
        assert t.link(0, "i2").dst == 2      # reachable from the A-B path node

    def test_neg_reinf_middle_walk(self):
        t = neg_reinf_middle()
        walk = [(0, "i1"), (1, "i4"), (3, "i5"), (2, "i3")]
        at = 0
        for r, iface in walk:
            assert r == at
            at = t.link(r, iface).dst
        assert at == 1   # the walk re-enters B

    def test_neg_reinf_right_extra_inbound(self):
        t = neg_reinf_right()
        assert t.link(2, "i7").dst == 0      # C:i7 reaches A directly
        left_ifaces = set(neg_reinf_middle().interfaces(2))
        assert set(t.interfaces(2)) == left_ifaces | {"i7"}

    def test_random_connected_deterministic_and_connected(self):
        a = random_connected(9, 0.3, (1, 9), seed=11)
        b = random_connected(9, 0.3, (1, 9), seed=11)
        assert a == b
        assert is_connected(a)
        c = random_connected(9, 0.3, (1, 9), seed=12)
        assert c != a

    def test_generate_from_spec_strings(self):
        assert generate("linear_chain:4") == linear_chain(4)
        assert generate("velcro:10,5,2") == velcro(10, 5, 2)
        assert generate("neg_reinf_left") == neg_reinf_left()
        with pytest.raises(TopologyError):
            parse_generator_spec("ring")          # missing parameter
        with pytest.raises(TopologyError):
            parse_generator_spec("banana:3")

    @pytest.mark.parametrize("spec", [
        "linear_chain:5", "ring:6", "complete:4", "velcro:10,3,2",
        "neg_reinf_left", "neg_reinf_middle", "neg_reinf_right",
        "random_connected:8,0.4,1,9,7",
    ])
    def test_round_trip(self, spec):
        t = generate(spec)
        assert load_topology(dump_topology(t)) == t


class TestPathOracle:
    def test_complete3_two_paths(self):
        paths = enumerate_loop_free_paths(complete(3), 0, 1)
        assert len(paths) == 2
        assert [p.routers() for p in paths] == [(0, 1), (0, 2, 1)]

    def test_chain_single_path(self):
        paths = enumerate_loop_free_paths(linear_chain(4), 0, 3)
        assert len(paths) == 1
        assert paths[0].total_cost == 3

    def test_disconnected_pair_empty(self):
        t = Topology({0, 1}, [])
        assert len(enumerate_loop_free_paths(t, 0, 1)) == 0

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_complete_path_count_formula(self, n):
        # number of simple 0->1 paths: sum over detour lengths k of
        # (n-2)! / (n-2-k)!  arrangements of intermediate routers
        expect = sum(math.factorial(n - 2) // math.factorial(n - 2 - k)
                     for k in range(n - 1))
        assert len(enumerate_loop_free_paths(complete(n), 0, 1)) == expect

    def test_paths_are_unique_and_replayable(self):
        t = random_connected(7, 0.5, (1, 4), seed=5)
        paths = enumerate_loop_free_paths(t, 0, 6)
        seen = set()
        for p in paths:
            p.validate(t)
            assert p.hops not in seen
            seen.add(p.hops)

    def test_truncation_flag(self):
        paths = enumerate_loop_free_paths(complete(6), 0, 1, max_paths=3)
        assert paths.truncated and len(paths) == 3
        full = enumerate_loop_free_paths(complete(6), 0, 1)
        assert not full.truncated

    def test_reverse_needs_reverse_link(self):
        # a one-way wire pair with a zero-cost back direction still exists; a
        # genuinely absent reverse link must not be navigable
        t = Topology({0, 1}, [dump_link for dump_link in load_topology(MINIMAL).links
                              if dump_link.src == 0])
        assert len(enumerate_loop_free_paths(t, 0, 1)) == 1
        assert len(enumerate_loop_free_paths(t, 1, 0)) == 0


class TestDiameter:
    def test_chain(self):
        assert diameter(linear_chain(4)) == 3

    def test_complete(self):
        assert diameter(complete(5)) == 1

    def test_against_hop_oracle(self):
        t = random_connected(8, 0.4, (1, 4), seed=7)
        d = hop_matrix(t)
        assert diameter(t) == max(v for v in d.values())

    def test_disconnected_raises(self):
        with pytest.raises(DisconnectedError):
            diameter(Topology({0, 1}, []))
