from fractions import Fraction

import pytest

from reachsim.deterministic import (dijkstra, dv_message_units, dv_round,
                                    fresh_dv_states, path_vector_failure_trace,
                                    run_distance_vector, run_link_state,
                                    run_path_vector, simulate_count_to_infinity,
                                    _pv_round)
from reachsim.tables import PathVectorRoute, PathVectorTable, TableError
from reachsim.topology import (DisconnectedError, Topology, complete, diameter,
                               linear_chain, load_topology, random_connected)

from oracles import best_path_hop_bound, fw_costs


CORPUS = [random_connected(n, p, (1, 9), seed=s)
          for s, (n, p) in enumerate([(4, 0.3), (6, 0.4), (8, 0.5), (10, 0.35),
                                      (12, 0.25), (5, 0.9), (7, 0.6)])]


class TestLinkState:
    def test_chain_costs(self):
        res = run_link_state(linear_chain(4))
        entry = res.tables[0].get(3)
        assert entry.cost == 3
        assert res.tables[0].get(1).out_interface == entry.out_interface

    def test_complete2(self):
        res = run_link_state(complete(2))
        for r in (0, 1):
            assert len(res.tables[r].entries) == 1
            assert res.tables[r].get(1 - r).cost == 1

    def test_matches_brute_force_oracle(self):
        t = random_connected(10, 0.35, (1, 9), seed=3)
        oracle = fw_costs(t)
        res = run_link_state(t)
        for a in t.sorted_routers():
            for b in t.sorted_routers():
                if a != b:
                    assert res.tables[a].get(b).cost == oracle[(a, b)]

    def test_next_hops_are_consistent(self):
        t = random_connected(9, 0.4, (1, 9), seed=21)
        oracle = fw_costs(t)
        res = run_link_state(t)
        for a in t.sorted_routers():
            for b, entry in res.tables[a].entries.items():
                link = t.link(a, entry.out_interface)
                assert link.cost_forward + oracle[(link.dst, b)] == entry.cost

    def test_flood_accounting(self):
        for t in CORPUS:
            res = run_link_state(t)
            assert res.flood_link_traversals <= t.router_count * t.link_count
            # payload per advertisement is the originator's neighbor count
            assert res.message_count <= max(t.degree(r) for r in t.routers) \
                * res.flood_link_traversals

    def test_disconnected_rejected(self):
        with pytest.raises(DisconnectedError):
            run_link_state(Topology({0, 1}, []))


class TestDistanceVector:
    def test_cold_start_round_one_learns_neighbors_only(self):
        t = linear_chain(4)
        states, changed = dv_round(fresh_dv_states(t), t)
        assert changed
        assert set(states[0].entries) == {1}
        assert states[0].get(1).cost == 1
        assert set(states[1].entries) == {0, 2}

    def test_fixpoint_reports_unchanged(self):
        t = linear_chain(4)
        res = run_distance_vector(t)
        _, changed = dv_round(res.tables, t)
        assert not changed

    def test_chain_converges_in_diameter_rounds(self):
        t = linear_chain(4)
        res = run_distance_vector(t)
        assert res.converged and res.rounds_used == 3 == diameter(t)
        oracle = fw_costs(t)
        for a in (0, 1, 2, 3):
            for b in (0, 1, 2, 3):
                if a != b:
                    assert res.tables[a].get(b).cost == oracle[(a, b)]

    def test_single_router(self):
        t = complete(1)
        res = run_distance_vector(t)
        assert res.rounds_used == 0
        assert res.tables[0].entries == {}

    def test_complete4_message_accounting(self):
        res = run_distance_vector(complete(4))
        # converged tables: 4 routers x 3 neighbors x 3 entries
        assert res.per_round_message_count[-1] == 36

    def test_matches_oracle_on_corpus(self):
        for t in CORPUS:
            res = run_distance_vector(t, infinity_bound=10 ** 6)
            oracle = fw_costs(t)
            assert res.converged
            for a in t.sorted_routers():
                for b in t.sorted_routers():
                    if a != b:
                        assert res.tables[a].get(b).cost == oracle[(a, b)]

    def test_converges_within_best_path_hop_bound(self):
        for t in CORPUS:
            res = run_distance_vector(t, infinity_bound=10 ** 6)
            assert res.rounds_used == best_path_hop_bound(t)


class TestCountToInfinity:
    def test_chain_counts_up_to_bound(self):
        trace = simulate_count_to_infinity(linear_chain(4), remove=3, infinity_bound=16)
        assert trace.rows, "expected a nonempty trace"
        for router in (1, 2):
            costs = trace.costs_at(router)
            assert costs[-1] == 16
            assert all(b >= a for a, b in zip(costs, costs[1:])), "monotone counting"
            distinct = [c for i, c in enumerate(costs) if i == 0 or costs[i - 1] != c]
            assert all(b > a for a, b in zip(distinct, distinct[1:]))
            assert len(distinct) >= 5   # genuinely counts, not a single jump

    def test_remove_unreachable_gives_empty_trace(self):
        t = Topology({0, 1, 2}, load_topology("node 0\nnode 1\nnode 2\n"
                                              "link 0:i1 1:i1 1 1\n").links)
        trace = simulate_count_to_infinity(t, remove=2)
        assert trace.rows == []

    def test_csv_emission(self):
        trace = simulate_count_to_infinity(linear_chain(3), remove=2)
        csv = trace.to_csv()
        assert csv.splitlines()[0] == "round,router,destination,cost,next_hop"

    def test_path_vector_declares_unreachable_without_counting(self):
        t = linear_chain(4)
        pv = path_vector_failure_trace(t, remove=3)
        assert pv.rounds_to_withdraw <= diameter(t)
        for _, row in pv.rows:
            for cost in row.values():
                assert cost is None or cost <= 3   # never exceeds the true cost


class TestPathVector:
    def test_complete3_direct_best(self):
        res = run_path_vector(complete(3))
        best = res.tables[0].best(1)
        assert best.path == (0, 1) and best.cost == 1

    def test_vector_containing_receiver_is_discarded(self):
        t = linear_chain(2)
        tables = {0: PathVectorTable(0), 1: PathVectorTable(1)}
        # router 1 claims a route to 9 that already passes through router 0
        tables[1].insert(9, 1, PathVectorRoute(Fraction(5), (1, 0, 9)))
        new_tables, _ = _pv_round(tables, t)
        assert new_tables[0].best(9) is None
        assert new_tables[0].best(1).path == (0, 1)

    def test_insert_rejects_repeated_router(self):
        pv = PathVectorTable(0)
        with pytest.raises(TableError):
            pv.insert(2, 1, PathVectorRoute(Fraction(1), (0, 1, 0, 2)))

    def test_matches_oracle(self):
        t = random_connected(8, 0.45, (1, 9), seed=13)
        res = run_path_vector(t)
        oracle = fw_costs(t)
        assert res.converged
        for a in t.sorted_routers():
            for b in t.sorted_routers():
                if a != b:
                    assert res.tables[a].best(b).cost == oracle[(a, b)]

    def test_no_stored_vector_repeats_a_router(self):
        for t in CORPUS:
            res = run_path_vector(t)
            for table in res.tables.values():
                for d in table.destinations():
                    for route in table.routes(d):
                        assert len(set(route.path)) == len(route.path)

    def test_best_paths_start_and_end_correctly(self):
        t = random_connected(7, 0.5, (1, 9), seed=2)
        res = run_path_vector(t)
        for r in t.sorted_routers():
            for d in res.tables[r].destinations():
                best = res.tables[r].best(d)
                assert best.path[0] == r and best.path[-1] == d


def test_dv_and_ls_and_pv_agree_exactly():
    for t in CORPUS:
        oracle = fw_costs(t)
        ls = run_link_state(t).tables
        dv = run_distance_vector(t, infinity_bound=10 ** 6).tables
        pv = run_path_vector(t).tables
        for a in t.sorted_routers():
            for b in t.sorted_routers():
                if a == b:
                    continue
                assert ls[a].get(b).cost == oracle[(a, b)]
                assert dv[a].get(b).cost == oracle[(a, b)]
                assert pv[a].best(b).cost == oracle[(a, b)]
