import random

import pytest

from reachsim.tables import (ForwardPolicy, ProbTable, QTable, TableError,
                             choose_interface, dump_prob_tables, init_uniform,
                             prob_from_q)
from reachsim.topology import complete, linear_chain


class TestInitUniform:
    def test_single_interface(self):
        t = linear_chain(2)
        table = init_uniform(t, 0)
        assert table.row(1) == [1.0]

    def test_four_interfaces(self):
        t = complete(5)
        table = init_uniform(t, 0)
        for d in (1, 2, 3, 4):
            assert table.row(d) == [0.25, 0.25, 0.25, 0.25]

    def test_rows_sum_exactly_one(self):
        t = complete(4)
        table = init_uniform(t, 2)
        assert all(sum(row) == 1.0 for row in table.rows.values())

    def test_zero_interface_router_rejected(self):
        from reachsim.topology import Topology
        bare = Topology({0, 1}, [])
        with pytest.raises(TableError):
            ProbTable(bare, 0)


class TestChooseInterface:
    def test_argmax(self):
        assert choose_interface([0.2, 0.8], ForwardPolicy.ARGMAX) == 1

    def test_argmax_tie_breaks_low_index(self):
        assert choose_interface([0.4, 0.4, 0.2], ForwardPolicy.ARGMAX) == 0

    def test_argmax_is_pure(self):
        # no RNG involved: identical inputs, identical outputs, every call
        picks = {choose_interface([0.1, 0.5, 0.4], ForwardPolicy.ARGMAX,
                                  random.Random(i)) for i in range(20)}
        assert picks == {1}

    def test_proportional_frequency(self):
        rng = random.Random(99)
        hits = sum(choose_interface([0.5, 0.5], ForwardPolicy.PROPORTIONAL, rng) == 0
                   for _ in range(100_000))
        assert abs(hits / 100_000 - 0.5) < 0.01

    def test_uniform_ignores_row(self):
        rng = random.Random(7)
        hits = sum(choose_interface([1.0, 0.0], ForwardPolicy.UNIFORM, rng) == 0
                   for _ in range(100_000))
        assert abs(hits / 100_000 - 0.5) < 0.01

    def test_exclusion(self):
        rng = random.Random(3)
        picks = {choose_interface([0.5, 0.25, 0.25], ForwardPolicy.PROPORTIONAL,
                                  rng, exclude={0}) for _ in range(200)}
        assert picks <= {1, 2}

    def test_all_excluded_raises(self):
        with pytest.raises(TableError):
            choose_interface([0.5, 0.5], ForwardPolicy.UNIFORM,
                             random.Random(0), exclude={0, 1})

    def test_deflection_free_best(self):
        rng = random.Random(1)
        assert choose_interface([0.1, 0.9], ForwardPolicy.DEFLECTION, rng) == 1

    def test_deflection_busy_best_goes_random_free(self):
        rng = random.Random(1)
        picks = {choose_interface([0.1, 0.9, 0.0], ForwardPolicy.DEFLECTION, rng,
                                  exclude={1}) for _ in range(200)}
        assert picks == {0, 2}


class TestProbFromQ:
    def test_symmetric(self):
        assert prob_from_q([2, 2]) == [0.5, 0.5]

    def test_ratio(self):
        assert prob_from_q([1, 3]) == [0.25, 0.75]

    def test_single(self):
        assert prob_from_q([5]) == [1.0]

    def test_all_zero_rejected(self):
        with pytest.raises(TableError):
            prob_from_q([0, 0, 0])

    def test_argmax_scale_invariant(self):
        rng = random.Random(5)
        for _ in range(500):
            n = rng.randint(1, 6)
            q = [rng.uniform(0.01, 10) for _ in range(n)]
            c = rng.uniform(0.1, 50)
            base = prob_from_q(q)
            scaled = prob_from_q([c * v for v in q])
            assert base.index(max(base)) == scaled.index(max(scaled))
            assert abs(sum(scaled) - 1.0) < 1e-9


class TestQTable:
    def test_best_index_min_estimate(self):
        t = complete(3)
        qt = QTable(t, 0, initial=0)
        qt.rows[1] = [4.0, 2.5]
        assert qt.best_index(1) == 1
        assert qt.best_value(1) == 2.5

    def test_tie_breaks_low_index(self):
        t = complete(3)
        qt = QTable(t, 0)
        qt.rows[2] = [1.0, 1.0]
        assert qt.best_index(2) == 0


def test_dump_format():
    t = linear_chain(3)
    tables = {r: init_uniform(t, r) for r in (0, 1, 2)}
    dump = dump_prob_tables(tables)
    lines = dump.strip().splitlines()
    assert lines[0] == "r=0 d=1 p=[1.000000]"
    assert "r=1 d=0 p=[0.500000,0.500000]" in lines
    assert len(lines) == 6
