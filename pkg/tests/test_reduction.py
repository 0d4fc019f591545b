import itertools
import math
import random
from fractions import Fraction

import pytest

from creditnet.classspace import enumerate_reachable, unconstrained
from creditnet.constraints import ConstrainedNetwork, node_bound
from creditnet.errors import BudgetExceeded, ExpansionViolated, InvalidBounds, OddTotal
from creditnet.network import Configuration, CreditNetwork
from creditnet.reduction import (
    AddEdge,
    ReplaceSubgraphWithStar,
    edge_expansion,
    expander_to_star,
    monotonicity_experiment,
    reduction_spec,
    saturated_cuts,
    verify_reduction,
    windowed_network,
)

from instances import random_graph, random_tree


def k4(c=1):
    return CreditNetwork.build([(a, b, c) for a, b in itertools.combinations("ABCD", 2)])


def c4(c=1):
    return CreditNetwork.build([("A", "B", c), ("B", "C", c), ("C", "D", c), ("D", "A", c)])


def negative_control():
    """A 5-vertex graph with h = 3 where widening one window past floor(h)
    lets a cut saturate."""
    edges = [("A", "B", 2), ("A", "C", 1), ("A", "D", 3), ("A", "E", 1), ("B", "C", 1),
             ("B", "E", 2), ("C", "D", 2), ("C", "E", 1), ("D", "E", 1)]
    return CreditNetwork.build(edges), [3, 3, 3, 3, 5]


def pinned_star():
    net = CreditNetwork.build([("u", f"v{i}", 1) for i in range(1, 5)])
    start = Configuration.from_residuals(net, {("v1", "u"): 1, ("v2", "u"): 1})
    return ConstrainedNetwork(net, node_bound("u", 2, 2, net), start)


class TestExpansion:
    def test_known_values(self):
        assert edge_expansion(k4()).describe(k4()) == "h = 2/1, witness = {A,B}"
        assert edge_expansion(c4()).describe(c4()) == "h = 1/1, witness = {A,B}"
        edge = CreditNetwork.build([("A", "B", 5)])
        rep = edge_expansion(edge)
        assert rep.h == 5 and rep.witness == (0,)

    def test_witness_attains_minimum(self):
        rng = random.Random(8)
        for _ in range(20):
            net = random_graph(rng, rng.randint(2, 8), 3)
            rep = edge_expansion(net)
            w = set(rep.witness)
            boundary = sum(e.capacity for e in net.edges if (e.u in w) != (e.v in w))
            assert 0 < len(w) <= net.n // 2 and Fraction(boundary, len(w)) == rep.h
            for k in range(1, net.n // 2 + 1):
                for s in itertools.combinations(range(net.n), k):
                    s = set(s)
                    b = sum(e.capacity for e in net.edges if (e.u in s) != (e.v in s))
                    assert Fraction(b, k) >= rep.h

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            edge_expansion(k4(), budget=3)


class TestSpec:
    def test_k4_unit(self):
        spec, star = expander_to_star(k4(), 1)
        assert spec.r == (1, 1, 1, 1) and spec.windows == ((1, 2),) * 4
        assert spec.center_score == 2 and spec.offsets == (1, 1, 1, 1)
        assert [e.capacity for e in star.network.edges] == [1, 1, 1, 1]
        assert star.start.scores[spec.center] == 2

    def test_parity_normalisation(self):
        # d = 3 with r = 2 holds half-integer window ends: shrink to r = 1
        assert reduction_spec(k4(), 2, check_expansion=False).r == (1, 1, 1, 1)
        # d = 2 with r = 1 gives the same empty-edged window: r = 0
        assert reduction_spec(c4(), 1).r == (0, 0, 0, 0)

    def test_errors(self):
        with pytest.raises(ExpansionViolated):
            reduction_spec(k4(), 3)
        with pytest.raises(InvalidBounds):
            reduction_spec(k4(), 0)  # odd degree, empty window

    def test_normalised_total_is_always_even(self):
        # normalised r(v) has the parity of d(v), and the degrees sum to 2 * capacity
        rng = random.Random(12)
        for _ in range(30):
            net = random_graph(rng, rng.randint(2, 6), 3)
            r = [rng.randint(1, net.degree(v)) for v in range(net.n)]
            try:
                spec = reduction_spec(net, r, check_expansion=False)
            except InvalidBounds:
                continue
            assert sum(spec.r) % 2 == 0

    def test_degenerate_star(self):
        spec, star = expander_to_star(c4(), 0)
        rep = verify_reduction(windowed_network(c4(), spec), star, spec.offsets)
        assert rep.passed and rep.original_classes == 1
        assert all(a == 0 for a, _ in rep.liquidity.values())


class TestVerification:
    def test_k4(self):
        spec, star = expander_to_star(k4(), 1)
        rep = verify_reduction(windowed_network(k4(), spec), star, spec.offsets)
        assert rep.passed and rep.original_classes == rep.star_classes == 6
        assert set(rep.liquidity.values()) == {(Fraction(1, 3), Fraction(1, 3))}

    def test_c4(self):
        spec, star = expander_to_star(c4(), 1)
        assert verify_reduction(windowed_network(c4(), spec), star, spec.offsets).passed

    def test_capacity_two(self):
        spec, star = expander_to_star(k4(2), 4)
        rep = verify_reduction(windowed_network(k4(2), spec), star, spec.offsets)
        assert rep.passed and rep.original_classes == 85

    def test_negative_control(self):
        net, r = negative_control()
        assert edge_expansion(net).h == 3
        spec, star = expander_to_star(net, r, check_expansion=False)
        assert spec.r[-1] > math.floor(spec.h)
        original = windowed_network(net, spec)
        rep = verify_reduction(original, star, spec.offsets)
        assert not rep.bijection
        space = enumerate_reachable(original)
        assert any(saturated_cuts(net, s) for s in space.classes)

    def test_no_saturated_cut_within_expansion(self):
        rng = random.Random(21)
        done = 0
        while done < 5:
            net = random_graph(rng, rng.randint(3, 6), 3, density=0.8)
            h = math.floor(edge_expansion(net).h)
            try:
                spec = reduction_spec(net, [rng.randint(0, h) for _ in range(net.n)])
            except (InvalidBounds, OddTotal):
                continue
            space = enumerate_reachable(windowed_network(net, spec))
            assert not any(saturated_cuts(net, s) for s in space.classes)
            done += 1

    def test_start_is_translated(self):
        net = k4()
        spec = reduction_spec(net, 1)
        original = windowed_network(net, spec)
        _, star = expander_to_star(net, 1, original.start)
        leaf = [s - o for s, o in zip(original.start.scores, spec.offsets)]
        assert list(star.start.scores[:4]) == leaf


class TestMonotonicity:
    def test_bridge_family(self):
        base = pinned_star()
        for n in range(6):
            rep = monotonicity_experiment(base, AddEdge("v3", "v4", n), [("v1", "v2")])
            row = rep.rows[0]
            assert row.before == Fraction(1, 3)
            assert row.after == Fraction(n + 2, 4 * n + 6)
            assert row.bound_check == "ok"

    def test_csv(self):
        rep = monotonicity_experiment(pinned_star(), AddEdge("v3", "v4", 1), [("v1", "v2")])
        lines = rep.to_csv().splitlines()
        assert lines[0].startswith("# ")
        assert lines[1] == "pair,liquidity_before,liquidity_after,ratio,bound_check,conjecture_check"
        assert lines[2] == "v1->v2,1/3,3/10,9/10,ok,n/a"

    def test_disjoint_edge_on_tree(self):
        rng = random.Random(6)
        checked = 0
        while checked < 10:
            net = random_tree(rng, 5, 2)
            x, y = rng.sample(range(5), 2)
            rest = [v for v in range(5) if v not in (x, y)]
            u, v = rng.sample(rest, 2)
            base = unconstrained(net)
            rep = monotonicity_experiment(base, AddEdge(u, v, rng.randint(1, 2)), [(x, y)])
            assert rep.rows[0].after >= rep.rows[0].before
            checked += 1

    def test_star_replacement(self):
        base = unconstrained(k4())
        rep = monotonicity_experiment(base, ReplaceSubgraphWithStar(("A", "B", "C"), 2))
        assert len(rep.rows) == 12
        assert "h_S = 2" in rep.note
        assert all(r.conjecture_check != "n/a" for r in rep.rows)
        with pytest.raises(OddTotal):
            monotonicity_experiment(base, ReplaceSubgraphWithStar(("A", "B", "C"), 1))
