"""Acceptance checks, one test function per criterion.

Each test carries a ``criterion`` marker; conftest prints one PASS/FAIL
line per criterion at the end of the run.
"""
import itertools
import math
import random
from fractions import Fraction

import pytest

from creditnet import load_corpus
from creditnet.classspace import (
    count_forests,
    distinguishing_sequence,
    enumerate_all_configurations,
    enumerate_reachable,
    exact_liquidity,
    unconstrained,
)
from creditnet.constraints import TRUE, ConstrainedNetwork, build_gadget, node_bound, node_constrained
from creditnet.dp import (
    make_nice,
    star_failure_bounds,
    star_liquidity,
    tree_class_count,
    tree_liquidity,
    treewidth_class_count,
    treewidth_liquidity,
    unconstrained_star_failure,
)
from creditnet.dp.scoresets import from_predicate_windows
from creditnet.errors import InvalidBounds
from creditnet.markov import TransactionDistribution, simulate
from creditnet.network import Configuration, CreditEdge, CreditNetwork, apply_payment
from creditnet.reduction import (
    AddEdge,
    ReplaceSubgraphWithStar,
    edge_expansion,
    expander_to_star,
    monotonicity_experiment,
    reduction_spec,
    verify_reduction,
    windowed_network,
)

from conftest import REPORTS
from instances import (
    random_configuration,
    random_constrained,
    random_graph,
    random_partial_ktree,
    random_tree,
    simple_paths,
)

CORPUS = ["single_edge", "pinned_star", "pinned_star_bridge", "k4", "k4_windows",
          "triangle", "triangle_fixed", "c4", "path", "path_fixed"]


def pinned_star():
    net = CreditNetwork.build([("u", f"v{i}", 1) for i in range(1, 5)])
    start = Configuration.from_residuals(net, {("v1", "u"): 1, ("v2", "u"): 1})
    return ConstrainedNetwork(net, node_bound("u", 2, 2, net), start)


def leaf_pairs(cn):
    return list(itertools.combinations(range(1, cn.network.n), 2))


def complete(n, cap):
    return CreditNetwork.build([(chr(65 + a), chr(65 + b), cap)
                                for a, b in itertools.combinations(range(n), 2)])


def cycle(n, cap):
    return CreditNetwork.build([(chr(65 + k), chr(65 + (k + 1) % n), cap) for k in range(n)])


def uniform_caps(net, cap):
    return CreditNetwork(list(net.labels), [CreditEdge(e.u, e.v, cap, e.edge_id) for e in net.edges])


@pytest.mark.criterion(1, "pinned star liquidity 1/3 and the bridged family")
def test_pinned_star():
    base = pinned_star()
    space = enumerate_reachable(base, leaf_pairs(base))
    for x, y in itertools.permutations(range(1, 5), 2):
        assert exact_liquidity(space, x, y) == Fraction(1, 3)
    values = []
    for n in range(11):
        net = base.network.with_edge("v3", "v4", n)
        start = Configuration(net, base.start.forward + ((n + 1) // 2,))
        cn = ConstrainedNetwork(net, base.predicate, start)
        q = exact_liquidity(enumerate_reachable(cn, leaf_pairs(cn)), "v1", "v2")
        assert q == Fraction(n + 2, 4 * n + 6)
        assert q > Fraction(1, 4)
        values.append(q)
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.criterion(2, "two-leaf unconstrained star closed form")
def test_unconstrained_star():
    for ci, cj in itertools.product(range(1, 7), repeat=2):
        net = CreditNetwork.build([("u", "a", ci), ("u", "b", cj)])
        space = enumerate_reachable(unconstrained(net))
        expected = 1 - (Fraction(1, ci + 1) + Fraction(1, cj + 1) - Fraction(1, (ci + 1) * (cj + 1)))
        assert exact_liquidity(space, "a", "b") == expected
        assert exact_liquidity(space, "a", "b") == 1 - unconstrained_star_failure(ci, cj)


@pytest.mark.criterion(3, "pinned star failure bounds, exhaustive sweep")
def test_star_bounds_sweep():
    checked = violations = 0
    for n in range(2, 7):
        for caps in itertools.combinations_with_replacement(range(1, 6), n):
            m = sum(caps) // 2
            for i, j in itertools.permutations(range(n), 2):
                fail = 1 - star_liquidity(caps, m, i, j)
                lo, hi = star_failure_bounds(caps[i], caps[j])
                checked += 1
                violations += not lo <= fail <= hi
    assert checked > 4000 and violations == 0


@pytest.mark.criterion(4, "expander-to-star reduction verified, negative control fails")
def test_reduction():
    spec, star = expander_to_star(complete(4, 1), 1)
    rep = verify_reduction(windowed_network(complete(4, 1), spec), star, spec.offsets)
    assert rep.passed and set(rep.liquidity.values()) == {(Fraction(1, 3), Fraction(1, 3))}
    spec, star = expander_to_star(cycle(4, 1), 1)
    assert verify_reduction(windowed_network(cycle(4, 1), spec), star, spec.offsets).passed

    rng = random.Random(41)
    done = 0
    while done < 20:
        net = random_graph(rng, rng.randint(3, 8), 3, density=0.7, max_edges=12)
        h = math.floor(edge_expansion(net).h)
        r = [rng.randint(0, h) for _ in range(net.n)]
        try:
            spec, star = expander_to_star(net, r)
        except InvalidBounds:
            continue
        rep = verify_reduction(windowed_network(net, spec), star, spec.offsets)
        assert rep.passed, (net.edges, r)
        done += 1

    edges = [("A", "B", 2), ("A", "C", 1), ("A", "D", 3), ("A", "E", 1), ("B", "C", 1),
             ("B", "E", 2), ("C", "D", 2), ("C", "E", 1), ("D", "E", 1)]
    net = CreditNetwork.build(edges)
    spec, star = expander_to_star(net, [3, 3, 3, 3, 5], check_expansion=False)
    assert spec.r[-1] > math.floor(spec.h)
    assert not verify_reduction(windowed_network(net, spec), star, spec.offsets).bijection


def _check_interval(net):
    h = math.floor(edge_expansion(net).h)
    spec = reduction_spec(net, h)
    assert h >= 2 and spec.r == (h,) * net.n
    space = enumerate_reachable(windowed_network(net, spec))
    a, b = 1 - Fraction(1, h + 1), 1 - Fraction(2, h)
    lo, hi = min(a, b), max(a, b)
    for x, y in itertools.permutations(range(net.n), 2):
        assert lo <= exact_liquidity(space, x, y) <= hi


@pytest.mark.criterion(5, "liquidity interval from the expansion bound")
def test_expansion_interval():
    for net in (complete(3, 1), complete(3, 2), complete(3, 3), complete(4, 2),
                cycle(4, 2), complete(5, 2), complete(4, 4)):
        _check_interval(net)
    # capacity-2 edges make every degree even, so an even floor(h) keeps r = floor(h)
    rng = random.Random(1)
    done = 0
    while done < 5:
        net = uniform_caps(random_graph(rng, rng.randint(4, 6), 1, density=0.9), 2)
        h = math.floor(edge_expansion(net).h)
        if h < 2 or h % 2:
            continue
        _check_interval(net)
        done += 1


@pytest.mark.criterion(6, "class counts agree across three oracles")
def test_oracle_triangle():
    rng = random.Random(6)
    for _ in range(40):
        net = random_graph(rng, rng.randint(2, 7), 3, max_edges=8)
        space = enumerate_reachable(unconstrained(net))
        keys = set(enumerate_all_configurations(net))
        fc = count_forests(net)
        assert len(space) == len(keys) == fc.total
        assert set(space.classes) == keys
        for x, y in itertools.permutations(range(net.n), 2):
            assert exact_liquidity(space, x, y) == Fraction(fc.joining[(x, y)], fc.total)


@pytest.mark.criterion(7, "tree DP matches the class-space oracle")
def test_tree_dp():
    path = CreditNetwork.build([("A", "B", 2), ("B", "C", 2)])
    assert tree_class_count(path, {"B": {2}}) == 3
    assert tree_liquidity(path, {"B": {2}}, "A", "C") == Fraction(2, 3)
    rng = random.Random(7)
    for _ in range(100):
        net = random_tree(rng, rng.randint(2, 8), 3)
        cn, windows = random_constrained(rng, net)
        sets = from_predicate_windows(net, windows)
        space = enumerate_reachable(cn)
        assert tree_class_count(net, sets) == len(space)
        for x, y in itertools.permutations(range(net.n), 2):
            assert tree_liquidity(net, sets, x, y) == exact_liquidity(space, x, y)


@pytest.mark.criterion(8, "treewidth DP matches the class-space oracle")
def test_treewidth_dp():
    k4 = complete(4, 1)
    sets = {v: {1, 2} for v in "ABCD"}
    d = make_nice(k4, {0: "ABCD"}, [])
    assert treewidth_class_count(k4, d, sets) == 6
    assert treewidth_liquidity(k4, d, sets, "A", "B") == Fraction(1, 3)
    rng = random.Random(8)
    for _ in range(50):
        net, bags, tree_edges = random_partial_ktree(rng, rng.randint(4, 8), 3, 2)
        d = make_nice(net, bags, tree_edges)
        assert d.width <= 3
        cn, windows = random_constrained(rng, net)
        sets = from_predicate_windows(net, windows)
        space = enumerate_reachable(cn)
        assert treewidth_class_count(net, d, sets) == len(space)
        for x, y in itertools.permutations(range(net.n), 2):
            assert treewidth_liquidity(net, d, sets, x, y) == exact_liquidity(space, x, y)


@pytest.mark.criterion(9, "gadget expansion preserves classes and liquidity")
def test_gadget():
    rng = random.Random(5)
    for _ in range(20):
        net = random_graph(rng, rng.randint(2, 6), 2, max_edges=8)
        start = random_configuration(rng, net)
        caps = {v: rng.randint(start.scores[v], net.degree(v)) for v in range(net.n)}
        cn = node_constrained(net, {v: (0, c) for v, c in caps.items()}, start)
        g = build_gadget(net, caps, start)
        fakes = [g.fake[v] for v in range(net.n)]
        gspace = enumerate_reachable(ConstrainedNetwork(g.network, TRUE, g.start),
                                     list(itertools.combinations(fakes, 2)))
        space = enumerate_reachable(cn)
        projected = {tuple(s[f] for f in fakes) for s in gspace.classes}
        assert len(projected) == len(gspace) == len(space)
        assert projected == set(space.classes)
        for x, y in itertools.permutations(range(net.n), 2):
            assert exact_liquidity(space, x, y) == exact_liquidity(gspace, fakes[x], fakes[y])


def _route_independence(rng):
    done = 0
    while done < 10_000:
        net = random_graph(rng, rng.randint(3, 6), 3, density=0.7)
        cfg = random_configuration(rng, net)
        a, b = rng.sample(range(net.n), 2)
        paths = simple_paths(cfg, a, b, 1)
        if len(paths) < 2:
            continue
        assert len({apply_payment(cfg, p, 1).scores for p in paths}) == 1
        done += 1


def _uniform_stationarity():
    rng = random.Random(3)
    cases = [load_corpus(f"{name}.net").constrained() for name in ("single_edge", "k4", "c4", "k4_windows")]
    while len(cases) < 8:
        net = random_graph(rng, rng.randint(3, 6), 2, max_edges=7)
        if 50 <= len(enumerate_reachable(unconstrained(net))) <= 200:
            cases.append(unconstrained(net))
    for cn in cases:
        space = enumerate_reachable(cn)
        assert len(space) <= 200
        rep = simulate(cn, TransactionDistribution.uniform(cn.network), 10**6, 10**4, seed=1,
                       track_classes=True, space=space)
        assert rep.tv_distance < 0.02
        assert rep.invalid_states == rep.irreversible == rep.outside_space == 0


def _distinguishable(rng):
    spaces = [enumerate_reachable(load_corpus(f"{name}.net").constrained()) for name in CORPUS]
    while len(spaces) < 25:
        net = random_graph(rng, rng.randint(2, 5), 2)
        spaces.append(enumerate_reachable(random_constrained(rng, net)[0]))
    for space in spaces:
        if len(space) > 50:
            continue
        for a, b in itertools.combinations(range(len(space)), 2):
            assert distinguishing_sequence(space, a, b) is not None


@pytest.mark.criterion(10, "route independence, uniform stationarity, distinguishability")
def test_chain_properties():
    rng = random.Random(10)
    _route_independence(rng)
    _uniform_stationarity()
    _distinguishable(rng)


@pytest.mark.criterion(11, "Monte Carlo liquidity within 0.01 of exact on the corpus")
def test_monte_carlo():
    for name in CORPUS:
        nf = load_corpus(f"{name}.net")
        cn = nf.constrained()
        dist = nf.distribution()
        space = enumerate_reachable(cn, nf.transacting_pairs())
        rep = simulate(cn, dist, 10**6, 10**4, seed=11)
        for x, y, rate in dist.rates:
            assert rate == 0 or abs(rep.liquidity(x, y) - float(exact_liquidity(space, x, y))) <= 0.01, (name, x, y)
        if name in ("single_edge", "pinned_star"):
            assert simulate(cn, dist, 10**6, 10**4, seed=11) == rep


@pytest.mark.criterion(12, "monotonicity reports (reported, not checked)")
def test_monotonicity_reports():
    base = pinned_star()
    lines = ["", "monotonicity: pinned star with a bridge v3-v4 of capacity n"]
    for n in range(11):
        rep = monotonicity_experiment(base, AddEdge("v3", "v4", n), [("v1", "v2")])
        lines.append(f"n={n:2d} " + rep.to_csv().splitlines()[-1])
    rng = random.Random(12)
    done = 0
    while done < 10:
        net = random_graph(rng, rng.randint(4, 6), 2, density=0.6)
        members = tuple(sorted(rng.sample(range(net.n), rng.randint(2, 3))))
        caps = {m: rng.randint(1, 3) for m in members}
        if sum(caps.values()) % 2:
            continue
        rep = monotonicity_experiment(unconstrained(net), ReplaceSubgraphWithStar(members, caps))
        ratios = [r.ratio for r in rep.rows if r.ratio is not None]
        below = sum(r.conjecture_check == "below" for r in rep.rows)
        lines.append(f"replace {[net.label(m) for m in members]} caps {sorted(caps.values())}: "
                     f"{rep.note}; ratio min {float(min(ratios)):.3f} max {float(max(ratios)):.3f}; "
                     f"rows below conjectured floor {below}/{len(rep.rows)}")
        done += 1
    text = "\n".join(lines)
    print(text)
    REPORTS.append(text)
