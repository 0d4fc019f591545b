"""Class counting and liquidity over a nice tree decomposition.

The quantity counted is the number of distinct score vectors (classes), not
configurations, so partial results cannot simply be multiplied out:
different orientations of the processed edges may yield the same finished
scores.  The DP therefore keys each state by the *set* of partial score
vectors of the active bag that are achievable for some fixed tuple of
finalised (forgotten) scores, and stores how many such tuples share that
set.  Partial scores exclude edges between active vertices; an edge is
accounted for when the first of its endpoints is forgotten.

For liquidity each achievable partial vector is paired with a transitively
closed reachability relation over the active vertices plus the two
endpoints of the query, which are never dropped.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from itertools import product

from ..errors import InfeasibleScore, InvalidDecomposition
from .decomposition import FORGET, INTRODUCE, JOIN, LEAF, TreeDecomposition, make_nice, min_degree_decomposition
from .scoresets import after_payment, normalize

_EMPTY = frozenset()


def _close(arcs):
    succ = defaultdict(set)
    for a, b in arcs:
        succ[a].add(b)
    for k in list(succ):
        for i in list(succ):
            if k in succ[i]:
                succ[i] |= succ[k]
    return frozenset((a, b) for a, bs in succ.items() for b in bs if a != b)


def _forget_options(network, v, bag):
    """Distinct effects of orienting every edge between ``v`` and ``bag``:
    ``(v's gain, per-bag-vertex gains, arcs)``."""
    pos = {w: i for i, w in enumerate(bag)}
    choices = []
    for eid, w in network.incident(v):
        if w in pos:
            cap = network.edges[eid].capacity
            choices.append([(f, w, cap - f) for f in range(cap + 1)])
    out = set()
    for combo in product(*choices):
        gain = 0
        delta = [0] * len(bag)
        arcs = set()
        for f, w, back in combo:
            gain += f
            delta[pos[w]] += back
            if f:
                arcs.add((v, w))
            if back:
                arcs.add((w, v))
        out.add((gain, tuple(delta), frozenset(arcs)))
    return sorted(out, key=lambda o: (o[0], o[1], sorted(o[2])))


def _run(network, decomp: TreeDecomposition, admitted, keep=()):
    track = bool(keep)
    keep = frozenset(keep)
    nodes = decomp.nodes
    tables = {}
    for i in decomp.postorder():
        nd = nodes[i]
        if nd.kind == LEAF:
            tables[i] = {frozenset({((0,), _EMPTY)}): 1}
        elif nd.kind == INTRODUCE:
            at = nd.bag.index(nd.vertex)
            out = {}
            for key, cnt in tables.pop(nd.children[0]).items():
                new = frozenset((p[:at] + (0,) + p[at:], c) for p, c in key)
                out[new] = out.get(new, 0) + cnt
            tables[i] = out
        elif nd.kind == JOIN:
            left = tables.pop(nd.children[0])
            right = tables.pop(nd.children[1])
            out = defaultdict(int)
            for lk, lc in left.items():
                for rk, rc in right.items():
                    new = set()
                    for p, c in lk:
                        for q, d in rk:
                            s = tuple(a + b for a, b in zip(p, q))
                            new.add((s, _close(c | d) if track else _EMPTY))
                    out[frozenset(new)] += lc * rc
            tables[i] = dict(out)
        elif nd.kind == FORGET:
            v = nd.vertex
            child_bag = nodes[nd.children[0]].bag
            at = child_bag.index(v)
            options = _forget_options(network, v, nd.bag)
            xs = admitted[v]
            out = defaultdict(int)
            for key, cnt in tables.pop(nd.children[0]).items():
                groups = defaultdict(set)
                for p, c in key:
                    base = p[:at] + p[at + 1:]
                    for gain, delta, arcs in options:
                        score = p[at] + gain
                        if xs is not None and score not in xs:
                            continue
                        s = tuple(a + b for a, b in zip(base, delta))
                        if track:
                            cc = _close(c | arcs)
                            if v not in keep:
                                cc = frozenset(ab for ab in cc if v not in ab)
                        else:
                            cc = _EMPTY
                        groups[score].add((s, cc))
                for members in groups.values():
                    out[frozenset(members)] += cnt
            tables[i] = dict(out)
        else:
            raise InvalidDecomposition(f"unknown node kind {nd.kind!r}")
    return tables[decomp.root]


def _resolve(network, decomp):
    if decomp is None:
        bags, edges = min_degree_decomposition(network)
        decomp = make_nice(network, bags, edges)
    elif not isinstance(decomp, TreeDecomposition):
        bags, edges = decomp
        decomp = make_nice(network, bags, edges)
    decomp.validate(network)
    return decomp


def treewidth_class_count(network, decomp=None, scoresets=None) -> int:
    """Number of classes with every ``S_v`` admitted.

    ``decomp`` is a nice :class:`TreeDecomposition`, a raw ``(bags,
    tree_edges)`` pair, or ``None`` for the greedy min-degree heuristic.
    """
    decomp = _resolve(network, decomp)
    root = _run(network, decomp, normalize(network, scoresets))
    return sum(root.values())


def treewidth_liquidity(network, decomp, scoresets, x, y) -> Fraction:
    """Fraction of admitted classes in which a unit payment x -> y succeeds:
    a residual path exists and the payer and payee scores stay admitted."""
    x, y = network.index(x), network.index(y)
    if x == y:
        raise ValueError("liquidity needs two distinct vertices")
    decomp = _resolve(network, decomp)
    admitted = normalize(network, scoresets)
    total = sum(_run(network, decomp, admitted).values())
    if total == 0:
        raise InfeasibleScore("no class satisfies the score sets")
    root = _run(network, decomp, after_payment(network, admitted, x, y), keep=(x, y))
    good = sum(cnt for key, cnt in root.items() if any((x, y) in c for _, c in key))
    return Fraction(good, total)
