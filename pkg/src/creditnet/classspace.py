"""Exhaustive oracles: reachable class spaces, configuration and forest counts.

Everything here is brute force and meant for desk-scale instances.  The
other modules are validated against these results.
"""
from __future__ import annotations

import csv
import io
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .constraints import TRUE, ConstrainedNetwork
from .errors import BudgetExceeded
from .network import Configuration, CreditNetwork, apply_payment, path_in_tree, residual_tree

NO_ROUTE = -1
PREDICATE_VIOLATION = -2

DEFAULT_CLASS_BUDGET = 10**7


@dataclass
class ClassSpace:
    """Reachable cycle-equivalence classes and their unit-payment transitions.

    ``transitions[c][k]`` is the successor class of ``c`` under a unit
    payment along ``pairs[k]``, or one of the negative codes
    :data:`NO_ROUTE` / :data:`PREDICATE_VIOLATION`.
    """

    cn: ConstrainedNetwork
    pairs: tuple
    classes: list
    witnesses: list
    transitions: list
    start_class: int
    index: dict = field(repr=False)

    def __len__(self):
        return len(self.classes)

    @property
    def network(self) -> CreditNetwork:
        return self.cn.network

    def pair_index(self, x, y) -> int:
        net = self.network
        try:
            return self._pair_pos[(net.index(x), net.index(y))]
        except AttributeError:
            self._pair_pos = {p: k for k, p in enumerate(self.pairs)}
            return self._pair_pos[(net.index(x), net.index(y))]

    def successor(self, c: int, x, y) -> int:
        return self.transitions[c][self.pair_index(x, y)]

    def to_csv(self) -> str:
        net = self.network
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", *net.labels,
                    *(f"{net.label(x)}->{net.label(y)}" for x, y in self.pairs)])
        codes = {NO_ROUTE: "NR", PREDICATE_VIOLATION: "PV"}
        for c, (s, row) in enumerate(zip(self.classes, self.transitions)):
            w.writerow([c, *s, *(codes.get(t, t) for t in row)])
        return buf.getvalue()


def _ordered_pairs(network: CreditNetwork, pairs) -> tuple:
    if pairs is None:
        pairs = combinations(range(network.n), 2)
    out = set()
    for a, b in pairs:
        a, b = network.index(a), network.index(b)
        if a == b:
            raise ValueError("transacting pair needs two distinct vertices")
        out.add((a, b))
        out.add((b, a))
    if not out:
        raise ValueError("at least one transacting pair is required")
    return tuple(sorted(out))


def enumerate_reachable(cn: ConstrainedNetwork, pairs=None, budget: int = DEFAULT_CLASS_BUDGET) -> ClassSpace:
    """Breadth-first closure of the start class under unit transactions.

    ``pairs`` lists unordered transacting pairs (default: every pair); both
    directions are explored.  Classes are returned in lexicographic order of
    their score vectors.
    """
    ordered = _ordered_pairs(cn.network, pairs)
    pred = cn.predicate
    start = cn.start
    classes = [start.scores]
    witnesses = [start]
    index = {start.scores: 0}
    rows = []
    i = 0
    while i < len(classes):
        cfg, s = witnesses[i], classes[i]
        trees = {}
        row = []
        for x, y in ordered:
            tree = trees.get(x)
            if tree is None:
                tree = trees[x] = residual_tree(cfg, x, 1)
            if y not in tree:
                row.append(NO_ROUTE)
                continue
            t = list(s)
            t[x] -= 1
            t[y] += 1
            t = tuple(t)
            if not pred(t):
                row.append(PREDICATE_VIOLATION)
                continue
            j = index.get(t)
            if j is None:
                if len(classes) >= budget:
                    raise BudgetExceeded(f"more than {budget} reachable classes")
                j = index[t] = len(classes)
                classes.append(t)
                witnesses.append(apply_payment(cfg, path_in_tree(tree, y), 1))
            row.append(j)
        rows.append(row)
        i += 1

    order = sorted(range(len(classes)), key=classes.__getitem__)
    rank = [0] * len(order)
    for new, old in enumerate(order):
        rank[old] = new
    classes = [classes[k] for k in order]
    witnesses = [witnesses[k] for k in order]
    transitions = [[rank[t] if t >= 0 else t for t in rows[k]] for k in order]
    return ClassSpace(
        cn=cn,
        pairs=ordered,
        classes=classes,
        witnesses=witnesses,
        transitions=transitions,
        start_class=rank[0],
        index={s: k for k, s in enumerate(classes)},
    )


def unit_payment_succeeds(space: ClassSpace, c: int, x: int, y: int) -> bool:
    """Path exists in class ``c`` and the successor class is predicate-legal."""
    cfg = space.witnesses[c]
    if y not in residual_tree(cfg, x, 1):
        return False
    t = list(space.classes[c])
    t[x] -= 1
    t[y] += 1
    return bool(space.cn.predicate(t))


def exact_liquidity(space: ClassSpace, x, y) -> Fraction:
    """Fraction of reachable classes in which a unit payment x -> y succeeds."""
    net = space.network
    x, y = net.index(x), net.index(y)
    if x == y:
        raise ValueError("liquidity needs two distinct vertices")
    try:
        k = space.pair_index(x, y)
    except KeyError:
        ok = sum(unit_payment_succeeds(space, c, x, y) for c in range(len(space)))
    else:
        ok = sum(1 for row in space.transitions if row[k] >= 0)
    return Fraction(ok, len(space))


def distinguishing_sequence(space: ClassSpace, a: int, b: int):
    """Shortest list of ordered pairs whose unit payments succeed in sequence
    from one of the two classes but not from the other; ``None`` when the two
    classes are transaction-equivalent."""
    if a == b:
        return None
    seen = {(a, b)}
    queue = deque([((a, b), [])])
    trans = space.transitions
    while queue:
        (p, q), seq = queue.popleft()
        for k, pair in enumerate(space.pairs):
            tp, tq = trans[p][k], trans[q][k]
            if (tp >= 0) != (tq >= 0):
                return seq + [pair]
            if tp >= 0 and (tp, tq) not in seen:
                seen.add((tp, tq))
                queue.append(((tp, tq), seq + [pair]))
    return None


def unconstrained(network: CreditNetwork, start: Configuration | None = None) -> ConstrainedNetwork:
    return ConstrainedNetwork(network, TRUE, start or Configuration.balanced(network))


def enumerate_all_configurations(network: CreditNetwork, budget: int = 10**8) -> dict:
    """Configurations per score vector, over the full product of residual splits.

    The product is accumulated edge by edge, so equal partial score vectors
    are merged as soon as they coincide.
    """
    size = math.prod(e.capacity + 1 for e in network.edges)
    if size > budget:
        raise BudgetExceeded(f"{size} configurations exceed budget {budget}")
    counts = {(0,) * network.n: 1}
    for e in network.edges:
        nxt = defaultdict(int)
        for s, c in counts.items():
            for f in range(e.capacity + 1):
                t = list(s)
                t[e.u] += f
                t[e.v] += e.capacity - f
                nxt[tuple(t)] += c
        counts = nxt
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class ForestCount:
    total: int
    joining: dict  # (x, y) -> number of forests with x and y in one component

    def liquidity(self, x: int, y: int) -> Fraction:
        return Fraction(self.joining[(x, y)], self.total)


def count_forests(network: CreditNetwork, budget: int = 2**24) -> ForestCount:
    """Count acyclic edge subsets of the unit multigraph expansion.

    A capacity-``c`` edge stands for ``c`` parallel unit edges.  Two parallel
    edges already form a cycle, so a forest picks at most one edge per
    adjacent vertex pair; the search therefore walks subsets of the
    underlying simple graph and weights each forest by the product of its
    edge multiplicities.  ``budget`` caps the number of simple-graph subsets.
    """
    n = network.n
    mult = defaultdict(int)
    for e in network.edges:
        if e.capacity:
            mult[(e.u, e.v)] += e.capacity
    simple = sorted(mult.items())
    if 2 ** len(simple) > budget:
        raise BudgetExceeded(f"2^{len(simple)} edge subsets exceed budget {budget}")
    total = 0
    joining = defaultdict(int)

    def walk(k, comp, weight):
        nonlocal total
        if k == len(simple):
            total += weight
            groups = defaultdict(list)
            for v, c in enumerate(comp):
                groups[c].append(v)
            for members in groups.values():
                for a, b in combinations(members, 2):
                    joining[(a, b)] += weight
            return
        (a, b), m = simple[k]
        walk(k + 1, comp, weight)
        ca, cb = comp[a], comp[b]
        if ca != cb:
            walk(k + 1, tuple(ca if c == cb else c for c in comp), weight * m)

    walk(0, tuple(range(n)), 1)
    table = {}
    for x in range(n):
        table[(x, x)] = total
        for y in range(x + 1, n):
            table[(x, y)] = table[(y, x)] = joining[(x, y)]
    return ForestCount(total, table)
