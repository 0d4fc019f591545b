"""Counting configurations of a node-constrained tree.

Trees have no cycles, so every configuration is its own class and counting
classes is counting residual splits.  Rooting the tree, let ``C(v, k)`` be
the number of admitted configurations of the subtree at ``v`` when the
parent can pay ``v`` exactly ``k`` across their edge.  Children are folded
in one at a time by convolution over ``v``'s score (the ``D`` tables), and
``v``'s constraint is applied once all children are in.
"""
from __future__ import annotations

from fractions import Fraction

from ..errors import InfeasibleScore, NotATree
from .scoresets import after_payment, normalize


def _convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _rooted(network, root):
    """Parent edge per vertex and a parent-before-child order."""
    parent = {root: None}
    order = [root]
    for v in order:
        for eid, w in network.incident(v):
            if w not in parent:
                parent[w] = (v, eid)
                order.append(w)
    return parent, order


def _count(network, admitted, root=0, allowed=None):
    """Run the C/D recurrences.  ``allowed[v]`` optionally restricts the
    residual parent -> v on ``v``'s parent edge."""
    if not network.is_tree():
        raise NotATree("network is not a tree")
    parent, order = _rooted(network, root)
    table = {}
    for v in reversed(order):
        d = [1]
        for eid, w in network.incident(v):
            if parent[w] == (v, eid):
                d = _convolve(d, table.pop(w))
        xs = admitted[v]
        if parent[v] is None:
            return sum(c for i, c in enumerate(d) if xs is None or i in xs)
        cap = network.edges[parent[v][1]].capacity
        ok = allowed.get(v) if allowed else None
        col = [0] * (cap + 1)
        for k in range(cap + 1):
            if ok is not None and k not in ok:
                continue
            shift = cap - k  # v's residual toward its parent
            for i, c in enumerate(d):
                if c and (xs is None or i + shift in xs):
                    col[k] += c
        table[v] = col
    raise AssertionError("unreachable")


def tree_class_count(network, scoresets=None) -> int:
    """Number of configurations of a tree with every ``S_v`` admitted."""
    if network.n == 1:
        xs = normalize(network, scoresets)[0]
        return int(xs is None or 0 in xs)
    return _count(network, normalize(network, scoresets))


def tree_liquidity(network, scoresets, x, y) -> Fraction:
    """Fraction of admitted configurations in which a unit payment x -> y
    succeeds: residual >= 1 toward ``y`` on every edge of the tree path, and
    the payer and payee scores still admitted afterwards."""
    x, y = network.index(x), network.index(y)
    if x == y:
        raise ValueError("liquidity needs two distinct vertices")
    admitted = normalize(network, scoresets)
    total = _count(network, admitted)
    if total == 0:
        raise InfeasibleScore("no configuration satisfies the score sets")
    parent, _ = _rooted(network, 0)
    allowed = {}
    # walk both endpoints up to their common ancestor
    up_x, up_y = [], []
    ax = {x}
    v = x
    while parent[v] is not None:
        v = parent[v][0]
        ax.add(v)
    v = y
    while v not in ax:
        up_y.append(v)
        v = parent[v][0]
    top = v
    v = x
    while v != top:
        up_x.append(v)
        v = parent[v][0]
    for v in up_x:
        # money flows child -> parent: need cap - k >= 1
        cap = network.edges[parent[v][1]].capacity
        allowed[v] = set(range(cap))
    for v in up_y:
        # money flows parent -> child: need k >= 1
        cap = network.edges[parent[v][1]].capacity
        allowed[v] = set(range(1, cap + 1))
    good = _count(network, after_payment(network, admitted, x, y), allowed=allowed)
    return Fraction(good, total)
