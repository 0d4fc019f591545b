"""Tree decompositions and their normalisation into nice form."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..errors import InvalidDecomposition

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass(frozen=True)
class Node:
    kind: str
    bag: tuple  # sorted vertex ids
    children: tuple = ()
    vertex: int | None = None  # introduced / forgotten vertex, or the leaf's vertex


@dataclass(frozen=True)
class TreeDecomposition:
    """A nice tree decomposition; ``nodes[root]`` has an empty bag."""

    nodes: tuple
    root: int

    @property
    def width(self) -> int:
        return max(len(nd.bag) for nd in self.nodes) - 1

    def postorder(self):
        out = []
        stack = [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                out.append(i)
                continue
            stack.append((i, True))
            for c in reversed(self.nodes[i].children):
                stack.append((c, False))
        return out

    def validate(self, network):
        """Raise :class:`InvalidDecomposition` unless this is a nice tree
        decomposition of ``network`` with an empty root bag."""
        nodes = self.nodes
        if self.nodes[self.root].bag:
            raise InvalidDecomposition("root bag must be empty")
        seen_children = [0] * len(nodes)
        for nd in nodes:
            for c in nd.children:
                seen_children[c] += 1
        if seen_children[self.root] or any(k != 1 for i, k in enumerate(seen_children) if i != self.root):
            raise InvalidDecomposition("nodes do not form a rooted tree")
        order = self.postorder()
        if len(order) != len(nodes):
            raise InvalidDecomposition("nodes unreachable from the root")
        for nd in nodes:
            kids = [nodes[c].bag for c in nd.children]
            bag = set(nd.bag)
            if list(nd.bag) != sorted(bag):
                raise InvalidDecomposition("bags must be sorted tuples")
            if nd.kind == LEAF:
                ok = not kids and nd.bag == (nd.vertex,)
            elif nd.kind == INTRODUCE:
                ok = len(kids) == 1 and nd.vertex in bag and set(kids[0]) == bag - {nd.vertex}
            elif nd.kind == FORGET:
                ok = len(kids) == 1 and nd.vertex not in bag and set(kids[0]) == bag | {nd.vertex}
            elif nd.kind == JOIN:
                ok = len(kids) == 2 and kids[0] == nd.bag and kids[1] == nd.bag
            else:
                ok = False
            if not ok:
                raise InvalidDecomposition(f"malformed {nd.kind} node with bag {nd.bag}")
        check_decomposition(network, {i: nd.bag for i, nd in enumerate(nodes)},
                            [(i, c) for i, nd in enumerate(nodes) for c in nd.children])


def check_decomposition(network, bags: Mapping, tree_edges) -> None:
    """Tree-decomposition axioms: tree shape, vertex and edge coverage, and
    connected occurrence of every vertex."""
    ids = list(bags)
    adj = {i: [] for i in ids}
    for a, b in tree_edges:
        if a not in adj or b not in adj:
            raise InvalidDecomposition(f"tree edge ({a}, {b}) names an unknown bag")
        adj[a].append(b)
        adj[b].append(a)
    if not ids:
        if network.n:
            raise InvalidDecomposition("no bags")
        return
    if len(list(tree_edges)) != len(ids) - 1 or len(_component(adj, ids[0], lambda _: True)) != len(ids):
        raise InvalidDecomposition("bags do not form a tree")
    sets = {i: set(b) for i, b in bags.items()}
    for v in range(network.n):
        holding = [i for i in ids if v in sets[i]]
        if not holding:
            raise InvalidDecomposition(f"vertex {network.label(v)} not covered")
        if len(_component(adj, holding[0], lambda i: v in sets[i])) != len(holding):
            raise InvalidDecomposition(f"bags holding {network.label(v)} are not connected")
    for e in network.edges:
        if not any(e.u in s and e.v in s for s in sets.values()):
            raise InvalidDecomposition(
                f"edge {network.label(e.u)}-{network.label(e.v)} not covered")


def _component(adj, start, keep):
    seen = {start}
    stack = [start]
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if j not in seen and keep(j):
                seen.add(j)
                stack.append(j)
    return seen


def make_nice(network, bags: Mapping, tree_edges) -> TreeDecomposition:
    """Normalise a raw decomposition (``{id: vertices}``, tree edges over
    ids) into nice form of the same width, rooted at the first bag and
    topped by a chain of forgets down to an empty root."""
    bags = {i: tuple(sorted({network.index(v) for v in b})) for i, b in bags.items()}
    tree_edges = list(tree_edges)
    check_decomposition(network, bags, tree_edges)
    if not bags:
        raise InvalidDecomposition("cannot decompose an empty network")
    adj = {i: [] for i in bags}
    for a, b in tree_edges:
        adj[a].append(b)
        adj[b].append(a)
    nodes = []

    def add(kind, bag, children=(), vertex=None):
        nodes.append(Node(kind, tuple(sorted(bag)), tuple(children), vertex))
        return len(nodes) - 1

    def move(top, src, dst):
        bag = set(src)
        for v in sorted(set(src) - set(dst)):
            bag.discard(v)
            top = add(FORGET, bag, (top,), v)
        for v in sorted(set(dst) - set(src)):
            bag.add(v)
            top = add(INTRODUCE, bag, (top,), v)
        return top

    def build(b, parent):
        kids = [c for c in adj[b] if c != parent]
        target = bags[b]
        if not kids:
            if not target:
                raise InvalidDecomposition("leaf bags must be nonempty")
            first = target[0]
            top = add(LEAF, (first,), (), first)
            return move(top, (first,), target)
        tops = [move(build(c, b), bags[c], target) for c in kids]
        top = tops[0]
        for other in tops[1:]:
            top = add(JOIN, target, (top, other))
        return top

    first = next(iter(bags))
    top = build(first, None)
    root = move(top, bags[first], ())
    return TreeDecomposition(tuple(nodes), root)


def min_degree_decomposition(network):
    """Greedy min-degree elimination.  Returns ``(bags, tree_edges)`` suitable
    for :func:`make_nice`; no width guarantee."""
    n = network.n
    nbrs = [set() for _ in range(n)]
    for e in network.edges:
        nbrs[e.u].add(e.v)
        nbrs[e.v].add(e.u)
    alive = set(range(n))
    order = []
    bags = {}
    while alive:
        v = min(alive, key=lambda x: (len(nbrs[x]), x))
        bags[v] = {v} | nbrs[v]
        for a in nbrs[v]:
            nbrs[a] |= nbrs[v] - {a}
            nbrs[a].discard(v)
        alive.discard(v)
        order.append(v)
    pos = {v: k for k, v in enumerate(order)}
    edges = []
    roots = []
    for v in order:
        later = [a for a in bags[v] if a != v]
        if later:
            edges.append((v, min(later, key=pos.__getitem__)))
        else:
            roots.append(v)
    edges += list(zip(roots, roots[1:]))
    return {v: tuple(sorted(bags[v])) for v in order}, edges
