"""Credit networks, configurations, score vectors and payment routing.

A :class:`CreditNetwork` is an undirected multigraph whose edges carry an
integer trust capacity.  A :class:`Configuration` splits each capacity into
two directed residuals.  The residual ``r(a -> b)`` on an edge is the amount
``a`` can still pay ``b`` across that edge; paying consumes it and
replenishes ``r(b -> a)`` by the same amount.

The score of a vertex is its weighted outdegree, i.e. the sum of the
residuals pointing away from it.  Two configurations are cycle-equivalent
exactly when their score vectors agree, so score vectors serve as canonical
class labels throughout the package.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InsufficientResidual, NetworkMismatch, UnknownVertex

ScoreVector = tuple  # tuple[int, ...], one entry per vertex id


@dataclass(frozen=True)
class CreditEdge:
    u: int
    v: int
    capacity: int
    edge_id: int

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"self-loop on vertex {self.u}")
        if self.u > self.v:
            # endpoints are unordered; keep u < v so "forward" is well defined
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)
        if self.capacity < 0:
            raise ValueError(f"negative capacity on edge {self.edge_id}")

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


class CreditNetwork:
    """Undirected multigraph of integer trust capacities.

    Vertices are dense ids ``0..n-1`` with unique string labels.
    """

    __slots__ = ("labels", "edges", "_index", "_adj", "_degree")

    def __init__(self, labels: Sequence[str], edges: Iterable[CreditEdge]):
        labels = tuple(str(x) for x in labels)
        if len(set(labels)) != len(labels):
            raise ValueError("vertex labels must be unique")
        edges = tuple(edges)
        n = len(labels)
        for k, e in enumerate(edges):
            if e.edge_id != k:
                raise ValueError("edge ids must be 0..m-1 in order")
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise UnknownVertex(f"edge {k} references an undeclared vertex")
        self.labels = labels
        self.edges = edges
        self._index = {lab: i for i, lab in enumerate(labels)}
        adj = [[] for _ in range(n)]
        deg = [0] * n
        for e in edges:
            adj[e.u].append((e.edge_id, e.v))
            adj[e.v].append((e.edge_id, e.u))
            deg[e.u] += e.capacity
            deg[e.v] += e.capacity
        self._adj = tuple(tuple(a) for a in adj)
        self._degree = tuple(deg)

    @classmethod
    def build(cls, edges, labels=None) -> "CreditNetwork":
        """Build from ``(a, b, capacity)`` triples given by label.

        Vertices are taken from ``labels`` when supplied, otherwise in order
        of first appearance.
        """
        edges = list(edges)
        if labels is None:
            labels = []
            for a, b, _ in edges:
                for x in (a, b):
                    if str(x) not in labels:
                        labels.append(str(x))
        index = {str(lab): i for i, lab in enumerate(labels)}
        out = []
        for k, (a, b, cap) in enumerate(edges):
            try:
                out.append(CreditEdge(index[str(a)], index[str(b)], int(cap), k))
            except KeyError as exc:
                raise UnknownVertex(str(exc)) from None
        return cls(labels, out)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def index(self, v) -> int:
        """Vertex id for a label (ids pass through unchanged)."""
        if isinstance(v, int):
            if 0 <= v < self.n:
                return v
            raise UnknownVertex(v)
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def label(self, v: int) -> str:
        return self.labels[v]

    def degree(self, v: int) -> int:
        """Weighted degree: total capacity incident to ``v``."""
        return self._degree[v]

    @property
    def degrees(self) -> tuple:
        return self._degree

    def incident(self, v: int):
        """``(edge_id, neighbour)`` pairs at ``v`` in edge-id order."""
        return self._adj[v]

    def total_capacity(self) -> int:
        return sum(e.capacity for e in self.edges)

    def is_tree(self) -> bool:
        if len(self.edges) != self.n - 1:
            return False
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for _, y in self._adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    def with_edge(self, a, b, capacity: int) -> "CreditNetwork":
        a, b = self.index(a), self.index(b)
        e = CreditEdge(a, b, capacity, len(self.edges))
        return CreditNetwork(self.labels, self.edges + (e,))

    def __eq__(self, other):
        if not isinstance(other, CreditNetwork):
            return NotImplemented
        return self.labels == other.labels and self.edges == other.edges

    def __hash__(self):
        return hash((self.labels, self.edges))

    def __repr__(self):
        return f"CreditNetwork(n={self.n}, m={len(self.edges)})"


class Configuration:
    """Immutable split of every edge capacity into two directed residuals.

    ``forward[e]`` is the residual from the lower-id endpoint of edge ``e``
    toward the higher-id endpoint; the reverse residual is implied.
    """

    __slots__ = ("network", "forward", "_scores")

    def __init__(self, network: CreditNetwork, forward: Sequence[int]):
        forward = tuple(int(f) for f in forward)
        if len(forward) != len(network.edges):
            raise ValueError("one forward residual per edge required")
        for e, f in zip(network.edges, forward):
            if not 0 <= f <= e.capacity:
                raise ValueError(
                    f"residual {f} outside [0, {e.capacity}] on edge {e.edge_id}")
        self.network = network
        self.forward = forward
        self._scores = None

    @classmethod
    def balanced(cls, network: CreditNetwork) -> "Configuration":
        """Capacity split as evenly as possible, lower id rounding up."""
        return cls(network, [(e.capacity + 1) // 2 for e in network.edges])

    @classmethod
    def from_residuals(cls, network: CreditNetwork, residuals) -> "Configuration":
        """Start from :meth:`balanced` and override ``{(a, b): r(a -> b)}``.

        With parallel edges, an override applies to every edge joining the pair.
        """
        fwd = list(cls.balanced(network).forward)
        for (a, b), r in dict(residuals).items():
            a, b = network.index(a), network.index(b)
            hit = False
            for eid, other in network.incident(a):
                if other == b:
                    e = network.edges[eid]
                    fwd[eid] = r if a == e.u else e.capacity - r
                    hit = True
            if not hit:
                raise UnknownVertex(f"no edge between {a} and {b}")
        return cls(network, fwd)

    def residual(self, edge_id: int, src: int) -> int:
        """Residual on ``edge_id`` in the direction leaving ``src``."""
        e = self.network.edges[edge_id]
        f = self.forward[edge_id]
        return f if src == e.u else e.capacity - f

    @property
    def scores(self) -> ScoreVector:
        if self._scores is None:
            s = [0] * self.network.n
            for e, f in zip(self.network.edges, self.forward):
                s[e.u] += f
                s[e.v] += e.capacity - f
            self._scores = tuple(s)
        return self._scores

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.network == other.network and self.forward == other.forward

    def __hash__(self):
        return hash(self.forward)

    def __repr__(self):
        return f"Configuration(forward={self.forward})"


@dataclass(frozen=True)
class Transaction:
    payer: int
    payee: int
    amount: int = 1

    def __post_init__(self):
        if self.payer == self.payee:
            raise ValueError("payer and payee must differ")
        if self.amount < 1:
            raise ValueError("amount must be a positive integer")


def score_vector(config: Configuration) -> ScoreVector:
    """Weighted outdegree of every vertex."""
    return config.scores


def residual_tree(config: Configuration, source: int, amount: int = 1) -> dict:
    """Breadth-first search over residuals ``>= amount`` leaving ``source``.

    Returns ``{vertex: (parent, edge_id)}`` for every reachable vertex; the
    source maps to ``None``.  Neighbours are scanned in edge-id order, which
    fixes the tie-break among shortest routes.
    """
    net = config.network
    edges = net.edges
    fwd = config.forward
    parent = {source: None}
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for eid, b in net.incident(a):
            if b in parent:
                continue
            e = edges[eid]
            r = fwd[eid] if a == e.u else e.capacity - fwd[eid]
            if r >= amount:
                parent[b] = (a, eid)
                queue.append(b)
    return parent


def path_in_tree(tree: dict, target: int):
    if target not in tree:
        return None
    path = [target]
    step = tree[target]
    while step is not None:
        path.append(step[0])
        step = tree[step[0]]
    path.reverse()
    return path


def find_route(config: Configuration, t: Transaction):
    """Minimum-hop route payer -> payee with every hop's residual >= amount.

    Returns the vertex sequence, or ``None`` when no such route exists.
    """
    net = config.network
    for x in (t.payer, t.payee):
        if not 0 <= x < net.n:
            raise UnknownVertex(x)
    return path_in_tree(residual_tree(config, t.payer, t.amount), t.payee)


def apply_payment(config: Configuration, path: Sequence[int], amount: int) -> Configuration:
    """Route ``amount`` along ``path`` and return the updated configuration.

    Between consecutive vertices the lowest-id edge with enough residual is
    used.  A path that starts and ends at the same vertex routes around a
    cycle.
    """
    if amount < 1:
        raise ValueError("amount must be a positive integer")
    net = config.network
    edges = net.edges
    fwd = list(config.forward)
    for a, b in zip(path, path[1:]):
        for eid, other in net.incident(a):
            if other != b:
                continue
            e = edges[eid]
            r = fwd[eid] if a == e.u else e.capacity - fwd[eid]
            if r >= amount:
                fwd[eid] += -amount if a == e.u else amount
                break
        else:
            raise InsufficientResidual(
                f"hop {net.label(a)}->{net.label(b)} lacks residual {amount}")
    out = Configuration.__new__(Configuration)
    out.network = net
    out.forward = tuple(fwd)
    out._scores = None
    return out


def configurations_equivalent(c1: Configuration, c2: Configuration) -> bool:
    """Cycle-equivalence test: equal score vectors on the same network."""
    if c1.network != c2.network:
        raise NetworkMismatch("configurations belong to different networks")
    return c1.scores == c2.scores
