"""Score predicates and constrained transaction execution.

Predicates are Boolean combinations of linear inequalities over the score
vector.  Anything built this way depends on the score vector alone, so it
is automatically constant on cycle-equivalence classes.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .errors import CapExceeded, InvalidBounds, InvalidGroup, UnknownVertex
from .network import (
    Configuration,
    CreditEdge,
    CreditNetwork,
    Transaction,
    apply_payment,
    find_route,
)


class Predicate:
    """Base class; predicates are called on a score vector."""

    def __call__(self, s) -> bool:
        raise NotImplementedError

    def vertices(self) -> frozenset:
        raise NotImplementedError

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Always(Predicate):
    value: bool = True

    def __call__(self, s):
        return self.value

    def vertices(self):
        return frozenset()


TRUE = Always(True)


@dataclass(frozen=True)
class Linear(Predicate):
    """``sum(coef * S_v) <= bound`` (or ``>=``)."""

    coefficients: tuple  # ((vertex, coef), ...)
    bound: int
    sense: str = "<="

    def __post_init__(self):
        coeffs = tuple(sorted((int(v), int(c)) for v, c in dict(self.coefficients).items() if c))
        if not coeffs:
            raise ValueError("linear inequality needs a nonzero coefficient")
        if self.sense not in ("<=", ">="):
            raise ValueError(f"unknown sense {self.sense!r}")
        object.__setattr__(self, "coefficients", coeffs)

    def __call__(self, s):
        total = 0
        for v, c in self.coefficients:
            total += c * s[v]
        return total <= self.bound if self.sense == "<=" else total >= self.bound

    def vertices(self):
        return frozenset(v for v, _ in self.coefficients)


@dataclass(frozen=True)
class And(Predicate):
    terms: tuple

    def __call__(self, s):
        return all(t(s) for t in self.terms)

    def vertices(self):
        return frozenset().union(*(t.vertices() for t in self.terms))


@dataclass(frozen=True)
class Or(Predicate):
    terms: tuple

    def __call__(self, s):
        return any(t(s) for t in self.terms)

    def vertices(self):
        return frozenset().union(*(t.vertices() for t in self.terms))


@dataclass(frozen=True)
class Not(Predicate):
    term: Predicate

    def __call__(self, s):
        return not self.term(s)

    def vertices(self):
        return self.term.vertices()


def conjunction(preds) -> Predicate:
    preds = [p for p in preds if p is not TRUE]
    if not preds:
        return TRUE
    if len(preds) == 1:
        return preds[0]
    return And(tuple(preds))


def evaluate(pred: Predicate, s) -> bool:
    """Evaluate ``pred`` on score vector ``s``."""
    for v in pred.vertices():
        if v >= len(s):
            raise UnknownVertex(v)
    return bool(pred(s))


def node_bound(v, lo: int, hi: int, network: CreditNetwork | None = None) -> Predicate:
    """``lo <= S_v <= hi``.  Bounds are checked against ``d(v)`` when a network is given."""
    if network is not None:
        v = network.index(v)
        top = network.degree(v)
    else:
        top = hi
    if not 0 <= lo <= hi <= top:
        raise InvalidBounds(f"need 0 <= {lo} <= {hi} <= {top}")
    return And((Linear(((v, 1),), lo, ">="), Linear(((v, 1),), hi, "<=")))


def group_capacities(network: CreditNetwork, members) -> tuple:
    """``(boundary capacity, internal capacity)`` of a vertex set."""
    members = {network.index(v) for v in members}
    boundary = internal = 0
    for e in network.edges:
        inside = (e.u in members) + (e.v in members)
        if inside == 2:
            internal += e.capacity
        elif inside == 1:
            boundary += e.capacity
    return boundary, internal


def group_indegree(network: CreditNetwork, members, s) -> int:
    """Residual pointing into the group across its boundary."""
    boundary, internal = group_capacities(network, members)
    return boundary - (sum(s[network.index(v)] for v in members) - internal)


def group_bound(network: CreditNetwork, members, max_indegree: int) -> Predicate:
    """Aggregate boundary indegree of ``members`` is at most ``max_indegree``.

    The indegree equals ``boundary - (sum of member scores - internal)``,
    so the bound is the linear inequality
    ``sum S_a >= boundary + internal - max_indegree``.
    """
    try:
        ids = sorted({network.index(v) for v in members})
    except UnknownVertex as exc:
        raise InvalidGroup(f"unknown member {exc}") from None
    if not ids or len(ids) >= network.n:
        raise InvalidGroup("group must be a nonempty proper subset of the vertices")
    boundary, internal = group_capacities(network, ids)
    return Linear(tuple((v, 1) for v in ids), boundary + internal - max_indegree, ">=")


@dataclass(frozen=True)
class ConstrainedNetwork:
    network: CreditNetwork
    predicate: Predicate
    start: Configuration

    def __post_init__(self):
        if self.start.network != self.network:
            raise ValueError("start configuration belongs to another network")
        if not self.predicate(self.start.scores):
            raise ValueError("predicate does not hold at the start configuration")


class TxStatus(enum.Enum):
    APPLIED = "applied"
    NO_ROUTE = "no_route"
    PREDICATE_VIOLATION = "predicate_violation"


class TxResult(NamedTuple):
    status: TxStatus
    config: Configuration  # successor when applied, otherwise the input


def attempt_transaction(cn: ConstrainedNetwork, current: Configuration, t: Transaction) -> TxResult:
    """Route ``t`` if a residual path exists and the successor class is legal."""
    path = find_route(current, t)
    if path is None:
        return TxResult(TxStatus.NO_ROUTE, current)
    s = list(current.scores)
    s[t.payer] -= t.amount
    s[t.payee] += t.amount
    if not cn.predicate(s):
        return TxResult(TxStatus.PREDICATE_VIOLATION, current)
    return TxResult(TxStatus.APPLIED, apply_payment(current, path, t.amount))


def feasible_configuration(network: CreditNetwork, lo, hi) -> Configuration | None:
    """Some configuration with ``lo[v] <= S_v <= hi[v]`` for all v, or None.

    Solved as an integer program; the constraint matrix is a network matrix
    so the relaxation is already integral.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp

    n, m = network.n, len(network.edges)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if m == 0:
        return Configuration(network, []) if np.all(lo <= 0) and np.all(hi >= 0) else None
    a = np.zeros((n, m))
    const = np.zeros(n)
    caps = np.zeros(m)
    for e in network.edges:
        a[e.u, e.edge_id] = 1.0
        a[e.v, e.edge_id] = -1.0
        const[e.v] += e.capacity
        caps[e.edge_id] = e.capacity
    res = milp(
        c=np.zeros(m),
        constraints=[LinearConstraint(a, lo - const, hi - const)],
        integrality=np.ones(m),
        bounds=Bounds(np.zeros(m), caps),
    )
    if res.status != 0:
        return None
    return Configuration(network, [int(round(x)) for x in res.x])


def node_constrained(network: CreditNetwork, windows: Mapping, start: Configuration | None = None,
                     extra: Predicate = TRUE) -> ConstrainedNetwork:
    """Constrained network with ``windows[v] = (lo, hi)`` node bounds.

    Vertices missing from ``windows`` are unconstrained.  When ``start`` is
    omitted a configuration satisfying every window is searched for.
    """
    lo = [0] * network.n
    hi = list(network.degrees)
    preds = []
    for v, (a, b) in windows.items():
        v = network.index(v)
        preds.append(node_bound(v, a, b, network))
        lo[v], hi[v] = a, b
    pred = conjunction(preds + [extra])
    if start is None:
        start = feasible_configuration(network, lo, hi)
        if start is None or not pred(start.scores):
            raise InvalidBounds("no configuration satisfies the node windows")
    return ConstrainedNetwork(network, pred, start)


class Gadget(NamedTuple):
    network: CreditNetwork
    fake: dict  # original vertex id -> fake vertex id
    start: Configuration


def build_gadget(network: CreditNetwork, caps: Mapping, start: Configuration) -> Gadget:
    """Attach a fake vertex ``F(v)`` to every ``v`` by an edge of capacity ``c_v``.

    The fake edge starts with residual ``F(v) -> v`` equal to ``v``'s start
    score ``k_v``, so the score of ``F(v)`` tracks the score ``v`` would have
    in the original network.  Payments are then issued between fake vertices.
    """
    n = network.n
    cap = {}
    for v, c in caps.items():
        cap[network.index(v)] = int(c)
    missing = set(range(n)) - set(cap)
    if missing:
        raise ValueError(f"caps missing for vertices {sorted(missing)}")
    k = start.scores
    for v in range(n):
        if k[v] > cap[v]:
            raise CapExceeded(f"start score {k[v]} of {network.label(v)} exceeds cap {cap[v]}")
    labels = list(network.labels) + [f"F({lab})" for lab in network.labels]
    edges = list(network.edges)
    fwd = list(start.forward)
    for v in range(n):
        # u = v < F(v) = n + v, so forward is r(v -> F(v)) = c_v - k_v
        edges.append(CreditEdge(v, n + v, cap[v], len(edges)))
        fwd.append(cap[v] - k[v])
    g = CreditNetwork(labels, edges)
    return Gadget(g, {v: n + v for v in range(n)}, Configuration(g, fwd))
