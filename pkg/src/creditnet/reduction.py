"""Edge expansion, the expander-to-star reduction, and monotonicity experiments."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping

import numpy as np

from .classspace import DEFAULT_CLASS_BUDGET, enumerate_reachable, exact_liquidity
from .constraints import ConstrainedNetwork, conjunction, node_bound, node_constrained
from .dp.star import star_failure_bounds
from .errors import BudgetExceeded, ExpansionViolated, InvalidBounds, OddTotal
from .network import Configuration, CreditEdge, CreditNetwork


@dataclass(frozen=True)
class ExpansionReport:
    h: Fraction
    witness: tuple  # sorted vertex ids of a minimising set

    def describe(self, network) -> str:
        names = ",".join(network.label(v) for v in self.witness)
        return f"h = {self.h.numerator}/{self.h.denominator}, witness = {{{names}}}"


def edge_expansion(network: CreditNetwork, budget: int = 24) -> ExpansionReport:
    """Exact ``min boundary(S) / |S|`` over ``0 < |S| <= |V|/2`` by subset scan.

    Ties go to the lexicographically smallest sorted member tuple.
    """
    n = network.n
    if n < 2:
        raise ValueError("edge expansion needs at least two vertices")
    if n > budget:
        raise BudgetExceeded(f"{n} vertices exceed the subset-scan budget {budget}")
    masks = np.arange(1, 1 << n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n, dtype=np.int64)) & 1
    size = bits.sum(axis=1)
    keep = size <= n // 2
    masks, bits, size = masks[keep], bits[keep], size[keep]
    boundary = np.zeros(len(masks), dtype=np.int64)
    for e in network.edges:
        boundary += e.capacity * (bits[:, e.u] ^ bits[:, e.v])
    # exact minimum: compare boundary_a * size_b against boundary_b * size_a
    k = int(np.argmin(boundary / size))
    best = Fraction(int(boundary[k]), int(size[k]))
    for b, s in zip(boundary.tolist(), size.tolist()):
        if b * best.denominator < best.numerator * s:
            best = Fraction(b, s)
    hits = np.flatnonzero(boundary * best.denominator == best.numerator * size)
    witness = min(tuple(v for v in range(n) if (int(masks[i]) >> v) & 1) for i in hits)
    return ExpansionReport(best, witness)


def induced(network: CreditNetwork, members) -> CreditNetwork:
    ids = sorted({network.index(v) for v in members})
    pos = {v: i for i, v in enumerate(ids)}
    edges = [e for e in network.edges if e.u in pos and e.v in pos]
    return CreditNetwork(
        [network.label(v) for v in ids],
        [CreditEdge(pos[e.u], pos[e.v], e.capacity, k) for k, e in enumerate(edges)],
    )


@dataclass(frozen=True)
class ReductionSpec:
    h: Fraction
    requested: tuple  # deviation budget per vertex, as given
    r: tuple  # after parity normalisation
    windows: tuple  # (lo, hi) score window per vertex
    offsets: tuple  # (d(v) - r(v)) / 2
    center: int  # vertex id of the star center
    center_score: int

    @property
    def leaf_caps(self) -> tuple:
        return self.r


def _center_label(labels) -> str:
    name = "hub"
    while name in labels:
        name += "_"
    return name


def reduction_spec(network: CreditNetwork, r, check_expansion: bool = True) -> ReductionSpec:
    """Normalise deviation budgets and derive windows and offsets."""
    n = network.n
    if isinstance(r, int):
        r = {v: r for v in range(n)}
    elif not isinstance(r, Mapping):
        r = dict(enumerate(r))
    req = [0] * n
    for v, x in r.items():
        req[network.index(v)] = int(x)
    h = edge_expansion(network).h
    if check_expansion:
        bad = [network.label(v) for v in range(n) if req[v] > math.floor(h)]
        if bad:
            raise ExpansionViolated(f"r exceeds floor(h) = {math.floor(h)} at {bad}")
    norm = []
    for v in range(n):
        x, d = req[v], network.degree(v)
        if x < 0:
            raise InvalidBounds("deviation budgets must be non-negative")
        x = min(x, d)
        if x % 2 != d % 2:
            # half-integer window ends hold no integer score; shrink inward
            x -= 1
        if x < 0:
            raise InvalidBounds(
                f"empty score window at {network.label(v)}: r = 0 with odd degree {d}")
        norm.append(x)
    if sum(norm) % 2:
        raise OddTotal(f"normalised budgets sum to {sum(norm)}")
    windows = tuple(((network.degree(v) - x) // 2, (network.degree(v) + x) // 2)
                    for v, x in enumerate(norm))
    return ReductionSpec(
        h=h,
        requested=tuple(req),
        r=tuple(norm),
        windows=windows,
        offsets=tuple(lo for lo, _ in windows),
        center=n,
        center_score=sum(norm) // 2,
    )


def windowed_network(network: CreditNetwork, spec: ReductionSpec, start=None) -> ConstrainedNetwork:
    """The original network with every score confined to its window."""
    return node_constrained(network, dict(enumerate(spec.windows)), start)


def _star_start(star: CreditNetwork, caps, leaf_scores=None) -> Configuration:
    """Leaf scores are the residuals ``v -> center``; by default filled
    greedily so that the center sits at half its degree."""
    if leaf_scores is None:
        need = sum(caps) // 2
        leaf_scores = []
        for c in caps:
            a = min(c, need)
            leaf_scores.append(a)
            need -= a
    return Configuration(star, leaf_scores)


def expander_to_star(network: CreditNetwork, r, start: Configuration | None = None,
                     check_expansion: bool = True):
    """Build the pinned-center star equivalent to ``network`` under score windows.

    Leaves keep the original vertex ids and labels; the center is appended.
    When ``start`` (a configuration of ``network`` inside the windows) is
    given, the star starts at the translated class.
    """
    spec = reduction_spec(network, r, check_expansion)
    n = network.n
    labels = list(network.labels) + [_center_label(network.labels)]
    edges = [CreditEdge(v, n, spec.r[v], v) for v in range(n)]
    star = CreditNetwork(labels, edges)
    leaf_scores = None
    if start is not None:
        leaf_scores = [s - o for s, o in zip(start.scores, spec.offsets)]
        if any(not 0 <= s <= c for s, c in zip(leaf_scores, spec.r)):
            raise InvalidBounds("start configuration lies outside the score windows")
    pred = node_bound(n, spec.center_score, spec.center_score, star)
    return spec, ConstrainedNetwork(star, pred, _star_start(star, spec.r, leaf_scores))


@dataclass
class VerificationReport:
    bijection: bool
    original_classes: int
    star_classes: int
    liquidity: dict = field(default_factory=dict)  # (x, y) -> (original, star)

    @property
    def liquidity_match(self) -> dict:
        return {p: a == b for p, (a, b) in self.liquidity.items()}

    @property
    def passed(self) -> bool:
        return self.bijection and all(self.liquidity_match.values())


def verify_reduction(original: ConstrainedNetwork, star: ConstrainedNetwork, offsets,
                     budget: int = DEFAULT_CLASS_BUDGET) -> VerificationReport:
    """Check that offset translation maps the star's reachable classes onto
    the original's and that every pairwise exact liquidity agrees."""
    n = original.network.n
    pairs = list(combinations(range(n), 2))
    a = enumerate_reachable(original, pairs, budget)
    b = enumerate_reachable(star, pairs, budget)
    mapped = {tuple(s[v] + offsets[v] for v in range(n)) for s in b.classes}
    bijection = len(mapped) == len(b) == len(a) and mapped == set(a.classes)
    report = VerificationReport(bijection, len(a), len(b))
    for x in range(n):
        for y in range(n):
            if x != y:
                report.liquidity[(x, y)] = (exact_liquidity(a, x, y), exact_liquidity(b, x, y))
    return report


def saturated_cuts(network: CreditNetwork, scores):
    """Vertex sets ``A`` (nonempty, proper) whose whole boundary points into
    ``A``, i.e. nobody inside can pay anybody outside."""
    n = network.n
    out = []
    for k in range(1, n):
        for members in combinations(range(n), k):
            inside = set(members)
            internal = sum(e.capacity for e in network.edges if e.u in inside and e.v in inside)
            if sum(scores[v] for v in members) == internal:
                out.append(members)
    return out


# --- monotonicity experiments -------------------------------------------------

@dataclass(frozen=True)
class AddEdge:
    u: object
    v: object
    capacity: int


@dataclass(frozen=True)
class ReplaceSubgraphWithStar:
    members: tuple
    r: object  # int or mapping member -> leaf capacity


def _apply_add_edge(base: ConstrainedNetwork, mod: AddEdge) -> tuple:
    net = base.network.with_edge(mod.u, mod.v, mod.capacity)
    start = Configuration(net, base.start.forward + ((mod.capacity + 1) // 2,))
    return ConstrainedNetwork(net, base.predicate, start), {}


def _apply_star_replacement(base: ConstrainedNetwork, mod: ReplaceSubgraphWithStar) -> tuple:
    net0 = base.network
    members = sorted({net0.index(v) for v in mod.members})
    inside = set(members)
    if isinstance(mod.r, int):
        caps = {v: mod.r for v in members}
    else:
        caps = {net0.index(v): int(c) for v, c in dict(mod.r).items()}
    total = sum(caps[v] for v in members)
    if total % 2:
        raise OddTotal(f"star leaf capacities sum to {total}")
    n = net0.n
    kept = [e for e in net0.edges if not (e.u in inside and e.v in inside)]
    fwd = [base.start.forward[e.edge_id] for e in kept]
    edges = [CreditEdge(e.u, e.v, e.capacity, k) for k, e in enumerate(kept)]
    need = total // 2
    for v in members:
        a = min(caps[v], need)  # residual hub -> v
        need -= a
        edges.append(CreditEdge(v, n, caps[v], len(edges)))
        fwd.append(caps[v] - a)
    net = CreditNetwork(list(net0.labels) + [_center_label(net0.labels)], edges)
    pred = conjunction([base.predicate, node_bound(n, total // 2, total // 2, net)])
    after = ConstrainedNetwork(net, pred, Configuration(net, fwd))
    return after, {"members": members, "caps": caps,
                   "h_S": edge_expansion(induced(net0, members)).h if len(members) > 1 else None}


@dataclass
class MonotonicityRow:
    pair: tuple
    before: Fraction
    after: Fraction
    bound: Fraction | None  # liquidity lower bound implied by the star failure bound
    conjecture_floor: Fraction | None

    @property
    def ratio(self):
        return None if self.before == 0 else self.after / self.before

    @property
    def bound_check(self) -> str:
        if self.bound is None:
            return "n/a"
        return "ok" if self.after >= self.bound else "violated"

    @property
    def conjecture_check(self) -> str:
        if self.conjecture_floor is None:
            return "n/a"
        return "ok" if self.after >= self.conjecture_floor else "below"


@dataclass
class MonotonicityReport:
    network: CreditNetwork
    rows: list
    note: str = ""

    @property
    def violations(self) -> list:
        return [r for r in self.rows if r.bound_check == "violated"]

    def to_csv(self) -> str:
        def frac(q):
            return "nan" if q is None else f"{q.numerator}/{q.denominator}"

        buf = io.StringIO()
        if self.note:
            buf.write(f"# {self.note}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pair", "liquidity_before", "liquidity_after", "ratio", "bound_check",
                    "conjecture_check"])
        lab = self.network.label
        for r in self.rows:
            w.writerow([f"{lab(r.pair[0])}->{lab(r.pair[1])}", frac(r.before), frac(r.after),
                        frac(r.ratio), r.bound_check, r.conjecture_check])
        return buf.getvalue()


def _pinned_center_caps(cn: ConstrainedNetwork, x: int, y: int):
    """Leaf capacities of ``x`` and ``y`` toward a common neighbour whose
    score is pinned by a single node bound, if there is one."""
    fixed = _pinned_vertices(cn.predicate)
    net = cn.network
    for c in sorted(fixed):
        cx = sum(net.edges[e].capacity for e, w in net.incident(x) if w == c)
        cy = sum(net.edges[e].capacity for e, w in net.incident(y) if w == c)
        if cx and cy:
            return cx, cy
    return None


def _pinned_vertices(pred) -> set:
    from .constraints import And, Linear

    out = set()
    terms = pred.terms if isinstance(pred, And) else (pred,)
    lo, hi = {}, {}
    for t in terms:
        if isinstance(t, And):
            out |= _pinned_vertices(t)
        elif isinstance(t, Linear) and len(t.coefficients) == 1 and t.coefficients[0][1] == 1:
            v = t.coefficients[0][0]
            (lo if t.sense == ">=" else hi)[v] = t.bound
    out |= {v for v in lo if v in hi and lo[v] == hi[v]}
    return out


def monotonicity_experiment(base: ConstrainedNetwork, modification, pairs=None,
                            budget: int = DEFAULT_CLASS_BUDGET) -> MonotonicityReport:
    """Exact pairwise liquidity before and after a modification.

    Nothing here asserts monotonicity.  Each row carries the lower bound
    implied by the star failure bound when both endpoints hang off a
    pinned center, and, for star replacements, the conjectured floor
    ``before * (1 - 2 / h_S)`` where ``h_S`` is the edge expansion of the
    subgraph induced on the replaced set.
    """
    n = base.network.n
    if isinstance(modification, AddEdge):
        after, info = _apply_add_edge(base, modification)
        note = (f"add edge {modification.u}-{modification.v} "
                f"capacity {modification.capacity}")
    elif isinstance(modification, ReplaceSubgraphWithStar):
        after, info = _apply_star_replacement(base, modification)
        note = ("replace subgraph with pinned star; h_S is the edge expansion of the "
                f"induced subgraph (h_S = {info['h_S']})")
    else:
        raise TypeError(f"unknown modification {modification!r}")
    transacting = list(combinations(range(n), 2))
    sa = enumerate_reachable(base, transacting, budget)
    sb = enumerate_reachable(after, transacting, budget)
    if pairs is None:
        pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    rows = []
    for x, y in pairs:
        x, y = base.network.index(x), base.network.index(y)
        before = exact_liquidity(sa, x, y)
        post = exact_liquidity(sb, x, y)
        bound = floor = None
        caps = _pinned_center_caps(after, x, y)
        if caps is not None:
            bound = max(Fraction(0), 1 - star_failure_bounds(*caps)[1])
        if isinstance(modification, ReplaceSubgraphWithStar) and info["h_S"]:
            floor = before * max(Fraction(0), 1 - 2 / info["h_S"])
        rows.append(MonotonicityRow((x, y), before, post, bound, floor))
    return MonotonicityReport(base.network, rows, note)
