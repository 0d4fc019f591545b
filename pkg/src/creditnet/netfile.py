"""Line-oriented network description files.

One directive per line; ``#`` starts a comment::

    vertex <name>
    edge <u> <v> <capacity>
    init <u> <v> <residual u->v>      # k-th init for a pair sets its k-th edge
    bound <v> <lo> <hi>
    fixed <v> <score>
    group <max_indegree> <v1> <v2> ...
    pair <u> <v> <rate> [<rate v->u>]
    bag <id> <v...>
    bagedge <id> <id>
    param <name> <value>

Edges without an ``init`` start with their capacity split as evenly as
possible, the lower-indexed endpoint getting the odd unit.  Without any
``pair`` line every vertex pair transacts at rate 1 in both directions.

:func:`serialize` emits the canonical form: directives grouped by keyword in
the order above, file order preserved inside each group, single spaces.
Parsing the canonical form and serializing again is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .constraints import (TRUE, ConstrainedNetwork, conjunction, group_bound,
                          node_bound)
from .dp.decomposition import check_decomposition
from .errors import CreditNetError, InvalidParams, ParseError
from .markov import TransactionDistribution
from .network import Configuration, CreditEdge, CreditNetwork

KEYWORDS = ("vertex", "edge", "init", "bound", "fixed", "group", "pair", "bag", "bagedge", "param")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(int(x)) if x.is_integer() else repr(x)
    return str(x)


@dataclass
class NetworkFile:
    vertices: list = field(default_factory=list)  # names
    edges: list = field(default_factory=list)  # (u, v, cap)
    inits: list = field(default_factory=list)  # (u, v, residual u->v)
    bounds: list = field(default_factory=list)  # (v, lo, hi)
    fixed: list = field(default_factory=list)  # (v, score)
    groups: list = field(default_factory=list)  # (max_indegree, members)
    pairs: list = field(default_factory=list)  # (u, v, rate, rate_back or None)
    bags: list = field(default_factory=list)  # (id, vertices)
    bagedges: list = field(default_factory=list)  # (id, id)
    params: list = field(default_factory=list)  # (name, value)

    def __eq__(self, other):
        if not isinstance(other, NetworkFile):
            return NotImplemented
        return self._rows() == other._rows()

    def _rows(self):
        return (self.vertices, self.edges, self.inits, self.bounds, self.fixed,
                self.groups, self.pairs, self.bags, self.bagedges, self.params)

    # -- builders -----------------------------------------------------------

    def network(self) -> CreditNetwork:
        pos = {name: i for i, name in enumerate(self.vertices)}
        return CreditNetwork(self.vertices, [CreditEdge(pos[u], pos[v], c, k)
                                             for k, (u, v, c) in enumerate(self.edges)])

    def start(self, network: CreditNetwork | None = None) -> Configuration:
        net = network or self.network()
        fwd = list(Configuration.balanced(net).forward)
        slots = {}
        for k, (u, v, _) in enumerate(self.edges):
            slots.setdefault(frozenset((u, v)), []).append(k)
        used = {}
        for u, v, r in self.inits:
            key = frozenset((u, v))
            k = slots[key][used.get(key, 0)]
            used[key] = used.get(key, 0) + 1
            e = net.edges[k]
            fwd[k] = r if net.index(u) == e.u else e.capacity - r
        return Configuration(net, fwd)

    def windows(self, network: CreditNetwork | None = None) -> dict:
        """Per-vertex ``(lo, hi)`` from ``bound`` and ``fixed`` lines
        (intersected when a vertex has several)."""
        net = network or self.network()
        out = {}
        for v, lo, hi in self.bounds + [(v, s, s) for v, s in self.fixed]:
            i = net.index(v)
            a, b = out.get(i, (0, net.degree(i)))
            out[i] = (max(a, lo), min(b, hi))
        return out

    def predicate(self, network: CreditNetwork | None = None):
        net = network or self.network()
        preds = [node_bound(v, lo, hi, net) for v, lo, hi in self.bounds]
        preds += [node_bound(v, s, s, net) for v, s in self.fixed]
        preds += [group_bound(net, members, b) for b, members in self.groups]
        return conjunction(preds) if preds else TRUE

    def constrained(self) -> ConstrainedNetwork:
        net = self.network()
        return ConstrainedNetwork(net, self.predicate(net), self.start(net))

    def scoresets(self, network: CreditNetwork | None = None) -> dict:
        """Admitted score intervals for the exact DPs.  Group constraints are
        not per-vertex and are rejected."""
        if self.groups:
            raise InvalidParams("group constraints cannot be expressed as per-vertex score sets")
        return {v: range(lo, hi + 1) for v, (lo, hi) in self.windows(network).items()}

    def transacting_pairs(self) -> list:
        """Unordered pairs (by name) for class-space enumeration."""
        if not self.pairs:
            return [(a, b) for i, a in enumerate(self.vertices) for b in self.vertices[i + 1:]]
        seen = []
        for u, v, *_ in self.pairs:
            if (u, v) not in seen and (v, u) not in seen:
                seen.append((u, v))
        return seen

    def distribution(self, network: CreditNetwork | None = None) -> TransactionDistribution:
        net = network or self.network()
        if not self.pairs:
            return TransactionDistribution.uniform(net)
        rates = {}
        for u, v, rate, back in self.pairs:
            rates[(u, v)] = rate
            rates[(v, u)] = rate if back is None else back
        return TransactionDistribution.from_rates(net, rates)

    def decomposition(self):
        """``(bags, tree_edges)`` if bags were supplied, else None."""
        if not self.bags:
            return None
        return {b: tuple(vs) for b, vs in self.bags}, list(self.bagedges)

    def param(self, name: str, default=None):
        for k, v in self.params:
            if k == name:
                return v
        return default


def _int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(lineno, f"{what} must be an integer, got {tok!r}") from None


def _rate(tok, lineno):
    try:
        x = float(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"rate must be a number, got {tok!r}") from None
    if x < 0:
        raise ParseError(lineno, "rate must be non-negative")
    return x


def parse_network(text: str) -> NetworkFile:
    """Parse and validate a network description; every problem is reported
    as :class:`ParseError` with the offending line number."""
    nf = NetworkFile()
    declared = {}
    lines = {}  # (keyword, row index) -> line number
    arity = {"vertex": (1, 1), "edge": (3, 3), "init": (3, 3), "bound": (3, 3),
             "fixed": (2, 2), "group": (2, None), "pair": (3, 4), "bag": (2, None),
             "bagedge": (2, 2), "param": (2, 2)}

    def vertex(tok, lineno):
        if tok not in declared:
            raise ParseError(lineno, f"undeclared vertex {tok!r}")
        return tok

    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        kw, args = toks[0], toks[1:]
        if kw not in arity:
            raise ParseError(lineno, f"unknown keyword {kw!r}")
        lo, hi = arity[kw]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise ParseError(lineno, f"wrong number of fields for {kw!r}")
        if kw == "vertex":
            name = args[0]
            if name in declared:
                raise ParseError(lineno, f"vertex {name!r} declared twice")
            declared[name] = lineno
            row = name
        elif kw == "edge":
            u, v = vertex(args[0], lineno), vertex(args[1], lineno)
            if u == v:
                raise ParseError(lineno, "self-loops are not allowed")
            cap = _int(args[2], lineno, "capacity")
            if cap < 0:
                raise ParseError(lineno, "capacity must be non-negative")
            row = (u, v, cap)
        elif kw == "init":
            row = (vertex(args[0], lineno), vertex(args[1], lineno), _int(args[2], lineno, "residual"))
        elif kw == "bound":
            row = (vertex(args[0], lineno), _int(args[1], lineno, "lower bound"),
                   _int(args[2], lineno, "upper bound"))
        elif kw == "fixed":
            row = (vertex(args[0], lineno), _int(args[1], lineno, "score"))
        elif kw == "group":
            members = tuple(vertex(t, lineno) for t in args[1:])
            if len(set(members)) != len(members):
                raise ParseError(lineno, "group lists a vertex twice")
            row = (_int(args[0], lineno, "group bound"), members)
        elif kw == "pair":
            u, v = vertex(args[0], lineno), vertex(args[1], lineno)
            if u == v:
                raise ParseError(lineno, "a pair needs two distinct vertices")
            back = _rate(args[3], lineno) if len(args) == 4 else None
            row = (u, v, _rate(args[2], lineno), back)
        elif kw == "bag":
            if any(b == args[0] for b, _ in nf.bags):
                raise ParseError(lineno, f"bag {args[0]!r} declared twice")
            row = (args[0], tuple(vertex(t, lineno) for t in args[1:]))
        elif kw == "bagedge":
            known = {b for b, _ in nf.bags}
            for b in args:
                if b not in known:
                    raise ParseError(lineno, f"unknown bag {b!r}")
            row = (args[0], args[1])
        else:
            row = (args[0], args[1])
        target = {"vertex": nf.vertices, "edge": nf.edges, "init": nf.inits, "bound": nf.bounds,
                  "fixed": nf.fixed, "group": nf.groups, "pair": nf.pairs, "bag": nf.bags,
                  "bagedge": nf.bagedges, "param": nf.params}[kw]
        lines[(kw, len(target))] = lineno
        target.append(row)

    _validate(nf, lines)
    return nf


def _validate(nf: NetworkFile, lines: dict) -> None:
    """Semantic checks that need the whole file."""
    net = nf.network()
    counts = {}
    for u, v, _ in nf.edges:
        key = frozenset((u, v))
        counts[key] = counts.get(key, 0) + 1
    caps = {}
    for u, v, c in nf.edges:
        caps.setdefault(frozenset((u, v)), []).append(c)
    used = {}
    for k, (u, v, r) in enumerate(nf.inits):
        key = frozenset((u, v))
        at = used.get(key, 0)
        if at >= counts.get(key, 0):
            raise ParseError(lines[("init", k)], f"no {'further ' if at else ''}edge between {u} and {v}")
        if not 0 <= r <= caps[key][at]:
            raise ParseError(lines[("init", k)], f"residual {r} outside [0, {caps[key][at]}]")
        used[key] = at + 1

    checks = [("bound", k, lambda row=row: node_bound(row[0], row[1], row[2], net))
              for k, row in enumerate(nf.bounds)]
    checks += [("fixed", k, lambda row=row: node_bound(row[0], row[1], row[1], net))
               for k, row in enumerate(nf.fixed)]
    checks += [("group", k, lambda row=row: group_bound(net, row[1], row[0]))
               for k, row in enumerate(nf.groups)]
    preds = []
    for kw, k, make in checks:
        try:
            preds.append((kw, k, make()))
        except CreditNetError as exc:
            raise ParseError(lines[(kw, k)], str(exc)) from None
    s = nf.start(net).scores
    for kw, k, p in preds:
        if not p(s):
            raise ParseError(lines[(kw, k)], f"violated by the initial configuration (scores {list(s)})")

    if nf.pairs and not any(r > 0 or (b or 0) > 0 for _, _, r, b in nf.pairs):
        raise ParseError(lines[("pair", 0)], "every transaction rate is zero")
    if nf.bags:
        bags, edges = nf.decomposition()
        try:
            check_decomposition(net, {b: [net.index(v) for v in vs] for b, vs in bags.items()}, edges)
        except CreditNetError as exc:
            raise ParseError(lines[("bag", 0)], f"invalid tree decomposition: {exc}") from None


def serialize(nf: NetworkFile) -> str:
    out = []
    out += [f"vertex {v}" for v in nf.vertices]
    out += [f"edge {u} {v} {c}" for u, v, c in nf.edges]
    out += [f"init {u} {v} {r}" for u, v, r in nf.inits]
    out += [f"bound {v} {lo} {hi}" for v, lo, hi in nf.bounds]
    out += [f"fixed {v} {s}" for v, s in nf.fixed]
    out += [f"group {b} {' '.join(m)}" for b, m in nf.groups]
    for u, v, r, back in nf.pairs:
        out.append(f"pair {u} {v} {_fmt(r)}" + ("" if back is None else f" {_fmt(back)}"))
    out += [f"bag {b} {' '.join(vs)}" for b, vs in nf.bags]
    out += [f"bagedge {a} {b}" for a, b in nf.bagedges]
    out += [f"param {k} {v}" for k, v in nf.params]
    return "\n".join(out) + "\n"


def from_network(network: CreditNetwork, start: Configuration | None = None, windows=None,
                 pairs=None) -> NetworkFile:
    """Describe ``network`` as a file.  ``init`` lines are emitted only for
    edges whose start residual differs from the even-split default;
    ``windows`` maps vertices to ``(lo, hi)`` (``lo == hi`` becomes ``fixed``)."""
    lab = network.label
    nf = NetworkFile(vertices=list(network.labels))
    nf.edges = [(lab(e.u), lab(e.v), e.capacity) for e in network.edges]
    if start is not None:
        default = Configuration.balanced(network).forward
        for e in network.edges:
            if start.forward[e.edge_id] != default[e.edge_id]:
                nf.inits.append((lab(e.u), lab(e.v), start.forward[e.edge_id]))
    for v, (lo, hi) in sorted((network.index(v), w) for v, w in (windows or {}).items()):
        if lo == hi:
            nf.fixed.append((lab(v), lo))
        else:
            nf.bounds.append((lab(v), lo, hi))
    for u, v in pairs or ():
        nf.pairs.append((lab(network.index(u)), lab(network.index(v)), 1.0, None))
    return nf


def load(path) -> NetworkFile:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())
