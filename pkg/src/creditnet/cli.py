"""Command-line front end: ``creditnet <command> FILE [options]``.

Exit status is 0 on success, 1 when an analysis exceeds its budget and 2
on malformed input or arguments.  Exact quantities print as ``p/q``.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from itertools import combinations

from . import classspace, dp, markov, netfile, reduction
from .constraints import build_gadget
from .errors import BudgetExceeded, CreditNetError, InvalidParams, ParseError

METHODS = ("exact", "tree", "treewidth", "star", "mc")


def frac(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _budget(args, default):
    return default if args.budget is None else args.budget


def _pairs(nf, net, args):
    if args.pair:
        a, b = (net.index(v) for v in args.pair)
        if a == b:
            raise InvalidParams("--pair needs two distinct vertices")
        return [(a, b)]
    return [(x, y) for x in range(net.n) for y in range(net.n) if x != y]


def _space(nf, args):
    cn = nf.constrained()
    return classspace.enumerate_reachable(cn, nf.transacting_pairs(),
                                          _budget(args, classspace.DEFAULT_CLASS_BUDGET))


def _star_view(nf, net):
    """``(center, leaves, caps, center_score)`` if the file describes a star
    whose center alone is pinned."""
    if nf.groups:
        raise InvalidParams("star method: group constraints are not supported")
    windows = nf.windows(net)
    centers = [c for c in range(net.n)
               if all(c in (e.u, e.v) for e in net.edges)]
    for c in centers:
        leaves = [v for v in range(net.n) if v != c]
        if len({e.other(c) for e in net.edges}) != len(net.edges):
            continue  # parallel edges
        lo, hi = windows.get(c, (0, net.degree(c)))
        if lo != hi:
            continue
        if any(windows.get(v, (0, net.degree(v))) != (0, net.degree(v)) for v in leaves):
            continue
        caps = [net.degree(v) for v in leaves]
        return c, leaves, caps, lo
    raise InvalidParams("star method needs a star with only its center pinned")


def _liquidity(nf, args, out):
    net = nf.network()
    pairs = _pairs(nf, net, args)
    method = args.method
    results = []
    if method == "exact":
        space = _space(nf, args)
        results = [classspace.exact_liquidity(space, x, y) for x, y in pairs]
    elif method in ("tree", "treewidth"):
        sets = nf.scoresets(net)
        if method == "tree":
            if not net.is_tree():
                raise InvalidParams("tree method needs a tree-shaped network without parallel edges")
            results = [dp.tree_liquidity(net, sets, x, y) for x, y in pairs]
        else:
            decomp = nf.decomposition()
            results = [dp.treewidth_liquidity(net, decomp, sets, x, y) for x, y in pairs]
    elif method == "star":
        center, leaves, caps, score = _star_view(nf, net)
        pos = {v: k for k, v in enumerate(leaves)}
        if any(x == center or y == center for x, y in pairs):
            if args.pair:
                raise InvalidParams("star method answers leaf pairs only")
            pairs = [(x, y) for x, y in pairs if center not in (x, y)]
        results = [dp.star_liquidity(caps, score, pos[x], pos[y]) for x, y in pairs]
    else:
        report = markov.simulate(nf.constrained(), nf.distribution(net), args.steps,
                                 args.burnin, args.seed)
        results = [report.liquidity(x, y) for x, y in pairs]
    show = (lambda q: f"{q:.6f}") if method == "mc" else frac
    if args.pair:
        print(show(results[0]), file=out)
    else:
        for (x, y), q in zip(pairs, results):
            print(f"{net.label(x)} {net.label(y)} {show(q)}", file=out)


def _enumerate(nf, args, out):
    space = _space(nf, args)
    if args.count:
        print(len(space), file=out)
    else:
        out.write(space.to_csv())


def _forests(nf, args, out):
    net = nf.network()
    fc = classspace.count_forests(net, _budget(args, 2**24))
    print(f"total {fc.total}", file=out)
    for x, y in (_pairs(nf, net, args) if args.pair else combinations(range(net.n), 2)):
        print(f"{net.label(x)} {net.label(y)} {fc.joining[(x, y)]} "
              f"{frac(fc.liquidity(x, y))}", file=out)


def _expansion(nf, args, out):
    net = nf.network()
    print(reduction.edge_expansion(net, _budget(args, 24)).describe(net), file=out)


def _parse_r(text):
    parts = text.split(",")
    try:
        return int(parts[0]) if len(parts) == 1 else [int(p) for p in parts]
    except ValueError:
        raise InvalidParams(f"--r expects an integer or a comma-separated list, got {text!r}") from None


def _reduce_inputs(nf, args):
    net = nf.network()
    spec = reduction.reduction_spec(net, _parse_r(args.r), not args.no_check)
    start = nf.start(net)
    inside = all(lo <= s <= hi for s, (lo, hi) in zip(start.scores, spec.windows))
    original = reduction.windowed_network(net, spec, start if inside else None)
    spec, star = reduction.expander_to_star(net, _parse_r(args.r), original.start, not args.no_check)
    return net, spec, original, star


def _reduce(nf, args, out):
    net, spec, _, star = _reduce_inputs(nf, args)
    print(f"# h = {frac(spec.h)}, r = {','.join(map(str, spec.r))}", file=out)
    print("# offsets " + " ".join(f"{net.label(v)}={o}" for v, o in enumerate(spec.offsets)),
          file=out)
    snet = star.network
    desc = netfile.from_network(snet, star.start, {spec.center: (spec.center_score,) * 2})
    out.write(netfile.serialize(desc))


def _verify(nf, args, out):
    net, spec, original, star = _reduce_inputs(nf, args)
    rep = reduction.verify_reduction(original, star, spec.offsets,
                                     _budget(args, classspace.DEFAULT_CLASS_BUDGET))
    print(f"bijection {'yes' if rep.bijection else 'no'} "
          f"({rep.original_classes} original, {rep.star_classes} star classes)", file=out)
    for (x, y), (a, b) in rep.liquidity.items():
        print(f"{net.label(x)} {net.label(y)} {frac(a)} {frac(b)} "
              f"{'match' if a == b else 'MISMATCH'}", file=out)
    print(f"passed {'yes' if rep.passed else 'no'}", file=out)


def _gadget(nf, args, out):
    net = nf.network()
    if nf.groups:
        raise InvalidParams("gadget expansion handles node caps only")
    windows = nf.windows(net)
    if any(lo > 0 for lo, _ in windows.values()):
        raise InvalidParams("gadget expansion models upper caps only; lower bounds must be 0")
    caps = {v: windows.get(v, (0, net.degree(v)))[1] for v in range(net.n)}
    g = build_gadget(net, caps, nf.start(net))
    fakes = [g.fake[v] for v in range(net.n)]
    desc = netfile.from_network(g.network, g.start, pairs=combinations(fakes, 2))
    out.write(netfile.serialize(desc))


def _simulate(nf, args, out):
    net = nf.network()
    space = _space(nf, args) if args.track_classes else None
    rep = markov.simulate(nf.constrained(), nf.distribution(net), args.steps, args.burnin,
                          args.seed, track_classes=args.track_classes, space=space)
    out.write(rep.to_csv(net) if args.csv else rep.table(net) + "\n")


def _monotonicity(nf, args, out):
    base = nf.constrained()
    if bool(args.add_edge) == bool(args.replace_star):
        raise InvalidParams("give exactly one of --add-edge or --replace-star")
    if args.add_edge:
        u, v, cap = args.add_edge
        try:
            mod = reduction.AddEdge(u, v, int(cap))
        except ValueError:
            raise InvalidParams(f"capacity must be an integer, got {cap!r}") from None
    else:
        mod = reduction.ReplaceSubgraphWithStar(tuple(args.replace_star), _parse_r(args.r or "1"))
    net = base.network
    pairs = _pairs(nf, net, args) if args.pair else None
    rep = reduction.monotonicity_experiment(base, mod, pairs,
                                            _budget(args, classspace.DEFAULT_CLASS_BUDGET))
    out.write(rep.to_csv())


COMMANDS = {
    "enumerate": _enumerate,
    "liquidity": _liquidity,
    "forests": _forests,
    "expansion": _expansion,
    "reduce": _reduce,
    "verify-reduction": _verify,
    "gadget": _gadget,
    "simulate": _simulate,
    "monotonicity": _monotonicity,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="network description file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps", type=int, default=10**6)
    common.add_argument("--burnin", type=int, default=10**4)
    common.add_argument("--budget", type=int, default=None,
                        help="enumeration budget (classes, subsets or vertices, per command)")
    p = argparse.ArgumentParser(prog="creditnet", description="Liquidity analysis of credit networks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enumerate", parents=[common], help="reachable classes as CSV")
    s.add_argument("--count", action="store_true", help="print only the number of classes")

    s = sub.add_parser("liquidity", parents=[common], help="pairwise liquidity")
    s.add_argument("--method", choices=METHODS, default="exact")
    s.add_argument("--pair", nargs=2, metavar=("X", "Y"))

    s = sub.add_parser("forests", parents=[common], help="forest counts of the expanded multigraph")
    s.add_argument("--pair", nargs=2, metavar=("X", "Y"))

    sub.add_parser("expansion", parents=[common], help="exact edge expansion")

    for name, text in (("reduce", "equivalent pinned-center star"),
                       ("verify-reduction", "check the star reduction by enumeration")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--r", required=True, help="deviation budget: integer or comma list")
        s.add_argument("--no-check", action="store_true",
                       help="skip the r <= floor(h) precondition (negative controls)")

    sub.add_parser("gadget", parents=[common], help="fake-vertex expansion of node caps")

    s = sub.add_parser("simulate", parents=[common], help="Monte-Carlo run of the transaction chain")
    s.add_argument("--track-classes", action="store_true")
    s.add_argument("--csv", action="store_true")

    s = sub.add_parser("monotonicity", parents=[common], help="liquidity before and after a change")
    s.add_argument("--add-edge", nargs=3, metavar=("U", "V", "CAP"))
    s.add_argument("--replace-star", nargs="+", metavar="V")
    s.add_argument("--r", help="leaf capacity for --replace-star (integer or comma list)")
    s.add_argument("--pair", nargs=2, metavar=("X", "Y"))
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"creditnet: cannot read {args.file}: {exc.strerror}", file=err)
        return 2
    try:
        nf = netfile.parse_network(text)
        COMMANDS[args.command](nf, args, out)
    except ParseError as exc:
        print(f"creditnet: {args.file}:{exc}", file=err)
        return 2
    except BudgetExceeded as exc:
        print(f"creditnet: budget exceeded: {exc}", file=err)
        return 1
    except (CreditNetError, ValueError, KeyError) as exc:
        print(f"creditnet: {type(exc).__name__}: {exc}", file=err)
        return 2
    return 0


def main():
    sys.exit(run())
