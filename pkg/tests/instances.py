"""Random instance generators shared by the test modules."""
from __future__ import annotations

import random

from creditnet.constraints import feasible_configuration, node_constrained
from creditnet.network import Configuration, CreditEdge, CreditNetwork


def names(n):
    return [chr(ord("A") + i) for i in range(n)]


def random_tree(rng: random.Random, n: int, max_cap: int) -> CreditNetwork:
    edges = [CreditEdge(rng.randrange(v), v, rng.randint(1, max_cap), v - 1) for v in range(1, n)]
    return CreditNetwork(names(n), edges)


def random_graph(rng: random.Random, n: int, max_cap: int, max_edges: int | None = None,
                 density: float = 0.5, connected: bool = True) -> CreditNetwork:
    """Simple graph; a random spanning tree first when ``connected``."""
    tree = set()
    if connected:
        for v in range(1, n):
            tree.add((rng.randrange(v), v))
    extra = sorted((u, v) for u in range(n) for v in range(u + 1, n)
                   if (u, v) not in tree and rng.random() < density)
    if max_edges is not None:
        extra = rng.sample(extra, max(0, min(len(extra), max_edges - len(tree))))
    pairs = sorted(tree | set(extra))
    return CreditNetwork(names(n), [CreditEdge(u, v, rng.randint(1, max_cap), k)
                                    for k, (u, v) in enumerate(pairs)])


def random_configuration(rng: random.Random, net: CreditNetwork) -> Configuration:
    return Configuration(net, [rng.randint(0, e.capacity) for e in net.edges])


def random_windows(rng: random.Random, net: CreditNetwork, p: float = 0.6):
    """Random interval windows that some configuration satisfies.

    Windows are drawn around the scores of a random configuration, so the
    instance is always feasible.  Returns ``(windows, start)``.
    """
    start = random_configuration(rng, net)
    s = start.scores
    windows = {}
    for v in range(net.n):
        if rng.random() < p:
            lo = rng.randint(0, s[v])
            hi = rng.randint(s[v], net.degree(v))
            windows[v] = (lo, hi)
    return windows, start


def random_constrained(rng, net, p=0.6):
    windows, start = random_windows(rng, net, p)
    return node_constrained(net, windows, start), windows


def random_partial_ktree(rng: random.Random, n: int, k: int, max_cap: int, keep: float = 0.7):
    """A random partial k-tree together with a width-``k`` decomposition.

    Returns ``(network, bags, tree_edges)``; bags are keyed by integers.
    """
    base = min(n, k + 1)
    bags = {0: tuple(range(base))}
    tree_edges = []
    edges = {(u, v) for u in range(base) for v in range(u + 1, base)}
    cliques = [(0, tuple(range(base)))]
    for v in range(base, n):
        owner, clique = rng.choice(cliques)
        attach = tuple(sorted(rng.sample(clique, min(k, len(clique)))))
        b = len(bags)
        bags[b] = attach + (v,)
        tree_edges.append((owner, b))
        edges |= {(u, v) for u in attach}
        cliques.append((b, bags[b]))
    kept = sorted(e for e in edges if rng.random() < keep)
    net = CreditNetwork(names(n), [CreditEdge(u, v, rng.randint(1, max_cap), i)
                                   for i, (u, v) in enumerate(kept)])
    return net, bags, tree_edges


def feasible_windows(net, windows):
    lo = [windows.get(v, (0, net.degree(v)))[0] for v in range(net.n)]
    hi = [windows.get(v, (0, net.degree(v)))[1] for v in range(net.n)]
    return feasible_configuration(net, lo, hi)


def simple_paths(cfg, a, b, amount):
    """Every simple path from a to b with enough residual on each hop."""
    net = cfg.network
    out = []

    def walk(v, path, seen):
        if v == b:
            out.append(list(path))
            return
        for eid, w in net.incident(v):
            if w not in seen and cfg.residual(eid, v) >= amount:
                seen.add(w)
                path.append(w)
                walk(w, path, seen)
                path.pop()
                seen.discard(w)

    walk(a, [a], {a})
    return out
