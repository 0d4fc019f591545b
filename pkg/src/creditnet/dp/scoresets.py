"""Per-vertex admitted score sets.

A score-set mapping sends a vertex (id or label) to the collection of
scores it may take.  Missing vertices, or a value of ``None``, admit every
score in ``[0, d(v)]``.
"""
from __future__ import annotations


def normalize(network, scoresets) -> list:
    """List indexed by vertex id: a frozenset of admitted scores, or None."""
    out = [None] * network.n
    for v, xs in (scoresets or {}).items():
        v = network.index(v)
        if xs is None:
            continue
        if isinstance(xs, range) or not isinstance(xs, (set, frozenset)):
            xs = set(xs)
        bad = [s for s in xs if not 0 <= s <= network.degree(v)]
        if bad:
            raise ValueError(f"scores {sorted(bad)} outside [0, d(v)] for {network.label(v)}")
        out[v] = frozenset(xs)
    return out


def from_predicate_windows(network, windows) -> dict:
    """``{v: (lo, hi)}`` windows to score sets."""
    return {network.index(v): range(lo, hi + 1) for v, (lo, hi) in windows.items()}


def after_payment(network, admitted, x, y) -> list:
    """Score sets restricted to classes where a unit payment x -> y lands
    on admitted scores: ``S_x - 1`` and ``S_y + 1`` must stay admitted."""
    out = list(admitted)
    full_x = out[x] if out[x] is not None else range(network.degree(x) + 1)
    full_y = out[y] if out[y] is not None else range(network.degree(y) + 1)
    sx, sy = set(full_x), set(full_y)
    out[x] = frozenset(s for s in sx if s - 1 in sx)
    out[y] = frozenset(s for s in sy if s + 1 in sy)
    return out
