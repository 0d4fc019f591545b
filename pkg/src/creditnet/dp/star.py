"""Star networks: class counts by center score, liquidity and failure bounds.

Leaves ``v_1..v_n`` attach to a center ``u`` with capacities ``c_i``.  The
center's score is the sum of the residuals ``u -> v_i``, so counting
configurations by center score is repeated convolution with the uniform
sequence of length ``c_i + 1``.
"""
from __future__ import annotations

from fractions import Fraction

from ..errors import InfeasibleScore


def star_class_counts(leaf_caps) -> list:
    """``counts[k]`` = number of star configurations with center score ``k``."""
    counts = [1]
    for c in leaf_caps:
        if c < 0:
            raise ValueError("capacities must be non-negative")
        nxt = [0] * (len(counts) + c)
        for k, x in enumerate(counts):
            for j in range(c + 1):
                nxt[k + j] += x
        counts = nxt
    return counts


def star_liquidity(leaf_caps, center_score: int, i: int, j: int) -> Fraction:
    """Unit payment success probability ``v_i -> v_j`` with the center pinned.

    The payment goes ``v_i -> u -> v_j``: it needs residual ``v_i -> u`` of
    at least one (so ``r(u -> v_i) <= c_i - 1``) and ``r(u -> v_j) >= 1``.
    The remaining leaves must then supply the rest of the center's score.
    """
    caps = list(leaf_caps)
    if i == j:
        raise ValueError("liquidity needs two distinct leaves")
    total_counts = star_class_counts(caps)
    if not 0 <= center_score < len(total_counts) or total_counts[center_score] == 0:
        raise InfeasibleScore(f"center score {center_score} is not attainable")
    rest = star_class_counts(c for k, c in enumerate(caps) if k not in (i, j))
    good = 0
    for a in range(caps[i]):
        for b in range(1, caps[j] + 1):
            k = center_score - a - b
            if 0 <= k < len(rest):
                good += rest[k]
    return Fraction(good, total_counts[center_score])


def unconstrained_star_failure(c_i: int, c_j: int) -> Fraction:
    """Failure probability between two leaves of an unconstrained star."""
    a, b = Fraction(1, c_i + 1), Fraction(1, c_j + 1)
    return a + b - a * b


def star_failure_bounds(c_i: int, c_j: int) -> tuple:
    """``(lower, upper)`` failure bounds for a pinned-center star, clamped to [0, 1]."""
    lower = Fraction(2, c_i + c_j + 2)
    upper = min(Fraction(4, c_i + c_j), Fraction(1))
    return max(lower, Fraction(0)), upper
