"""Monte-Carlo liquidity estimation on the transaction Markov chain.

Each step draws an ordered pair ``(x, y)`` with probability proportional to
its rate and has ``x`` pay ``y`` one unit if possible; a failed attempt
leaves the state in place.

Outcomes depend only on the current class (the score vector), so the
simulator memoises, per ``(class, pair)``, the outcome and one successor
configuration.  The visited sequence of classes has exactly the law of the
configuration-level chain; only the within-class representative differs.

Random numbers come from xorshift64* seeded through splitmix64, both fully
specified below, so a seed yields the same stream on every platform.
"""
from __future__ import annotations

import csv
import io
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field

from .constraints import ConstrainedNetwork, TxStatus, attempt_transaction
from .errors import InvalidParams, PairNotSimulated
from .network import Transaction, residual_tree

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


class XorShift64Star:
    """xorshift64* (shifts 12, 25, 27; multiplier 0x2545F4914F6CDD1D)."""

    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK64) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class TransactionDistribution:
    rates: tuple  # ((x, y, rate), ...) over vertex ids, sorted
    symmetric: bool = False

    def __post_init__(self):
        rates = tuple(sorted((int(x), int(y), float(r)) for x, y, r in self.rates))
        if any(x == y for x, y, _ in rates):
            raise InvalidParams("self-pairs are not transactions")
        if any(r < 0 for *_, r in rates):
            raise InvalidParams("rates must be non-negative")
        if not any(r > 0 for *_, r in rates):
            raise InvalidParams("at least one positive rate is required")
        seen = [(x, y) for x, y, _ in rates]
        if len(set(seen)) != len(seen):
            raise InvalidParams("duplicate ordered pair")
        object.__setattr__(self, "rates", rates)
        if self.symmetric and not self.is_symmetric():
            raise InvalidParams("rates flagged symmetric but lambda_xy != lambda_yx")

    @classmethod
    def from_rates(cls, network, rates, symmetric: bool = False) -> "TransactionDistribution":
        """``rates`` maps ordered ``(x, y)`` pairs (ids or labels) to rates."""
        return cls(tuple((network.index(x), network.index(y), r) for (x, y), r in dict(rates).items()),
                   symmetric)

    @classmethod
    def uniform(cls, network, vertices=None) -> "TransactionDistribution":
        """Rate 1 for every ordered pair among ``vertices`` (default: all)."""
        vs = range(network.n) if vertices is None else [network.index(v) for v in vertices]
        return cls(tuple((x, y, 1.0) for x in vs for y in vs if x != y), True)

    def is_symmetric(self) -> bool:
        table = {(x, y): r for x, y, r in self.rates}
        return all(table.get((y, x), 0.0) == r for (x, y), r in table.items())


@dataclass
class SimReport:
    seed: int
    steps: int
    burn_in: int
    pairs: tuple  # ordered (x, y) pairs with positive rate
    attempts: list
    successes: list
    no_route: list
    predicate_violation: list
    class_counts: Counter | None = None
    space_size: int | None = None
    outside_space: int = 0  # visited classes missing from the supplied space
    invalid_states: int = 0  # visited classes failing the predicate
    irreversible: int = 0  # executed transitions whose reverse is infeasible
    half_successes: tuple = field(default=((), ()), repr=False)
    half_attempts: tuple = field(default=((), ()), repr=False)
    _outside: frozenset = field(default=frozenset(), repr=False)

    @property
    def recorded_steps(self) -> int:
        return self.steps - self.burn_in

    def _k(self, x, y) -> int:
        try:
            k = self.pairs.index((x, y))
        except ValueError:
            raise PairNotSimulated((x, y)) from None
        if not self.attempts[k]:
            raise PairNotSimulated((x, y))
        return k

    def liquidity(self, x: int, y: int) -> float:
        k = self._k(x, y)
        return self.successes[k] / self.attempts[k]

    @property
    def class_frequencies(self) -> dict | None:
        if self.class_counts is None:
            return None
        total = sum(self.class_counts.values())
        return {s: c / total for s, c in sorted(self.class_counts.items())}

    @property
    def tv_distance(self) -> float | None:
        """Total-variation distance between visit frequencies and the uniform
        distribution on the supplied class space."""
        if self.class_counts is None or not self.space_size:
            return None
        freq = self.class_frequencies
        u = 1.0 / self.space_size
        inside = [f for s, f in freq.items() if s not in self._outside]
        gap = sum(abs(f - u) for f in inside)
        gap += (self.space_size - len(inside)) * u
        gap += sum(f for s, f in freq.items() if s in self._outside)
        return 0.5 * gap

    @property
    def split_half_gap(self) -> float | None:
        """Largest disagreement between first- and second-half liquidity
        estimates over pairs attempted in both halves."""
        gaps = []
        (s1, s2), (a1, a2) = self.half_successes, self.half_attempts
        for k in range(len(self.pairs)):
            if a1 and a1[k] and a2[k]:
                gaps.append(abs(s1[k] / a1[k] - s2[k] / a2[k]))
        return max(gaps) if gaps else None

    def to_csv(self, network=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["payer", "payee", "attempts", "successes", "no_route",
                    "predicate_violation", "liquidity"])
        name = network.label if network is not None else str
        for k, (x, y) in enumerate(self.pairs):
            a = self.attempts[k]
            est = f"{self.successes[k] / a:.6f}" if a else ""
            w.writerow([name(x), name(y), a, self.successes[k], self.no_route[k],
                        self.predicate_violation[k], est])
        return buf.getvalue()

    def table(self, network=None) -> str:
        name = network.label if network is not None else str
        lines = [f"seed={self.seed} steps={self.steps} burn_in={self.burn_in}",
                 f"{'pair':<12}{'attempts':>10}{'success':>10}{'no_route':>10}{'pred':>8}{'liquidity':>11}"]
        for k, (x, y) in enumerate(self.pairs):
            a = self.attempts[k]
            est = f"{self.successes[k] / a:.4f}" if a else "-"
            lines.append(f"{name(x) + '->' + name(y):<12}{a:>10}{self.successes[k]:>10}"
                         f"{self.no_route[k]:>10}{self.predicate_violation[k]:>8}{est:>11}")
        if self.tv_distance is not None:
            lines.append(f"tv_distance_to_uniform={self.tv_distance:.5f}")
        if self.split_half_gap is not None:
            lines.append(f"split_half_gap={self.split_half_gap:.5f}")
        return "\n".join(lines)


def simulate(cn: ConstrainedNetwork, dist: TransactionDistribution, steps: int, burn_in: int = 0,
             seed: int = 0, track_classes: bool = False, space=None) -> SimReport:
    """Run the chain for ``steps`` steps, recording after ``burn_in``.

    With ``track_classes`` the class visited at every recorded step is
    counted; passing a :class:`~creditnet.classspace.ClassSpace` as
    ``space`` additionally enables the distance-to-uniform diagnostic.
    """
    if not steps > burn_in >= 0:
        raise InvalidParams("need steps > burn_in >= 0")
    pairs = tuple((x, y) for x, y, r in dist.rates if r > 0)
    n = cn.network.n
    if any(not (0 <= x < n and 0 <= y < n) for x, y in pairs):
        raise InvalidParams("rate references a vertex outside the network")
    cum = []
    acc = 0.0
    for _, _, r in dist.rates:
        if r > 0:
            acc += r
            cum.append(acc)
    total = acc
    txs = [Transaction(x, y, 1) for x, y in pairs]
    m = len(pairs)
    attempts, successes = [0] * m, [0] * m
    no_route, violated = [0] * m, [0] * m
    halves_s, halves_a = ([0] * m, [0] * m), ([0] * m, [0] * m)
    midpoint = burn_in + (steps - burn_in) // 2
    counts = Counter() if track_classes else None
    rng = XorShift64Star(seed)
    memo = {}
    pred = cn.predicate
    invalid = irreversible = 0
    applied, no_path = TxStatus.APPLIED, TxStatus.NO_ROUTE
    cfg = cn.start
    s = cfg.scores
    for step in range(steps):
        k = bisect_right(cum, rng.random() * total)
        if k >= m:
            k = m - 1
        key = (s, k)
        hit = memo.get(key)
        if hit is None:
            res = attempt_transaction(cn, cfg, txs[k])
            nxt = res.config
            if res.status is applied:
                if not pred(nxt.scores):
                    invalid += 1
                x, y = pairs[k]
                if x not in residual_tree(nxt, y, 1):
                    irreversible += 1
            hit = memo[key] = (res.status, nxt)
        status, nxt = hit
        if step >= burn_in:
            if counts is not None:
                counts[s] += 1
            half = 0 if step < midpoint else 1
            attempts[k] += 1
            halves_a[half][k] += 1
            if status is applied:
                successes[k] += 1
                halves_s[half][k] += 1
            elif status is no_path:
                no_route[k] += 1
            else:
                violated[k] += 1
        if status is applied:
            cfg = nxt
            s = cfg.scores
    report = SimReport(
        seed=seed, steps=steps, burn_in=burn_in, pairs=pairs,
        attempts=attempts, successes=successes, no_route=no_route,
        predicate_violation=violated, class_counts=counts,
        invalid_states=invalid, irreversible=irreversible,
        half_successes=halves_s, half_attempts=halves_a,
    )
    if space is not None and counts is not None:
        report.space_size = len(space)
        report._outside = frozenset(c for c in counts if c not in space.index)
        report.outside_space = len(report._outside)
    return report


def estimate_liquidity(report: SimReport, x, y) -> float:
    """Success frequency of unit payments ``x -> y`` in the recorded steps."""
    return report.liquidity(x, y)


def merge_reports(reports) -> SimReport:
    """Pool independent chains over the same pairs.  Order-insensitive in
    every count; the merged seed is the tuple of component seeds."""
    reports = list(reports)
    if not reports:
        raise InvalidParams("nothing to merge")
    pairs = reports[0].pairs
    if any(r.pairs != pairs for r in reports):
        raise InvalidParams("reports cover different pairs")

    def add(attr):
        return [sum(col) for col in zip(*(getattr(r, attr) for r in reports))]

    def add_halves(attr):
        return tuple([sum(col) for col in zip(*(getattr(r, attr)[h] for r in reports))]
                     for h in (0, 1))

    counts = None
    if all(r.class_counts is not None for r in reports):
        counts = Counter()
        for r in reports:
            counts.update(r.class_counts)
    sizes = {r.space_size for r in reports}
    out = SimReport(
        seed=tuple(r.seed for r in reports),
        steps=sum(r.steps for r in reports),
        burn_in=sum(r.burn_in for r in reports),
        pairs=pairs,
        attempts=add("attempts"),
        successes=add("successes"),
        no_route=add("no_route"),
        predicate_violation=add("predicate_violation"),
        class_counts=counts,
        space_size=sizes.pop() if len(sizes) == 1 else None,
        invalid_states=sum(r.invalid_states for r in reports),
        irreversible=sum(r.irreversible for r in reports),
        half_successes=add_halves("half_successes"),
        half_attempts=add_halves("half_attempts"),
    )
    out._outside = frozenset().union(*(r._outside for r in reports))
    out.outside_space = len(out._outside)
    return out
