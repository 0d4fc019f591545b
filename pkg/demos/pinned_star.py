"""Walk through the pinned four-leaf star and what a bridge between two leaves does.

Run: python3 demos/pinned_star.py
"""
import itertools
from fractions import Fraction

from creditnet import (
    AddEdge,
    Configuration,
    ConstrainedNetwork,
    CreditNetwork,
    enumerate_reachable,
    exact_liquidity,
    monotonicity_experiment,
    node_bound,
)


def main():
    net = CreditNetwork.build([("u", f"v{i}", 1) for i in range(1, 5)])
    # v1 and v2 hold the center's credit, so u starts with score 2
    start = Configuration.from_residuals(net, {("v1", "u"): 1, ("v2", "u"): 1})
    star = ConstrainedNetwork(net, node_bound("u", 2, 2, net), start)
    leaves = list(itertools.combinations(range(1, 5), 2))
    space = enumerate_reachable(star, leaves)
    print(f"reachable classes with u pinned at 2: {len(space)}")
    for scores in space.classes:
        print("  ", dict(zip(net.labels, scores)))
    print("liquidity v1 -> v2:", exact_liquidity(space, "v1", "v2"))

    print("\nadding a v3-v4 edge of capacity n:")
    for n in range(0, 11, 2):
        row = monotonicity_experiment(star, AddEdge("v3", "v4", n), [("v1", "v2")]).rows[0]
        print(f"  n={n:2d}  liquidity {row.after}  (closed form {Fraction(n + 2, 4 * n + 6)})")
    print("liquidity drops as capacity elsewhere grows, approaching 1/4 from above")


if __name__ == "__main__":
    main()
