"""Reduce a windowed well-connected network to a pinned star and compare.

Run: python3 demos/expander_reduction.py
"""
import itertools

from creditnet import CreditNetwork, edge_expansion, expander_to_star, verify_reduction, windowed_network


def main():
    net = CreditNetwork.build([(a, b, 2) for a, b in itertools.combinations("ABCD", 2)])
    rep = edge_expansion(net)
    print(rep.describe(net))
    spec, star = expander_to_star(net, 4)
    print("per-vertex windows:", dict(zip(net.labels, spec.windows)))
    print("star leaf capacities:", spec.leaf_caps, "center score:", spec.center_score)
    result = verify_reduction(windowed_network(net, spec), star, spec.offsets)
    print(f"classes: original {result.original_classes}, star {result.star_classes}")
    print("bijection:", result.bijection, " liquidity equal on every pair:", result.passed)
    a, b = result.liquidity[(0, 1)]
    print(f"liquidity A -> B: network {a}, star {b}")


if __name__ == "__main__":
    main()
