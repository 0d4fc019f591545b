"""Run the transaction chain on K4 and compare with exact liquidity.

Run: python3 demos/simulation.py [steps]
"""
import sys

from creditnet import TransactionDistribution, enumerate_reachable, exact_liquidity, load_corpus, simulate


def main(steps=200_000):
    cn = load_corpus("k4.net").constrained()
    space = enumerate_reachable(cn)
    rep = simulate(cn, TransactionDistribution.uniform(cn.network), steps, burn_in=10_000, seed=7,
                   track_classes=True, space=space)
    print(f"{len(space)} classes, {rep.recorded_steps} recorded steps")
    print(f"total variation distance to uniform: {rep.tv_distance:.4f}")
    print(f"split-half gap: {rep.split_half_gap:.4f}")
    for x, y in [(0, 1), (0, 2), (2, 3)]:
        print(f"{cn.network.label(x)} -> {cn.network.label(y)}: "
              f"simulated {rep.liquidity(x, y):.4f}, exact {float(exact_liquidity(space, x, y)):.4f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200_000)
