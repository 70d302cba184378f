"""Worst diagonalization-circuit depth per N, used to freeze the regression bound constants."""

import argparse
import math

import numpy as np

from pauligroup.acceptance import U_DEPTH_ALPHA, U_DEPTH_BETA, random_commuting_group
from pauligroup.synth import diagonalize_group


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=12)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print("N  worst_depth  N*ceil(log2 N)  bound")
    ratio = 0.0
    for n in range(1, args.max_n + 1):
        worst = 0
        for _ in range(args.trials):
            group = random_commuting_group(n, int(rng.integers(1, n + 3)), rng)
            worst = max(worst, diagonalize_group(group, n).circuit.depth())
        nlog = n * (math.ceil(math.log2(n)) if n > 1 else 0)
        if nlog:
            ratio = max(ratio, (worst - U_DEPTH_BETA) / nlog)
        print(f"{n:<3}{worst:>11}{nlog:>16}{U_DEPTH_ALPHA * nlog + U_DEPTH_BETA:>7}")
    print(f"max (depth - beta) / (N ceil(log2 N)) = {ratio:.2f}; frozen alpha = {U_DEPTH_ALPHA}, beta = {U_DEPTH_BETA}")


if __name__ == "__main__":
    main()
