"""Mean and variance of k_1 + ... + k_m for windows at increasing offsets.

Shows why sampling near 1e9 cannot reproduce the density law for 3x+1 at
m = 100: most orbits reach the cycle at 1 first.
"""
import argparse

import numpy as np

from dghmap import COLLATZ, trajectory
from dghmap.statistics import DensitySpec, k_sum_moments, sample_domain, sample_k_sums


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=100)
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    mean, var = k_sum_moments(COLLATZ, args.m)
    print(f"density law: mean {float(mean)}, variance {float(var)}")
    print("window_low_bits,mean,variance,share_reaching_1")
    for bits in (30, 60, 120, 180, 240, 320):
        low = 6 * 2 ** (bits - 3)
        spec = DensitySpec(low, low + 6 * 10**6 - 1) if bits == 30 else DensitySpec(low, 2 * low - 1)
        sums = np.array(sample_k_sums(COLLATZ, args.m, spec, args.n, args.seed), dtype=float)
        xs = sample_domain(COLLATZ, spec, min(args.n, 2000), args.seed)
        hit = np.mean([trajectory(COLLATZ, x, args.m)[-1] == 1 for x in xs])
        print(f"{bits},{sums.mean():.4f},{sums.var(ddof=1):.2f},{hit:.3f}")


if __name__ == "__main__":
    main()
