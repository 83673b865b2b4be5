"""Theoretical drift for every coprime d < g <= G and sampled drift for a few maps."""
import argparse
import math

from dghmap import validate_params
from dghmap.statistics import DensitySpec, drift_csv, drift_stats, empirical_drift

MAPS = [(2, 3, {1: 1}), (2, 3, {1: -1}), (2, 5, {1: 1}), (3, 4, {1: -1, 2: 1}), (3, 5, {1: 2, 2: 1}), (2, 7, {1: 1})]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g-max", type=int, default=100)
    ap.add_argument("--m", type=int, default=1000)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    smallest = min(
        (abs(math.log(g) - d / (d - 1) * math.log(d)), d, g)
        for d in range(2, args.g_max)
        for g in range(d + 1, args.g_max + 1)
        if math.gcd(d, g) == 1
    )
    print(f"smallest |drift| over coprime d < g <= {args.g_max}: {smallest[0]:.3e} at d={smallest[1]}, g={smallest[2]}")
    for d, g, h in MAPS:
        params = validate_params(d, g, h)
        theo = drift_stats(params).drift
        emp = empirical_drift(params, args.m, DensitySpec.for_steps(params, args.m), args.n, args.seed)
        print(f"# {params}")
        print(drift_csv([(args.m, args.n, emp, theo)]), end="")


if __name__ == "__main__":
    main()
