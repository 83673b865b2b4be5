"""Share of the domain up to a bound whose stopping time is at most a cap."""
import argparse

from dghmap import COLLATZ, FIVE_X_PLUS_ONE, THREE_X_MINUS_ONE
from dghmap.statistics import stopping_csv, stopping_density


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cap", type=int, default=1000)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    for name, params in (("3x+1", COLLATZ), ("3x-1", THREE_X_MINUS_ONE), ("5x+1", FIVE_X_PLUS_ONE)):
        print(f"# {name}")
        rows = [(b, args.cap, stopping_density(params, b, args.cap, args.threads)) for b in (10**3, 10**4, 10**5)]
        print(stopping_csv(rows), end="")


if __name__ == "__main__":
    main()
