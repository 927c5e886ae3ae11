"""Long-range-order observables and bound margins over the coupling g."""

import argparse
import sys

from njl import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="SU3")
    ap.add_argument("--L", default="2")
    ap.add_argument("--beta", default="4.0")
    args = ap.parse_args()
    argv = ["sweep", "--model", args.model, "--L", args.L, "--kappa", "0.2",
            "--g", "0.5", "1", "2", "4", "--beta", args.beta]
    return cli.main(argv)


if __name__ == "__main__":
    sys.exit(main())
