"""Gaussian domination scan over random source fields on the 12-mode lattices."""

import argparse

from njl import diagnostics
from njl.hamiltonian import ModelParams
from njl.lattice import LatticeSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--beta", type=float, nargs="+", default=[0.5, 1.0, 4.0])
    args = ap.parse_args()
    lattices = [LatticeSpec(nu=1, L=2, flavors=3), LatticeSpec(nu=2, L=1, flavors=3)]
    grid = [ModelParams(kappa=k, g=g, m=m) for k in (0.0, 0.3) for g in (0.5, 2.0) for m in (0.0, 0.4)]
    print(f"{'nu':>2} {'L':>2} {'kappa':>5} {'g':>4} {'m':>4} {'beta':>5} {'worst margin':>13} ok")
    for spec in lattices:
        for params in grid:
            reports = diagnostics.gaussian_domination_scan(spec, params, args.beta, args.samples, args.seed)
            for beta in args.beta:
                sel = [r for r in reports if r.context["beta"] == beta]
                worst = min(r.margin for r in sel if r.name == "gaussian_domination")
                ok = all(r.passed for r in sel)
                print(f"{spec.nu:>2} {spec.L:>2} {params.kappa:>5} {params.g:>4} {params.m:>4} {beta:>5} "
                      f"{worst:>13.3e} {'yes' if ok else 'NO'}")


if __name__ == "__main__":
    main()
