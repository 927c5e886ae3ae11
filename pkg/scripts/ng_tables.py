"""Trial energies, Rayleigh quotients and ground-state bounds for the local trial operators."""

import argparse

from njl import diagnostics
from njl.hamiltonian import ModelParams
from njl.lattice import LatticeSpec
from njl.spectral import SpectralFilter


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", choices=["SU2", "SU3"], default="SU2")
    ap.add_argument("--kappa", type=float, default=0.1)
    ap.add_argument("--g", type=float, default=2.0)
    ap.add_argument("--m", type=float, nargs="+", default=[0.1, 0.05])
    ap.add_argument("--r", type=float, default=None, help="filter scale; default covers the whole spectrum")
    args = ap.parse_args()
    spec = LatticeSpec(nu=1, L=2, flavors=2 if args.model == "SU2" else 3)
    print(f"{'m':>5} {'R':>2} {'r':>6} {'phi':>12} {'rayleigh':>12} {'GSIB lhs':>10} {'GSIB rhs':>10}")
    for m in args.m:
        params = ModelParams(kappa=args.kappa, g=args.g, m=m)
        # the support (delta, 2r) must reach the excitations the trial state connects to
        spectrum = diagnostics.model_spectrum(spec, params)
        r = args.r or spectrum.energies[-1] - spectrum.E0
        filt = SpectralFilter(delta=0.05, r=r, epsilon=0.2)
        for R in (1, 2):
            recs = {r.name: r for r in diagnostics.ng_trial_energy(spec, params, filt, R)}
            kls = {r.name: r for r in diagnostics.kls_inequality(spec, params, filt, R)}
            gsib = kls["ground_infrared_bound"]
            print(f"{m:>5} {R:>2} {r:>6.2f} {recs['ng_trial_energy_phi'].lhs:>12.6f} "
                  f"{recs['ng_rayleigh_quotient'].lhs:>12.6f} {gsib.lhs:>10.4f} {gsib.rhs:>10.4f}")


if __name__ == "__main__":
    main()
