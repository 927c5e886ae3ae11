"""Table of I_nu, J_nu, K_nu with quadrature errors, sampling cross-checks and thresholds."""

import argparse

from njl import integrals


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nu", type=int, nargs="+", default=[3, 4, 5, 6, 7])
    ap.add_argument("--qmc-log2", type=int, default=18)
    args = ap.parse_args()
    ks = {}
    print(f"{'name':>4} {'nu':>2} {'value':>14} {'error':>9} {'sampled':>14} {'agreement':>9}")
    for res in integrals.integral_table(tuple(args.nu), qmc_log2=args.qmc_log2):
        if res.name == "K":
            ks[res.nu] = res
        print(f"{res.name:>4} {res.nu:>2} {res.value:>14.10f} {res.error_estimate:>9.1e} "
              f"{res.check_value:>14.10f} {res.agreement:>9.2f}")
    for mode, need in (("SU2", 3), ("SU3", 5)):
        if need in ks:
            rep = integrals.lro_threshold_report(mode, ks)[0]
            print(f"{rep.name}: {rep.lhs:.6f} < {rep.rhs:.6f} {'holds' if rep.passed else 'FAILS'}")


if __name__ == "__main__":
    main()
