"""Breakpoint jumps of r_j for the global and local methods on exp6.

exp6 has one eigenvalue of size O(1) next to two of size O(k).  Near a
small eigenvalue many Riccati solutions are slowly varying on a panel, so
each panel of the global method settles on a different one: residuals stay
tiny while r_j jumps at the breakpoints.  The local method propagates each
branch from a single seed and stays continuous.

    python3 scripts/exp6_contrast.py --kmin 8 --kmax 20
"""
import argparse

import numpy as np

from phasekit import GlobalConfig, LocalConfig, get_equation, global_levin, local_levin, max_jump


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kmin", type=int, default=8)
    p.add_argument("--kmax", type=int, default=20)
    p.add_argument("--step", type=int, default=2)
    args = p.parse_args()

    eq = get_equation("exp6")
    print(f"{'k':>9s} {'global jump':>12s} {'local jump':>12s} {'global panels':>14s} {'local panels':>13s}")
    for e in range(args.kmin, args.kmax + 1, args.step):
        c = eq.coeffs(2.0**e)
        g = global_levin(GlobalConfig(), c)
        loc = local_levin(LocalConfig(), c)
        print(f"{2**e:9d} {np.max(max_jump(g)):12.2e} {np.max(max_jump(loc)):12.2e} "
              f"{g.panel_count:14d} {loc.panel_count:13d}", flush=True)


if __name__ == "__main__":
    main()
