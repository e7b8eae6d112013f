#!/usr/bin/env python3
"""Locate the sample-count window where side information separates the
two algorithms, at the reference cell d=4, N=30, M=8, r=2, full side info.

Prints a frequency table over a coarse |Omega| grid.  The acceptance suite
freezes |Omega| = 1200 from this study: rttc-si is 5/5 from 700 upward
while plain rttc stays 0/5 through 2600 (base seed 2000).
"""

import argparse
import time

from rttc.harness import InstanceSpec, run_single
from rttc.rng import derive_seed
from rttc.solver import SolverConfig


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--omegas", type=int, nargs="+",
                        default=[500, 700, 900, 1200, 1700, 2600])
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--base-seed", type=int, default=2000)
    args = parser.parse_args()

    print("omega  rttc  rttc-si")
    for omega in args.omegas:
        t0 = time.perf_counter()
        counts = {}
        for algorithm in ("rttc", "rttc-si"):
            conv = 0
            for trial in range(args.trials):
                seed = derive_seed(args.base_seed, "instance",
                                   4, 30, 8, 2, 4, omega, trial)
                spec = InstanceSpec(d=4, N=30, r=2, M=8, l=4,
                                    omega_size=omega, seed=seed)
                record, _ = run_single(spec, SolverConfig(), algorithm=algorithm,
                                       trial=trial)
                conv += record.converged
            counts[algorithm] = conv
        print(f"{omega:5d}  {counts['rttc']}/{args.trials}   "
              f"{counts['rttc-si']}/{args.trials}"
              f"   ({time.perf_counter() - t0:.0f}s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
