#!/usr/bin/env python3
"""Run the four desk-scale phase studies and write summary tables.

Each config sweeps convergence frequency over a grid:

    fig1  |Omega| x N, both algorithms   (the side-information gap)
    fig2  |Omega| x N, rttc-si only      (transition position independent of N)
    fig3  |Omega| x l                    (partial side information)
    fig4  |Omega| x r                    (rank dependence)

Sweeps resume from existing CSVs, so interrupting and re-running is safe.
Figures can then be rendered with the separate phaseplot tool, e.g.

    phaseplot --csv results/fig1_desk.csv --x omega --y N \
              --facet algorithm --out results/fig1_desk.png
"""

import argparse
import sys
import time
from pathlib import Path

from rttc.harness import load_sweep_config, run_sweep, summarize, write_summary

REPO = Path(__file__).resolve().parent.parent
CONFIGS = ["fig1_desk", "fig2_desk", "fig3_desk", "fig4_desk"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--only", choices=CONFIGS, action="append",
                        help="run a subset of the studies (repeatable)")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    names = args.only or CONFIGS
    for name in names:
        config = load_sweep_config(REPO / "configs" / f"{name}.json")
        out = REPO / config.out
        print(f"== {name}: {out}", flush=True)
        t0 = time.perf_counter()
        done = 0

        def progress(record):
            nonlocal done
            done += 1
            print(f"  [{done}] {record.to_csv_row()}", flush=True)

        run_sweep(config, threads=args.threads, resume=True, out=out,
                  progress=progress)
        print(f"  sweep done in {time.perf_counter() - t0:.0f}s", flush=True)

        summary_path = out.with_name(out.stem + "_summary.csv")
        rows = summarize(out)
        with open(summary_path, "w", encoding="utf-8") as f:
            write_summary(rows, f)
        write_summary(rows, sys.stdout)
        print(f"  summary: {summary_path}", flush=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
