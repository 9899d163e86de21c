"""Sweep the collective-decision strategies over a small (N, R) grid.

Each cell runs a few seeds of the 5000-step survival task and reports
mean survival plus the cycle-averaged truth gap. Consensus negotiation
keeps the collective close to the drifting weight; the random controls
show what that tracking is worth.
"""

import sys

import numpy as np

from msfslab.decision import STRATEGIES, c_syn_decision, cycle_averages, simulate_decision
from msfslab.kernel import aggregate_weighted, rng_stream

GRID_N = (5, 15)
GRID_R = (1, 10)
SEEDS = 10


def main() -> None:
    seeds = SEEDS if len(sys.argv) < 2 else int(sys.argv[1])
    print(f"{seeds} seeds per cell, max 5000 steps\n")
    for n in GRID_N:
        for r in GRID_R:
            print(f"N = {n}, R = {r}:")
            for strategy in STRATEGIES:
                c_syn = c_syn_decision(strategy, n, r)
                rows = [
                    cycle_averages(simulate_decision(strategy, n, r, rng_stream(900, s)))
                    for s in range(seeds)
                ]
                survival = np.mean([row["survival"] for row in rows])
                defined = [
                    (row["delta_truth"], row["cycles"])
                    for row in rows
                    if row["delta_truth"] is not None
                ]
                if defined:
                    gap = aggregate_weighted(*zip(*defined))
                    gap_text = f"{gap:7.4f}"
                else:
                    gap_text = "     NA"
                print(
                    f"  {strategy:<18} survival {survival:6.0f}  "
                    f"truth gap {gap_text}  c_syn {c_syn:7.2f}"
                )
            print()


if __name__ == "__main__":
    main()
