"""Compare the four robotic-collective steering strategies.

Runs a handful of seeds per strategy and contrasts the memory each
strategy spends against the goal distance it buys. The estimation
strategies trade a bigger memory footprint for smoother regulation;
ground truth shows what perfect knowledge achieves with almost none.
"""

import sys

import numpy as np

from msfslab.kernel import rng_stream
from msfslab.robotic import (
    STRATEGIES,
    c_syn_robotic,
    goal_value_windows,
    simulate,
)

SEEDS = 5


def main() -> None:
    seeds = SEEDS if len(sys.argv) < 2 else int(sys.argv[1])
    print(f"{seeds} seeds x 2000 steps per strategy\n")
    print(f"{'strategy':<18} {'memory':>7} {'tail goal dist':>14} {'tail |e_pr|':>12}")
    for strategy in STRATEGIES:
        memory = c_syn_robotic(strategy)
        tails, magnitudes = [], []
        for s in range(seeds):
            trace = simulate(strategy, rng=rng_stream(1234, s))
            tails.append(trace.delta_goal[-1000:].mean())
            eff = goal_value_windows(trace.delta_goal, 500, memory)[1]
            magnitudes.append(np.abs(np.asarray(eff[-1000:], dtype=float)).mean())
        print(
            f"{strategy:<18} {memory:7.0f} {np.mean(tails):14.3f} "
            f"{np.mean(magnitudes):12.2e}"
        )
    print(
        "\nground truth holds both discrepancy series at zero by construction;"
        "\nthe short estimation buffer reacts faster per memory unit than the long one."
    )


if __name__ == "__main__":
    main()
