"""Walk the task-distribution information ladder.

Prints the per-register entropy census, the scale-by-scale abstraction
ladder, the per-cycle information cost of every strategy, the broadcast
transition matrix, and the long-run goal-value curves. Pass a directory
to also drop the curves as CSV.
"""

import csv
import sys
from pathlib import Path

import numpy as np

from msfslab.taskdist import (
    STRATEGIES,
    abstraction_entropies,
    build_transition_matrix,
    c_syn_td,
    goal_value_curve,
)


def main(out_dir: str | None = None) -> None:
    info = c_syn_td("broadcast")
    print("broadcast register entropies (bits):")
    for register, bits in info.per_variable.items():
        print(f"  {register:<16} {bits:7.4f}")

    print("\nabstraction ladder (workers -> mids -> top):")
    for strategy in ("broadcast", "mediated"):
        ladder = " -> ".join(f"{h:6.4f}" for h in abstraction_entropies(strategy))
        print(f"  {strategy:<14} {ladder}")

    print("\nper-cycle information cost:")
    for strategy in STRATEGIES:
        print(f"  {strategy:<16} {c_syn_td(strategy).cycle:7.3f} bits")

    print("\nbroadcast one-step class matrix:")
    matrix = build_transition_matrix("broadcast")
    for row in matrix:
        print("  " + "  ".join(f"{p:8.6f}" for p in row))
    print(f"  goal in one step: {matrix[0, -1]:.6f}")

    m_max = 50
    curves = {s: goal_value_curve(s, m_max) for s in STRATEGIES}
    print("\ngoal value at m = 10 / 20 / 50:")
    for strategy, curve in curves.items():
        v = curve["v_gl"]
        print(f"  {strategy:<16} {v[10]:6.3f}  {v[20]:6.3f}  {v[50]:6.3f}")

    if out_dir is not None:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        target = path / "goal_value_curves.csv"
        with target.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["m"] + [f"{s}_{k}" for s in STRATEGIES for k in ("v_gl", "e_gl")])
            for m in range(m_max + 1):
                row: list = [m]
                for strategy in STRATEGIES:
                    row += [curves[strategy]["v_gl"][m], curves[strategy]["e_gl"][m]]
                writer.writerow(np.round(row, 9).tolist())
        print(f"\nwrote {target}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
