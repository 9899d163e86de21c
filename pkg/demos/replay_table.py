"""Replay the six-step task-distribution scenario and print its table.

The broadcast hierarchy walks 0 -> 2 -> 4 workers onto the goal task
with a control miscue in the middle; the mediated one jumps straight
there. Every information measure is shown per step, NA where a cycle
has no predecessor. Pass a directory to also write one CSV per strategy.
"""

import csv
import sys
from pathlib import Path

from msfslab.taskdist import scenario_replay, scenario_table_rows


def _fmt(cell) -> str:
    if cell is None:
        return "NA"
    if isinstance(cell, float) and not cell.is_integer():
        return f"{cell:.3f}"
    return str(int(cell))


def main(out_dir: str | None = None) -> None:
    for strategy in ("broadcast", "mediated"):
        replay = scenario_replay(strategy)
        states = " -> ".join(str(h.workers_on_goal) for h in replay.snapshots[:6])
        print(f"{strategy}: workers on goal {states}")
        header, rows = scenario_table_rows(strategy)
        width = max(len(r[0]) for r in rows)
        for name, *cells in rows:
            print(f"  {name:<{width}}  " + "  ".join(f"{_fmt(c):>7}" for c in cells))
        print()
        if out_dir is not None:
            path = Path(out_dir)
            path.mkdir(parents=True, exist_ok=True)
            target = path / f"replay_{strategy}.csv"
            with target.open("w", encoding="utf-8", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(header)
                for name, *cells in rows:
                    writer.writerow([name] + ["NA" if c is None else c for c in cells])
            print(f"wrote {target}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
