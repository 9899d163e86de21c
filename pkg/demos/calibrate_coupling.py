"""Show how coupling strength and delay set the synchronization time.

A small sweep around the shipped defaults (coupling 4.0, delay 6.0).
Weak coupling leaves the bottom oscillators effectively independent
and the variance never collapses; too long a delay slows the descent.
Each cell integrates the two-scale system for 150 s at the default
step, so the whole sweep takes a couple of minutes.
"""

import sys

from msfslab.oscillators import (
    integrate_hierarchy,
    time_to_synchronize,
    two_scale_hierarchy,
)

COUPLINGS = (1.0, 2.0, 4.0, 6.0)
DELAYS = (2.0, 6.0, 10.0)


def main() -> None:
    t_end = 150.0 if len(sys.argv) < 2 else float(sys.argv[1])
    print(f"two-scale sync time (s) within {t_end:.0f} s, '-' = no sync\n")
    header = "coupling \\ delay" + "".join(f"{d:>9.1f}" for d in DELAYS)
    print(header)
    for coupling in COUPLINGS:
        cells = []
        for delay in DELAYS:
            hist = integrate_hierarchy(
                two_scale_hierarchy(coupling=coupling, delay=delay), t_end=t_end
            )
            sync = time_to_synchronize(hist)
            cells.append(f"{sync:9.1f}" if sync is not None else f"{'-':>9}")
        print(f"{coupling:<16.1f}" + "".join(cells))


if __name__ == "__main__":
    main()
