#!/usr/bin/env python3
"""Reproduce the dephasing sweep of the three- and four-qubit states with
c = (0.8, 0.4, 0.5): trajectory CSVs plus the four-qubit transition point.

The three-qubit variant is unphysical below p ~ 0.0107; those rows are
flagged physical=false and carry no discord value.
"""

import argparse
from pathlib import Path

import numpy as np

from qdiscord.dynamics import discord_trajectory, transition_point, write_trajectory_csv
from qdiscord.states import FamilyCoefficients


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=400)
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    args = parser.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    grid = np.linspace(0.0, 1.0, args.steps + 1)
    for n in (3, 4):
        fc = FamilyCoefficients(n, 0.8, 0.4, 0.5)
        path = args.out_dir / f"phase_flip_n{n}.csv"
        with open(path, "w", newline="\n") as fh:
            write_trajectory_csv(discord_trajectory(fc, grid), fh)
        print(f"n={n}: {len(grid)} rows -> {path}")

    fc4 = FamilyCoefficients(4, 0.8, 0.4, 0.5)
    analytic = transition_point(fc4, method="analytic")
    bisected = transition_point(fc4, method="bisection")
    print(f"four-qubit sudden transition: analytic p*={analytic:.6f} bisection p*={bisected:.6f}")


if __name__ == "__main__":
    main()
