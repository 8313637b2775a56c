"""Rounds until the running mean stays within +/-0.05 of 0.5 for the family
p = (1, 1-b, b, b), b in {1, 1/2, 1/4}, against a uniform opponent.

Averages over replications; also stores replication 0's running means.
"""

import argparse
from fractions import Fraction as F
from pathlib import Path

import numpy as np

from zdspectrum.files import write_csv
from zdspectrum.game import MemoryOneStrategy
from zdspectrum.simulation import SimulationConfig, convergence_row, simulate
from zdspectrum.spectrum import GameParameters
from zdspectrum.synthesis import ZdParameters, synthesize_own


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rounds", type=int, default=20_000)
    ap.add_argument("--replications", type=int, default=100)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--epsilon", type=float, default=0.05)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    game = GameParameters.two_player(1, F(1, 2)).payoff_matrix()
    opponent = MemoryOneStrategy.constant(1, F(1, 2))
    target = F(1, 2)
    table, curves = [], []
    for b in (F(1), F(1, 2), F(1, 4)):
        mine = synthesize_own(game.per_player_payoffs[0], ZdParameters(target, b))
        cfg = SimulationConfig((mine, opponent), game, args.rounds, replications=args.replications,
                               seed=args.seed, label=f"b={b}")
        traces = simulate(cfg, jobs=args.jobs)
        row = convergence_row(cfg, traces, target, args.epsilon)
        table.append((str(b), str(mine), row.mean_rounds, float(np.std(row.rounds)), row.censored))
        curves.append(traces[0].running_means[:, 0])
        print(f"b={str(b):>4}  p={mine}  mean rounds to band={row.mean_rounds:.1f}  censored={row.censored}")
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(args.out / "fig5_convergence.csv", ["b", "strategy", "mean_rounds", "sd_rounds", "censored"], table)
    idx = np.unique(np.geomspace(1, args.rounds, 2000).astype(int)) - 1  # even on a log axis
    write_csv(args.out / "fig5_running_means.csv", ["round", "b=1", "b=1/2", "b=1/4"],
              [(int(t) + 1, *(c[t] for c in curves)) for t in idx])
    print("wrote", args.out / "fig5_convergence.csv", "and", args.out / "fig5_running_means.csv")


if __name__ == "__main__":
    main()
