"""Three providers (R = 1, alpha1 = 1/2, alpha2 = 1/3). Provider 1 pins its
rate at 1/3 while the others access with probability 1/2 and 3/4.

Strategies with smaller access probabilities after partial collisions (larger
b) should reach the +/-0.05 band sooner.
"""

import argparse
from fractions import Fraction as F
from pathlib import Path

import numpy as np

from zdspectrum import markov
from zdspectrum.files import write_csv
from zdspectrum.game import MemoryOneStrategy
from zdspectrum.simulation import SimulationConfig, convergence_row, simulate
from zdspectrum.spectrum import GameParameters
from zdspectrum.synthesis import ZdParameters, b_range, synthesize_own


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rounds", type=int, default=20_000)
    ap.add_argument("--replications", type=int, default=100)
    ap.add_argument("--seed", type=int, default=12)
    ap.add_argument("--epsilon", type=float, default=0.05)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    game = GameParameters.three_player(1, F(1, 2), F(1, 3)).payoff_matrix()
    payoffs = game.per_player_payoffs[0]
    target = F(1, 3)
    print(f"feasible b for target {target}: {b_range(payoffs, target)}")
    others = (MemoryOneStrategy.constant(1, F(1, 2), 3), MemoryOneStrategy.constant(2, F(3, 4), 3))
    table, curves = [], []
    for b in (F(1, 2), F(1, 4), F(1, 8)):
        mine = synthesize_own(payoffs, ZdParameters(target, b))
        pi = markov.stationary(markov.build_transition_matrix([mine, *others]))
        cfg = SimulationConfig((mine, *others), game, args.rounds, replications=args.replications,
                               seed=args.seed, label=f"b={b}")
        traces = simulate(cfg, jobs=args.jobs)
        row = convergence_row(cfg, traces, target, args.epsilon)
        analytic = markov.long_run_payoff(pi, payoffs)
        table.append((str(b), str(mine), str(analytic), row.mean_rounds, row.censored))
        curves.append(traces[0].running_means[:, 0])
        print(f"b={str(b):>4}  p={mine}  analytic={analytic}  mean rounds to band={row.mean_rounds:.1f}")
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(args.out / "fig6_convergence.csv", ["b", "strategy", "analytic_payoff", "mean_rounds", "censored"],
              table)
    idx = np.unique(np.geomspace(1, args.rounds, 2000).astype(int)) - 1  # even on a log axis
    write_csv(args.out / "fig6_running_means.csv", ["round", "b=1/2", "b=1/4", "b=1/8"],
              [(int(t) + 1, *(c[t] for c in curves)) for t in idx])
    print("wrote", args.out / "fig6_convergence.csv", "and", args.out / "fig6_running_means.csv")


if __name__ == "__main__":
    main()
