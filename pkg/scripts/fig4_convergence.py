"""Running mean of provider 1's rate for the three pinning strategies against a
uniformly random opponent (R = 1, theta = 1/2).

Writes results/fig4_running_means.csv and prints the final means.
"""

import argparse
from fractions import Fraction as F
from pathlib import Path

import numpy as np

from zdspectrum.files import write_csv
from zdspectrum.game import MemoryOneStrategy
from zdspectrum.simulation import SimulationConfig, simulate
from zdspectrum.spectrum import GameParameters
from zdspectrum.synthesis import ZdParameters, synthesize_own

CASES = [(F(1, 2), F(1)), (F(1, 4), F(1, 3)), (F(1, 10), F(1, 9))]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rounds", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=4)
    ap.add_argument("--stride", type=int, default=100)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    game = GameParameters.two_player(1, F(1, 2)).payoff_matrix()
    opponent = MemoryOneStrategy.constant(1, F(1, 2))
    columns, header = [], ["round"]
    for u, b in CASES:
        mine = synthesize_own(game.per_player_payoffs[0], ZdParameters(u, b))
        (tr,) = simulate(SimulationConfig((mine, opponent), game, args.rounds, seed=args.seed,
                                          record_stride=args.stride))
        columns.append(tr.running_means[:, 0])
        header.append(f"target_{float(u):g}")
        print(f"u={u}  strategy={mine}  final running mean={tr.mean_payoffs[0]:.6f}")
    args.out.mkdir(parents=True, exist_ok=True)
    rows = np.column_stack([tr.recorded_rounds + 1, *columns]).tolist()
    print("wrote", write_csv(args.out / "fig4_running_means.csv", header,
                             [(int(r[0]), *r[1:]) for r in rows]))


if __name__ == "__main__":
    main()
