"""Share of rounds in which provider 1 transmits, as a function of its b,
for two fixed opponents that pin provider 2's rate at 1/4.

Access fractions are exact (rational stationary distribution); ``--mc``
adds a Monte Carlo column per opponent as a sanity check.
"""

import argparse
from fractions import Fraction as F
from pathlib import Path

from zdspectrum.files import write_csv
from zdspectrum.game import MemoryOneStrategy
from zdspectrum.simulation import power_sweep
from zdspectrum.spectrum import GameParameters

OPPONENTS = {
    "q=(2/3,0,1/3,1/3)": (F(2, 3), 0, F(1, 3), F(1, 3)),
    "q=(9/10,7/10,1/10,1/10)": (F(9, 10), F(7, 10), F(1, 10), F(1, 10)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=91, help="grid size over b in [0.1, 1]")
    ap.add_argument("--cap", type=float, default=1.0, help="provider 1 power cap in W")
    ap.add_argument("--mc", type=int, default=0, help="Monte Carlo rounds per cell (0: off)")
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    game = GameParameters.two_player(1, F(1, 2)).payoff_matrix()
    grid = [F(1, 10) + F(9, 10) * F(k, args.points - 1) for k in range(args.points)]
    opponents = [MemoryOneStrategy(1, q) for q in OPPONENTS.values()]
    rows = power_sweep(game, (F(1, 2), F(1, 4)), grid, opponents, cap=args.cap, mc_rounds=args.mc or None)
    header = ["b1"] + [f"access {k}" for k in OPPONENTS] + [f"power_w {k}" for k in OPPONENTS]
    if args.mc:
        header += [f"simulated {k}" for k in OPPONENTS]
    table = [(float(r.b), *(float(a) for a in r.access), *r.power, *(r.simulated or ())) for r in rows]
    args.out.mkdir(parents=True, exist_ok=True)
    print("wrote", write_csv(args.out / "fig7_access.csv", header, table))
    for name, k in zip(OPPONENTS, range(len(OPPONENTS))):
        vals = [float(r.access[k]) for r in rows]
        print(f"{name}: access from {vals[0]:.4f} (b=0.1) to {vals[-1]:.4f} (b=1)")


if __name__ == "__main__":
    main()
