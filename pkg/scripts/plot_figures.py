"""Render PNGs from the CSVs written by the fig*.py scripts (needs matplotlib)."""

import argparse
import sys
from pathlib import Path

from zdspectrum.files import read_csv


def _series(path):
    header, rows = read_csv(path)
    cols = list(zip(*rows))
    return header, cols


def _lines(ax, path, xlabel, ylabel, log_x=False):
    header, cols = _series(path)
    for name, ys in zip(header[1:], cols[1:]):
        ax.plot(cols[0], ys, label=name)
    if log_x:
        ax.set_xscale("log")
    ax.set(xlabel=xlabel, ylabel=ylabel)
    ax.legend()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--results", type=Path, default=Path("results"))
    args = ap.parse_args()
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("matplotlib is not installed; pip install 'artifact[plot]'")

    jobs = [
        ("fig4_running_means.csv", "round", "running mean rate of provider 1", True),
        ("fig5_running_means.csv", "round", "running mean rate of provider 1", True),
        ("fig6_running_means.csv", "round", "running mean rate of provider 1", True),
        ("fig7_access.csv", "b1", "access fraction / power", False),
    ]
    for name, xlabel, ylabel, log_x in jobs:
        path = args.results / name
        if not path.exists():
            print("skip (missing)", path)
            continue
        fig, ax = plt.subplots(figsize=(6, 4))
        _lines(ax, path, xlabel, ylabel, log_x)
        fig.tight_layout()
        out = path.with_suffix(".png")
        fig.savefig(out, dpi=120)
        plt.close(fig)
        print("wrote", out)


if __name__ == "__main__":
    main()
