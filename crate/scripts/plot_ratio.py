"""Plot ratio curves written by `pwlx ratio`.

Usage: python scripts/plot_ratio.py RESULTS_DIR [OUTPUT.png]
"""

import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_curve(path):
    eps, ratio = [], []
    with open(path) as fh:
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        next(rows)
        for e, r in rows:
            eps.append(float(e))
            ratio.append(float(r))
    return eps, ratio


def main():
    results = pathlib.Path(sys.argv[1])
    output = sys.argv[2] if len(sys.argv) > 2 else str(results / "ratio.png")
    files = sorted(results.glob("ratio_*.csv"))
    targets = sorted({f.stem.rsplit("_", 1)[1] for f in files})
    fig, axes = plt.subplots(1, len(targets), figsize=(6 * len(targets), 4), squeeze=False)
    for ax, target in zip(axes[0], targets):
        for f in files:
            network, t = f.stem[len("ratio_"):].rsplit("_", 1)
            if t == target:
                ax.plot(*read_curve(f), label=network)
        ax.set_title(target)
        ax.set_xlabel("epsilon")
        ax.set_ylabel("ratio")
        ax.legend()
    fig.tight_layout()
    fig.savefig(output, dpi=150)


if __name__ == "__main__":
    main()
