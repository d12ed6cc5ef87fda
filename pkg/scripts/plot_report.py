#!/usr/bin/env python3
"""Plot a tidy significance-report CSV produced by `pathsig slidearea --format csv`.

Example:
    pathsig gen events -o events.csv
    pathsig slidearea events.csv --pairs 1,2 --window 0.1 --stride 0.005 \
        --smooth-sigma 0.004 --replicates 200 --seed 7 --format csv -o rep.csv
    python scripts/plot_report.py rep.csv -o rep.png

This script is documentation for consuming the CSV schema; the library and
CLI do not depend on it (or on matplotlib).
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections import defaultdict


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("report", help="tidy CSV from slidearea/influence")
    ap.add_argument("-o", "--output", help="image file; default: show window")
    args = ap.parse_args()

    try:
        import matplotlib

        if args.output:
            matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is not installed", file=sys.stderr)
        return 1

    by_pair = defaultdict(lambda: defaultdict(list))
    with open(args.report, newline="") as fh:
        rows = (r for r in csv.reader(fh) if r and not r[0].startswith("#"))
        header = next(rows)
        idx = {name: k for k, name in enumerate(header)}
        for row in rows:
            key = (row[idx["statistic"]], row[idx["i"]], row[idx["j"]])
            rec = by_pair[key]
            for col in ("time", "observed", "band_lo", "band_hi"):
                rec[col].append(float(row[idx[col]]))
            rec["significant"].append(int(row[idx["significant"]]))

    fig, axes = plt.subplots(
        len(by_pair), 1, squeeze=False, figsize=(8, 3 * len(by_pair))
    )
    for ax, (key, rec) in zip(axes[:, 0], sorted(by_pair.items())):
        stat, i, j = key
        ax.fill_between(
            rec["time"], rec["band_lo"], rec["band_hi"],
            alpha=0.25, label="null band", color="gray",
        )
        ax.plot(rec["time"], rec["observed"], label="observed")
        sig_t = [t for t, s in zip(rec["time"], rec["significant"]) if s]
        sig_v = [v for v, s in zip(rec["observed"], rec["significant"]) if s]
        ax.plot(sig_t, sig_v, ".", color="red", label="outside band")
        ax.set_title(f"{stat} ({i},{j})")
        ax.legend(loc="best")
    fig.tight_layout()
    if args.output:
        fig.savefig(args.output, dpi=120)
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
