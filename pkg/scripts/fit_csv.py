"""Refit log-log decay slopes of every column in a result CSV over a time window.

    python3 scripts/fit_csv.py results/default/heat_decay_N3_a0.csv --window 200 2000
"""
import argparse
import csv

import numpy as np

from difflab.decay import DecaySeries, InsufficientSpanError, fit_slope


def columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    header = list(rows[0]) if rows else []
    data = {}
    for name in header:
        data[name] = np.array([float(r[name]) if r[name] else np.nan for r in rows])
    return data


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("--window", type=float, nargs=2, default=None)
    args = ap.parse_args()
    data = columns(args.csv)
    t = data.pop("t")
    for name, values in data.items():
        ok = np.isfinite(values) & (t > 0)
        if not ok.any():
            continue
        try:
            fit = fit_slope(DecaySeries.from_samples(name, t[ok], values[ok]), args.window)
        except InsufficientSpanError as exc:
            print(f"{name:>18}  skipped ({exc})")
            continue
        print(f"{name:>18}  slope {fit.slope:+.4f}  tail {fit.tail_slope:+.4f}  rms {fit.rms:.2e}  n {fit.n}")
