"""Volatility rate of log S and log S/I against horizon for the variance-structure cases."""

import argparse
import csv
from pathlib import Path

import numpy as np

from fivefactor import analytics as an
from fivefactor.corrcheck import CorrTriple
from fivefactor.moments import ModelParams, State

CASES = {
    1: (0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    2: (0.05, 0.01, 0.0, 0.0, 0.05, 0.005),
    3: (0.05, 0.01, 0.06, 0.007, 0.05, 0.005),
    4: (0.05, 0.01, 0.06, 0.015, 0.05, 0.005),
    5: (0.10, 0.01, 0.06, 0.015, 0.05, 0.005),
}


def model(case):
    k, sr, a, sx, b, sp = CASES[case]
    corr = CorrTriple() if case == 1 else CorrTriple(0.0, 0.8, -0.25)
    # levels do not enter the variances
    return ModelParams(k, 0.0, sr, a, 0.0, sx, b, 0.0, sp, 0.15, 0.005, corr)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/vol_curves.csv")
    ap.add_argument("--max-horizon", type=float, default=100.0)
    args = ap.parse_args()
    s0 = State(0.0, 1.0, 0.0, 1.0, 0.0)
    horizons = np.linspace(0.5, args.max_horizon, int(args.max_horizon * 2))

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["case", "horizon", "vol_log_S", "vol_log_S_over_I"])
        for case in CASES:
            p = model(case)
            for t in horizons:
                wr.writerow([case, float(t), an.log_stock_dist(p, s0, t).vol_rate, an.log_real_stock_dist(p, s0, t).vol_rate])
    for case in CASES:
        nom, real = an.asymptotic_vol_rates(model(case))
        v30 = an.log_stock_dist(model(case), s0, 30.0).vol_rate
        print(f"case {case}: vol rate at 30y {v30:.3f}, asymptotic {nom:.3f} / real {real:.3f}")
    print("wrote", out)


if __name__ == "__main__":
    main()
