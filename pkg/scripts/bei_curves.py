"""Break-even inflation curves for the five configs/bei_case*.toml parameter sets."""

import argparse
import csv
from pathlib import Path

import numpy as np

from fivefactor.config import load_config
from fivefactor.curves import bei

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/bei_curves.csv")
    ap.add_argument("--max-maturity", type=float, default=30.0)
    args = ap.parse_args()
    mats = np.linspace(0.0, args.max_maturity, int(args.max_maturity * 4) + 1)
    cases = {i: load_config(ROOT / "configs" / f"bei_case{i}.toml") for i in range(1, 6)}

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["pi0", "maturity"] + [f"case{i}" for i in cases])
        for pi0 in (0.0, 0.02):
            for d in mats:
                wr.writerow([pi0, float(d)] + [repr(bei(c.pricing, c.model, pi0, float(d))) for c in cases.values()])
    for pi0 in (0.0, 0.02):
        ends = [bei(c.pricing, c.model, pi0, args.max_maturity) for c in cases.values()]
        print(f"pi0={pi0:.2f}  BEI at {args.max_maturity:g}y:", " ".join(f"{v:.4%}" for v in ends))
    print("wrote", out)


if __name__ == "__main__":
    main()
