"""Print the asymptotic volatility table and the worked portfolio numbers."""

import argparse
from pathlib import Path

import numpy as np

from fivefactor import analytics as an
from fivefactor.config import load_config
from fivefactor.corrcheck import CorrTriple
from fivefactor.curves import cm_inflation_coeffs, cm_nominal_coeffs, market_prices_of_risk

ROOT = Path(__file__).resolve().parents[1]

# (kappa, sigma_r, alpha, sigma_x, beta, sigma_pi); correlations (0, 0.8, -0.25) except case 1
VOL_CASES = {
    1: (0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    2: (0.05, 0.01, 0.0, 0.0, 0.05, 0.005),
    3: (0.05, 0.01, 0.06, 0.007, 0.05, 0.005),
    4: (0.05, 0.01, 0.06, 0.015, 0.05, 0.005),
    5: (0.10, 0.01, 0.06, 0.015, 0.05, 0.005),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=ROOT / "configs" / "cappar.toml")
    args = ap.parse_args()
    cfg = load_config(args.config)
    p, pp, s0 = cfg.model, cfg.pricing, cfg.initial

    print("case  nominal  real")
    for case, (k, sr, a, sx, b, sp) in VOL_CASES.items():
        corr = CorrTriple() if case == 1 else CorrTriple(0.0, 0.8, -0.25)
        q = p.__class__(k, p.r_bar, sr, a, p.x_bar, sx, b, p.pi_bar, sp, 0.15, 0.005, corr)
        nom, real = an.asymptotic_vol_rates(q)
        print(f"{case:4d}  {nom:7.3f}  {real:5.3f}")

    mpr = market_prices_of_risk(pp, p, s0)
    print("\nmarket prices of risk (S, r, pi, I):", np.round(mpr.as_array(), 4).tolist())
    spec = cfg.require("portfolio", "portfolio")
    nom = cm_nominal_coeffs(pp, p, spec.tau_B)
    inf = cm_inflation_coeffs(pp, p, spec.tau_D)
    print(f"nominal index   vol {nom.volatility(p):.4f}  excess {nom.excess_return(pp, p, s0):+.5f}")
    print(f"inflation index vol {inf.volatility(p):.4f}  excess {inf.excess_return(pp, p, s0):+.5f}  "
          f"sharpe {inf.sharpe(pp, p, s0):+.4f}")
    w = an.factor_weights(pp, p, spec.f, spec.tau_B, spec.tau_D)
    print("weights for f =", spec.f, "->", np.round(an.normalize_weights(w), 1).tolist())


if __name__ == "__main__":
    main()
