"""Sharpe-ratio distribution over time for single assets and the factor portfolio.

Also cross-checks the analytic distribution at one horizon against exact
simulation of the state variables.
"""

import argparse
from pathlib import Path

import numpy as np

from fivefactor import analytics as an
from fivefactor import sim
from fivefactor.config import load_config
from fivefactor.curves import premium_numerators

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=ROOT / "configs" / "cappar.toml")
    ap.add_argument("--paths", type=int, default=20000)
    ap.add_argument("--check-horizon", type=float, default=10.0)
    args = ap.parse_args()
    cfg = load_config(args.config)
    p, pp, s0, spec = cfg.model, cfg.pricing, cfg.initial, cfg.portfolio
    w = an.factor_weights(pp, p, spec.f, spec.tau_B, spec.tau_D)
    books = {"stocks": (1, 0, 0), "nominal": (0, 1, 0), "inflation": (0, 0, 1), "portfolio": tuple(w)}

    print("horizon " + "".join(f"{k:>20s}" for k in books))
    for t in (0, 1, 5, 10, 20, 30):
        cells = []
        for wb in books.values():
            d = an.sharpe_distribution(pp, p, s0, an.PortfolioSpec(wb, spec.tau_B, spec.tau_D), t)
            cells.append(f"{d.mean:+.3f} +/- {d.std:.3f}")
        print(f"{t:7d} " + "".join(f"{c:>20s}" for c in cells))

    t = args.check_horizon
    ps = an.PortfolioSpec(tuple(w), spec.tau_B, spec.tau_D)
    d = an.sharpe_distribution(pp, p, s0, ps, t)
    out = sim.simulate(p, s0, sim.TimeGrid.equidistant(t, 1), args.paths, cfg.seed, terminal_only=True)
    r, x, pi = (out.column(c)[:, 0] for c in ("r", "x", "pi"))
    coef = np.asarray(ps.w) @ an._unit_loading_matrix(pp, ps.tau_B, ps.tau_D)
    vol, _ = an.portfolio_coeffs(pp, p, ps)
    ratio = sum(c * n for c, n in zip(coef, premium_numerators(pp, p, r, x, pi))) / vol
    print(f"\nportfolio at t={t:g}: analytic {d.mean:+.4f} +/- {d.std:.4f}, "
          f"simulated {ratio.mean():+.4f} +/- {ratio.std():.4f} ({args.paths} paths)")


if __name__ == "__main__":
    main()
