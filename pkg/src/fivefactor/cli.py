"""Command-line front end.

    fivefactor COMMAND --config PATH [--seed N] [--out DIR] [--format csv|json]

Exit codes: 0 success, 2 invalid input, 3 numerical failure. Failures print
one JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analytics, auxfn, corrcheck, curves, sim
from .config import RunConfig, load_config
from .errors import ModelValidationError, NumericalFailure
from .moments import LABELS, cov_matrix, rank_relation_residual

COMMANDS = ("simulate", "moments", "curves", "bei", "sharpe", "weights", "validate", "oracle-check")


def _fmt(v) -> str:
    # repr of a Python float is the shortest string that round-trips
    return repr(float(v))


def write_table(path: Path, header, rows, fmt: str) -> Path:
    if fmt == "json":
        path = path.with_suffix(".json")
        records = [dict(zip(header, r)) for r in rows]
        path.write_text(json.dumps(records, indent=1))
        return path
    path = path.with_suffix(".csv")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(x if isinstance(x, str) else _fmt(x) for x in r) + "\n")
    return path


def write_scenarios_csv(sset: sim.ScenarioSet, path: Path) -> None:
    with open(path, "w") as fh:
        fh.write("path,time," + ",".join(sim.STATE_FIELDS) + "\n")
        times = [_fmt(t) for t in sset.times]
        for i in range(sset.n_paths):
            for j, row in enumerate(sset.paths[i].tolist()):
                fh.write(f"{i},{times[j]}," + ",".join(map(repr, row)) + "\n")


def read_scenarios_csv(path) -> dict:
    """Parse a scenario CSV into {path index: list of (time, r, S, x, I, pi)}."""
    out: dict = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.setdefault(int(rec["path"]), []).append(
                tuple(float(rec[k]) for k in ("time",) + sim.STATE_FIELDS)
            )
    return out


def _dump_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=1))
    return path


def _resolved_weights(cfg: RunConfig) -> np.ndarray:
    spec = cfg.require("portfolio", "portfolio")
    if spec.f is not None and not any(spec.w):
        return analytics.factor_weights(cfg.pricing, cfg.model, spec.f, spec.tau_B, spec.tau_D)
    return np.asarray(spec.w)


def cmd_simulate(cfg: RunConfig, out: Path, fmt: str) -> list:
    s0 = cfg.require("initial", "initial")
    sset = sim.simulate(cfg.model, s0, cfg.grid, cfg.n_paths, cfg.seed)
    csv_path = out / "scenarios.csv"
    write_scenarios_csv(sset, csv_path)
    files = [csv_path]
    if fmt == "json":
        manifest = {
            "seed": cfg.seed,
            "n_paths": cfg.n_paths,
            "times": sset.times.tolist(),
            "columns": ["path", "time", *sim.STATE_FIELDS],
            "payload": csv_path.name,
        }
        files.append(_dump_json(out / "manifest.json", manifest))
    return files


def moments_document(cfg: RunConfig) -> dict:
    s0 = cfg.require("initial", "initial")
    t = cfg.moments_t if cfg.moments_t is not None else float(cfg.require("times", "simulation or moments")[-1])
    m = cov_matrix(cfg.model, t, s0)
    return {
        "t": m.t,
        "labels": list(LABELS),
        "mean": m.mean.tolist(),
        "cov": m.cov.tolist(),
        "unit_cov": m.unit_cov.tolist(),
        "scale": m.scale.tolist(),
        "rank_relation_residual": rank_relation_residual(m, cfg.model),
    }


def cmd_moments(cfg, out, fmt):
    return [_dump_json(out / "moments.json", moments_document(cfg))]


def cmd_curves(cfg, out, fmt):
    pp = cfg.require("pricing", "pricing")
    s0 = cfg.require("initial", "initial")
    p = cfg.model
    rows = []
    for d in cfg.require("maturities", "curves"):
        y = s0.r if d == 0 else curves.zcb_yield(pp, p, s0.r, d)
        rows.append((d, y, curves.forward_rate(pp, p, s0.r, d), curves.bei(pp, p, s0.pi, d)))
    return [write_table(out / "curves", ("maturity", "yield", "forward", "bei"), rows, fmt)]


def cmd_bei(cfg, out, fmt):
    pp = cfg.require("pricing", "pricing")
    s0 = cfg.require("initial", "initial")
    rows = [(d, curves.bei(pp, cfg.model, s0.pi, d)) for d in cfg.require("maturities", "curves")]
    return [write_table(out / "bei", ("maturity", "bei"), rows, fmt)]


def cmd_sharpe(cfg, out, fmt):
    pp = cfg.require("pricing", "pricing")
    s0 = cfg.require("initial", "initial")
    spec = cfg.require("portfolio", "portfolio")
    horizons = cfg.require("horizons", "portfolio.horizons")
    w = _resolved_weights(cfg)
    books = {
        "stocks": (1.0, 0.0, 0.0),
        "nominal_bond": (0.0, 1.0, 0.0),
        "inflation_bond": (0.0, 0.0, 1.0),
        "portfolio": tuple(w),
    }
    rows = []
    for t in horizons:
        for name, wb in books.items():
            ps = analytics.PortfolioSpec(wb, spec.tau_B, spec.tau_D)
            try:
                d = analytics.sharpe_distribution(pp, cfg.model, s0, ps, t)
            except analytics.ZeroVolPortfolio:
                continue
            rows.append((t, name, d.mean, d.std))
    return [write_table(out / "sharpe", ("horizon", "asset", "mean", "std"), rows, fmt)]


def weights_document(cfg: RunConfig) -> dict:
    pp = cfg.require("pricing", "pricing")
    spec = cfg.require("portfolio", "portfolio")
    w = _resolved_weights(cfg)
    vol, _ = analytics.portfolio_coeffs(pp, cfg.model, analytics.PortfolioSpec(tuple(w), spec.tau_B, spec.tau_D))
    doc = {
        "assets": list(analytics.ASSETS),
        "f": list(spec.f) if spec.f is not None else None,
        "tau_B": spec.tau_B,
        "tau_D": spec.tau_D,
        "weights": w.tolist(),
        "normalized": analytics.normalize_weights(w).tolist(),
        "volatility": vol,
    }
    if spec.sigma_tot is not None:
        doc["sigma_tot"] = spec.sigma_tot
        doc["scaled"] = analytics.scale_to_target(pp, cfg.model, w, spec.sigma_tot, spec.tau_B, spec.tau_D).tolist()
    return doc


def cmd_weights(cfg, out, fmt):
    return [_dump_json(out / "weights.json", weights_document(cfg))]


def validation_document(cfg: RunConfig) -> dict:
    c = cfg.model.corr
    lo, hi = corrcheck.z_interval(c.rho_rS, c.rho_rPi)
    eig = np.linalg.eigvalsh(c.matrix())
    doc = {
        "valid": corrcheck.is_valid_corr(c),
        "determinant": c.determinant,
        "rho_SPi_interval": [lo, hi],
        "min_eigenvalue": float(eig.min()),
        "simulable": c.determinant > sim.RANK_TOL,
    }
    try:
        nom, real = analytics.asymptotic_vol_rates(cfg.model)
        doc["asymptotic_vol"] = {"nominal": nom, "real": real}
    except analytics.NonStationary as exc:
        doc["asymptotic_vol"] = {"error": str(exc)}
    if cfg.times is not None and doc["simulable"]:
        worst = 0.0
        for d in sorted(set(np.round(cfg.grid.steps, 15))):
            m = cov_matrix(cfg.model, float(d))
            np.linalg.cholesky(m.unit_cov[:6, :6])
            worst = max(worst, rank_relation_residual(m, cfg.model) / max(np.abs(m.cov).max(), 1e-300))
        doc["rank_relation_relative_residual"] = worst
    return doc


def cmd_validate(cfg, out, fmt):
    return [_dump_json(out / "validation.json", validation_document(cfg))]


def oracle_report(cfg: RunConfig, n_paths: int = 20000, n_quad: int = 200) -> dict:
    """Closed forms against quadrature, and Euler against exact simulation."""
    from scipy.integrate import quad

    def psi_ref(k, s):
        return s if k == 0 else -math.expm1(-k * s) / k

    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(n_quad):
        k, a = rng.uniform(-2, 2, size=2)
        t = rng.uniform(0.01, 50)
        pairs = [
            (auxfn.theta(k, t), lambda s: psi_ref(k, s)),
            (auxfn.upsilon(k, t), lambda s: psi_ref(k, s) ** 2),
            (auxfn.gamma_fn(k, a, t), lambda s: math.exp(-a * s) * psi_ref(k, s)),
            (auxfn.lambda_fn(k, a, t), lambda s: psi_ref(a, s) * psi_ref(k, s)),
        ]
        for val, f in pairs:
            ref = quad(f, 0, t, epsabs=0, epsrel=1e-13, limit=400)[0]
            worst = max(worst, abs(val - ref) / abs(ref))
    quad_ok = worst < 1e-9

    s0 = cfg.require("initial", "initial")
    p = cfg.model
    t_end, dt = 1.0, 1e-2
    ex = sim.simulate(p, s0, sim.TimeGrid.equidistant(t_end, 1), n_paths, cfg.seed)
    eu = sim.euler_simulate(p, s0, t_end, dt, n_paths, cfg.seed + 1)
    stats = {}
    ok = True
    for name, fa, fb in (
        ("r", ex.column("r")[:, -1], eu.column("r")[:, -1]),
        ("x", ex.column("x")[:, -1], eu.column("x")[:, -1]),
        ("pi", ex.column("pi")[:, -1], eu.column("pi")[:, -1]),
        ("log_S", np.log(ex.column("S")[:, -1]), np.log(eu.column("S")[:, -1])),
        ("log_I", np.log(ex.column("I")[:, -1]), np.log(eu.column("I")[:, -1])),
    ):
        se = math.sqrt(fa.var() / fa.size + fb.var() / fb.size)
        z = float(abs(fa.mean() - fb.mean()) / se) if se > 0 else 0.0
        stats[name] = {"exact_mean": float(fa.mean()), "euler_mean": float(fb.mean()), "z": z}
        ok = ok and z < 4.5
    return {
        "quadrature": {"points": n_quad, "worst_relative_error": float(worst), "pass": bool(quad_ok)},
        "euler_vs_exact": {"paths": n_paths, "dt": dt, "t": t_end, "stats": stats, "pass": bool(ok)},
        "pass": bool(quad_ok and ok),
    }


def cmd_oracle_check(cfg, out, fmt):
    rep = oracle_report(cfg)
    path = _dump_json(out / "oracle_check.json", rep)
    if not rep["pass"]:
        raise NumericalFailure(f"oracle check failed; see {path}")
    return [path]


HANDLERS = {
    "simulate": cmd_simulate,
    "moments": cmd_moments,
    "curves": cmd_curves,
    "bei": cmd_bei,
    "sharpe": cmd_sharpe,
    "weights": cmd_weights,
    "validate": cmd_validate,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="TOML or JSON run configuration")
    common.add_argument("--seed", type=int, help="override [simulation] seed")
    common.add_argument("--out", help="output directory (overrides [output] dir)")
    common.add_argument("--format", choices=("csv", "json"), help="tabular output format")
    parser = argparse.ArgumentParser(prog="fivefactor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(command: str, cfg: RunConfig, out_dir=None, fmt=None) -> list:
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    fmt = fmt or cfg.output_format
    _dump_json(out / "config.json", cfg.to_dict())
    return HANDLERS[command](cfg, out, fmt)


def _fail(exc: Exception, code: int) -> int:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(rec), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ModelValidationError("--seed must be non-negative")
            cfg = dataclasses.replace(cfg, seed=args.seed)
        files = run(args.command, cfg, args.out, args.format)
    except ModelValidationError as exc:
        return _fail(exc, 2)
    except (NumericalFailure, np.linalg.LinAlgError, FloatingPointError, OverflowError) as exc:
        return _fail(exc, 3)
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
