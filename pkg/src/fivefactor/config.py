"""Run configuration: TOML (or the JSON it is echoed as) to validated objects.

Sections and keys::

    [model]      kappa r_bar sigma_r alpha x_bar sigma_x beta pi_bar sigma_pi
                 sigma_S sigma_I rho_rS rho_rPi rho_SPi
    [pricing]    a b h k l
    [initial]    r S x I pi
    [simulation] step + n_steps, or times; n_paths; seed
    [output]     dir; format = "csv" | "json"
    [curves]     maturities, or max_maturity + step
    [moments]    t
    [portfolio]  w or f; tau_B; tau_D; sigma_tot; horizons, or max_horizon + step

Only ``[model]`` is mandatory; commands that need another section say so.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .analytics import PortfolioSpec
from .corrcheck import CorrTriple, z_interval
from .curves import PricingParams
from .errors import ModelValidationError
from .moments import ModelParams, State
from .sim import TimeGrid

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ParseError(ModelValidationError):
    """The file could not be read as a configuration document."""


class ValidationError(ModelValidationError):
    """A configuration value is missing or outside its admissible range."""


MODEL_KEYS = (
    "kappa", "r_bar", "sigma_r", "alpha", "x_bar", "sigma_x", "beta", "pi_bar",
    "sigma_pi", "sigma_S", "sigma_I",
)
CORR_KEYS = ("rho_rS", "rho_rPi", "rho_SPi")
PRICING_KEYS = ("a", "b", "h", "k", "l")
STATE_KEYS = ("r", "S", "x", "I", "pi")
SECTIONS = ("model", "pricing", "initial", "simulation", "output", "curves", "moments", "portfolio")


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    pricing: Optional[PricingParams] = None
    initial: Optional[State] = None
    times: Optional[tuple] = None
    n_paths: int = 1
    seed: int = 0
    output_dir: str = "out"
    output_format: str = "csv"
    maturities: Optional[tuple] = None
    moments_t: Optional[float] = None
    portfolio: Optional[PortfolioSpec] = None
    horizons: Optional[tuple] = None

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(np.array(self.require("times", "simulation")))

    def require(self, attr: str, section: str):
        v = getattr(self, attr)
        if v is None:
            raise ValidationError(f"[{section}] is required for this command (missing {attr})")
        return v

    def to_dict(self) -> dict:
        m = self.model
        d: dict = {"model": {k: getattr(m, k) for k in MODEL_KEYS} | asdict(m.corr)}
        if self.pricing is not None:
            d["pricing"] = asdict(self.pricing)
        if self.initial is not None:
            d["initial"] = asdict(self.initial)
        sim: dict = {"n_paths": self.n_paths, "seed": self.seed}
        if self.times is not None:
            sim["times"] = list(self.times)
        d["simulation"] = sim
        d["output"] = {"dir": self.output_dir, "format": self.output_format}
        if self.maturities is not None:
            d["curves"] = {"maturities": list(self.maturities)}
        if self.moments_t is not None:
            d["moments"] = {"t": self.moments_t}
        if self.portfolio is not None:
            ps = self.portfolio
            port: dict = {"w": list(ps.w), "tau_B": ps.tau_B, "tau_D": ps.tau_D}
            if ps.f is not None:
                port["f"] = list(ps.f)
            if ps.sigma_tot is not None:
                port["sigma_tot"] = ps.sigma_tot
            if self.horizons is not None:
                port["horizons"] = list(self.horizons)
            d["portfolio"] = port
        return d


def _num(sec: dict, section: str, key: str, default=None, *, required=True) -> Optional[float]:
    if key not in sec:
        if required and default is None:
            raise ValidationError(f"[{section}] missing required key '{key}'")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(f"[{section}] {key}={v!r} must be a finite number")
    return float(v)


def _int(sec: dict, section: str, key: str, default: int, minimum: int) -> int:
    v = sec.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ValidationError(f"[{section}] {key}={v!r} must be an integer >= {minimum}")
    return v


def _num_list(sec: dict, section: str, key: str) -> tuple:
    v = sec[key]
    if not isinstance(v, list) or not v:
        raise ValidationError(f"[{section}] {key} must be a non-empty list of numbers")
    return tuple(_num({key: x}, section, key) for x in v)


def _check_keys(sec: dict, section: str, allowed) -> None:
    if not isinstance(sec, dict):
        raise ValidationError(f"[{section}] must be a table")
    extra = set(sec) - set(allowed)
    if extra:
        raise ValidationError(f"[{section}] unknown key(s): {', '.join(sorted(extra))}")


def _arange(sec: dict, section: str, stop_key: str, include_zero: bool) -> tuple:
    stop = _num(sec, section, stop_key)
    step = _num(sec, section, "step")
    if step <= 0 or stop <= 0:
        raise ValidationError(f"[{section}] {stop_key} and step must be positive")
    n = int(round(stop / step))
    start = 0 if include_zero else 1
    return tuple(float(step * i) for i in range(start, n + 1))


def _parse_model(sec: dict) -> ModelParams:
    _check_keys(sec, "model", MODEL_KEYS + CORR_KEYS)
    vals = {k: _num(sec, "model", k) for k in MODEL_KEYS}
    rho = {k: _num(sec, "model", k, 0.0, required=False) for k in CORR_KEYS}
    for k, v in rho.items():
        if abs(v) > 1:
            raise ValidationError(f"[model] {k}={v} must lie in [-1, 1]")
    corr = CorrTriple(**rho)
    if corr.determinant < -1e-12:
        lo, hi = z_interval(corr.rho_rS, corr.rho_rPi)
        raise ValidationError(
            f"[model] rho_rS/rho_rPi/rho_SPi do not form a valid correlation matrix: "
            f"determinant {corr.determinant:.6g} < 0; with rho_rS={corr.rho_rS} and "
            f"rho_rPi={corr.rho_rPi}, rho_SPi must lie in [{lo:.6g}, {hi:.6g}]"
        )
    for k in MODEL_KEYS:
        if k.startswith("sigma") and vals[k] < 0:
            raise ValidationError(f"[model] {k}={vals[k]} must be non-negative")
    return ModelParams(**vals, corr=corr)


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict) or not doc:
        raise ParseError("configuration document is empty")
    unknown = set(doc) - set(SECTIONS)
    if unknown:
        raise ValidationError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if "model" not in doc:
        raise ValidationError("missing required section [model]")
    kw: dict = {"model": _parse_model(doc["model"])}

    if "pricing" in doc:
        sec = doc["pricing"]
        _check_keys(sec, "pricing", PRICING_KEYS)
        kw["pricing"] = PricingParams(**{k: _num(sec, "pricing", k) for k in PRICING_KEYS})

    if "initial" in doc:
        sec = doc["initial"]
        _check_keys(sec, "initial", STATE_KEYS)
        vals = {k: _num(sec, "initial", k) for k in STATE_KEYS}
        for k in ("S", "I"):
            if vals[k] <= 0:
                raise ValidationError(f"[initial] {k}={vals[k]} must be positive")
        kw["initial"] = State(**vals)

    sec = doc.get("simulation", {})
    _check_keys(sec, "simulation", ("step", "n_steps", "times", "n_paths", "seed"))
    if "times" in sec and ("step" in sec or "n_steps" in sec):
        raise ValidationError("[simulation] give either times or step + n_steps, not both")
    if "times" in sec:
        times = _num_list(sec, "simulation", "times")
    elif "step" in sec or "n_steps" in sec:
        step = _num(sec, "simulation", "step")
        n = _int(sec, "simulation", "n_steps", 0, 1)
        if step <= 0:
            raise ValidationError(f"[simulation] step={step} must be positive")
        times = tuple(float(x) for x in step * np.arange(1, n + 1))
    else:
        times = None
    if times is not None:
        try:
            TimeGrid(np.array(times))
        except ValueError as exc:
            raise ValidationError(f"[simulation] times: {exc}") from None
        kw["times"] = times
    kw["n_paths"] = _int(sec, "simulation", "n_paths", 1, 1)
    kw["seed"] = _int(sec, "simulation", "seed", 0, 0)

    sec = doc.get("output", {})
    _check_keys(sec, "output", ("dir", "format"))
    kw["output_dir"] = str(sec.get("dir", "out"))
    fmt = sec.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ValidationError(f"[output] format={fmt!r} must be 'csv' or 'json'")
    kw["output_format"] = fmt

    if "curves" in doc:
        sec = doc["curves"]
        _check_keys(sec, "curves", ("maturities", "max_maturity", "step"))
        mats = _num_list(sec, "curves", "maturities") if "maturities" in sec else _arange(sec, "curves", "max_maturity", True)
        if any(m < 0 for m in mats):
            raise ValidationError("[curves] maturities must be non-negative")
        kw["maturities"] = mats

    if "moments" in doc:
        sec = doc["moments"]
        _check_keys(sec, "moments", ("t",))
        t = _num(sec, "moments", "t")
        if t < 0:
            raise ValidationError(f"[moments] t={t} must be non-negative")
        kw["moments_t"] = t

    if "portfolio" in doc:
        sec = doc["portfolio"]
        _check_keys(sec, "portfolio", ("w", "f", "tau_B", "tau_D", "sigma_tot", "horizons", "max_horizon", "step"))
        tau_B = _num(sec, "portfolio", "tau_B")
        tau_D = _num(sec, "portfolio", "tau_D")
        if tau_B <= 0 or tau_D <= 0:
            raise ValidationError("[portfolio] tau_B and tau_D must be positive")
        f = _num_list(sec, "portfolio", "f") if "f" in sec else None
        if "w" in sec:
            w = _num_list(sec, "portfolio", "w")
        elif f is not None:
            w = (0.0, 0.0, 0.0)
        else:
            raise ValidationError("[portfolio] needs weights 'w' or factor targets 'f'")
        for name, v in (("w", w), ("f", f)):
            if v is not None and len(v) != 3:
                raise ValidationError(f"[portfolio] {name} must have three entries")
        sigma_tot = _num(sec, "portfolio", "sigma_tot", required=False)
        kw["portfolio"] = PortfolioSpec(w, tau_B, tau_D, f, sigma_tot)
        if "horizons" in sec:
            kw["horizons"] = _num_list(sec, "portfolio", "horizons")
        elif "max_horizon" in sec:
            kw["horizons"] = _arange(sec, "portfolio", "max_horizon", True)
    return RunConfig(**kw)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    if not text.strip():
        raise ParseError(f"{path} is empty")
    try:
        doc = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    try:
        return config_from_dict(doc)
    except ModelValidationError as exc:
        if isinstance(exc, (ParseError, ValidationError)):
            raise
        raise ValidationError(str(exc)) from None
