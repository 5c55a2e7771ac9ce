"""Nominal (Vasicek) and break-even inflation term structures.

Pricing parameters: under Q the short rate reverts at speed ``a`` to ``b``,
expected inflation at speed ``k`` to ``l``, and the unexpected-inflation
shock carries the constant premium ``h / sigma_I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple, Optional

import numpy as np

from .auxfn import lambda_fn, psi, upsilon
from .corrcheck import corr_matrix4
from .errors import AsymptoteUndefined, ModelValidationError
from .moments import ModelParams, State

# risk-source order for loadings and market prices of risk
RISK_SOURCES = ("S", "r", "pi", "I")


@dataclass(frozen=True)
class PricingParams:
    a: float
    b: float
    h: float
    k: float
    l: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ModelValidationError(f"{f.name}={v!r} must be a finite number")


def _maturity(delta: float) -> None:
    if not math.isfinite(delta) or delta < 0:
        raise ValueError(f"maturity must be finite and non-negative, got {delta}")


def zcb_price(pp: PricingParams, p: ModelParams, r: float, delta: float) -> float:
    _maturity(delta)
    return math.exp(-delta * pp.b - psi(pp.a, delta) * (r - pp.b) + 0.5 * p.sigma_r**2 * upsilon(pp.a, delta))


def zcb_price_gh(pp: PricingParams, p: ModelParams, r: float, delta: float) -> float:
    """Textbook exp{G - H r} form; only defined for ``a != 0``."""
    a, s2 = pp.a, p.sigma_r**2
    if a == 0:
        raise AsymptoteUndefined("G/H form needs a != 0")
    H = (1.0 - math.exp(-a * delta)) / a
    G = (pp.b - s2 / (2 * a * a)) * (H - delta) - s2 / (4 * a) * H * H
    return math.exp(G - H * r)


def zcb_yield(pp: PricingParams, p: ModelParams, r: float, delta: float) -> float:
    _maturity(delta)
    if delta == 0:
        raise ValueError("yield is undefined at zero maturity; use the short rate")
    # written out instead of -log(price)/delta to keep long-maturity precision
    return pp.b + psi(pp.a, delta) / delta * (r - pp.b) - 0.5 * p.sigma_r**2 * upsilon(pp.a, delta) / delta


def yield_asymptote(pp: PricingParams, p: ModelParams) -> float:
    if pp.a == 0:
        raise AsymptoteUndefined("the yield curve has no finite asymptote when a = 0")
    return pp.b - p.sigma_r**2 / (2 * pp.a**2)


def forward_rate(pp: PricingParams, p: ModelParams, r: float, delta: float) -> float:
    _maturity(delta)
    return pp.b + math.exp(-pp.a * delta) * (r - pp.b) - 0.5 * p.sigma_r**2 * psi(pp.a, delta) ** 2


class MarketPricesOfRisk(NamedTuple):
    """Market prices of risk per source; ``None`` where the volatility is zero."""

    S: Optional[float]
    r: Optional[float]
    pi: Optional[float]
    I: Optional[float]

    def as_array(self) -> np.ndarray:
        return np.array([np.nan if v is None else v for v in self])


def premium_numerators(pp: PricingParams, p: ModelParams, r, x, pi) -> tuple:
    """Volatility-scaled market prices of risk (sigma * lambda), defined even for sigma = 0."""
    return (
        x,
        (pp.a - p.kappa) * r + p.kappa * p.r_bar - pp.a * pp.b,
        (pp.k - p.beta) * pi + p.beta * p.pi_bar - pp.k * pp.l,
        pp.h,
    )


def _risk_vols(p: ModelParams) -> tuple:
    return p.sigma_S, p.sigma_r, p.sigma_pi, p.sigma_I


def market_prices_of_risk(pp: PricingParams, p: ModelParams, s: State) -> MarketPricesOfRisk:
    nums = premium_numerators(pp, p, s.r, s.x, s.pi)
    return MarketPricesOfRisk(*(n / v if v > 0 else None for n, v in zip(nums, _risk_vols(p))))


def inflation_bond_price(pp: PricingParams, p: ModelParams, s: State, delta: float) -> float:
    _maturity(delta)
    mean = (
        (pp.l - pp.b - pp.h - 0.5 * p.sigma_I**2) * delta
        + psi(pp.k, delta) * (s.pi - pp.l)
        - psi(pp.a, delta) * (s.r - pp.b)
    )
    var = (
        p.sigma_pi**2 * upsilon(pp.k, delta)
        + p.sigma_r**2 * upsilon(pp.a, delta)
        - 2 * p.sigma_r * p.sigma_pi * p.corr.rho_rPi * lambda_fn(pp.a, pp.k, delta)
        + p.sigma_I**2 * delta
    )
    return s.I * math.exp(mean + 0.5 * var)


def bei(pp: PricingParams, p: ModelParams, pi: float, delta: float) -> float:
    """Break-even inflation for maturity ``delta``; ``pi - h`` in the zero-maturity limit."""
    _maturity(delta)
    if delta == 0:
        return pi - pp.h
    return (
        pp.l
        - pp.h
        + psi(pp.k, delta) / delta * (pi - pp.l)
        + 0.5 * p.sigma_pi**2 * upsilon(pp.k, delta) / delta
        - p.sigma_r * p.sigma_pi * p.corr.rho_rPi * lambda_fn(pp.a, pp.k, delta) / delta
    )


@dataclass(frozen=True, eq=False)
class CMCoefficients:
    """Constant-maturity index dynamics: dV/V = (r + loadings . lambda) dt + loadings . dW.

    ``loadings`` is ordered (S, r, pi, I); the same vector multiplies the
    market prices of risk in the drift and the Brownian increments.
    """

    tau: float
    loadings: np.ndarray

    def volatility(self, p: ModelParams) -> float:
        l = self.loadings
        return math.sqrt(max(float(l @ corr_matrix4(p.corr) @ l), 0.0))

    def excess_return(self, pp: PricingParams, p: ModelParams, s: State) -> float:
        nums = premium_numerators(pp, p, s.r, s.x, s.pi)
        total = 0.0
        for load, num, vol in zip(self.loadings, nums, _risk_vols(p)):
            if load != 0.0:
                # load carries a factor vol > 0, so load/vol is the unscaled loading
                total += load / vol * num
        return total

    def sharpe(self, pp: PricingParams, p: ModelParams, s: State) -> float:
        return self.excess_return(pp, p, s) / self.volatility(p)


def cm_nominal_coeffs(pp: PricingParams, p: ModelParams, tau: float) -> CMCoefficients:
    if tau <= 0:
        raise ValueError("tau must be positive")
    return CMCoefficients(tau, np.array([0.0, -psi(pp.a, tau) * p.sigma_r, 0.0, 0.0]))


def cm_inflation_coeffs(pp: PricingParams, p: ModelParams, tau: float) -> CMCoefficients:
    if tau <= 0:
        raise ValueError("tau must be positive")
    return CMCoefficients(
        tau, np.array([0.0, -psi(pp.a, tau) * p.sigma_r, psi(pp.k, tau) * p.sigma_pi, p.sigma_I])
    )
