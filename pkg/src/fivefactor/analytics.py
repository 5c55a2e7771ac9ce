"""Index distributions, portfolio Sharpe ratios and factor-risk weights.

Risk sources in this module are ordered (S, r, pi, I), unlike the moment
vector which uses (r, int r, x, int x, pi, int pi, W^S). Portfolio weights
are ordered (stocks, nominal bond index, inflation bond index); cash takes
the remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .auxfn import lambda_fn, psi, theta, upsilon
from .corrcheck import corr_matrix4
from .curves import PricingParams, premium_numerators
from .errors import NonStationary, NumericalFailure, UnattainableFactor, ZeroVolPortfolio
from .moments import PI, R, X, ModelParams, State, cov_matrix, mean_vector

RISK_SOURCES = ("S", "r", "pi", "I")
ASSETS = ("stocks", "nominal_bond", "inflation_bond")


@dataclass(frozen=True)
class LogNormalSummary:
    mean_log: float
    var_log: float
    t: float

    @property
    def mean(self) -> float:
        return math.exp(self.mean_log + 0.5 * self.var_log)

    @property
    def vol_rate(self) -> float:
        return math.sqrt(self.var_log / self.t)


@dataclass(frozen=True)
class PortfolioSpec:
    w: tuple
    tau_B: float
    tau_D: float
    f: Optional[tuple] = None
    sigma_tot: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(float(v) for v in self.w))
        if len(self.w) != 3:
            raise ValueError("w needs three entries (stocks, nominal, inflation)")
        if self.tau_B <= 0 or self.tau_D <= 0:
            raise ValueError("index maturities must be positive")


@dataclass(frozen=True)
class SharpeDistribution:
    mean: float
    variance: float
    t: float

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def _nominal_var_terms(p: ModelParams, t: float) -> float:
    rs = p.corr.rho_rS
    return (
        p.sigma_r**2 * upsilon(p.kappa, t)
        + p.sigma_x**2 * upsilon(p.alpha, t)
        + p.sigma_S**2 * t
        + 2
        * (
            p.sigma_r * p.sigma_S * rs * theta(p.kappa, t)
            - p.sigma_r * p.sigma_x * rs * lambda_fn(p.kappa, p.alpha, t)
            - p.sigma_x * p.sigma_S * theta(p.alpha, t)
        )
    )


def log_stock_dist(p: ModelParams, s0: State, t: float) -> LogNormalSummary:
    mean = (
        math.log(s0.S)
        + (p.r_bar + p.x_bar - 0.5 * p.sigma_S**2) * t
        + psi(p.kappa, t) * (s0.r - p.r_bar)
        + psi(p.alpha, t) * (s0.x - p.x_bar)
    )
    return LogNormalSummary(mean, _nominal_var_terms(p, t), t)


def log_inflation_dist(p: ModelParams, s0: State, t: float) -> LogNormalSummary:
    mean = math.log(s0.I) + (p.pi_bar - 0.5 * p.sigma_I**2) * t + psi(p.beta, t) * (s0.pi - p.pi_bar)
    var = p.sigma_pi**2 * upsilon(p.beta, t) + p.sigma_I**2 * t
    return LogNormalSummary(mean, var, t)


def log_real_stock_dist(p: ModelParams, s0: State, t: float) -> LogNormalSummary:
    mean = (
        math.log(s0.S / s0.I)
        + (p.r_bar + p.x_bar - p.pi_bar + 0.5 * p.sigma_I**2 - 0.5 * p.sigma_S**2) * t
        + psi(p.kappa, t) * (s0.r - p.r_bar)
        + psi(p.alpha, t) * (s0.x - p.x_bar)
        - psi(p.beta, t) * (s0.pi - p.pi_bar)
    )
    c = p.corr
    var = (
        _nominal_var_terms(p, t)
        + p.sigma_pi**2 * upsilon(p.beta, t)
        + p.sigma_I**2 * t
        - 2
        * (
            p.sigma_S * p.sigma_pi * c.rho_SPi * theta(p.beta, t)
            - p.sigma_x * p.sigma_pi * c.rho_SPi * lambda_fn(p.alpha, p.beta, t)
            + p.sigma_r * p.sigma_pi * c.rho_rPi * lambda_fn(p.kappa, p.beta, t)
        )
    )
    return LogNormalSummary(mean, var, t)


def _vol_per_reversion(sigma: float, speed: float, name: str) -> float:
    if sigma == 0:
        return 0.0
    if speed <= 0:
        raise NonStationary(f"{name}: positive volatility with non-positive mean reversion has no long-run rate")
    return sigma / speed


def asymptotic_vol_rates(p: ModelParams) -> tuple[float, float]:
    """Long-horizon volatility rates of log S and log S/I."""
    qr = _vol_per_reversion(p.sigma_r, p.kappa, "short rate")
    qx = _vol_per_reversion(p.sigma_x, p.alpha, "excess return")
    qp = _vol_per_reversion(p.sigma_pi, p.beta, "expected inflation")
    c, sS = p.corr, p.sigma_S
    nominal = qr**2 + qx**2 + sS**2 + 2 * (sS * c.rho_rS * qr - c.rho_rS * qr * qx - sS * qx)
    real = nominal + qp**2 + p.sigma_I**2 - 2 * (sS * c.rho_SPi * qp - c.rho_SPi * qx * qp + c.rho_rPi * qr * qp)
    return math.sqrt(max(nominal, 0.0)), math.sqrt(max(real, 0.0))


def loading_matrix(pp: PricingParams, p: ModelParams, tau_B: float, tau_D: float) -> np.ndarray:
    """Asset-by-source volatility loadings (3x4); nominal-rate entries are negative."""
    return np.array(
        [
            [p.sigma_S, 0.0, 0.0, 0.0],
            [0.0, -psi(pp.a, tau_B) * p.sigma_r, 0.0, 0.0],
            [0.0, -psi(pp.a, tau_D) * p.sigma_r, psi(pp.k, tau_D) * p.sigma_pi, p.sigma_I],
        ]
    )


def _unit_loading_matrix(pp: PricingParams, tau_B: float, tau_D: float) -> np.ndarray:
    # loading_matrix with each source column divided by its volatility
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -psi(pp.a, tau_B), 0.0, 0.0],
            [0.0, -psi(pp.a, tau_D), psi(pp.k, tau_D), 1.0],
        ]
    )


def factor_loading_matrix(pp: PricingParams, p: ModelParams, tau_B: float, tau_D: float) -> np.ndarray:
    """Asset-by-factor risk (equity, rates, inflation), rate risk counted positive for long bonds."""
    infl = math.hypot(psi(pp.k, tau_D) * p.sigma_pi, p.sigma_I)
    return np.array(
        [
            [p.sigma_S, 0.0, 0.0],
            [0.0, psi(pp.a, tau_B) * p.sigma_r, 0.0],
            [0.0, psi(pp.a, tau_D) * p.sigma_r, infl],
        ]
    )


def portfolio_coeffs(pp: PricingParams, p: ModelParams, spec: PortfolioSpec) -> tuple[float, np.ndarray]:
    """Portfolio volatility and its loadings w'L on (W^S, W^r, W^pi, W^I)."""
    wl = np.asarray(spec.w) @ loading_matrix(pp, p, spec.tau_B, spec.tau_D)
    var = float(wl @ corr_matrix4(p.corr) @ wl)
    return math.sqrt(max(var, 0.0)), wl


def portfolio_excess_return(pp: PricingParams, p: ModelParams, spec: PortfolioSpec, s: State) -> float:
    nums = np.array(premium_numerators(pp, p, s.r, s.x, s.pi), dtype=float)
    return float(np.asarray(spec.w) @ _unit_loading_matrix(pp, spec.tau_B, spec.tau_D) @ nums)


def sharpe_ratio(pp: PricingParams, p: ModelParams, spec: PortfolioSpec, s: State) -> float:
    vol, _ = portfolio_coeffs(pp, p, spec)
    if vol == 0:
        raise ZeroVolPortfolio("portfolio has zero volatility")
    return portfolio_excess_return(pp, p, spec, s) / vol


def _state_loadings(pp: PricingParams, p: ModelParams, spec: PortfolioSpec) -> np.ndarray:
    """M matrix: asset loadings on the unit-volatility OU shocks of (x, r, pi)."""
    return np.array(
        [
            [p.sigma_x, 0.0, 0.0],
            [0.0, -psi(pp.a, spec.tau_B) * (pp.a - p.kappa) * p.sigma_r, 0.0],
            [
                0.0,
                -psi(pp.a, spec.tau_D) * (pp.a - p.kappa) * p.sigma_r,
                psi(pp.k, spec.tau_D) * (pp.k - p.beta) * p.sigma_pi,
            ],
        ]
    )


def _ou_unit_cov(p: ModelParams, t: float) -> np.ndarray:
    """V(t): covariance of (x, r, pi) with unit volatilities."""
    c = p.corr
    k, a, b = p.kappa, p.alpha, p.beta
    return np.array(
        [
            [psi(2 * a, t), -c.rho_rS * psi(k + a, t), -c.rho_SPi * psi(a + b, t)],
            [-c.rho_rS * psi(k + a, t), psi(2 * k, t), c.rho_rPi * psi(k + b, t)],
            [-c.rho_SPi * psi(a + b, t), c.rho_rPi * psi(k + b, t), psi(2 * b, t)],
        ]
    )


def premium_covariance(pp: PricingParams, p: ModelParams, spec: PortfolioSpec, t: float) -> np.ndarray:
    """L Var[lambda_t] L' assembled from the seven-dimensional moment matrix."""
    cov = cov_matrix(p, t).cov
    idx = [X, R, PI]
    # lambda scaled by its volatility is affine in (x, r, pi) with these slopes
    g = np.zeros((4, 3))
    g[0, 0] = 1.0
    g[1, 1] = pp.a - p.kappa
    g[2, 2] = pp.k - p.beta
    var_scaled = g @ cov[np.ix_(idx, idx)] @ g.T
    lu = _unit_loading_matrix(pp, spec.tau_B, spec.tau_D)
    return lu @ var_scaled @ lu.T


def sharpe_distribution(
    pp: PricingParams, p: ModelParams, s0: State, spec: PortfolioSpec, t: float
) -> SharpeDistribution:
    vol, _ = portfolio_coeffs(pp, p, spec)
    if vol == 0:
        raise ZeroVolPortfolio("portfolio has zero volatility; the Sharpe ratio is undefined")
    w = np.asarray(spec.w)
    m = mean_vector(p, s0, t)
    nums = np.array(premium_numerators(pp, p, m[R], m[X], m[PI]), dtype=float)
    mean = float(w @ _unit_loading_matrix(pp, spec.tau_B, spec.tau_D) @ nums) / vol

    M = _state_loadings(pp, p, spec)
    mvm = M @ _ou_unit_cov(p, t) @ M.T
    check = premium_covariance(pp, p, spec, t)
    if not np.allclose(check, mvm, rtol=1e-9, atol=1e-12 * max(1.0, float(np.abs(mvm).max()))):
        raise NumericalFailure("premium covariance identity L Var[lambda] L' = M V M' violated")
    var = max(float(w @ mvm @ w), 0.0) / vol**2
    return SharpeDistribution(mean, var, t)


def factor_weights(
    pp: PricingParams, p: ModelParams, f: Sequence[float], tau_B: float, tau_D: float
) -> np.ndarray:
    """Weights whose marginal equity/rate/inflation risks equal ``f``."""
    fE, fR, fI = map(float, f)
    bond_vol = psi(pp.a, tau_B) * p.sigma_r
    infl_vol = math.hypot(psi(pp.k, tau_D) * p.sigma_pi, p.sigma_I)
    if p.sigma_S <= 0 and fE != 0:
        raise UnattainableFactor("equity factor needs sigma_S > 0")
    if bond_vol <= 0 and (fR != 0 or fI != 0):
        raise UnattainableFactor("rate factor needs a nominal bond with positive rate risk")
    if infl_vol <= 0 and fI != 0:
        raise UnattainableFactor("inflation factor needs an inflation bond with positive inflation risk")
    wS = fE / p.sigma_S if fE else 0.0
    wD = fI / infl_vol if fI else 0.0
    wB = (fR - psi(pp.a, tau_D) * p.sigma_r * wD) / bond_vol if bond_vol > 0 else 0.0
    return np.array([wS, wB, wD])


def normalize_weights(w: Sequence[float], total: float = 100.0) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    s = w.sum()
    if s == 0:
        raise ValueError("weights sum to zero; cannot normalise")
    return w * (total / s)


def scale_to_target(
    pp: PricingParams, p: ModelParams, w: Sequence[float], sigma_tot: float, tau_B: float, tau_D: float
) -> np.ndarray:
    vol, _ = portfolio_coeffs(pp, p, PortfolioSpec(tuple(w), tau_B, tau_D))
    if vol == 0:
        raise ZeroVolPortfolio("cannot scale a zero-volatility portfolio to a risk target")
    return np.asarray(w, dtype=float) * (sigma_tot / vol)
