"""Conditional mean and covariance of Y_t = (r, int r, x, int x, pi, int pi, W^S).

The covariance depends on the horizon only, so it is computed once per step
size and shared by every path. ``unit_cov`` is the same matrix with
``sigma_r = sigma_x = sigma_pi = 1``; ``cov = D @ unit_cov @ D`` with
``D = diag(sigma_r, sigma_r, sigma_x, sigma_x, sigma_pi, sigma_pi, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .auxfn import gamma_fn, lambda_fn, psi, theta, upsilon
from .corrcheck import CorrTriple, is_valid_corr, z_interval
from .errors import ModelValidationError

LABELS = ("r", "int_r", "x", "int_x", "pi", "int_pi", "W_S")
# column indices into Y_t; shared by sim and analytics
R, INT_R, X, INT_X, PI, INT_PI, W_S = range(7)


@dataclass(frozen=True)
class ModelParams:
    """Real-world dynamics of short rate, excess return and expected inflation."""

    kappa: float
    r_bar: float
    sigma_r: float
    alpha: float
    x_bar: float
    sigma_x: float
    beta: float
    pi_bar: float
    sigma_pi: float
    sigma_S: float
    sigma_I: float
    corr: CorrTriple = field(default_factory=CorrTriple)

    def __post_init__(self):
        for f in fields(self):
            if f.name == "corr":
                continue
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ModelValidationError(f"{f.name}={v!r} must be a finite number")
            if f.name.startswith("sigma") and v < 0:
                raise ModelValidationError(f"{f.name}={v!r} must be non-negative")
        if not is_valid_corr(self.corr):
            c = self.corr
            lo, hi = z_interval(c.rho_rS, c.rho_rPi)
            raise ModelValidationError(
                f"correlation triple is not positive-semidefinite: determinant {c.determinant:.6g}; "
                f"given rho_rS={c.rho_rS}, rho_rPi={c.rho_rPi}, rho_SPi must lie in [{lo:.6g}, {hi:.6g}]"
            )

    @property
    def scale(self) -> np.ndarray:
        s = self
        return np.array([s.sigma_r, s.sigma_r, s.sigma_x, s.sigma_x, s.sigma_pi, s.sigma_pi, 1.0])


@dataclass(frozen=True)
class State:
    r: float
    S: float
    x: float
    I: float
    pi: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ModelValidationError(f"state {f.name}={v!r} must be finite")
        if self.S <= 0 or self.I <= 0:
            raise ModelValidationError(f"index levels must be positive (S={self.S}, I={self.I})")

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.S, self.x, self.I, self.pi])


@dataclass(frozen=True, eq=False)
class MomentSet:
    t: float
    mean: np.ndarray
    cov: np.ndarray
    unit_cov: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        for name in ("mean", "cov", "unit_cov", "scale"):
            getattr(self, name).flags.writeable = False


def mean_vector(p: ModelParams, s0: State, t: float) -> np.ndarray:
    return np.array(mean_components(p, s0.r, s0.x, s0.pi, t), dtype=float)


def mean_components(p: ModelParams, r0, x0, pi0, t: float) -> tuple:
    """Seven mean entries; ``r0``, ``x0``, ``pi0`` may be arrays (one entry per path)."""
    if t < 0:
        raise ValueError(f"horizon must be non-negative, got {t}")
    dr, dx, dp = r0 - p.r_bar, x0 - p.x_bar, pi0 - p.pi_bar
    zero = 0.0 * (dr + dx + dp)
    return (
        p.r_bar + math.exp(-p.kappa * t) * dr,
        t * p.r_bar + psi(p.kappa, t) * dr,
        p.x_bar + math.exp(-p.alpha * t) * dx,
        t * p.x_bar + psi(p.alpha, t) * dx,
        p.pi_bar + math.exp(-p.beta * t) * dp,
        t * p.pi_bar + psi(p.beta, t) * dp,
        zero,
    )


def unit_cov_matrix(p: ModelParams, t: float) -> np.ndarray:
    """Covariance of Y_t with the three OU volatilities set to one."""
    k, a, b = p.kappa, p.alpha, p.beta
    rs, rp, sp = p.corr.rho_rS, p.corr.rho_rPi, p.corr.rho_SPi
    c = np.zeros((7, 7))
    if t == 0:
        return c
    c[R, R] = psi(2 * k, t)
    c[INT_R, R] = gamma_fn(k, k, t)
    c[INT_R, INT_R] = upsilon(k, t)
    c[X, R] = -rs * psi(k + a, t)
    c[X, INT_R] = -rs * gamma_fn(k, a, t)
    c[X, X] = psi(2 * a, t)
    c[INT_X, R] = -rs * gamma_fn(a, k, t)
    c[INT_X, INT_R] = -rs * lambda_fn(k, a, t)
    c[INT_X, X] = gamma_fn(a, a, t)
    c[INT_X, INT_X] = upsilon(a, t)
    c[PI, R] = rp * psi(k + b, t)
    c[PI, INT_R] = rp * gamma_fn(k, b, t)
    c[PI, X] = -sp * psi(a + b, t)
    c[PI, INT_X] = -sp * gamma_fn(a, b, t)
    c[PI, PI] = psi(2 * b, t)
    c[INT_PI, R] = rp * gamma_fn(b, k, t)
    c[INT_PI, INT_R] = rp * lambda_fn(k, b, t)
    c[INT_PI, X] = -sp * gamma_fn(b, a, t)
    c[INT_PI, INT_X] = -sp * lambda_fn(a, b, t)
    c[INT_PI, PI] = gamma_fn(b, b, t)
    c[INT_PI, INT_PI] = upsilon(b, t)
    c[W_S, R] = rs * psi(k, t)
    c[W_S, INT_R] = rs * theta(k, t)
    c[W_S, X] = -psi(a, t)
    c[W_S, INT_X] = -theta(a, t)
    c[W_S, PI] = sp * psi(b, t)
    c[W_S, INT_PI] = sp * theta(b, t)
    c[W_S, W_S] = t
    lower = np.tril(c, -1)
    return c + lower.T


def cov_matrix(p: ModelParams, t: float, s0: State | None = None) -> MomentSet:
    """Covariance of Y_t; the mean is filled in when an initial state is given."""
    if t < 0:
        raise ValueError(f"horizon must be non-negative, got {t}")
    unit = unit_cov_matrix(p, t)
    d = p.scale
    cov = unit * np.outer(d, d)
    mean = mean_vector(p, s0, t) if s0 is not None else np.zeros(7)
    return MomentSet(t=float(t), mean=mean, cov=cov, unit_cov=unit, scale=d)


def rank_relation_residual(m: MomentSet, p: ModelParams) -> float:
    """Largest violation of sigma_x W^S = -(x - E x) - alpha (int x - E int x) across columns."""
    rows = p.sigma_x * m.cov[W_S] + m.cov[X] + p.alpha * m.cov[INT_X]
    return float(np.max(np.abs(rows)))
