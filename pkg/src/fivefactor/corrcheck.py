"""Admissibility of the 3x3 driving-noise correlation matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelValidationError

PSD_TOL = 1e-12


@dataclass(frozen=True)
class CorrTriple:
    """Correlations between the short-rate, stock and expected-inflation shocks."""

    rho_rS: float = 0.0
    rho_rPi: float = 0.0
    rho_SPi: float = 0.0

    def __post_init__(self):
        for name in ("rho_rS", "rho_rPi", "rho_SPi"):
            v = getattr(self, name)
            if not math.isfinite(v) or abs(v) > 1.0:
                raise ModelValidationError(f"{name}={v!r} must lie in [-1, 1]")

    def matrix(self) -> np.ndarray:
        """3x3 matrix ordered (r, S, pi)."""
        return np.array(
            [
                [1.0, self.rho_rS, self.rho_rPi],
                [self.rho_rS, 1.0, self.rho_SPi],
                [self.rho_rPi, self.rho_SPi, 1.0],
            ]
        )

    @property
    def determinant(self) -> float:
        return determinant3(self.rho_rS, self.rho_rPi, self.rho_SPi)


def determinant3(x: float, y: float, z: float) -> float:
    return 1.0 - x * x - y * y - z * z + 2.0 * x * y * z


def is_valid_corr(c: CorrTriple, tol: float = PSD_TOL) -> bool:
    # for unit-diagonal 3x3 matrices with entries in [-1, 1] the determinant alone decides PSD
    return c.determinant >= -tol


def z_interval(x: float, y: float) -> tuple[float, float]:
    """Admissible range of the third correlation given the other two."""
    for v in (x, y):
        if not -1.0 <= v <= 1.0:
            raise ModelValidationError(f"correlation {v!r} outside [-1, 1]")
    half = math.sqrt(max((1.0 - x * x) * (1.0 - y * y), 0.0))
    return x * y - half, x * y + half


def psd_volume_fraction(n_samples: int, seed: int) -> float:
    """Monte-Carlo share of the cube [-1, 1]^3 that gives a valid correlation matrix.

    The exact value is pi**2 / 16.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    x, y, z = rng.uniform(-1.0, 1.0, size=(3, n_samples))
    det = 1.0 - x * x - y * y - z * z + 2.0 * x * y * z
    return float(np.count_nonzero(det >= -PSD_TOL)) / n_samples


def corr_matrix4(c: CorrTriple) -> np.ndarray:
    """4x4 correlation of (W^S, W^r, W^pi, W^I); unexpected inflation is independent."""
    if not is_valid_corr(c):
        raise ModelValidationError(
            f"correlation triple {c} is not positive-semidefinite (determinant {c.determinant:.6g})"
        )
    return np.array(
        [
            [1.0, c.rho_rS, c.rho_SPi, 0.0],
            [c.rho_rS, 1.0, c.rho_rPi, 0.0],
            [c.rho_SPi, c.rho_rPi, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def ellipse_coordinates(x: float, y: float) -> tuple[float, float]:
    """Rotate (x, y) by 45 degrees; the admissible set for fixed z is then an axis-aligned ellipse."""
    return (x + y) / math.sqrt(2.0), (x - y) / math.sqrt(2.0)


def in_ellipse(x: float, y: float, z: float, tol: float = PSD_TOL) -> bool:
    """Admissibility through the ellipse form, valid for -1 < z < 1."""
    u, v = ellipse_coordinates(x, y)
    return u * u / (1.0 + z) + v * v / (1.0 - z) <= 1.0 + tol
