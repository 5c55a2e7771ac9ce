"""Auxiliary integrals of the exponential kernel used by every moment formula.

All five functions are integrals over simplices of ``exp(-linear form)`` and
are evaluated as divided differences of ``exp`` (Hermite-Genocchi):

    psi(k, t)          = t   * E[0, -kt]
    theta(k, t)        = t^2 * E[0, 0, -kt]
    upsilon(k, t)      = 2 t^3 * E[0, 0, -kt, -2kt]
    gamma_fn(k, a, t)  = t^2 * E[0, -at, -(a+k)t]
    lambda_fn(k, a, t) = t^3 * (E[0, 0, -kt, -(a+k)t] + E[0, 0, -at, -(a+k)t])

``E`` is evaluated with a Taylor series when the nodes are clustered and with
the divided-difference recursion otherwise, so the zero-decay limits
(``t``, ``t^2/2``, ``t^3/3``) and the coincident-parameter cases come out of
the same code path with full relative precision.
"""

from __future__ import annotations

import math

__all__ = ["psi", "theta", "upsilon", "gamma_fn", "lambda_fn", "exp_divided_difference"]

# nodes within this spread use the series; |node - centre| <= 0.5 there
_SERIES_SPREAD = 1.0
_SERIES_TERMS = 22
_INV_FACT = [1.0 / math.factorial(i) for i in range(_SERIES_TERMS + 8)]


def _check(t: float, *decays: float) -> None:
    for d in decays:
        if not math.isfinite(d):
            raise ValueError(f"decay parameter must be finite, got {d!r}")
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t!r}")


def _dd_sorted(z: list[float]) -> float:
    n = len(z) - 1
    if n == 0:
        return math.exp(z[0])
    spread = z[-1] - z[0]
    if spread > _SERIES_SPREAD:
        # endpoints are farthest apart, which bounds the cancellation
        return (_dd_sorted(z[1:]) - _dd_sorted(z[:-1])) / spread
    c = 0.5 * (z[0] + z[-1])
    # complete homogeneous symmetric polynomials h_m of the shifted nodes
    h = [1.0] + [0.0] * _SERIES_TERMS
    for zi in z:
        w = zi - c
        for m in range(1, _SERIES_TERMS + 1):
            h[m] += w * h[m - 1]
    total = 0.0
    for m in range(_SERIES_TERMS, -1, -1):
        total += h[m] * _INV_FACT[m + n]
    return math.exp(c) * total


def exp_divided_difference(*nodes: float) -> float:
    """Divided difference of ``exp`` over the given (possibly repeated) nodes."""
    if not nodes:
        raise ValueError("at least one node is required")
    return _dd_sorted(sorted(float(z) for z in nodes))


def psi(kappa: float, t: float) -> float:
    """Integral of ``exp(-kappa u)`` over ``[0, t]``; equals ``t`` at ``kappa = 0``."""
    _check(t, kappa)
    if t == 0.0:
        return 0.0
    x = kappa * t
    if abs(x) < 1e-5:
        # truncation error below x**4/120; also safe for subnormal x
        return t * (1.0 - x / 2 + x * x / 6 - x * x * x / 24)
    return -t * math.expm1(-x) / x


def theta(kappa: float, t: float) -> float:
    """Integral of ``psi(kappa, s)`` over ``[0, t]``; ``t**2/2`` at ``kappa = 0``."""
    _check(t, kappa)
    if t == 0.0:
        return 0.0
    return t * t * _dd_sorted(sorted((0.0, 0.0, -kappa * t)))


def upsilon(kappa: float, t: float) -> float:
    """Integral of ``psi(kappa, s)**2`` over ``[0, t]``; ``t**3/3`` at ``kappa = 0``."""
    _check(t, kappa)
    if t == 0.0:
        return 0.0
    x = kappa * t
    return 2.0 * t**3 * _dd_sorted(sorted((0.0, 0.0, -x, -2.0 * x)))


def gamma_fn(kappa: float, alpha: float, t: float) -> float:
    """Integral of ``exp(-alpha s) * psi(kappa, s)`` over ``[0, t]``.

    Reduces to ``theta(kappa, t)`` for ``alpha = 0`` and to
    ``psi(kappa, t)**2 / 2`` for ``alpha = kappa``.
    """
    _check(t, kappa, alpha)
    if t == 0.0:
        return 0.0
    return t * t * _dd_sorted(sorted((0.0, -alpha * t, -(alpha + kappa) * t)))


def lambda_fn(kappa: float, alpha: float, t: float) -> float:
    """Integral of ``psi(alpha, s) * psi(kappa, s)`` over ``[0, t]``.

    Symmetric in ``(kappa, alpha)``; ``lambda_fn(k, k, t) == upsilon(k, t)``.
    """
    _check(t, kappa, alpha)
    if t == 0.0:
        return 0.0
    s = -(alpha + kappa) * t
    # evaluate the two halves in a canonical order so the result is exactly symmetric
    lo, hi = sorted((kappa, alpha))
    left = _dd_sorted(sorted((0.0, 0.0, -lo * t, s)))
    right = _dd_sorted(sorted((0.0, 0.0, -hi * t, s)))
    return t**3 * (left + right)
