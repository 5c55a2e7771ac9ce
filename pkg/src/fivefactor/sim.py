"""Exact simulation of the five state variables on a discrete grid.

Each step draws Y_delta from its singular seven-dimensional normal law: the
leading 6x6 block of the unit-volatility covariance is Cholesky-factored and
the seventh coordinate is rebuilt from the linear relation
``W^S = -Z_x - alpha Z_int_x``. The stock and price indices are then updated
multiplicatively, so they stay positive on every path.

Random numbers come from one stream per path keyed by ``(seed, path index)``.
Every step consumes seven standard normals from that stream: six for the
Gaussian block, then one for the unexpected-inflation shock.

``euler_simulate`` and ``euler_risk_neutral`` are first-order discretisations
kept as independent oracles for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corrcheck import determinant3
from .errors import CholeskyFailure, RankDeficientCorrelation
from .moments import (
    INT_PI,
    INT_R,
    INT_X,
    PI,
    R,
    W_S,
    X,
    ModelParams,
    MomentSet,
    State,
    cov_matrix,
    mean_components,
)

STATE_FIELDS = ("r", "S", "x", "I", "pi")
RANK_TOL = 1e-10
DRAWS_PER_STEP = 7

# spawn-key namespaces keep the exact and Euler streams disjoint for one seed
_NS_EXACT, _NS_EULER, _NS_RISK_NEUTRAL = 0, 1, 2


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    namespace: int = _NS_EXACT

    def generator(self) -> np.random.Generator:
        if self.seed < 0 or self.stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.namespace, self.stream_id))
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


@dataclass(frozen=True, eq=False)
class TimeGrid:
    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        if t.size == 0:
            raise ValueError("time grid is empty")
        if not np.all(np.isfinite(t)) or t[0] <= 0 or np.any(np.diff(t) <= 0):
            raise ValueError("grid times must be finite, positive and strictly increasing")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)

    @classmethod
    def equidistant(cls, step: float, n_steps: int) -> "TimeGrid":
        if step <= 0 or n_steps < 1:
            raise ValueError("need step > 0 and n_steps >= 1")
        return cls(step * np.arange(1, n_steps + 1))

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.times, prepend=0.0)

    @property
    def is_equidistant(self) -> bool:
        s = self.steps
        return bool(np.allclose(s, s[0], rtol=1e-12, atol=0.0))

    def __len__(self):
        return self.times.size


@dataclass(eq=False)
class ScenarioSet:
    """Simulated states; ``paths[i, j]`` is (r, S, x, I, pi) of path i at ``times[j]``."""

    grid: TimeGrid
    times: np.ndarray
    paths: np.ndarray
    seed: int
    params: ModelParams
    initial: State
    extras: dict = field(default_factory=dict)

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    def state(self, path: int, j: int) -> State:
        return State(*map(float, self.paths[path, j]))

    def column(self, name: str) -> np.ndarray:
        return self.paths[..., STATE_FIELDS.index(name)]

    def terminal(self) -> np.ndarray:
        return self.paths[:, -1, :]


@dataclass(frozen=True, eq=False)
class _StepKernel:
    delta: float
    chol: np.ndarray
    scale: np.ndarray


def _require_full_rank(p: ModelParams) -> None:
    c = p.corr
    det = determinant3(c.rho_rS, c.rho_rPi, c.rho_SPi)
    if det <= RANK_TOL:
        raise RankDeficientCorrelation(
            f"exact simulation needs a full-rank correlation matrix (determinant {det:.3g})"
        )


def _chol6(m: MomentSet) -> np.ndarray:
    try:
        return np.linalg.cholesky(m.unit_cov[:6, :6])
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure(
            f"leading 6x6 block of the unit covariance at t={m.t} is not positive definite"
        ) from exc


def _kernel(p: ModelParams, delta: float) -> _StepKernel:
    m = cov_matrix(p, delta)
    return _StepKernel(delta=delta, chol=_chol6(m), scale=p.scale)


def _correlated(v: np.ndarray, chol: np.ndarray, alpha: float) -> np.ndarray:
    """Map (..., 6) iid normals to (..., 7) draws with the unit covariance."""
    z = np.empty(v.shape[:-1] + (7,))
    z[..., :6] = v @ chol.T
    z[..., W_S] = -z[..., X] - alpha * z[..., INT_X]
    return z


def sample_singular_normal(m: MomentSet, p: ModelParams, rng, size: int | None = None) -> np.ndarray:
    """Draw Y ~ N_7(m.mean, m.cov) through the full-rank 6x6 block."""
    _require_full_rank(p)
    if m.t <= 0:
        raise ValueError("sampling needs a positive horizon")
    gen = _as_generator(rng)
    chol = _chol6(m)
    v = gen.standard_normal(6 if size is None else (size, 6))
    z = _correlated(v, chol, p.alpha)
    return m.mean + m.scale * z


def _advance(p: ModelParams, k: _StepKernel, r, S, x, I, pi, v: np.ndarray):
    """One exact step for arrays of states; ``v`` has shape (n, 7)."""
    d = k.delta
    mean = mean_components(p, r, x, pi, d)
    z = _correlated(v[:, :6], k.chol, p.alpha)
    y = [mean[i] + k.scale[i] * z[:, i] for i in range(7)]
    S_new = S * np.exp(y[INT_R] + y[INT_X] - 0.5 * p.sigma_S**2 * d + p.sigma_S * y[W_S])
    I_new = I * np.exp(y[INT_PI] - 0.5 * p.sigma_I**2 * d + p.sigma_I * math.sqrt(d) * v[:, 6])
    return y, (y[R], S_new, y[X], I_new, y[PI])


def exact_step(p: ModelParams, s: State, delta: float, rng) -> State:
    if delta <= 0:
        raise ValueError("delta must be positive")
    _require_full_rank(p)
    gen = _as_generator(rng)
    k = _kernel(p, delta)
    v = gen.standard_normal(DRAWS_PER_STEP)[None, :]
    arr = [np.array([val]) for val in (s.r, s.S, s.x, s.I, s.pi)]
    _, new = _advance(p, k, *arr, v)
    return State(*(float(a[0]) for a in new))


def simulate(
    p: ModelParams,
    s0: State,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    *,
    terminal_only: bool = False,
    chunk: int = 4096,
) -> ScenarioSet:
    """Exact simulation of ``n_paths`` independent paths on ``grid``.

    With ``terminal_only`` only the last grid point is stored, which keeps
    memory flat for long grids. Running integrals of r, x, pi and the stock
    Brownian motion are recorded in ``extras``.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    _require_full_rank(p)
    steps = grid.steps
    cache: dict[float, _StepKernel] = {}
    kernels = []
    for d in steps:
        d = float(d)
        if d not in cache:
            cache[d] = _kernel(p, d)
        kernels.append(cache[d])

    n_steps = len(steps)
    rec_idx = [n_steps - 1] if terminal_only else list(range(n_steps))
    times = grid.times[rec_idx]
    out = np.empty((n_paths, len(rec_idx), 5))
    extras = {name: np.empty((n_paths, len(rec_idx))) for name in ("int_r", "int_x", "int_pi", "W_S")}

    # cap the per-chunk noise buffer at about 64 MB
    chunk = max(1, min(chunk, (1 << 23) // (n_steps * DRAWS_PER_STEP)))
    for start in range(0, n_paths, chunk):
        stop = min(start + chunk, n_paths)
        noise = np.stack(
            [RngStream(seed, i).generator().standard_normal((n_steps, DRAWS_PER_STEP)) for i in range(start, stop)]
        )
        n = stop - start
        state = [np.full(n, v, dtype=float) for v in (s0.r, s0.S, s0.x, s0.I, s0.pi)]
        acc = [np.zeros(n) for _ in range(4)]
        col = 0
        for j, k in enumerate(kernels):
            y, state = _advance(p, k, *state, noise[:, j, :])
            for a, idx in zip(acc, (INT_R, INT_X, INT_PI, W_S)):
                a += y[idx]
            if col < len(rec_idx) and rec_idx[col] == j:
                out[start:stop, col, :] = np.column_stack(state)
                for name, a in zip(extras, acc):
                    extras[name][start:stop, col] = a
                col += 1
    return ScenarioSet(grid=grid, times=times, paths=out, seed=seed, params=p, initial=s0, extras=extras)


def _n_steps(t_end: float, dt: float) -> int:
    if dt <= 0 or t_end < dt:
        raise ValueError("need dt > 0 and t_end >= dt")
    n = int(round(t_end / dt))
    if abs(n * dt - t_end) > 1e-9 * t_end:
        raise ValueError(f"t_end={t_end} is not a multiple of dt={dt}")
    return n


def euler_simulate(
    p: ModelParams,
    s0: State,
    t_end: float,
    dt: float,
    n_paths: int,
    seed: int,
    *,
    record_times=None,
    block: int = 8192,
) -> ScenarioSet:
    """Euler-Maruyama reference scheme for the five SDEs (log-space for S and I).

    Only the states at ``record_times`` (default: ``t_end``) are kept. Each
    block of ``block`` paths draws from its own stream, so the output depends
    on ``(seed, block)`` only.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    _require_full_rank(p)
    n = _n_steps(t_end, dt)
    grid = TimeGrid.equidistant(dt, n)
    rec = [t_end] if record_times is None else list(record_times)
    rec_idx = sorted({_n_steps(t, dt) - 1 for t in rec})
    chol3 = np.linalg.cholesky(p.corr.matrix())
    sq = math.sqrt(dt)
    out = np.empty((n_paths, len(rec_idx), 5))
    extras = {name: np.empty((n_paths, len(rec_idx))) for name in ("int_r", "int_x", "int_pi", "W_S")}

    for b, start in enumerate(range(0, n_paths, block)):
        stop = min(start + block, n_paths)
        m = stop - start
        gen = RngStream(seed, b, _NS_EULER).generator()
        r = np.full(m, s0.r)
        x = np.full(m, s0.x)
        pi = np.full(m, s0.pi)
        logS = np.full(m, math.log(s0.S))
        logI = np.full(m, math.log(s0.I))
        ir, ix, ip, ws = (np.zeros(m) for _ in range(4))
        col = 0
        for j in range(n):
            e = gen.standard_normal((m, 4))
            dw = e[:, :3] @ chol3.T * sq
            dWr, dWS, dWpi = dw[:, 0], dw[:, 1], dw[:, 2]
            dWI = e[:, 3] * sq
            ir += r * dt
            ix += x * dt
            ip += pi * dt
            ws += dWS
            logS += (r + x - 0.5 * p.sigma_S**2) * dt + p.sigma_S * dWS
            logI += (pi - 0.5 * p.sigma_I**2) * dt + p.sigma_I * dWI
            r = r + p.kappa * (p.r_bar - r) * dt + p.sigma_r * dWr
            x = x + p.alpha * (p.x_bar - x) * dt - p.sigma_x * dWS
            pi = pi + p.beta * (p.pi_bar - pi) * dt + p.sigma_pi * dWpi
            if col < len(rec_idx) and rec_idx[col] == j:
                out[start:stop, col, :] = np.column_stack([r, np.exp(logS), x, np.exp(logI), pi])
                for name, a in zip(extras, (ir, ix, ip, ws)):
                    extras[name][start:stop, col] = a
                col += 1
    times = grid.times[rec_idx]
    return ScenarioSet(grid=grid, times=times, paths=out, seed=seed, params=p, initial=s0, extras=extras)


def euler_risk_neutral(pp, p: ModelParams, s: State, delta: float, dt: float, n_paths: int, seed: int, *, block: int = 65536) -> dict:
    """Monte-Carlo prices of the nominal and the inflation zero-coupon bond under Q.

    r and pi follow their risk-neutral OU dynamics, discretised with Euler;
    the unexpected-inflation shock enters only at maturity and is drawn
    exactly. Returns estimates and standard errors of ``p_t(T)`` and
    ``q_t(T) / I_t``.
    """
    n = _n_steps(delta, dt)
    rho = p.corr.rho_rPi
    c = math.sqrt(max(1.0 - rho * rho, 0.0))
    sq = math.sqrt(dt)
    sums = np.zeros(2)
    sumsq = np.zeros(2)
    for b, start in enumerate(range(0, n_paths, block)):
        m = min(start + block, n_paths) - start
        gen = RngStream(seed, b, _NS_RISK_NEUTRAL).generator()
        r = np.full(m, s.r)
        pi = np.full(m, s.pi)
        ir = np.zeros(m)
        ip = np.zeros(m)
        for _ in range(n):
            e = gen.standard_normal((2, m))
            ir += r * dt
            ip += pi * dt
            dWr = e[0] * sq
            dWpi = (rho * e[0] + c * e[1]) * sq
            r += pp.a * (pp.b - r) * dt + p.sigma_r * dWr
            pi += pp.k * (pp.l - pi) * dt + p.sigma_pi * dWpi
        u = gen.standard_normal(m)
        disc = np.exp(-ir)
        growth = np.exp(ip - pp.h * delta - 0.5 * p.sigma_I**2 * delta + p.sigma_I * math.sqrt(delta) * u)
        for i, v in enumerate((disc, disc * growth)):
            sums[i] += v.sum()
            sumsq[i] += (v * v).sum()
    mean = sums / n_paths
    se = np.sqrt(np.maximum(sumsq / n_paths - mean**2, 0.0) / n_paths)
    return {"zcb": mean[0], "zcb_se": se[0], "inflation_ratio": mean[1], "inflation_ratio_se": se[1]}
