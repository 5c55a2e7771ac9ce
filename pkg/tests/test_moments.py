import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cappar_model
from fivefactor.corrcheck import CorrTriple, is_valid_corr
from fivefactor.errors import ModelValidationError
from fivefactor.moments import (
    INT_PI,
    INT_R,
    INT_X,
    PI,
    R,
    W_S,
    X,
    State,
    cov_matrix,
    mean_vector,
    rank_relation_residual,
    unit_cov_matrix,
)
from oracles import cov_by_quadrature, ou_mean_by_recursion


@st.composite
def corr_triples(draw, strict=False):
    x = draw(st.floats(-0.95, 0.95))
    y = draw(st.floats(-0.95, 0.95))
    half = np.sqrt((1 - x * x) * (1 - y * y))
    shrink = 0.95 if strict else 1.0
    u = draw(st.floats(-1, 1))
    return CorrTriple(x, y, float(np.clip(x * y + shrink * u * half, -1, 1)))


@st.composite
def models(draw, strict=False):
    speed = st.floats(0.005, 1.5)
    vol = st.floats(0.001, 0.3)
    level = st.floats(-0.05, 0.1)
    c = draw(corr_triples(strict))
    if not is_valid_corr(c):
        c = CorrTriple(c.rho_rS, c.rho_rPi, 0.0) if is_valid_corr(CorrTriple(c.rho_rS, c.rho_rPi, 0.0)) else CorrTriple()
    return cappar_model(
        kappa=draw(speed), r_bar=draw(level), sigma_r=draw(vol),
        alpha=draw(speed), x_bar=draw(level), sigma_x=draw(vol),
        beta=draw(speed), pi_bar=draw(level), sigma_pi=draw(vol),
        sigma_S=draw(vol), sigma_I=draw(vol), corr=c,
    )


def test_cappar_table_matches_quadrature(model):
    for t in (1.0, 15.0):
        np.testing.assert_allclose(cov_matrix(model, t).cov, cov_by_quadrature(model, t), rtol=1e-9, atol=0)


@settings(max_examples=25, deadline=None)
@given(p=models(), t=st.floats(0.05, 50))
def test_every_entry_matches_quadrature(p, t):
    ref = cov_by_quadrature(p, t)
    got = cov_matrix(p, t).cov
    # entries that vanish through a zero correlation are compared absolutely
    tol = 1e-9 * np.abs(ref) + 1e-15 * np.sqrt(np.outer(np.diag(ref), np.diag(ref)))
    assert np.all(np.abs(got - ref) <= tol)


def test_mean_matches_ode(model, s0):
    for t in (0.5, 15.0):
        m = mean_vector(model, s0, t)
        for (lvl, intg), speed, level, z0 in (
            ((R, INT_R), model.kappa, model.r_bar, s0.r),
            ((X, INT_X), model.alpha, model.x_bar, s0.x),
            ((PI, INT_PI), model.beta, model.pi_bar, s0.pi),
        ):
            np.testing.assert_allclose(m[[lvl, intg]], ou_mean_by_recursion(speed, level, z0, t), rtol=1e-10, atol=1e-14)
        assert m[W_S] == 0.0


@settings(max_examples=50, deadline=None)
@given(p=models(), t1=st.floats(0.01, 20), t2=st.floats(0.01, 20))
def test_means_compose(p, t1, t2):
    s0 = State(0.01, 1.0, 0.03, 1.0, 0.02)
    m1 = mean_vector(p, s0, t1)
    mid = State(m1[R], 1.0, m1[X], 1.0, m1[PI])
    m2 = mean_vector(p, mid, t2)
    direct = mean_vector(p, s0, t1 + t2)
    np.testing.assert_allclose(direct[[R, X, PI]], m2[[R, X, PI]], rtol=1e-12, atol=1e-15)
    composed = m1[[INT_R, INT_X, INT_PI]] + m2[[INT_R, INT_X, INT_PI]]
    np.testing.assert_allclose(direct[[INT_R, INT_X, INT_PI]], composed, rtol=1e-11, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(p=models(), t=st.floats(1e-3, 50))
def test_covariance_psd(p, t):
    c = cov_matrix(p, t).cov
    assert np.linalg.eigvalsh(c).min() >= -1e-10 * np.trace(c)


@settings(max_examples=100, deadline=None)
@given(p=models(strict=True), t=st.floats(0.05, 50))
def test_rank_structure(p, t):
    m = cov_matrix(p, t)
    null = np.array([0, 0, 1, p.alpha, 0, 0, 1.0])
    assert np.abs(m.unit_cov @ null).max() <= 1e-12 * np.abs(m.unit_cov).max()
    assert rank_relation_residual(m, p) <= 1e-12 * np.abs(m.cov).max()
    # the leading block carries all the randomness
    np.linalg.cholesky(m.unit_cov[:6, :6])


def test_unit_cov_scaling(model):
    m = cov_matrix(model, 3.0)
    np.testing.assert_allclose(m.cov, m.unit_cov * np.outer(m.scale, m.scale), rtol=0, atol=0)
    np.testing.assert_array_equal(m.unit_cov, unit_cov_matrix(model, 3.0))
    np.testing.assert_array_equal(m.cov, m.cov.T)


def test_zero_horizon(model, s0):
    m = cov_matrix(model, 0.0, s0)
    assert not m.cov.any()
    np.testing.assert_allclose(m.mean, [s0.r, 0, s0.x, 0, s0.pi, 0, 0])


def test_moment_set_is_read_only(model):
    m = cov_matrix(model, 1.0)
    with pytest.raises(ValueError):
        m.cov[0, 0] = 1.0


def test_invalid_inputs(model):
    with pytest.raises(ModelValidationError):
        cappar_model(sigma_r=-0.01)
    with pytest.raises(ModelValidationError, match=r"rho_SPi must lie in"):
        cappar_model(corr=CorrTriple(0.9, 0.9, 0.0))
    with pytest.raises(ModelValidationError):
        State(0.0, -1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        cov_matrix(model, -1.0)


def test_reference_values(model, s0):
    assert mean_vector(model, s0, 1.0)[R] == pytest.approx(0.0275 + np.exp(-0.09) * (-0.0225), rel=1e-14)
    assert mean_vector(model, s0, 1.0)[R] == pytest.approx(0.006936, abs=1e-6)
    assert cov_matrix(model, 1.0).cov[R, R] == pytest.approx(9.1517e-5, rel=1e-4)
    flat = cappar_model(kappa=0.0)
    m = mean_vector(flat, s0, 4.0)
    assert m[R] == pytest.approx(s0.r, rel=1e-15) and m[INT_R] == pytest.approx(4 * s0.r, rel=1e-15)


def test_only_stock_noise_left():
    p = cappar_model(sigma_r=0.0, sigma_x=0.0, sigma_pi=0.0)
    c = cov_matrix(p, 2.5).cov
    expected = np.zeros((7, 7))
    expected[W_S, W_S] = 2.5
    np.testing.assert_array_equal(c, expected)


def test_rank_relation_without_reversion():
    p = cappar_model(alpha=0.0)
    assert rank_relation_residual(cov_matrix(p, 5.0), p) <= 1e-12 * np.abs(cov_matrix(p, 5.0).cov).max()
    assert rank_relation_residual(cov_matrix(p, 0.0), p) == 0.0
