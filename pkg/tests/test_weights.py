"""Radial weight profiles sigma_alpha and gamma_alpha against independent
quadrature oracles and their closed-form special values."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from plurinorm import ParameterError, gamma_alpha, sigma_alpha, sigma_alpha_full_mass


def sigma_oracle(u: float, alpha: float) -> float:
    # \int_u^0 |r|^alpha e^r dr with the endpoint singularity handed to
    # QUADPACK's algebraic weight (b - x)^beta at b = 0.
    val, err = quad(np.exp, u, 0.0, weight="alg", wvar=(0.0, alpha),
                    epsabs=1e-15, epsrel=1e-13, limit=200)
    assert err < 1e-12 * max(1.0, abs(val))
    return val


def gamma_oracle(u: float, alpha: float) -> float:
    val, err = quad(lambda r: np.exp(r) * (r - u), u, 0.0, weight="alg",
                    wvar=(0.0, alpha), epsabs=1e-15, epsrel=1e-13, limit=200)
    assert err < 1e-12 * max(1.0, abs(val))
    return val


def test_sigma_special_values():
    assert sigma_alpha(-1.0, 0.0) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-15)
    assert sigma_alpha(0.0, 0.5) == 0.0
    assert sigma_alpha(-np.inf, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert sigma_alpha(-np.inf, 1.5) == pytest.approx(gamma_fn(2.5), rel=1e-14)
    # Hardy convention: identically one.
    assert sigma_alpha(-7.3, -1.0) == 1.0
    assert sigma_alpha(-np.inf, -1.0) == 1.0
    assert sigma_alpha_full_mass(2.0) == pytest.approx(2.0, rel=1e-14)


def test_gamma_special_values():
    # gamma_0(u) = e^u - 1 - u
    assert gamma_alpha(-1.0, 0.0) == pytest.approx(math.exp(-1.0), rel=1e-13)
    assert gamma_alpha(-0.25, -1.0) == 0.25
    assert gamma_alpha(0.0, 1.3) == 0.0
    assert gamma_alpha(-np.inf, 0.5) == np.inf
    assert gamma_alpha(-np.inf, -1.0) == np.inf


def test_sigma_gamma_match_quadrature_oracle():
    rng = np.random.default_rng(20260825)
    for _ in range(100):
        u = -(10.0 ** rng.uniform(-3, 1.47))  # 1e-3 .. ~30
        alpha = rng.uniform(-0.999, 4.0)
        s = sigma_alpha(u, alpha)
        g = gamma_alpha(u, alpha)
        s_ref = sigma_oracle(u, alpha)
        g_ref = gamma_oracle(u, alpha)
        assert s == pytest.approx(s_ref, rel=1e-12, abs=1e-13)
        assert g == pytest.approx(g_ref, rel=1e-12, abs=1e-13)


def test_gamma_small_u_asymptote():
    # gamma_alpha(u) ~ |u|^(alpha+2) / ((alpha+1)(alpha+2)) as u -> 0^-
    u = -1e-3
    for alpha in (-0.5, 0.0, 0.5, 1.0, 2.0, 4.0):
        lead = abs(u) ** (alpha + 2) / ((alpha + 1) * (alpha + 2))
        ratio = gamma_alpha(u, alpha) / lead
        assert 0.99 <= ratio <= 1.01, (alpha, ratio)
    # alpha = -1 degenerates to -u exactly.
    assert gamma_alpha(u, -1.0) == -u


def test_vectorized_shapes():
    u = np.array([[-1.0, -2.0], [-0.5, -np.inf]])
    s = sigma_alpha(u, 0.5)
    g = gamma_alpha(u, 0.5)
    assert s.shape == u.shape and g.shape == u.shape
    assert np.isfinite(s).all()
    assert np.isinf(g[1, 1])


def test_parameter_errors():
    with pytest.raises(ParameterError):
        sigma_alpha(-1.0, -1.5)
    with pytest.raises(ParameterError):
        gamma_alpha(-1.0, -2.0)
    with pytest.raises(ParameterError):
        sigma_alpha(0.5, 0.0)
    # Roundoff-level positive u is forgiven.
    assert sigma_alpha(1e-15, 0.0) == 0.0


@settings(max_examples=50, deadline=None)
@given(
    u1=st.floats(min_value=-30.0, max_value=-1e-6),
    u2=st.floats(min_value=-30.0, max_value=-1e-6),
    alpha=st.floats(min_value=-1.0, max_value=4.0),
)
def test_monotonicity_and_positivity(u1, u2, alpha):
    lo, hi = min(u1, u2), max(u1, u2)
    # sigma grows as the lower limit moves down; gamma likewise.
    assert sigma_alpha(lo, alpha) >= sigma_alpha(hi, alpha) - 1e-12
    assert gamma_alpha(lo, alpha) >= gamma_alpha(hi, alpha) - 1e-12
    assert gamma_alpha(hi, alpha) >= 0.0
    assert sigma_alpha(lo, alpha) <= sigma_alpha_full_mass(alpha) + 1e-12
