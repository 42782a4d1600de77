"""Polynomials, test kernels, maps, composition, and the expression parser."""

from __future__ import annotations

import numpy as np
import pytest

from plurinorm import (
    BIDISK,
    UNIT_BALL,
    UNIT_DISK,
    ComposedFunction,
    DomainMismatchError,
    HoloMap,
    ParameterError,
    Polynomial,
    identity_map,
    parse_function,
)
from plurinorm.functions import TestKernel as Kernel
from plurinorm.functions import function_from_config, shilov_sup


def central_derivative(f, z, h=1e-6):
    return (f(z + h) - f(z - h)) / (2 * h)


class TestPolynomial:
    def test_eval_2d(self):
        p = Polynomial(2, {(2, 0): 1.0, (0, 2): 1.0})
        assert p([0.3, 0.4j]) == pytest.approx(-0.07, abs=1e-15)

    def test_eval_1d_horner(self):
        p = Polynomial.from_coeffs_1d([1.0, -2.0, 0.0, 3.0])
        z = 0.5 + 0.25j
        assert p(z) == pytest.approx(1 - 2 * z + 3 * z**3, abs=1e-14)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(21)
        p = Polynomial(2, {(1, 0): 2.0, (2, 1): -1.5j, (0, 3): 0.7})
        for _ in range(10):
            z = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2)
            g = p.grad(z)
            d1 = central_derivative(lambda t: p([t, z[1]]), z[0])
            d2 = central_derivative(lambda t: p([z[0], t]), z[1])
            assert g[0] == pytest.approx(d1, rel=1e-7, abs=1e-9)
            assert g[1] == pytest.approx(d2, rel=1e-7, abs=1e-9)

    def test_algebra(self):
        rng = np.random.default_rng(22)
        p = Polynomial.from_coeffs_1d([1.0, 2.0j])
        q = Polynomial.from_coeffs_1d([0.5, 0.0, -1.0])
        z = rng.standard_normal() + 1j * rng.standard_normal()
        assert (p * q)(z) == pytest.approx(p(z) * q(z), rel=1e-13)
        assert (p + q)(z) == pytest.approx(p(z) + q(z), rel=1e-13)
        assert (p - 3)(z) == pytest.approx(p(z) - 3, rel=1e-13)
        assert (p**3)(z) == pytest.approx(p(z) ** 3, rel=1e-12)

    def test_compose(self):
        f = parse_function("z^2 - 0.5*z")
        F = parse_function("0.25*z1 + 0.25*z2*z1", nvars=2)
        comp = f.compose(F)
        z = np.array([0.3 + 0.1j, -0.2j])
        assert comp(z) == pytest.approx(f(F(z)), rel=1e-13)

    def test_coeffs_in_var(self):
        p = parse_function("z1^2*z2 - 3*z1 + z2^2 + 1", nvars=2)
        cs = p.coeffs_in_var(0)
        assert len(cs) == 3
        zeta = 0.4 - 0.2j
        z1 = 0.1 + 0.7j
        recon = sum(cs[k](zeta) * z1**k for k in range(3))
        assert recon == pytest.approx(p([z1, zeta]), rel=1e-13)

    def test_degree_cap(self):
        with pytest.raises(ParameterError):
            Polynomial(1, {(33,): 1.0})

    def test_config_roundtrip(self):
        p = Polynomial(2, {(2, 1): 1 - 2j, (0, 0): 0.25})
        q = function_from_config(p.to_config())
        assert q == p


class TestKernelFamily:
    def test_values(self):
        k = Kernel(0.8, 1.0)
        assert k(0.8) == pytest.approx(1.0 / 0.36, rel=1e-13)
        assert k(0.0) == pytest.approx(0.36**1.0 / 1.0, rel=1e-13)
        k0 = Kernel(1e-12, 2.0)
        assert k0(0.3 + 0.3j) == pytest.approx(1.0, rel=1e-9)

    def test_derivative(self):
        k = Kernel(0.5 + 0.2j, 1.5)
        for z in (0.1, -0.3 + 0.4j, 0.7j):
            num = central_derivative(k, z)
            assert k.partial(0)(z) == pytest.approx(num, rel=1e-6)

    def test_validation(self):
        with pytest.raises(ParameterError):
            Kernel(1.0, 1.0)
        with pytest.raises(ParameterError):
            Kernel(0.5, -1.0)


class TestParser:
    def test_basic(self):
        p = parse_function("z^2")
        assert p.terms == {(2,): 1.0 + 0j}

    def test_two_vars(self):
        p = parse_function("z1*z2 - 0.5i*z1^3")
        assert p.terms == {(1, 1): 1.0 + 0j, (3, 0): -0.5j}

    def test_literals_and_parens(self):
        p = parse_function("(1+2i)*z**2 - 3")
        z = 0.3 - 0.7j
        assert p(z) == pytest.approx((1 + 2j) * z**2 - 3, rel=1e-14)

    def test_unary_minus(self):
        assert parse_function("-z")(0.5) == -0.5
        assert parse_function("2 - -z")(0.5) == 2.5

    def test_pure_imaginary(self):
        assert parse_function("2i")(0.1) == 2j

    def test_rejects(self):
        for bad in ("z^1.5", "q + 1", "z*", "z1 + z", "(z", "z^-2"):
            with pytest.raises(ParameterError):
                parse_function(bad)


class TestHoloMap:
    def test_containment_violation(self):
        with pytest.raises(DomainMismatchError) as exc:
            HoloMap([parse_function("2*z")], UNIT_DISK, UNIT_DISK)
        assert "leaves" in str(exc.value)

    def test_ball_to_disk(self):
        F = HoloMap([parse_function("0.5*z1 + 0.5*z2", nvars=2)], UNIT_BALL, UNIT_DISK)
        w = F([0.3, 0.4])
        assert w == pytest.approx(0.35, rel=1e-14)

    def test_identity(self):
        F = identity_map(UNIT_BALL)
        z = np.array([0.1 + 0.2j, 0.3])
        assert np.allclose(F(z), z)

    def test_bidisk_components(self):
        F = HoloMap(
            [parse_function("z1*z2", nvars=2), parse_function("0.5*z1", nvars=2)],
            BIDISK,
            BIDISK,
        )
        out = F([0.5, 0.5])
        assert out.shape == (2,)
        assert out[0] == pytest.approx(0.25)

    def test_shilov_sup(self):
        assert shilov_sup(parse_function("z^2"), UNIT_DISK) == pytest.approx(1.0)
        f = parse_function("0.5*z1 + 0.5*z2", nvars=2)
        assert shilov_sup(f, UNIT_BALL) == pytest.approx(np.sqrt(0.5), rel=1e-3)


class TestComposedFunction:
    def test_matches_expansion(self):
        f = parse_function("z^2 + 0.5*z")
        F = HoloMap([parse_function("0.4*z1 + 0.3*z2^2", nvars=2)], UNIT_BALL, UNIT_DISK)
        comp = ComposedFunction(f, F)
        expanded = f.compose(F.components[0])
        z = np.array([0.2 + 0.1j, -0.4j])
        assert comp(z) == pytest.approx(expanded(z), rel=1e-13)
        g1 = comp.grad(z)
        g2 = expanded.grad(z)
        assert np.allclose(g1, g2, rtol=1e-12)
