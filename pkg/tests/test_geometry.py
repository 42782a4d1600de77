"""Domains, exhaustions, Green functions: closed-form values, symmetry,
Mobius transport, and plurisubharmonicity spot checks."""

from __future__ import annotations

import math

import numpy as np
import pytest

from plurinorm import (
    BIDISK,
    UNIT_BALL,
    UNIT_DISK,
    DomainMismatchError,
    Exhaustion,
    ParameterError,
    UnsupportedConfigurationError,
    green_function,
    green_pole,
    log_abs,
    log_max_abs,
    scaled,
    smooth_square,
    truncated,
)
from plurinorm.geometry import as_points, levi_min_eigenvalue


def mobius(a: complex, z):
    return (z - a) / (1.0 - np.conj(a) * z)


class TestEvaluation:
    def test_disk_log(self):
        u = log_abs(UNIT_DISK)
        assert u(0.5) == pytest.approx(math.log(0.5), abs=1e-15)
        assert u(0.0) == -np.inf

    def test_disk_green(self):
        u = green_pole(UNIT_DISK, 0.5)
        assert u(0.9) == pytest.approx(math.log(0.4 / 0.55), abs=1e-14)
        assert u(0.5) == -np.inf
        assert u(0.0) == pytest.approx(math.log(0.5), abs=1e-15)

    def test_ball_log(self):
        u = log_abs(UNIT_BALL)
        assert u([0.3, 0.4j]) == pytest.approx(math.log(0.5), abs=1e-14)
        assert u([0.0, 0.0]) == -np.inf

    def test_bidisk_max(self):
        u = log_max_abs(BIDISK)
        assert u([0.2, 0.7]) == pytest.approx(math.log(0.7), abs=1e-15)

    def test_smooth_square(self):
        u = smooth_square(UNIT_BALL)
        assert u([0.5, 0.5]) == pytest.approx(-0.5, abs=1e-15)
        assert u.min_value() == -1.0

    def test_wrappers(self):
        base = log_abs(UNIT_DISK)
        assert scaled(0.5, base)(0.25) == pytest.approx(0.5 * math.log(0.25))
        assert truncated(-1.0, base)(0.5) == pytest.approx(math.log(0.5))
        assert truncated(-1.0, base)(0.01) == -1.0
        assert truncated(-1.0, base).poles.size == 0
        assert scaled(2.0, base).poles.tolist() == [0j]

    def test_vectorized(self):
        u = log_abs(UNIT_BALL)
        pts = np.array([[0.1, 0.2], [0.3, 0.0]], dtype=complex)
        vals = u(pts)
        assert vals.shape == (2,)
        assert vals[1] == pytest.approx(math.log(0.3))


class TestGreenFunction:
    def test_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            z, a = rng.uniform(-0.7, 0.7, 2) + 1j * rng.uniform(-0.7, 0.7, 2)
            g1 = green_function(UNIT_DISK, a, z)
            g2 = green_function(UNIT_DISK, z, a)
            assert abs(g1 - g2) < 1e-14

    def test_mobius_transport(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            z, a = rng.uniform(-0.7, 0.7, 2) + 1j * rng.uniform(-0.7, 0.7, 2)
            lhs = green_function(UNIT_DISK, 0.0, mobius(a, z))
            rhs = green_function(UNIT_DISK, a, z)
            assert abs(lhs - rhs) < 1e-12

    def test_logarithmic_pole(self):
        a = 0.3 + 0.2j
        u = green_pole(UNIT_DISK, a)
        # u(z) - log|z - a| stays bounded (-> -log(1 - |a|^2)) near the pole.
        for eps in (1e-3, 1e-5, 1e-7):
            z = a + eps
            diff = u(z) - math.log(abs(z - a))
            assert abs(diff + math.log(1 - abs(a) ** 2)) < 1e-2

    def test_boundary_limit(self):
        u = green_pole(UNIT_DISK, 0.4)
        assert abs(u(0.999999)) < 1e-4
        v = log_abs(UNIT_BALL)
        assert abs(v([0.999999, 0.0])) < 1e-4

    def test_unsupported_poles(self):
        with pytest.raises(UnsupportedConfigurationError):
            green_function(UNIT_BALL, [0.1, 0.0], [0.5, 0.0])
        with pytest.raises(UnsupportedConfigurationError):
            green_function(BIDISK, [0.0, 0.1], [0.5, 0.0])
        assert green_function(UNIT_BALL, [0.0, 0.0], [0.5, 0.0]) == pytest.approx(
            math.log(0.5)
        )

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            green_pole(UNIT_DISK, 1.2)
        with pytest.raises(ParameterError):
            scaled(-1.0, log_abs(UNIT_DISK))
        with pytest.raises(ParameterError):
            truncated(0.5, log_abs(UNIT_DISK))


class TestPlurisubharmonicity:
    """Discrete complex Hessians are positive semidefinite (up to -1e-6)
    at random interior points away from poles and creases."""

    def _check(self, u: Exhaustion, pts, tol=-1e-6):
        vals = levi_min_eigenvalue(u.evaluate, pts, u.n)
        assert np.min(vals) > tol, float(np.min(vals))

    # Fourth derivatives of log-type exhaustions grow like 1/d^4 toward
    # the pole, and the central-difference truncation error is O(h^2/d^4);
    # with h = 1e-4 the -1e-6 eigenvalue tolerance needs d >~ 0.4.
    POLE_MARGIN = 0.4

    def test_disk_kinds(self):
        rng = np.random.default_rng(11)
        pts = UNIT_DISK.sample_interior(rng, 1000, margin=0.05)
        self._check(green_pole(UNIT_DISK, 0.3), pts[np.abs(pts - 0.3) > self.POLE_MARGIN])
        self._check(log_abs(UNIT_DISK), pts[np.abs(pts) > self.POLE_MARGIN])

    def test_ball_kinds(self):
        rng = np.random.default_rng(12)
        pts = UNIT_BALL.sample_interior(rng, 1000, margin=0.05)
        radii = np.sqrt(np.sum(np.abs(pts) ** 2, axis=-1))
        away = pts[radii > self.POLE_MARGIN]
        self._check(log_abs(UNIT_BALL), away)
        self._check(scaled(0.5, log_abs(UNIT_BALL)), away)
        # Exact quadratic: the discrete Hessian is the identity everywhere.
        self._check(smooth_square(UNIT_BALL), pts)

    def test_bidisk_max(self):
        rng = np.random.default_rng(13)
        pts = BIDISK.sample_interior(rng, 2000, margin=0.05)
        mods = np.abs(pts)
        # max(log|z1|, log|z2|) is not smooth where the moduli tie; central
        # differences need a margin from that crease and from the axes.
        keep = (np.abs(mods[:, 0] - mods[:, 1]) > 1e-2) & (
            mods.min(axis=1) > self.POLE_MARGIN
        )
        self._check(log_max_abs(BIDISK), pts[keep])

    def test_truncated_kink(self):
        rng = np.random.default_rng(14)
        u = truncated(-1.0, log_abs(UNIT_DISK))
        pts = UNIT_DISK.sample_interior(rng, 1000, margin=0.05)
        keep = (np.abs(np.abs(pts) - math.exp(-1.0)) > 1e-2) & (
            np.abs(pts) > self.POLE_MARGIN
        )
        self._check(u, pts[keep])


class TestDomain:
    def test_contains(self):
        assert UNIT_DISK.contains(0.5)
        assert not UNIT_DISK.contains(1.5)
        assert UNIT_BALL.contains([0.5, 0.5])
        assert not UNIT_BALL.contains([0.8, 0.8])
        assert BIDISK.contains([0.9, 0.9])

    def test_boundary_dist(self):
        assert UNIT_BALL.boundary_dist([0.6, 0.0]) == pytest.approx(0.4)
        assert BIDISK.boundary_dist([0.2, 0.7]) == pytest.approx(0.3)

    def test_as_points_shape_guard(self):
        with pytest.raises(DomainMismatchError):
            as_points([0.1, 0.2, 0.3], 2)

    def test_config_roundtrip(self):
        u = truncated(-2.0, scaled(0.5, green_pole(UNIT_DISK, 0.3 + 0.1j)))
        v = Exhaustion.from_config(u.to_config())
        z = 0.44 + 0.21j
        assert v(z) == pytest.approx(u(z), abs=1e-15)
