"""Identity and inequality verifiers against two-sided closed-form oracles.

Frozen values used below (all derived by hand from the radial integrals):

* disk, u = log|z|, g = z, p = 2, r < 0:
      mu_{u,r}(|z|^2) = 2 pi e^{2r}, the pole atom contributes 0, and
      int_{|z|<e^r} (r - log|z|) 4 dA = 2 pi e^{2r}; both sides 2 pi / e
      at r = -1/2.
* ball, u = |z|^2 - 1, g = z1, p = 2:
      mu_{u,r}(|z1|^2) = 8 pi^2 (1+r)^3, interior term
      32 int |z1|^2 dV = 16 pi^2 (1+r)^3 / 3, and the wedge side
      16 int (r - u) dV = 8 pi^2 (1+r)^3 / 3.
* Littlewood-Paley on the disk, f = z^k, p = 2, alpha = -1:
      ||f||^2 = 2 pi and int (-log|w|) 4 dA over the unit disk = 2 pi.
* Littlewood-Paley weighted: ||z^k||^2_{2,alpha} =
      2 pi Gamma(alpha+1) / (2k+1)^{alpha+1}.
* ball, f = z1, alpha = -1: both sides 2 pi^2 with
      N(w) = pi (|w|^2 - 1 - 2 log|w|).
* change of variables, disk, F = z, v = |w|^p:
      p = 2 gives 2 pi e^{2r}; p = 1 gives 2 pi e^r.
* subordination, disk, f = z^2, phi = |w|^2:
      lhs = 2 pi e^{4r} <= rhs = 2 pi e^{2r}.
* log bound, ball, f = z1:
      N(w) = pi (|w|^2 - 1 - 2 log|w|) <= -4 pi^2 log|w|.
* mean value, disk, f = z^2, alpha = -1: N(w) = -log|w| is harmonic off
      the origin, so the area mean over D(0.5, 0.2) equals log 2.
* proper pushforward, phi = |w|^{2k}: both sides m 2 pi e^{2kr}.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurinorm import (
    DomainMismatchError,
    ParameterError,
    PreconditionError,
    UNIT_BALL,
    UNIT_DISK,
    green_pole,
    log_abs,
    parse_function,
    smooth_square,
)
from plurinorm.functions import HoloMap
from plurinorm.identities import (
    VERIFY_NAMES,
    format_reports,
    run_verify_suite,
    verify_change_of_variables,
    verify_lelong_jensen,
    verify_littlewood_paley,
    verify_log_bound,
    verify_mean_value,
    verify_proper_pushforward,
    verify_subordination,
)

TWO_PI = 2.0 * math.pi


def z_poly():
    return parse_function("z", 1)


class TestLelongJensen:
    def test_disk_closed_form(self):
        rep = verify_lelong_jensen(log_abs(UNIT_DISK), z_poly(), 2.0, -0.5)
        exact = TWO_PI * math.exp(-1.0)
        assert rep.lhs == pytest.approx(exact, rel=1e-8)
        assert rep.rhs == pytest.approx(exact, rel=1e-8)
        assert rep.rel_err < 1e-8
        assert rep.passed

    def test_constant_test_function(self):
        # |g|^p == 1: level mass cancels the Monge-Ampere mass and the
        # wedge side is identically zero, so the report switches to the
        # absolute-error criterion.
        one = parse_function("1", 1)
        rep = verify_lelong_jensen(log_abs(UNIT_DISK), one, 2.0, -0.7)
        assert abs(rep.lhs) < 1e-10
        assert abs(rep.rhs) < 1e-12
        assert rep.passed

    def test_ball_smooth_closed_form(self):
        g = parse_function("z1", 2)
        rep = verify_lelong_jensen(smooth_square(UNIT_BALL), g, 2.0, -0.5)
        exact = 8.0 * math.pi**2 * 0.5**3 / 3.0
        assert rep.lhs == pytest.approx(exact, rel=1e-5)
        assert rep.rhs == pytest.approx(exact, rel=1e-5)
        assert rep.passed

    def test_green_pole_transport(self):
        # Moebius transport of the pole: |g|^p = 1 on the boundary makes
        # mu_{u,r}(phi) -> 2 pi as r -> 0 regardless of the pole, but at
        # finite r both sides carry the transported geometry.
        rep = verify_lelong_jensen(green_pole(UNIT_DISK, 0.4), z_poly(),
                                   2.0, -0.8)
        assert rep.passed
        assert rep.rel_err < 1e-6

    def test_odd_power_improves_with_budget(self):
        # p = 3 has a |g|-type kink on the zero set of g, the one case
        # where the quadrature error is actually visible.
        g = parse_function("z1^2 + 0.3*z2", 2)
        r1 = verify_lelong_jensen(smooth_square(UNIT_BALL), g, 3.0, -0.4,
                                  budget=1)
        r2 = verify_lelong_jensen(smooth_square(UNIT_BALL), g, 3.0, -0.4,
                                  budget=2)
        assert r1.passed and r2.passed
        assert r2.rel_err <= r1.rel_err or r2.rel_err < 1e-9


class TestLittlewoodPaley:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_disk_monomials(self, k):
        f = parse_function(f"z^{k}", 1)
        rep = verify_littlewood_paley(f, log_abs(UNIT_DISK), 2.0, -1.0,
                                      tol=1e-6)
        assert rep.lhs == pytest.approx(TWO_PI, rel=1e-6)
        assert rep.rhs == pytest.approx(TWO_PI, rel=1e-6)
        assert rep.passed

    def test_weighted_disk(self):
        rep = verify_littlewood_paley(z_poly(), log_abs(UNIT_DISK), 2.0, 0.0)
        assert rep.lhs == pytest.approx(TWO_PI / 3.0, rel=1e-8)
        assert rep.rel_err < 1e-5
        rep2 = verify_littlewood_paley(parse_function("z^2", 1),
                                       log_abs(UNIT_DISK), 2.0, 1.0)
        assert rep2.lhs == pytest.approx(TWO_PI / 25.0, rel=1e-8)
        assert rep2.passed

    def test_ball_projection(self):
        f = parse_function("z1", 2)
        rep = verify_littlewood_paley(f, log_abs(UNIT_BALL), 2.0, -1.0)
        exact = 2.0 * math.pi**2
        assert rep.lhs == pytest.approx(exact, rel=1e-4)
        assert rep.rhs == pytest.approx(exact, rel=1e-3)
        assert rep.passed

    def test_constant_pins_normalization(self):
        # f == 1, p = 2, alpha = 0 forces both sides to (2 pi)^n exactly;
        # this is the check that fixes the constant convention.
        one1 = parse_function("1", 1)
        rep = verify_littlewood_paley(one1, green_pole(UNIT_DISK, 0.2),
                                      2.0, 0.0)
        assert rep.lhs == pytest.approx(TWO_PI, rel=1e-12)
        assert rep.rhs == pytest.approx(TWO_PI, rel=1e-12)
        one2 = parse_function("1", 2)
        rep2 = verify_littlewood_paley(one2, log_abs(UNIT_BALL), 2.0, 0.0)
        assert rep2.lhs == pytest.approx(TWO_PI**2, rel=1e-12)
        assert rep2.rhs == pytest.approx(TWO_PI**2, rel=1e-12)

    def test_green_pole_anchor(self):
        # |f| = 1 on the unit circle, so the norm side is 2 pi for every
        # pole; the counting side has to reproduce it through the
        # transported Green function.
        f = parse_function("z^2", 1)
        rep = verify_littlewood_paley(f, green_pole(UNIT_DISK, 0.4),
                                      2.0, -1.0)
        assert rep.lhs == pytest.approx(TWO_PI, rel=1e-5)
        assert rep.passed


class TestChangeOfVariables:
    def test_disk_identity_map(self):
        rep = verify_change_of_variables(z_poly(), log_abs(UNIT_DISK), -0.3)
        exact = TWO_PI * math.exp(-0.6)
        assert rep.lhs == pytest.approx(exact, rel=1e-8)
        assert rep.rhs == pytest.approx(exact, rel=1e-8)
        assert rep.passed

    def test_disk_p_one(self):
        rep = verify_change_of_variables(z_poly(), log_abs(UNIT_DISK), -0.3,
                                         p=1.0)
        exact = TWO_PI * math.exp(-0.3)
        assert rep.lhs == pytest.approx(exact, rel=1e-6)
        assert rep.rhs == pytest.approx(exact, rel=1e-6)
        assert rep.passed

    def test_constant_map(self):
        rep = verify_change_of_variables(parse_function("0.3", 1),
                                         log_abs(UNIT_DISK), -0.3)
        assert rep.lhs == 0.0
        assert rep.rhs == 0.0
        assert rep.passed

    def test_ball_projection(self):
        rep = verify_change_of_variables(parse_function("z1", 2),
                                         log_abs(UNIT_BALL), -0.2)
        assert rep.lhs > 0.0
        assert rep.rel_err < 1e-3
        assert rep.passed


class TestSubordination:
    def test_constant_map(self):
        f = parse_function("0.4", 1)
        rep = verify_subordination(f, 0.3, z_poly(), 2.0)
        assert rep.passed
        # lhs is exactly the full mass times phi(w0) at every level.
        for _, lhs, rhs in rep.details["grid"]:
            assert lhs == pytest.approx(TWO_PI * 0.16, rel=1e-12)
            assert lhs <= rhs * (1.0 + 1e-7)

    def test_disk_square_closed_forms(self):
        rep = verify_subordination(parse_function("z^2", 1), 0.0, z_poly(),
                                   2.0, r_grid=(-0.5,))
        (_, lhs, rhs), = rep.details["grid"]
        assert lhs == pytest.approx(TWO_PI * math.exp(-2.0), rel=1e-10)
        assert rhs == pytest.approx(TWO_PI * math.exp(-1.0), rel=1e-10)
        assert rep.passed

    def test_ball_average_map(self):
        f = HoloMap([parse_function("0.5*z1 + 0.5*z2", 2)], UNIT_BALL,
                    UNIT_DISK)
        rep = verify_subordination(f, np.zeros(2), z_poly(), 2.0)
        assert rep.passed
        assert len(rep.details["grid"]) == 4

    def test_image_escape_raises(self):
        with pytest.raises(DomainMismatchError):
            verify_subordination(parse_function("1.5*z", 1), 0.0,
                                 z_poly(), 2.0)


class TestLogBound:
    def test_disk_identity_closed_form(self):
        ws = np.array([0.5, 0.7j, -0.9, 0.99])
        rep = verify_log_bound(z_poly(), log_abs(UNIT_DISK), ws)
        assert rep.passed
        for (w, lhs, rhs) in rep.details["grid"]:
            assert lhs == pytest.approx(-math.log(abs(w)), rel=1e-12)
            assert rhs == pytest.approx(-TWO_PI * math.log(abs(w)), rel=1e-12)

    def test_ball_projection_closed_form(self):
        ws = np.array([0.5, 0.7, 0.9])
        rep = verify_log_bound(parse_function("z1", 2), log_abs(UNIT_BALL),
                               ws, resolution=128)
        assert rep.passed
        for (w, lhs, rhs) in rep.details["grid"]:
            t = abs(w)
            exact = math.pi * (t * t - 1.0 - 2.0 * math.log(t))
            assert lhs == pytest.approx(exact, rel=1e-3)
            assert rhs == pytest.approx(-TWO_PI**2 * math.log(t), rel=1e-12)

    def test_pole_image_is_trivial(self):
        # w = f(z0) makes both the counting value and the bound infinite.
        ws = np.array([0.0, 0.5])
        rep = verify_log_bound(z_poly(), log_abs(UNIT_DISK), ws)
        assert rep.passed
        assert rep.details["trivial_nodes"] == 1

    def test_rejects_external_targets(self):
        with pytest.raises(ParameterError):
            verify_log_bound(z_poly(), log_abs(UNIT_DISK), np.array([1.2]))


class TestMeanValue:
    def test_harmonic_equality(self):
        rep = verify_mean_value(parse_function("z^2", 1), log_abs(UNIT_DISK),
                                -1.0, 0.5, 0.2)
        assert rep.lhs == pytest.approx(math.log(2.0), rel=1e-12)
        assert rep.rhs == pytest.approx(math.log(2.0), rel=1e-8)
        assert rep.passed

    def test_subharmonic_strict(self):
        rep = verify_mean_value(z_poly(), log_abs(UNIT_DISK), 0.0, 0.4, 0.15)
        assert rep.passed
        assert rep.lhs < rep.rhs

    def test_radius_precondition(self):
        with pytest.raises(PreconditionError, match="0.5"):
            verify_mean_value(parse_function("z^2", 1), log_abs(UNIT_DISK),
                              -1.0, 0.5, 0.6)

    def test_full_support_rejected(self):
        with pytest.raises(PreconditionError):
            verify_mean_value(parse_function("z1", 2),
                              smooth_square(UNIT_BALL), -1.0, 0.5, 0.1)


class TestProperPushforward:
    def test_multiplicity_two_closed_form(self):
        rep = verify_proper_pushforward(2, lambda w: np.abs(w) ** 2, -0.4)
        exact = 4.0 * math.pi * math.exp(-0.8)
        assert rep.lhs == pytest.approx(exact, rel=1e-12)
        assert rep.rhs == pytest.approx(exact, rel=1e-12)
        assert rep.passed

    def test_identity_map(self):
        rep = verify_proper_pushforward(1, lambda w: np.abs(w) ** 2, -1.0)
        assert rep.rel_err < 1e-14

    def test_masses(self):
        rep = verify_proper_pushforward(3, lambda w: np.ones(np.shape(w)),
                                        -0.7)
        assert rep.lhs == pytest.approx(6.0 * math.pi, rel=1e-13)
        assert rep.passed

    @pytest.mark.parametrize("m", [0, -1, 2.5])
    def test_invalid_multiplicity(self, m):
        with pytest.raises(ParameterError):
            verify_proper_pushforward(m, lambda w: np.abs(w) ** 2, -0.4)

    @settings(deadline=None, max_examples=25)
    @given(
        m=st.integers(min_value=1, max_value=5),
        k=st.integers(min_value=0, max_value=3),
        r=st.floats(min_value=-2.0, max_value=-0.05),
    )
    def test_monomial_weights_exact(self, m, k, r):
        rep = verify_proper_pushforward(m, lambda w: np.abs(w) ** (2 * k), r)
        assert rep.rel_err < 1e-12
        assert rep.lhs == pytest.approx(m * TWO_PI * math.exp(2 * k * r),
                                        rel=1e-12)


class TestSuite:
    def test_all_default_reports_pass(self):
        reports = run_verify_suite()
        assert tuple(r.name for r in reports) == VERIFY_NAMES
        assert all(r.passed for r in reports)

    def test_equality_reports_tight_and_improving(self):
        # Equality-mode reports sit below 1e-3 by a margin at the default
        # budget; doubling the budget shrinks the error 4x unless it is
        # already at the double-precision floor.
        low = run_verify_suite(budget=1)
        high = run_verify_suite(budget=2)
        for r1, r2 in zip(low, high):
            if r1.mode != "equality":
                continue
            assert r1.rel_err < 1e-3
            assert r2.rel_err <= r1.rel_err / 4.0 or r2.rel_err <= 1e-9

    def test_single_name(self):
        reports = run_verify_suite(["littlewood-paley"])
        assert len(reports) == 1
        assert reports[0].name == "littlewood-paley"

    def test_unknown_name(self):
        with pytest.raises(ParameterError):
            run_verify_suite(["no-such-identity"])

    def test_threaded_run_matches_serial(self, monkeypatch):
        serial = run_verify_suite()
        monkeypatch.setenv("PLURINORM_THREADS", "4")
        threaded = run_verify_suite()
        for a, b in zip(serial, threaded):
            assert a.lhs == b.lhs and a.rhs == b.rhs and a.passed == b.passed


class TestReportPlumbing:
    def test_json_and_rows(self):
        rep = verify_proper_pushforward(2, lambda w: np.abs(w) ** 2, -0.4)
        d = rep.to_json_dict()
        for key in ("name", "mode", "lhs", "rhs", "abs_err", "rel_err",
                    "tol", "passed", "budget"):
            assert key in d
        row = rep.row()
        assert len(row) == len(rep.csv_header())

    def test_table_formatting(self):
        reports = run_verify_suite(["proper-pushforward"])
        text = format_reports(reports)
        assert "proper-pushforward" in text
        assert "PASS" in text
