r"""Two-sided numerical verification of the level-measure identities.

Every verifier in this module evaluates the two sides of one named
identity (or inequality) by *independent* quadrature routes and returns
an :class:`IdentityReport`.  Nothing is shared between the sides beyond
the exhaustion itself, so agreement is evidence that both the measure
layer and the counting layer implement the same conventions:

``lelong-jensen``
    mu_{u,r}(phi) - int_{B_u(r)} phi (dd^c u)^n
    = int_{B_u(r)} (r - u) dd^c phi wedge (dd^c u)^{n-1},
    with phi = |g|^p.  Left side: level quadrature plus the interior
    Monge-Ampere integral; right side: the wedge pairing.

``littlewood-paley``
    ||f||_{p,alpha}^p = (2 pi)^n sigma_alpha(-inf) |f(z0)|^p
    + int_C N_alpha(w) p^2 |w|^{p-2} dA(w).
    Left side: the radial norm quadrature; right side: fiber counting
    integrated over a polar w-grid with dyadic radial refinement toward
    w = 0 (the |w|^{p-2} factor is singular but integrable for p < 2).
    For the smooth square exhaustion the atom is replaced by the interior
    integral of sigma_alpha(u) |f|^p against (dd^c u)^n.

``change-of-variables``
    int_{B_u(r)} (r - u) dd^c(v o F) wedge (dd^c u)^{n-1}
    = int_C N(w, r) dd^c v  for v = |w|^p.
    The w-integral runs over the disk of radius max |F| on the level set
    {u = r}; the counting function vanishes beyond it, so the kink of
    N(., r) sits exactly on the outer quadrature boundary.

``subordination``
    mu_{u,r}(phi o f) <= (2 pi)^{n-1} mu_{v,r}(phi) for f mapping into
    the disk, u the Green exhaustion with pole z0 and v the disk Green
    exhaustion with pole f(z0), checked on a grid of levels.

``log-bound``
    N_u(w) <= -(2 pi)^n log |(w0 - w) / (1 - conj(w0) w)|, w0 = f(z0).
    Targets equal to w0 make both sides infinite and are recorded as
    trivially satisfied.

``mean-value``
    N_alpha(w0) <= area mean of N_alpha over D(w0, rho), valid while
    rho stays below the distance from w0 to the images of the poles of
    u (where N_alpha is infinite).

``proper-pushforward``
    m * mu_{v,r}(phi) = mu_{v*,r}(phi o f) for f(z) = z^m, v = log|z|,
    v* = m log|z|; both sides are circle quadratures, the right one on
    the circle |z| = e^{r/m}.

Equality reports compare relative error against the tolerance, except
when both sides are below 1e-10 in magnitude, where the criterion
switches to absolute error.  Inequality reports pass when every grid
point satisfies the stated bound with its slack.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .counting import batch_counting_level, batch_n_alpha, counting_for_map
from .errors import (
    EvaluationError,
    ParameterError,
    PreconditionError,
    UnsupportedConfigurationError,
)
from .functions import HoloMap, parse_function, shilov_sup
from .geometry import (
    Exhaustion,
    UNIT_BALL,
    UNIT_DISK,
    green_pole,
    log_abs,
    scaled,
    smooth_square,
)
from .measures import (
    DEFAULT_CIRCLE,
    DEFAULT_SPHERE,
    DEFAULT_TORUS,
    _gl,
    _is_atomic,
    interior_ma_integral,
    level_quadrature,
    pair_level,
    wedge_pairing,
)
from .spaces import bergman_norm
from .weights import sigma_alpha, sigma_alpha_full_mass

__all__ = [
    "IdentityReport",
    "VERIFY_NAMES",
    "format_reports",
    "run_verify_suite",
    "verify_change_of_variables",
    "verify_lelong_jensen",
    "verify_littlewood_paley",
    "verify_log_bound",
    "verify_mean_value",
    "verify_proper_pushforward",
    "verify_subordination",
]

# Both sides below this magnitude: compare absolutely, not relatively.
NEAR_ZERO = 1e-10
# Dyadic radial panels of the w-plane grid; the innermost panel reaches
# all the way to 0, so no mass is dropped.
W_PANELS = 18


@dataclass
class IdentityReport:
    """Outcome of one two-sided identity check."""

    name: str
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    tol: float
    passed: bool
    mode: str = "equality"
    budget: str = "x1"
    details: dict = field(default_factory=dict)

    @staticmethod
    def csv_header() -> tuple:
        return ("name", "mode", "lhs", "rhs", "abs_err", "rel_err", "tol",
                "passed", "budget")

    def row(self) -> tuple:
        return (self.name, self.mode, self.lhs, self.rhs, self.abs_err,
                self.rel_err, self.tol, self.passed, self.budget)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "tol": self.tol,
            "passed": self.passed,
            "budget": self.budget,
            "details": _jsonable(self.details),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        c = complex(x)
        return [c.real, c.imag]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def format_reports(reports) -> str:
    """Fixed-width table, one line per report."""
    head = (f"{'identity':<22} {'mode':<10} {'lhs':>14} {'rhs':>14} "
            f"{'rel_err':>10} {'abs_err':>10} {'tol':>8} status")
    lines = [head, "-" * len(head)]
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.name:<22} {r.mode:<10} {r.lhs:>14.6e} {r.rhs:>14.6e} "
            f"{r.rel_err:>10.2e} {r.abs_err:>10.2e} {r.tol:>8.1e} {status}"
        )
    return "\n".join(lines)


def _budget_str(budget: int) -> str:
    return f"x{budget}"


def _equality_report(name, lhs, rhs, tol, budget, details=None):
    lhs = float(lhs)
    rhs = float(rhs)
    abs_err = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel_err = abs_err / scale if scale > 0.0 else 0.0
    passed = (abs_err <= tol) if scale <= NEAR_ZERO else (rel_err <= tol)
    return IdentityReport(name, lhs, rhs, abs_err, rel_err, tol, passed,
                          "equality", _budget_str(budget), details or {})


def _inequality_report(name, rows, slack, budget, relative, details=None):
    """rows: (tag, lhs, rhs) with finite entries; pass iff the bound holds
    at every row, lhs <= rhs * (1 + slack) or lhs <= rhs + slack."""
    details = dict(details or {})
    details["grid"] = rows
    if not rows:
        return IdentityReport(name, 0.0, 0.0, 0.0, 0.0, slack, True,
                              "inequality", _budget_str(budget), details)
    margins = [lhs - rhs for _, lhs, rhs in rows]
    worst = int(np.argmax(margins))
    ok = True
    rel = 0.0
    for _, lhs, rhs in rows:
        ok = ok and (lhs <= rhs * (1.0 + slack) if relative
                     else lhs <= rhs + slack)
        if rhs != 0.0:
            rel = max(rel, (lhs - rhs) / abs(rhs))
    _, wl, wr = rows[worst]
    return IdentityReport(name, wl, wr, max(0.0, margins[worst]),
                          max(0.0, rel), slack, ok, "inequality",
                          _budget_str(budget), details)


# ----------------------------------------------------------------------
# Shared machinery
# ----------------------------------------------------------------------


def _level_resolution(u: Exhaustion, budget: int):
    if budget == 1:
        return None
    if u.n == 1:
        return DEFAULT_CIRCLE * budget
    return (DEFAULT_TORUS if u.kind == "log_max_abs" else DEFAULT_SPHERE) * budget


def _require_counting_support(u: Exhaustion) -> None:
    if u.n == 1 and u.kind in ("log_abs", "green_pole"):
        return
    if u.n == 2 and u.domain.kind == "ball" and u.kind in ("log_abs",
                                                           "smooth_square"):
        return
    raise UnsupportedConfigurationError(
        "counting-side verification needs log/Green exhaustions on the "
        f"disk or log / smooth-square on the ball, got {u.kind!r} on "
        f"{u.domain.kind!r}"
    )


def _scalar_map(f):
    if isinstance(f, HoloMap):
        if f.target.n != 1:
            raise ParameterError("verification needs a scalar-valued map")
        return f.components[0]
    return f


def _pole_point(u: Exhaustion):
    poles = u.poles
    if len(poles) == 0:
        raise ParameterError("the exhaustion has no pole")
    return poles[0] if u.n > 1 else complex(poles[0])


def _w_plane_grid(R: float, budget: int):
    """Polar quadrature of the disk |w| < R with dyadic radial panels.

    Returns flat (nodes, weights) with weights carrying the full area
    element; the panel edges accumulate at 0 so that |w|^{p-2}-type
    integrable singularities are resolved panel by panel.
    """
    n_rad = 8 * budget
    n_ang = 48 * budget
    x, gw = _gl(n_rad)
    theta = 2.0 * np.pi * np.arange(n_ang) / n_ang
    phase = np.exp(1j * theta)
    edges = [R * 2.0**-j for j in range(W_PANELS + 1)] + [0.0]
    nodes = []
    weights = []
    for hi, lo in zip(edges[:-1], edges[1:]):
        t = 0.5 * (hi - lo) * (x + 1.0) + lo
        dt = 0.5 * (hi - lo) * gw
        nodes.append((t[:, None] * phase[None, :]).ravel())
        w2 = (t * dt)[:, None] * (2.0 * np.pi / n_ang)
        weights.append(np.broadcast_to(w2, (n_rad, n_ang)).ravel().copy())
    return np.concatenate(nodes), np.concatenate(weights)


# ----------------------------------------------------------------------
# Verifiers
# ----------------------------------------------------------------------


def verify_lelong_jensen(u: Exhaustion, g, p: float, r: float,
                         tol: float = 1e-3, budget: int = 1,
                         resolution=None) -> IdentityReport:
    """Level measure minus interior term against the weighted wedge."""
    res = resolution if resolution is not None else _level_resolution(u, budget)

    def phi(z):
        return np.abs(np.asarray(g(z))) ** p

    mu = pair_level(level_quadrature(u, r, res), phi)
    inner = interior_ma_integral(u, phi, r=r,
                                 resolution=None if budget == 1 else 32 * budget)
    rhs = wedge_pairing(u, g, p, r,
                        weight=lambda t: r - np.asarray(t, dtype=float),
                        budget=budget)
    details = {"level_term": mu, "interior_term": inner}
    return _equality_report("lelong-jensen", mu - inner, rhs, tol, budget,
                            details)


def verify_littlewood_paley(f, u: Exhaustion, p: float, alpha: float,
                            tol: float = 1e-3, budget: int = 1,
                            resolution=None) -> IdentityReport:
    """Norm to the p-th power against atom plus counting integral."""
    _require_counting_support(u)
    comp = _scalar_map(f)
    norm = bergman_norm(comp, u, p, alpha, budget=budget,
                        resolution=_level_resolution(u, budget))
    lhs = norm.value**p

    if _is_atomic(u):
        z0 = _pole_point(u)
        first = ((2.0 * np.pi) ** u.n * sigma_alpha_full_mass(alpha)
                 * abs(complex(np.asarray(comp(z0)))) ** p)
    else:

        def phi(z):
            return np.abs(np.asarray(comp(z))) ** p

        first = interior_ma_integral(
            u, phi, weight=lambda t: np.asarray(sigma_alpha(t, alpha)),
            resolution=None if budget == 1 else 32 * budget,
        )

    R = shilov_sup(comp, u.domain)
    integral = 0.0
    n_infinite = 0
    if R > 0.0:
        nodes, weights = _w_plane_grid(R, budget)
        fiber_res = resolution if resolution is not None else (
            None if u.n == 1 else 96 * budget)
        vals = batch_n_alpha(comp, u, nodes, alpha, resolution=fiber_res)
        finite = np.isfinite(vals)
        n_infinite = int(len(vals) - finite.sum())
        with np.errstate(invalid="ignore"):
            dens = p * p * np.abs(nodes) ** (p - 2.0)
        integral = float(np.sum(np.where(finite, vals, 0.0) * dens * weights))
    details = {
        "first_term": first,
        "counting_integral": integral,
        "image_radius": R,
        "infinite_nodes": n_infinite,
        "norm_converged": norm.converged,
    }
    return _equality_report("littlewood-paley", lhs, first + integral, tol,
                            budget, details)


def verify_change_of_variables(F, u: Exhaustion, r: float, p: float = 2.0,
                               tol: float = 1e-3, budget: int = 1,
                               resolution=None) -> IdentityReport:
    """Weighted wedge of v o F against the counting integral, v = |w|^p."""
    _require_counting_support(u)
    comp = _scalar_map(F)
    lhs = wedge_pairing(u, comp, p, r,
                        weight=lambda t: r - np.asarray(t, dtype=float),
                        budget=budget)
    lq = level_quadrature(u, r, _level_resolution(u, budget))
    R = 0.0 if lq.is_empty else float(np.max(np.abs(comp(lq.nodes))))
    rhs = 0.0
    n_infinite = 0
    if R > 0.0:
        nodes, weights = _w_plane_grid(R, budget)
        fiber_res = resolution if resolution is not None else (
            None if u.n == 1 else 96 * budget)
        vals = batch_counting_level(comp, u, nodes, r, resolution=fiber_res)
        finite = np.isfinite(vals)
        n_infinite = int(len(vals) - finite.sum())
        with np.errstate(invalid="ignore"):
            dens = p * p * np.abs(nodes) ** (p - 2.0)
        rhs = float(np.sum(np.where(finite, vals, 0.0) * dens * weights))
    details = {"image_radius": R, "infinite_nodes": n_infinite}
    return _equality_report("change-of-variables", lhs, rhs, tol, budget,
                            details)


def verify_subordination(f, z0, g, p: float,
                         r_grid=(-2.0, -1.0, -0.5, -0.1),
                         slack: float = 1e-7, budget: int = 1,
                         resolution=None) -> IdentityReport:
    """mu_{u,r}(phi o f) against (2 pi)^{n-1} mu_{v,r}(phi), phi = |g|^p."""
    if isinstance(f, HoloMap):
        fmap = f
    else:
        source = UNIT_DISK if getattr(f, "nvars", 1) == 1 else UNIT_BALL
        fmap = HoloMap([f], source, UNIT_DISK)
    if fmap.target.kind != "disk":
        raise ParameterError("subordination needs a map into the unit disk")
    src = fmap.source
    u = green_pole(src, z0)
    w0 = complex(np.asarray(fmap(_pole_point(u))))
    v = green_pole(UNIT_DISK, w0)
    factor = (2.0 * np.pi) ** (src.n - 1)
    res = resolution if resolution is not None else _level_resolution(u, budget)

    rows = []
    for r in r_grid:
        lhs = pair_level(level_quadrature(u, float(r), res),
                         lambda z: np.abs(np.asarray(g(fmap(z)))) ** p)
        rhs = factor * pair_level(
            level_quadrature(v, float(r), resolution),
            lambda w: np.abs(np.asarray(g(w))) ** p)
        rows.append((float(r), lhs, rhs))
    return _inequality_report("subordination", rows, slack, budget,
                              relative=True, details={"pole_image": w0})


def verify_log_bound(f, u: Exhaustion, ws, slack: float = 1e-6,
                     budget: int = 1, resolution=None) -> IdentityReport:
    """N_u(w) against the negative log of the Moebius factor at f(pole)."""
    if u.kind not in ("log_abs", "green_pole") or (
            u.n == 2 and u.domain.kind != "ball"):
        raise UnsupportedConfigurationError(
            "the logarithmic bound is stated for Green exhaustions on the "
            "disk or the ball"
        )
    comp = _scalar_map(f)
    ws = np.asarray(ws, dtype=complex).ravel()
    if np.any(np.abs(ws) >= 1.0):
        raise ParameterError("targets must lie in the open unit disk")
    w0 = complex(np.asarray(comp(_pole_point(u))))
    fiber_res = resolution if resolution is not None else (
        None if u.n == 1 else 96 * budget)
    vals = batch_n_alpha(comp, u, ws, -1.0, resolution=fiber_res)
    with np.errstate(divide="ignore"):
        mob = np.abs((w0 - ws) / (1.0 - np.conj(w0) * ws))
        bound = -((2.0 * np.pi) ** u.n) * np.log(mob)

    rows = []
    trivial = 0
    broken = False
    for w, lhs, rhs in zip(ws, vals, bound):
        if not np.isfinite(lhs) or not np.isfinite(rhs):
            # Infinite counting happens only at w = f(pole), where the
            # bound is infinite as well; anything else is a failure.
            trivial += 1
            broken = broken or (np.isinf(lhs) and np.isfinite(rhs))
            continue
        rows.append((complex(w), float(lhs), float(rhs)))
    report = _inequality_report("log-bound", rows, slack, budget,
                                relative=False,
                                details={"pole_image": w0})
    report.details["trivial_nodes"] = trivial
    if broken:
        report.passed = False
    return report


def verify_mean_value(f, u: Exhaustion, alpha: float, w0, rho: float,
                      budget: int = 1, resolution=None) -> IdentityReport:
    """N_alpha at w0 against its area mean over D(w0, rho)."""
    if not _is_atomic(u):
        raise PreconditionError(
            "the Monge-Ampere measure of this exhaustion has "
            "full-dimensional support; the mean value inequality needs it "
            "concentrated at poles"
        )
    comp = _scalar_map(f)
    w0 = complex(w0)
    poles = u.poles
    pole_pts = poles if u.n > 1 else [complex(a) for a in poles]
    images = [complex(np.asarray(comp(a))) for a in pole_pts]
    dist = min(abs(w0 - v) for v in images)
    if not 0.0 < rho < dist:
        raise PreconditionError(
            f"rho = {rho} must lie in (0, {dist:.6g}), the distance from "
            "w0 to the images of the poles"
        )
    lhs = counting_for_map(comp, u, w0, alpha, resolution=resolution)

    def disk_mean(n_rad: int, n_ang: int) -> float:
        x, gw = _gl(n_rad)
        t = 0.5 * rho * (x + 1.0)
        dt = 0.5 * rho * gw
        theta = 2.0 * np.pi * np.arange(n_ang) / n_ang
        nodes = w0 + t[:, None] * np.exp(1j * theta)[None, :]
        vals = batch_n_alpha(comp, u, nodes.ravel(), alpha,
                             resolution=resolution)
        if not np.all(np.isfinite(vals)):
            raise EvaluationError(
                "counting is infinite inside the averaging disk"
            )
        vals = vals.reshape(n_rad, n_ang)
        ring = vals.sum(axis=1) * (2.0 * np.pi / n_ang)
        return float(np.sum(ring * t * dt) / (np.pi * rho * rho))

    mean = disk_mean(12 * budget, 24 * budget)
    rough = disk_mean(max(4, 6 * budget), max(8, 12 * budget))
    err = abs(mean - rough)
    slack = 2.0 * err / max(abs(mean), 1e-300)
    passed = lhs <= mean * (1.0 + slack) + 1e-12
    details = {
        "grid": [(w0, float(lhs), mean)],
        "mean_error": err,
        "distance": dist,
    }
    rel = max(0.0, (lhs - mean) / abs(mean)) if mean != 0.0 else 0.0
    return IdentityReport("mean-value", float(lhs), mean,
                          max(0.0, float(lhs) - mean), rel, slack, passed,
                          "inequality", _budget_str(budget), details)


def verify_proper_pushforward(m, phi, r: float, tol: float = 1e-10,
                              resolution=None) -> IdentityReport:
    """m-fold level mass of log|z| against the pullback along z -> z^m."""
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise ParameterError("multiplicity must be a positive integer")
    m = int(m)
    v = log_abs(UNIT_DISK)
    lhs = m * pair_level(level_quadrature(v, r, resolution), phi)
    vstar = scaled(float(m), v)
    rhs = pair_level(level_quadrature(vstar, r, resolution),
                     lambda z: phi(np.asarray(z) ** m))
    return _equality_report("proper-pushforward", lhs, rhs, tol, 1,
                            {"multiplicity": m})


# ----------------------------------------------------------------------
# Canonical suite
# ----------------------------------------------------------------------


def _suite_lelong_jensen(budget):
    return verify_lelong_jensen(smooth_square(UNIT_BALL),
                                parse_function("z1", 2), 2.0, -0.5,
                                budget=budget)


def _suite_littlewood_paley(budget):
    return verify_littlewood_paley(parse_function("z^2", 1),
                                   log_abs(UNIT_DISK), 2.0, -1.0,
                                   budget=budget)


def _suite_change_of_variables(budget):
    return verify_change_of_variables(parse_function("z", 1),
                                      log_abs(UNIT_DISK), -0.3,
                                      budget=budget)


def _suite_subordination(budget):
    return verify_subordination(parse_function("z^2", 1), 0.0,
                                parse_function("z", 1), 2.0, budget=budget)


def _suite_log_bound(budget):
    radii = np.array([0.5, 0.7, 0.9, 0.99])
    phases = np.exp(2j * np.pi * np.arange(8) / 8)
    ws = (radii[:, None] * phases[None, :]).ravel()
    return verify_log_bound(parse_function("z^2", 1), log_abs(UNIT_DISK),
                            ws, budget=budget)


def _suite_mean_value(budget):
    return verify_mean_value(parse_function("z^2", 1), log_abs(UNIT_DISK),
                             -1.0, 0.5, 0.2, budget=budget)


def _suite_proper_pushforward(budget):
    return verify_proper_pushforward(
        2, lambda w: np.abs(w) ** 2, -0.4,
        resolution=None if budget == 1 else DEFAULT_CIRCLE * budget)


_SUITE = {
    "lelong-jensen": _suite_lelong_jensen,
    "littlewood-paley": _suite_littlewood_paley,
    "change-of-variables": _suite_change_of_variables,
    "subordination": _suite_subordination,
    "log-bound": _suite_log_bound,
    "mean-value": _suite_mean_value,
    "proper-pushforward": _suite_proper_pushforward,
}

VERIFY_NAMES = tuple(_SUITE)


def run_verify_suite(names=None, budget: int = 1):
    """Run the canonical configuration of each named verifier.

    Reports come back in the requested order regardless of the thread
    count (PLURINORM_THREADS); each verifier is pure, so threading never
    changes values.
    """
    if names is None or names == "all":
        selected = list(VERIFY_NAMES)
    else:
        selected = list(names)
        for name in selected:
            if name not in _SUITE:
                known = ", ".join(VERIFY_NAMES)
                raise ParameterError(
                    f"unknown identity {name!r}; known names: {known}"
                )
    try:
        threads = int(os.environ.get("PLURINORM_THREADS", "1"))
    except ValueError:
        threads = 1
    if threads > 1 and len(selected) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda nm: _SUITE[nm](budget), selected))
    return [_SUITE[nm](budget) for nm in selected]
