r"""Boundedness and compactness diagnostics for composition operators.

For a holomorphic map F of a model domain into the unit disk, the pullback
f |-> f o F is controlled by how the counting function of F compares with
the weight profile of the target space: the operator is bounded when

    R(z) = N_{F,beta}(z) / gamma_alpha(log|z|)

stays bounded as |z| -> 1, and compact when R(z) -> 0.  Everything here
samples that ratio and reduces it to a small number of classification
labels, always alongside the raw tables.

Boundary sampling and classification.  `boundedness_diagnostic` evaluates
R on a grid of circles times rays and tracks the per-circle supremum as
the circles approach the boundary.  The labels are numerical artifacts
with fixed thresholds: the profile is *stable* when the last two suprema
agree within 10 percent (an absolute agreement of 1e-12 also counts, so
an identically zero profile is stable); the *fitted limit* extrapolates a
linear fit of the last three suprema against log(1 - |z|) down to a gap
of 1e-5, and a fitted limit below 5 percent of the peak reads as a
vanishing profile.  Order of the rules: an all-zero profile is
compact-consistent; a vanishing fitted limit is compact-consistent; a
stable profile is bounded-consistent; suprema growing by more than 10
percent over each of the last two steps are unbounded-consistent;
anything else is inconclusive.  Samples whose fiber is degenerate (the
target sits on a critical value through a pole) are excluded from the
suprema and reported in `excluded`.

Deficiency profile.  `deficiency_profile` reports

    delta(r) = sup { R(z) : log|z| > r },

computed by filtering one master sample set by the cut log|z| > r, so the
reported profile is nonincreasing in r by construction (the cut regions
are nested).

Necessity ratio.  For a test function f, a target w dominating f o F on a
compact sublevel set K = {u_1 <= window_level} forces the fiber
{f o F = w} away from K, and the ratio

    nu = |w|^p N_{u_1, f o F, beta}(w) / ||f||^p_{u_2, alpha}

is then finite and scale invariant (w, f) -> (c w, c f).  The window is
checked numerically: |f o F| is sampled on the level-set quadrature nodes
of u_1 (plus its poles), where the maximum modulus over K is attained,
and the target must exceed a supplied multiple a > 1 of that maximum.
`kernel_necessity` builds the standard peaked family
f = TestKernel(z_j, (alpha+2)/p) with the target w_j = f(z_j).

Composition norm.  `compfnorm_via_counting` checks, for the composition
f o F, the same two-route identity as the plain weighted norm: the norm
to the p-th power against the interior term plus the w-plane integral

    int N_{F,alpha}(w) p^2 |f(w)|^{p-2} |f'(w)|^2 dA(w),

where the counting function of F absorbs the change of variables.

Quadratic model sweep.  On the fiber {z1^2 + z2^2 = w} in the ball the
minimum of |z|^2 - 1 equals |w| - 1 (witness (sqrt(w) cos t,
sqrt(w) sin t)), so with delta = 1 - |w| and tau = r + delta the counting
measure opens like n(w, r) ~ tau^{1/2} and the weighted counting function
like N_beta(w) ~ delta^{beta + 5/2}.  `quadratic_sharpness_sweep` fits
both exponents from sampled fibers; n(w, r) is read off as a centered
difference of the spectrally accurate N(w, r) rather than a sharp
indicator count, which keeps the relative error flat in tau.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .counting import (
    DEFAULT_EPS,
    batch_n_alpha,
    counting_for_map,
    fiber_quadrature_2d,
)
from .errors import ParameterError, PreconditionError
from .functions import ComposedFunction, HoloMap, Polynomial, shilov_sup, TestKernel
from .geometry import Exhaustion, UNIT_BALL, smooth_square
from .identities import (
    IdentityReport,
    _equality_report,
    _jsonable,
    _level_resolution,
    _pole_point,
    _require_counting_support,
    _scalar_map,
    _w_plane_grid,
)
from .measures import _is_atomic, interior_ma_integral, level_quadrature
from .spaces import bergman_norm
from .weights import gamma_alpha, sigma_alpha, sigma_alpha_full_mass

__all__ = [
    "DeficiencyReport",
    "NecessityRatio",
    "SharpnessTable",
    "boundedness_diagnostic",
    "compfnorm_via_counting",
    "deficiency_profile",
    "kernel_necessity",
    "necessity_ratio",
    "quadratic_sharpness_sweep",
]

DEFAULT_RADII = (0.9, 0.99, 0.999, 0.9999)
DEFAULT_RAYS = 8
DEFAULT_LEVELS = (-1.5, -1.0, -0.6, -0.3, -0.15, -0.05)
PROFILE_SAMPLES = 24

# Classification thresholds; see the module docstring for the rules.
STABLE_FRACTION = 0.1
STABLE_ABS = 1e-12
COMPACT_FRACTION = 0.05
EXTRAPOLATION_GAP = 1e-5
ZERO_PROFILE = 1e-12
FIT_POINTS = 3

SWEEP_RADII = (0.9, 0.95, 0.975, 0.99)
SWEEP_FRACTIONS = (0.2, 0.3, 0.45, 0.675)
DIFF_STEP = 0.1


def _thread_count() -> int:
    try:
        return int(os.environ.get("PLURINORM_THREADS", "1"))
    except ValueError:
        return 1


# ----------------------------------------------------------------------
# Deficiency reports
# ----------------------------------------------------------------------


@dataclass
class DeficiencyReport:
    """Sampled counting-to-weight ratios with a classification label.

    `levels` holds circle radii (`level_kind == "radius"`) for the
    boundary diagnostic or exhaustion levels (`level_kind == "level"`)
    for the cut profile; `sups` is the per-level supremum of the ratio.
    `table` keeps every raw sample as (|z|, Re z, Im z, ratio).
    """

    alpha: float
    beta: float
    levels: np.ndarray
    level_kind: str
    sups: np.ndarray
    stabilized: bool
    fitted_limit: float
    peak: float
    classification: str
    excluded: int
    table: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "levels": [float(v) for v in self.levels],
            "level_kind": self.level_kind,
            "sups": [float(v) for v in self.sups],
            "stabilized": bool(self.stabilized),
            "fitted_limit": float(self.fitted_limit),
            "peak": float(self.peak),
            "classification": self.classification,
            "excluded": int(self.excluded),
            "table": _jsonable(self.table),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)

    def csv_rows(self) -> tuple:
        header = ["abs_z", "re", "im", "ratio"]
        rows = [
            [repr(float(abs_z)), repr(float(re)), repr(float(im)),
             repr(float(ratio))]
            for abs_z, re, im, ratio in self.table
        ]
        return header, rows

    def to_csv(self, path) -> None:
        header, rows = self.csv_rows()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)


def _classify(gaps, sups):
    """Label a supremum profile sampled at shrinking boundary gaps."""
    s = np.asarray(sups, dtype=float)
    g = np.asarray(gaps, dtype=float)
    finite = np.isfinite(s)
    peak = float(s[finite].max()) if finite.any() else 0.0
    if peak <= ZERO_PROFILE:
        return "compact-consistent", True, 0.0, peak
    if finite.sum() < 2:
        return "inconclusive", False, math.nan, peak
    y = s[finite]
    x = np.log(g[finite])
    k = min(FIT_POINTS, len(y))
    slope, intercept = np.polyfit(x[-k:], y[-k:], 1)
    fitted = float(intercept + slope * math.log(EXTRAPOLATION_GAP))
    last, prev = float(y[-1]), float(y[-2])
    stable = (abs(last - prev) <= STABLE_FRACTION * max(abs(last), abs(prev))
              or abs(last - prev) <= STABLE_ABS)
    growing = (len(y) >= 3
               and y[-1] > (1.0 + STABLE_FRACTION) * y[-2]
               and y[-2] > (1.0 + STABLE_FRACTION) * y[-3])
    if fitted <= COMPACT_FRACTION * peak:
        label = "compact-consistent"
    elif stable:
        label = "bounded-consistent"
    elif growing:
        label = "unbounded-consistent"
    else:
        label = "inconclusive"
    return label, stable, fitted, peak


def _ratio_samples(F, u, zs, alpha, beta, resolution, eps):
    """R(z) = N_beta(z)/gamma_alpha(log|z|) over flat targets zs."""
    vals = batch_n_alpha(F, u, zs, beta, resolution=resolution, eps=eps)
    gam = np.asarray(gamma_alpha(np.log(np.abs(zs)), alpha), dtype=float)
    with np.errstate(invalid="ignore"):
        ratios = np.asarray(vals, dtype=float) / gam
    return ratios


def boundedness_diagnostic(F, u: Exhaustion, alpha: float, beta: float,
                           radii=DEFAULT_RADII, rays: int = DEFAULT_RAYS,
                           resolution: int | None = None,
                           eps: float = DEFAULT_EPS) -> DeficiencyReport:
    """Track sup R(z) over circles |z| = radius approaching the boundary."""
    _require_counting_support(u)
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0 or np.any(radii <= 0.0) or np.any(radii >= 1.0):
        raise ParameterError("radii must lie in (0, 1)")
    if rays < 1:
        raise ParameterError("at least one ray is needed")
    angles = 2.0 * np.pi * np.arange(rays) / rays
    zs = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    ratios = _ratio_samples(F, u, zs, alpha, beta, resolution, eps).reshape(
        len(radii), rays
    )
    finite = np.isfinite(ratios)
    excluded = int(ratios.size - finite.sum())
    sups = np.where(
        finite.any(axis=1),
        np.max(np.where(finite, ratios, -np.inf), axis=1),
        np.nan,
    )
    label, stable, fitted, peak = _classify(1.0 - radii, sups)
    table = [
        (float(abs(z)), float(z.real), float(z.imag), float(ratio))
        for z, ratio in zip(zs, ratios.ravel())
    ]
    return DeficiencyReport(alpha, beta, radii, "radius", sups, stable,
                            fitted, peak, label, excluded, table)


def deficiency_profile(F, u: Exhaustion, alpha: float, beta: float,
                       r_grid=DEFAULT_LEVELS, rays: int = DEFAULT_RAYS,
                       samples: int = PROFILE_SAMPLES,
                       resolution: int | None = None,
                       eps: float = DEFAULT_EPS) -> DeficiencyReport:
    """delta(r) = sup of R over the cut region log|z| > r.

    One master sample set is filtered by each cut, so the profile is
    nonincreasing in r by construction.
    """
    _require_counting_support(u)
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size == 0 or np.any(r_grid >= 0.0):
        raise ParameterError("cut levels must be negative")
    if rays < 1:
        raise ParameterError("at least one ray is needed")
    gap_hi = (1.0 - math.exp(float(r_grid.min()))) * 0.98
    gap_lo = min(1e-4, 0.5 * (1.0 - math.exp(float(r_grid.max()))))
    master = 1.0 - np.geomspace(gap_hi, gap_lo, samples)
    angles = 2.0 * np.pi * np.arange(rays) / rays
    zs = (master[:, None] * np.exp(1j * angles)[None, :]).ravel()
    ratios = _ratio_samples(F, u, zs, alpha, beta, resolution, eps)
    finite = np.isfinite(ratios)
    excluded = int(ratios.size - finite.sum())
    logs = np.repeat(np.log(master), rays)
    sups = np.empty(len(r_grid))
    for i, r in enumerate(r_grid):
        sel = finite & (logs > r)
        sups[i] = float(ratios[sel].max()) if sel.any() else 0.0
    label, stable, fitted, peak = _classify(1.0 - np.exp(r_grid), sups)
    table = [
        (float(abs(z)), float(z.real), float(z.imag), float(ratio))
        for z, ratio in zip(zs, ratios)
    ]
    return DeficiencyReport(alpha, beta, r_grid, "level", sups, stable,
                            fitted, peak, label, excluded, table)


# ----------------------------------------------------------------------
# Necessity ratio
# ----------------------------------------------------------------------


@dataclass
class NecessityRatio:
    """nu = |w|^p N_{u1, f o F, beta}(w) / ||f||^p_{u2, alpha}."""

    w: complex
    ratio: float
    counting: float
    norm: float
    p: float
    alpha: float
    beta: float
    window_bound: float
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "w": [self.w.real, self.w.imag],
            "ratio": self.ratio,
            "counting": self.counting,
            "norm": self.norm,
            "p": self.p,
            "alpha": self.alpha,
            "beta": self.beta,
            "window_bound": self.window_bound,
            "details": _jsonable(self.details),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


def _compose_scalar(f, F):
    """f o F in a form the counting layer accepts."""
    comp = _scalar_map(F)
    if isinstance(f, Polynomial) and isinstance(comp, Polynomial):
        return f.compose(comp)
    if isinstance(f, TestKernel) and comp == Polynomial.variable(0, 1):
        return f
    raise ParameterError(
        "the counting side needs a polynomial composition or a kernel "
        "under the identity map"
    )


def necessity_ratio(F, f, u1: Exhaustion, u2: Exhaustion, p: float,
                    alpha: float, beta: float, w, a: float = 2.0,
                    window_level: float = -1.0,
                    resolution: int | None = None) -> NecessityRatio:
    """Counting mass of {f o F = w} against the norm of f.

    The target must clear the window |w| > a max_K |f o F| over the
    compact sublevel set K = {u1 <= window_level}; the maximum is taken
    on the level-set quadrature nodes (where the maximum modulus over K
    lives) together with the poles of u1.
    """
    if a <= 1.0:
        raise ParameterError("window factor a must exceed 1")
    if window_level >= 0.0:
        raise ParameterError("window level must be negative")
    w = complex(w)
    composed = _compose_scalar(f, F)
    quad = level_quadrature(u1, window_level)
    mods = [np.abs(np.asarray(composed(quad.nodes))).ravel()] if not quad.is_empty else []
    poles = u1.poles
    if len(poles):
        mods.append(np.abs(np.atleast_1d(np.asarray(composed(np.asarray(poles))))))
    m_k = float(np.max(np.concatenate(mods))) if mods else 0.0
    bound = a * m_k
    if abs(w) <= bound:
        raise PreconditionError(
            f"target modulus {abs(w):.6g} must exceed a * max_K|f o F| = "
            f"{bound:.6g} (max_K|f o F| = {m_k:.6g})"
        )
    counting = counting_for_map(composed, u1, w, beta, resolution=resolution)
    norm = bergman_norm(f, u2, p, alpha)
    ratio = abs(w) ** p * counting / norm.value**p
    details = {
        "window_level": window_level,
        "window_factor": a,
        "norm_converged": norm.converged,
    }
    return NecessityRatio(w, float(ratio), float(counting), norm.value,
                          p, alpha, beta, bound, details)


def kernel_necessity(F, u1: Exhaustion, u2: Exhaustion, p: float,
                     alpha: float, beta: float, z_j, a: float = 2.0,
                     window_level: float = -1.0,
                     resolution: int | None = None) -> NecessityRatio:
    """Necessity ratio of the peaked kernel at z_j at its peak value."""
    z_j = complex(z_j)
    s = (alpha + 2.0) / p
    f = TestKernel(z_j, s)
    w = (1.0 - abs(z_j) ** 2) ** (-s)
    return necessity_ratio(F, f, u1, u2, p, alpha, beta, w, a=a,
                           window_level=window_level, resolution=resolution)


# ----------------------------------------------------------------------
# Composition norm via the counting function
# ----------------------------------------------------------------------


def compfnorm_via_counting(F, f, u: Exhaustion, p: float, alpha: float,
                           tol: float = 1e-3, budget: int = 1,
                           resolution: int | None = None) -> IdentityReport:
    """Two routes to ||f o F||^p: the direct norm against the interior
    term plus the counting-weighted area integral over the w-plane."""
    _require_counting_support(u)
    comp = _scalar_map(F)
    if isinstance(f, Polynomial) and isinstance(comp, Polynomial):
        composite = f.compose(comp)
    elif isinstance(F, HoloMap):
        composite = ComposedFunction(f, F)
    else:
        composite = lambda z: np.asarray(f(np.asarray(comp(z))))  # noqa: E731
    norm = bergman_norm(composite, u, p, alpha, budget=budget,
                        resolution=_level_resolution(u, budget))
    lhs = norm.value**p

    if _is_atomic(u):
        z0 = _pole_point(u)
        first = ((2.0 * np.pi) ** u.n * sigma_alpha_full_mass(alpha)
                 * abs(complex(np.asarray(f(np.asarray(comp(z0)))))) ** p)
    else:

        def phi(z):
            return np.abs(np.asarray(f(np.asarray(comp(z))))) ** p

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
        fp = np.asarray(f(nodes))
        fprime = np.asarray(f.partial(0)(nodes))
        with np.errstate(invalid="ignore", divide="ignore"):
            dens = p * p * np.abs(fp) ** (p - 2.0) * np.abs(fprime) ** 2
        dens = np.where(np.isfinite(dens), dens, 0.0)
        integral = float(np.sum(np.where(finite, vals, 0.0) * dens * weights))
    details = {
        "first_term": first,
        "counting_integral": integral,
        "image_radius": R,
        "infinite_nodes": n_infinite,
        "norm_converged": norm.converged,
    }
    return _equality_report("composition-norm", lhs, first + integral, tol,
                            budget, details)


# ----------------------------------------------------------------------
# Quadratic model sweep
# ----------------------------------------------------------------------


@dataclass
class SharpnessTable:
    """Sampled openings of the quadratic model fiber and fitted exponents.

    `n_rows` holds (|w|, delta, tau, r, n) and `N_rows` holds
    (beta, |w|, delta, N).  Half-widths come from leave-one-out refits:
    over the radii for the n exponent (each radius is fitted in tau on
    its own, then averaged) and over the radii for each N exponent.
    """

    radii: tuple
    fractions: tuple
    betas: tuple
    n_rows: list
    N_rows: list
    n_exponent: float
    n_half_width: float
    N_exponents: dict
    resolution: int
    runtime: float

    def to_json_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "fractions": list(self.fractions),
            "betas": list(self.betas),
            "n_rows": _jsonable(self.n_rows),
            "N_rows": _jsonable(self.N_rows),
            "n_exponent": self.n_exponent,
            "n_half_width": self.n_half_width,
            "N_exponents": {repr(b): list(v) for b, v in
                            self.N_exponents.items()},
            "resolution": self.resolution,
            "runtime": self.runtime,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)

    def csv_rows(self) -> tuple:
        header = ["quantity", "beta", "abs_w", "delta", "tau", "r", "value",
                  "half_width"]
        rows = []
        for abs_w, delta, tau, r, n in self.n_rows:
            rows.append(["n", "", repr(abs_w), repr(delta), repr(tau),
                         repr(r), repr(n), ""])
        for beta, abs_w, delta, big_n in self.N_rows:
            rows.append(["N", repr(beta), repr(abs_w), repr(delta),
                         "", "", repr(big_n), ""])
        rows.append(["n-exponent", "", "", "", "", "",
                     repr(self.n_exponent), repr(self.n_half_width)])
        for beta, (exp, half) in self.N_exponents.items():
            rows.append(["N-exponent", repr(beta), "", "", "", "",
                         repr(exp), repr(half)])
        return header, rows

    def to_csv(self, path) -> None:
        header, rows = self.csv_rows()
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)


def _loo_half_width(values) -> float:
    """Half the spread of leave-one-out means."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return 0.0
    total = values.sum()
    loo = (total - values) / (len(values) - 1)
    return float(0.5 * (loo.max() - loo.min()))


def quadratic_sharpness_sweep(betas=(-1.0, 0.0), radii=SWEEP_RADII,
                              fractions=SWEEP_FRACTIONS,
                              resolution: int = 512,
                              eps: float = DEFAULT_EPS) -> SharpnessTable:
    """Fit the fiber openings of F = z1^2 + z2^2 in the smooth ball.

    For each target modulus the levels are r = tau - delta with
    tau = delta * fraction, so every fiber is probed at the same relative
    depths; grid points run in parallel when PLURINORM_THREADS is set.
    """
    radii = tuple(float(v) for v in radii)
    fractions = np.asarray(fractions, dtype=float)
    betas = tuple(float(b) for b in betas)
    if not betas:
        raise ParameterError("at least one weight exponent is needed")
    if min(radii) <= 0.0 or max(radii) >= 1.0:
        raise ParameterError("target moduli must lie in (0, 1)")
    if np.any(fractions <= DIFF_STEP) or np.any(
            fractions * (1.0 + DIFF_STEP) >= 1.0):
        raise ParameterError(
            "relative depths must leave room for the centered difference, "
            f"{DIFF_STEP} < fraction < {1.0 / (1.0 + DIFF_STEP):.4g}"
        )
    start = time.perf_counter()
    F = Polynomial(2, {(2, 0): 1.0 + 0.0j, (0, 2): 1.0 + 0.0j})
    u = smooth_square(UNIT_BALL)

    jobs = []
    for beta in betas:
        for abs_w in radii:
            delta = 1.0 - abs_w
            taus = delta * fractions
            steps = DIFF_STEP * taus
            # n(w, r) is differenced from N(w, r +- h); only the first
            # weight pass carries the level grid, the others reuse it.
            r_grid = (np.concatenate([taus - steps - delta,
                                      taus + steps - delta])
                      if beta == betas[0] else None)
            jobs.append((beta, abs_w, r_grid))

    def run(job):
        beta, abs_w, r_grid = job
        return fiber_quadrature_2d(F, u, complex(abs_w), alpha=beta,
                                   r_grid=r_grid, resolution=resolution,
                                   eps=eps)

    threads = _thread_count()
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(run, jobs))
    else:
        samples = [run(job) for job in jobs]

    n_rows = []
    N_rows = []
    slopes = []
    by_beta = {beta: [] for beta in betas}
    for (beta, abs_w, r_grid), sample in zip(jobs, samples):
        delta = 1.0 - abs_w
        by_beta[beta].append(float(sample.N_alpha))
        if r_grid is None:
            continue
        taus = delta * fractions
        steps = DIFF_STEP * taus
        m = len(fractions)
        n_vals = (sample.N_of_r[m:] - sample.N_of_r[:m]) / (2.0 * steps)
        for tau, n in zip(taus, n_vals):
            n_rows.append((abs_w, delta, float(tau), float(tau - delta),
                           float(n)))
        slopes.append(float(np.polyfit(np.log(taus), np.log(n_vals), 1)[0]))

    n_exponent = float(np.mean(slopes))
    n_half_width = _loo_half_width(slopes)

    deltas = np.array([1.0 - abs_w for abs_w in radii])
    N_exponents = {}
    for beta in betas:
        vals = np.asarray(by_beta[beta], dtype=float)
        for abs_w, delta, big_n in zip(radii, deltas, vals):
            N_rows.append((beta, abs_w, float(delta), float(big_n)))
        exp = float(np.polyfit(np.log(deltas), np.log(vals), 1)[0])
        if len(radii) >= 3:
            loo = [
                float(np.polyfit(np.log(np.delete(deltas, i)),
                                 np.log(np.delete(vals, i)), 1)[0])
                for i in range(len(radii))
            ]
            half = float(0.5 * (max(loo) - min(loo)))
        else:
            half = 0.0
        N_exponents[beta] = (exp, half)

    return SharpnessTable(radii, tuple(float(v) for v in fractions), betas,
                          n_rows, N_rows, n_exponent, n_half_width,
                          N_exponents, resolution,
                          time.perf_counter() - start)
