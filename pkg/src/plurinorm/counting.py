"""Counting functions of analytic maps against an exhaustion.

One variable
------------
For f holomorphic on the disk and a target value w, the fiber
f^{-1}(w) = {z_i} (with multiplicities m_i) is extracted from the
companion matrix of f - w and polished by Newton steps.  The counting
data then reduces to finite sums over u_i = u(z_i):

    n(w, r)   = sum of m_i over u_i < r,
    N(w, r)   = sum of m_i * (r - u_i)_+,
    N_alpha(w) = sum of m_i * gamma_alpha(u_i).

Two variables
-------------
For a two-variable polynomial F on the ball, the fiber {F = w} is a
curve.  Writing the solved variable as an algebraic function g_b(zeta)
of the other one (branch index b), the fiber carries the measure
Delta(U_b) dA(zeta) where U_b(zeta) = u(g_b(zeta), zeta), and

    n(w, r)    = sum_b integral over {U_b < r} of Delta U_b dA,
    N_alpha(w) = sum_b integral of gamma_alpha(U_b) Delta U_b dA.

With g' = -F_zeta / F_z on a branch the Laplacians are explicit:

    u = log|z|:      Delta U = 2 (S |h'|^2 - |<h', conj h>|^2) / S^2,
                     h = (g, zeta), S = |g|^2 + |zeta|^2,
    u = |z|^2 - 1:   Delta U = 4 (|g'|^2 + 1).

Branches collide where the discriminant of F - w in the solved variable
vanishes; |g'|^2 blows up like 1/|zeta - b| there, which is integrable
but ruins a fixed grid.  The integral is therefore split by a smooth
partition of unity: a quintic ramp s(d/eps) (0 inside eps/2, 1 outside
eps) multiplies the main-grid integrand, which keeps it smooth, and
each branch point carries a local polar patch with t^2 radial
clustering that integrates the complementary bump, including the
singular factor.  The bump weights telescope exactly, so overlapping
patches never double-count:

    1 = prod_b s_b + sum_b (1 - s_b) * prod_{b' < b} s_{b'}.

A target w hit at a pole of u (or by a constant map) makes every level
integral infinite; that configuration raises InfiniteCountingError
rather than returning a number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import (
    DomainMismatchError,
    InfiniteCountingError,
    ParameterError,
    UnsupportedConfigurationError,
)
from .functions import HoloMap, Polynomial, TestKernel
from .geometry import Exhaustion
from .weights import gamma_alpha

BOUNDARY_TOL = 1e-10
INFINITE_TOL = 1e-12
MAX_FIBER_DEGREE = 4
PATCH_RADIAL = 32
PATCH_ANGULAR = 64
# The batched path serves looser tolerances than the scalar one, so its
# branch patches carry a lighter template.
BATCH_PATCH_RADIAL = 16
BATCH_PATCH_ANGULAR = 32
DEFAULT_EPS = 0.1


@dataclass
class FiberPoint:
    """One point of a zero-dimensional fiber."""

    location: complex
    multiplicity: int
    u_value: float


@dataclass
class CountingSample:
    """Counting data of one target value w."""

    w: complex
    method: str  # "roots-1d" or "fiber-2d"
    alpha: float | None = None
    N_alpha: float | None = None
    r_grid: np.ndarray | None = None
    n_of_r: np.ndarray | None = None
    N_of_r: np.ndarray | None = None
    fiber: list = field(default_factory=list)
    error_estimate: float = 0.0
    flags: dict = field(default_factory=dict)

    def rows(self) -> list:
        """(w_re, w_im, r, n, N) tuples, one per grid level."""
        if self.r_grid is None:
            raise ParameterError("counting sample was computed without a level grid")
        return [
            (self.w.real, self.w.imag, float(r), float(n), float(N))
            for r, n, N in zip(self.r_grid, self.n_of_r, self.N_of_r)
        ]

    def to_json_dict(self) -> dict:
        flags = {}
        for k, v in self.flags.items():
            if isinstance(v, list) and v and isinstance(v[0], complex):
                flags[k] = [[z.real, z.imag] for z in v]
            else:
                flags[k] = v
        return {
            "w": [self.w.real, self.w.imag],
            "method": self.method,
            "alpha": self.alpha,
            "N_alpha": None if self.N_alpha is None else float(self.N_alpha),
            "r": None if self.r_grid is None else [float(r) for r in self.r_grid],
            "n": None if self.n_of_r is None else [float(v) for v in self.n_of_r],
            "N": None if self.N_of_r is None else [float(v) for v in self.N_of_r],
            "error_estimate": float(self.error_estimate),
            "flags": flags,
        }


# ----------------------------------------------------------------------
# One-variable fibers
# ----------------------------------------------------------------------


def _horner(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.broadcast_to(coeffs[-1], x.shape).astype(complex)
    for c in coeffs[-2::-1]:
        out = out * x + c
    return out


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray, steps: int = 2) -> np.ndarray:
    deriv = coeffs[1:] * np.arange(1, len(coeffs))
    for _ in range(steps):
        p = _horner(coeffs, roots)
        dp = _horner(deriv, roots)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = roots - np.where(np.abs(dp) > 0, p / dp, 0.0)
            better = np.abs(_horner(coeffs, cand)) < np.abs(p)
        roots = np.where(better & np.isfinite(cand), cand, roots)
    return roots


def _cluster(raw: np.ndarray, cluster_tol: float):
    """Greedy merge of a root list into (representatives, multiplicities)."""
    reps: list[complex] = []
    sums: list[complex] = []
    counts: list[int] = []
    for z in raw[np.lexsort((raw.imag, raw.real))]:
        z = complex(z)
        hit = False
        for i, rep in enumerate(reps):
            if abs(z - rep) <= cluster_tol * max(1.0, abs(rep)):
                sums[i] += z
                counts[i] += 1
                reps[i] = sums[i] / counts[i]
                hit = True
                break
        if not hit:
            reps.append(z)
            sums.append(z)
            counts.append(1)
    return reps, counts


def _kernel_candidates(kernel: TestKernel, w: complex) -> list[complex]:
    """All solutions of kernel(z) = w in the plane (closed form)."""
    m = 2.0 * kernel.s
    if abs(m - round(m)) > 1e-9:
        raise UnsupportedConfigurationError(
            "kernel preimages need an integer power 2s"
        )
    m = int(round(m))
    if w == 0:
        return []
    if kernel.z0 == 0:
        return []  # constant kernel; the w == 1 case is a degenerate fiber
    a = (1.0 - abs(kernel.z0) ** 2) ** kernel.s / w
    root = a ** (1.0 / m)
    out = []
    for j in range(m):
        rho = root * np.exp(2j * np.pi * j / m)
        out.append(complex((1.0 - rho) / np.conj(kernel.z0)))
    return out


def kernel_preimages(kernel: TestKernel, w) -> list[complex]:
    """Interior preimages of w under a test kernel, each simple."""
    w = complex(w)
    return [z for z in _kernel_candidates(kernel, w) if abs(z) < 1.0 - BOUNDARY_TOL]


def roots_1d(f, w, cluster_tol: float = 1e-6):
    """Interior fiber of a one-variable function over w.

    Returns (roots, multiplicities, flags); roots on the unit circle
    (within 1e-10) are dropped and reported in flags["boundary_roots"].
    """
    w = complex(w)
    if isinstance(f, TestKernel):
        cand = np.asarray(_kernel_candidates(f, w), dtype=complex)
        reps, counts = list(cand), [1] * len(cand)
    elif isinstance(f, Polynomial):
        if f.nvars != 1:
            raise ParameterError("roots_1d needs a one-variable function")
        coeffs = (f - w).coeffs_1d()
        scale = np.max(np.abs(coeffs)) if len(coeffs) else 0.0
        if scale == 0.0:
            raise ParameterError("the fiber of a constant over its value "
                                 "is the whole domain")
        deg = int(np.max(np.nonzero(np.abs(coeffs) > 1e-14 * scale)[0]))
        coeffs = coeffs[: deg + 1]
        if deg == 0:
            reps, counts = [], []
        else:
            raw = npoly.polyroots(coeffs)
            raw = _polish_roots(coeffs, np.asarray(raw, dtype=complex))
            reps, counts = _cluster(raw, cluster_tol)
    else:
        raise ParameterError("root extraction supports polynomials and kernels")

    roots: list[complex] = []
    mults: list[int] = []
    boundary = 0
    for z, m in zip(reps, counts):
        if abs(abs(z) - 1.0) <= BOUNDARY_TOL:
            boundary += m
        elif abs(z) < 1.0:
            roots.append(z)
            mults.append(m)
    return roots, mults, {"boundary_roots": boundary}


def _check_infinite(f, u: Exhaustion, w: complex) -> None:
    """Raise when the level integrals of the w-fiber diverge."""
    tol = INFINITE_TOL * max(1.0, abs(w))
    poles = u.poles
    if len(poles):
        vals = np.atleast_1d(np.asarray(f(poles), dtype=complex))
        bad = np.abs(vals - w) <= tol
        if np.any(bad):
            pole = poles[int(np.argmax(bad))]
            raise InfiniteCountingError(
                f"w = {w} is the value at an exhaustion pole", w=w, pole=pole
            )
    if isinstance(f, Polynomial) and f.total_degree == 0:
        c = complex(f.terms.get((0,) * f.nvars, 0.0))
        if abs(c - w) <= tol:
            raise InfiniteCountingError(
                f"constant map: the fiber over w = {w} is the whole domain",
                w=w,
            )


def counting_1d(f, u: Exhaustion, w, alpha=None, r_grid=None,
                cluster_tol: float = 1e-6) -> CountingSample:
    """Counting data of a one-variable fiber, exact up to root extraction."""
    w = complex(w)
    if u.n != 1:
        raise DomainMismatchError("one-variable counting needs a disk exhaustion")
    if getattr(f, "nvars", 1) != 1:
        raise DomainMismatchError("function and exhaustion variable counts differ")
    _check_infinite(f, u, w)
    roots, mults, flags = roots_1d(f, w, cluster_tol=cluster_tol)

    uv = np.asarray(u.evaluate(np.asarray(roots, dtype=complex)), dtype=float) \
        if roots else np.zeros(0)
    m = np.asarray(mults, dtype=float)
    order = np.argsort(uv) if len(uv) else np.zeros(0, dtype=int)
    fiber = [
        FiberPoint(complex(roots[i]), int(mults[i]), float(uv[i])) for i in order
    ]

    sample = CountingSample(w=w, method="roots-1d", alpha=alpha, fiber=fiber,
                            flags=flags)
    total = float(m.sum()) if len(m) else 0.0
    if alpha is not None:
        sample.N_alpha = float(np.sum(m * gamma_alpha(uv, alpha))) if len(uv) else 0.0
    if r_grid is not None:
        r = np.asarray(r_grid, dtype=float)
        if len(uv):
            sample.n_of_r = ((uv[None, :] < r[:, None]) * m).sum(axis=1)
            sample.N_of_r = (np.maximum(r[:, None] - uv[None, :], 0.0) * m).sum(axis=1)
        else:
            sample.n_of_r = np.zeros_like(r)
            sample.N_of_r = np.zeros_like(r)
        sample.r_grid = r
    sample.error_estimate = 1e-12 * (1.0 + total)
    return sample


# ----------------------------------------------------------------------
# Two-variable fibers (ball)
# ----------------------------------------------------------------------


@lru_cache(maxsize=8)
def _polar_grid(n_rad: int, n_ang: int):
    """Gauss-Legendre x trapezoid grid of the unit disk; dA weights."""
    x, gw = np.polynomial.legendre.leggauss(n_rad)
    rho = 0.5 * (x + 1.0)
    wrad = 0.5 * gw
    th = 2.0 * np.pi * np.arange(n_ang) / n_ang
    zeta = (rho[:, None] * np.exp(1j * th)[None, :]).ravel()
    area = ((rho * wrad)[:, None] * np.full(n_ang, 2.0 * np.pi / n_ang)).ravel()
    zeta.setflags(write=False)
    area.setflags(write=False)
    return zeta, area


@lru_cache(maxsize=4)
def _patch_template(n_rad: int, n_ang: int):
    """Unit-radius polar patch with t^2 radial clustering; dA weights."""
    x, gw = np.polynomial.legendre.leggauss(n_rad)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * gw
    rho = t**2
    wrho = 2.0 * t * wt  # d(rho) = 2 t dt
    th = 2.0 * np.pi * np.arange(n_ang) / n_ang
    local = (rho[:, None] * np.exp(1j * th)[None, :]).ravel()
    area = ((rho * wrho)[:, None] * np.full(n_ang, 2.0 * np.pi / n_ang)).ravel()
    local.setflags(write=False)
    area.setflags(write=False)
    return local, area


def _roots_batch(cvals: np.ndarray) -> np.ndarray:
    """Roots of many polynomials sharing a degree.

    cvals has shape (d+1, m) with ascending coefficient samples; the
    result has shape (d, m) with nan where a root degenerates.
    """
    d = cvals.shape[0] - 1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if d == 1:
            c0, c1 = cvals
            out = np.where(np.abs(c1) > 0, -c0 / np.where(c1 == 0, 1, c1), np.nan)
            return out[None, :]
        if d == 2:
            c0, c1, c2 = cvals
            disc = c1 * c1 - 4.0 * c2 * c0
            sq = np.sqrt(disc)
            sq = np.where(np.real(np.conj(c1) * sq) >= 0.0, sq, -sq)
            q = -0.5 * (c1 + sq)
            r1 = np.where(np.abs(c2) > 0, q / np.where(c2 == 0, 1, c2), np.nan)
            r2 = np.where(np.abs(q) > 0, c0 / np.where(q == 0, 1, q), r1)
            return np.stack([r1, r2])
        # Degrees 3 and 4: batched companion matrices.
        lead = cvals[-1]
        ok = np.abs(lead) > 1e-300
        monic = cvals[:-1] / np.where(ok, lead, 1.0)
        m = cvals.shape[1]
        comp = np.zeros((m, d, d), dtype=complex)
        comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
        comp[:, :, d - 1] = -monic.T
        roots = np.linalg.eigvals(comp).T
        roots[:, ~ok] = np.nan
        return roots


def _fiber_coeffs(F: Polynomial, w: complex, var: int):
    """Ascending coefficients of F - w in the solved variable, trimmed."""
    coeffs = (F - w).coeffs_in_var(var)
    while len(coeffs) > 1 and not coeffs[-1].terms:
        coeffs.pop()
    return coeffs if len(coeffs) > 1 else None


def _fiber_roots(coeffs: list, zeta: np.ndarray) -> np.ndarray:
    cvals = np.stack([np.asarray(c(zeta), dtype=complex) for c in coeffs])
    roots = _roots_batch(cvals)
    if cvals.shape[0] - 1 >= 3:
        deriv = cvals[1:] * np.arange(1, cvals.shape[0])[:, None]
        for _ in range(2):
            p = _horner(cvals, roots)
            dp = _horner(deriv, roots)
            with np.errstate(divide="ignore", invalid="ignore"):
                cand = roots - np.where(np.abs(dp) > 0, p / dp, 0.0)
                better = np.abs(_horner(cvals, cand)) < np.abs(p)
            roots = np.where(better & np.isfinite(cand), cand, roots)
    return roots


def _coef_horner(cfs: list, x: np.ndarray) -> np.ndarray:
    """Horner evaluation with pre-evaluated coefficient arrays.

    Each entry of cfs is the corresponding coefficient-in-x evaluated on
    the site grid, already broadcastable against x.
    """
    out = np.zeros(x.shape, dtype=complex) + cfs[-1]
    for c in cfs[-2::-1]:
        out = out * x + c
    return out


def _fiber_slopes(F: Polynomial, var: int, roots: np.ndarray, zeta: np.ndarray):
    """Branch derivative g' = -F_other/F_var along the fiber."""
    pts = np.empty(roots.shape + (2,), dtype=complex)
    pts[..., var] = roots
    pts[..., 1 - var] = zeta
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        dv = np.asarray(F.partial(var)(pts), dtype=complex)
        do = np.asarray(F.partial(1 - var)(pts), dtype=complex)
        scale = 1.0 + float(max(abs(c) for c in F.terms.values()))
        # Both partials vanishing at a root means globally coincident
        # branches (a squared factor); their common slope is finite and
        # the limit of -F_other/F_var is 0 there.
        coincident = (np.abs(dv) <= 1e-9 * scale) & (np.abs(do) <= 1e-9 * scale)
        gprime = np.where(np.abs(dv) > 0, -do / np.where(dv == 0, 1, dv), np.nan)
        gprime = np.where(coincident, 0.0, gprime)
    return gprime


def _fiber_density(u: Exhaustion, zeta, roots, gprime):
    """(U, density, valid) on the fiber branches over the grid.

    Only the two exhaustions admitted by _check_fiber_support appear
    here, so U comes straight from S = |root|^2 + |zeta|^2 without
    materializing the point array.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        S = np.abs(roots) ** 2 + np.abs(zeta) ** 2
        if u.kind == "log_abs":
            U = 0.5 * np.log(S)
            inner = gprime * np.conj(roots) + np.conj(zeta)
            dU = 2.0 * (S * (np.abs(gprime) ** 2 + 1.0) - np.abs(inner) ** 2) / S**2
        else:
            U = S - 1.0
            dU = 4.0 * (np.abs(gprime) ** 2 + 1.0)
        valid = np.isfinite(roots) & np.isfinite(gprime) & np.isfinite(U) & (U < 0.0)
    U = np.where(valid, U, -1.0)
    dU = np.where(valid, dU, 0.0)
    return U, dU, valid


def _branch_points(coeffs: list) -> tuple[np.ndarray, bool]:
    """Discriminant zeros of sum_k c_k(zeta) x^k near the closed disk.

    Returns (points, degenerate); degenerate means the discriminant
    vanishes identically (globally coincident branches, as for x^2),
    which needs no special handling because the summed density stays
    bounded there.
    """
    d = len(coeffs) - 1
    if d <= 1:
        return np.zeros(0, dtype=complex), False
    if d == 2:
        disc = coeffs[1] * coeffs[1] - 4.0 * coeffs[2] * coeffs[0]
        return _disc_roots(disc.coeffs_1d())
    # Sample the Sylvester resultant of (P, dP/dx) on the unit circle
    # and recover its coefficients by an exact inverse FFT: its degree
    # is below 512 for the supported degree and coefficient sizes.
    M = 512
    s = np.exp(2j * np.pi * np.arange(M) / M)
    pdesc = np.stack([np.asarray(c(s), complex) for c in coeffs])[::-1]
    qdesc = np.stack(
        [np.asarray(((k + 1) * coeffs[k + 1])(s), complex) for k in range(d)]
    )[::-1]
    size = 2 * d - 1
    mat = np.zeros((M, size, size), dtype=complex)
    for i in range(d - 1):
        for k in range(d + 1):
            mat[:, i, i + k] = pdesc[k]
    for j in range(d):
        for k in range(d):
            mat[:, d - 1 + j, j + k] = qdesc[k]
    return _disc_roots(np.fft.ifft(np.linalg.det(mat)))


def _disc_roots(coeffs: np.ndarray) -> tuple[np.ndarray, bool]:
    """Zeros of an explicit discriminant polynomial near the closed disk."""
    scale = float(np.max(np.abs(coeffs))) if len(coeffs) else 0.0
    if scale < 1e-250:
        return np.zeros(0, dtype=complex), True
    nz = np.nonzero(np.abs(coeffs) > 1e-10 * scale)[0]
    coeffs = coeffs[: int(nz[-1]) + 1]
    if len(coeffs) <= 1:
        return np.zeros(0, dtype=complex), False
    pts = npoly.polyroots(coeffs)
    pts = pts[np.abs(pts) <= 1.05]
    return np.asarray(pts, dtype=complex), False


def _ramp(dist: np.ndarray, eps: float) -> np.ndarray:
    """Quintic smoothstep: 0 inside eps/2, 1 outside eps, C^2 between."""
    x = np.clip(2.0 * dist / eps - 1.0, 0.0, 1.0)
    return x**3 * (10.0 + x * (6.0 * x - 15.0))


def _main_weight(zeta: np.ndarray, branch: np.ndarray, eps: float) -> np.ndarray:
    w = np.ones(zeta.shape)
    for b in branch:
        w *= _ramp(np.abs(zeta - b), eps)
    return w


class _FiberGrid:
    """Main polar grid plus branch-point patches for one (F, w, u)."""

    def __init__(self, F, u, w, var, coeffs, resolution, eps,
                 branch=None, degenerate=None):
        if branch is None:
            branch, degenerate = _branch_points(coeffs)
        self.branch, self.degenerate = branch, degenerate
        zeta, area = _polar_grid(resolution, 2 * resolution)
        roots = _fiber_roots(coeffs, zeta)
        gprime = _fiber_slopes(F, var, roots, zeta)
        U, dU, _ = _fiber_density(u, zeta, roots, gprime)
        self.main_U = U
        if len(branch) and not degenerate:
            self.main_col = dU * (area * _main_weight(zeta, branch, eps))
            self.patch_U, self.patch_col, self.patch_err_sel = _patch_eval(
                F, u, var, coeffs, branch, eps
            )
        else:
            self.main_col = dU * area
            self.patch_U = self.patch_col = self.patch_err_sel = None

    def reduce(self, qfun) -> tuple[float, float]:
        """Integrate qfun(U) against the fiber measure; (value, error)."""
        val = float((self.main_col * qfun(self.main_U)).sum())
        if self.patch_U is None:
            return val, 0.0
        contrib = self.patch_col * qfun(self.patch_U)
        total = float(contrib.sum())
        coarse = float(contrib[..., self.patch_err_sel, :].sum() * 2.0)
        return val + total, abs(total - coarse)


def _patch_eval(F, u, var, coeffs, branch, eps):
    """Fiber data on clustered polar patches around the branch points.

    Each patch integrates its telescoped bump of the partition of
    unity.  The error selector marks every other radial ring; doubling
    the weight of that subset gives a coarse value whose distance to
    the full one serves as the patch error estimate.
    """
    local, larea = _patch_template(PATCH_RADIAL, PATCH_ANGULAR)
    zloc = branch[:, None] + eps * local[None, :]  # (k, mloc)
    wloc = np.broadcast_to(eps**2 * larea, zloc.shape).copy()
    for j, b in enumerate(branch):
        bump = 1.0 - _ramp(np.abs(zloc[j] - b), eps)
        for i in range(j):
            bump *= _ramp(np.abs(zloc[j] - branch[i]), eps)
        wloc[j] *= bump
    zflat = zloc.ravel()
    roots = _fiber_roots(coeffs, zflat)
    gprime = _fiber_slopes(F, var, roots, zflat)
    U, dU, _ = _fiber_density(u, zflat, roots, gprime)
    d = roots.shape[0]
    k = len(branch)
    U = U.reshape(d, k, PATCH_RADIAL, PATCH_ANGULAR)
    col = (dU * wloc.ravel()).reshape(d, k, PATCH_RADIAL, PATCH_ANGULAR)
    err_sel = np.arange(PATCH_RADIAL) % 2 == 1
    return U, col, err_sel


def _patch_group(coeffs, d_var_poly, d_oth_poly, scale, u, var, branches,
                 ws, fun, eps):
    """Summed patch integrals of fun(U) for targets sharing a branch count.

    branches has shape (g, k): one row of branch points per target.  Only
    the constant-in-var coefficient depends on the target, so the whole
    group shares one vectorized quadratic solve over its patch nodes.
    """
    local, larea = _patch_template(BATCH_PATCH_RADIAL, BATCH_PATCH_ANGULAR)
    g, k = branches.shape
    zloc = branches[..., None] + eps * local[None, None, :]  # (g, k, mloc)
    wloc = np.broadcast_to(eps**2 * larea, zloc.shape).copy()
    for j in range(k):
        bump = 1.0 - _ramp(np.abs(zloc[:, j, :] - branches[:, j, None]), eps)
        for i in range(j):
            bump *= _ramp(np.abs(zloc[:, j, :] - branches[:, i, None]), eps)
        wloc[:, j, :] *= bump
    zflat = zloc.reshape(g, -1)  # (g, k*mloc)
    cv = [np.asarray(c(zflat), dtype=complex) for c in coeffs]
    dvar_cfs = [np.asarray(c(zflat), dtype=complex)[:, None, :]
                for c in d_var_poly.coeffs_in_var(var)]
    doth_cfs = [np.asarray(c(zflat), dtype=complex)[:, None, :]
                for c in d_oth_poly.coeffs_in_var(var)]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        c0 = cv[0] - ws[:, None]
        c1, c2 = cv[1], cv[2]
        disc = c1 * c1 - 4.0 * c2 * c0
        sq = np.sqrt(disc)
        sq = np.where(np.real(np.conj(c1) * sq) >= 0.0, sq, -sq)
        q = -0.5 * (c1 + sq)
        r1 = np.where(np.abs(c2) > 0, q / np.where(c2 == 0, 1, c2), np.nan)
        r2 = np.where(np.abs(q) > 0, c0 / np.where(q == 0, 1, q), r1)
        roots = np.stack([r1, r2], axis=1)  # (g, 2, k*mloc)
        dv = _coef_horner(dvar_cfs, roots)
        do = _coef_horner(doth_cfs, roots)
        coincident = (np.abs(dv) <= 1e-9 * scale) & (np.abs(do) <= 1e-9 * scale)
        gprime = np.where(np.abs(dv) > 0,
                          -do / np.where(dv == 0, 1, dv), np.nan)
        gprime = np.where(coincident, 0.0, gprime)
    U, dU, _ = _fiber_density(u, zflat[:, None, :], roots, gprime)
    contrib = dU * wloc.reshape(g, 1, -1) * fun(U)
    return contrib.sum(axis=(1, 2))


def _empty_sample(w, alpha, r_grid, flags) -> CountingSample:
    sample = CountingSample(w=w, method="fiber-2d", alpha=alpha, flags=flags)
    if alpha is not None:
        sample.N_alpha = 0.0
    if r_grid is not None:
        sample.r_grid = np.asarray(r_grid, dtype=float)
        sample.n_of_r = np.zeros_like(sample.r_grid)
        sample.N_of_r = np.zeros_like(sample.r_grid)
    return sample


def _select_variable(F: Polynomial) -> int:
    candidates = [v for v in (0, 1)
                  if 1 <= F.degree_in(v) <= MAX_FIBER_DEGREE]
    if not candidates:
        raise UnsupportedConfigurationError(
            f"fiber extraction needs degree 1..{MAX_FIBER_DEGREE} "
            "in one of the variables"
        )
    return min(candidates, key=F.degree_in)


def _check_fiber_support(F, u: Exhaustion) -> None:
    if u.n != 2:
        raise DomainMismatchError("fiber quadrature needs a two-variable domain")
    if not isinstance(F, Polynomial) or F.nvars != 2:
        raise ParameterError("fiber quadrature needs a two-variable polynomial")
    if u.domain.kind == "bidisk":
        raise UnsupportedConfigurationError(
            "bidisk counting is implemented only as the pole degeneracy check"
        )
    if u.kind not in ("log_abs", "smooth_square"):
        raise UnsupportedConfigurationError(
            "fiber quadrature supports the log and smooth-square "
            "exhaustions of the ball"
        )


def fiber_quadrature_2d(F: Polynomial, u: Exhaustion, w, alpha=None,
                        r_grid=None, resolution: int = 256,
                        eps: float = DEFAULT_EPS) -> CountingSample:
    """Counting data of a curve fiber {F = w} in the ball.

    resolution sets the radial node count of the polar grid over the
    free variable (the angular count is twice that); eps is the radius
    of the branch-point patches.
    """
    w = complex(w)
    if u.n == 2 and isinstance(F, Polynomial) and F.nvars == 2:
        _check_infinite(F, u, w)
    _check_fiber_support(F, u)
    if F.total_degree == 0:
        return _empty_sample(w, alpha, r_grid, {"variable": None})
    var = _select_variable(F)
    coeffs = _fiber_coeffs(F, w, var)
    if coeffs is None:
        return _empty_sample(w, alpha, r_grid, {"variable": var})

    grid = _FiberGrid(F, u, w, var, coeffs, resolution, eps)
    sample = CountingSample(
        w=w, method="fiber-2d", alpha=alpha,
        flags={
            "variable": var,
            "branch_points": int(len(grid.branch)),
            "branch_point_list": [complex(b) for b in grid.branch],
            "degenerate_resultant": bool(grid.degenerate),
            "eps": eps,
        },
    )
    errs = [0.0]
    if alpha is not None:
        val, e = grid.reduce(lambda U: np.asarray(gamma_alpha(U, alpha)))
        sample.N_alpha = val
        errs.append(e)
    if r_grid is not None:
        r = np.asarray(r_grid, dtype=float)
        n_of_r = np.empty_like(r)
        N_of_r = np.empty_like(r)
        for j, rj in enumerate(r):
            n_of_r[j], e1 = grid.reduce(lambda U: (U < rj).astype(float))
            N_of_r[j], e2 = grid.reduce(lambda U: np.maximum(rj - U, 0.0))
            errs += [e1, e2]
        sample.r_grid, sample.n_of_r, sample.N_of_r = r, n_of_r, N_of_r
    sample.error_estimate = max(errs)
    return sample


# ----------------------------------------------------------------------
# Convenience wrappers
# ----------------------------------------------------------------------


def _scalar_component(F):
    if isinstance(F, HoloMap):
        if F.target.n != 1:
            raise ParameterError("counting needs a scalar-valued map")
        return F.components[0]
    return F


def counting_for_map(F, u: Exhaustion, z, beta: float,
                     resolution: int | None = None,
                     eps: float = DEFAULT_EPS) -> float:
    """N_beta of the map F (a HoloMap to the disk or a bare function) at z."""
    comp = _scalar_component(F)
    if u.n == 1:
        return float(counting_1d(comp, u, z, alpha=beta).N_alpha)
    sample = fiber_quadrature_2d(comp, u, z, alpha=beta,
                                 resolution=resolution or 192, eps=eps)
    return float(sample.N_alpha)


def batch_n_alpha(F, u: Exhaustion, ws, alpha: float,
                  resolution: int | None = None,
                  eps: float = DEFAULT_EPS) -> np.ndarray:
    """N_alpha over an array of targets; +inf marks degenerate fibers.

    On the ball this shares one grid across all targets when the solved
    degree is at most two, which is what the identity and composition
    sweeps feed it.
    """
    comp = _scalar_component(F)
    ws = np.asarray(ws, dtype=complex).ravel()
    if u.n == 1:
        out = np.empty(len(ws))
        for i, w in enumerate(ws):
            try:
                out[i] = counting_1d(comp, u, w, alpha=alpha).N_alpha
            except InfiniteCountingError:
                out[i] = np.inf
        return out

    def fun(U):
        return np.asarray(gamma_alpha(U, alpha))

    def scalar(w):
        return fiber_quadrature_2d(comp, u, w, alpha=alpha,
                                   resolution=resolution or 96,
                                   eps=eps).N_alpha

    return _fiber_batch(comp, u, ws, fun, scalar, resolution or 96, eps)


def batch_counting_level(F, u: Exhaustion, ws, r: float,
                         resolution: int | None = None,
                         eps: float = DEFAULT_EPS) -> np.ndarray:
    """N(w, r) over an array of targets; +inf marks degenerate fibers."""
    comp = _scalar_component(F)
    ws = np.asarray(ws, dtype=complex).ravel()
    if u.n == 1:
        out = np.empty(len(ws))
        for i, w in enumerate(ws):
            try:
                out[i] = counting_1d(comp, u, w, r_grid=[r]).N_of_r[0]
            except InfiniteCountingError:
                out[i] = np.inf
        return out

    def fun(U):
        return np.maximum(r - np.asarray(U), 0.0)

    def scalar(w):
        return fiber_quadrature_2d(comp, u, w, r_grid=[r],
                                   resolution=resolution or 96,
                                   eps=eps).N_of_r[0]

    return _fiber_batch(comp, u, ws, fun, scalar, resolution or 96, eps)


def _fiber_batch(F: Polynomial, u: Exhaustion, ws: np.ndarray, fun, scalar,
                 resolution: int, eps: float) -> np.ndarray:
    _check_fiber_support(F, u)
    if F.total_degree == 0:
        c = complex(F.terms.get((0, 0), 0.0))
        out = np.zeros(len(ws))
        out[np.abs(ws - c) <= INFINITE_TOL * np.maximum(1.0, np.abs(ws))] = np.inf
        return out
    var = _select_variable(F)

    poles = u.poles
    pole_vals = (np.atleast_1d(np.asarray(F(poles), dtype=complex))
                 if len(poles) else np.zeros(0, complex))
    infinite = np.zeros(len(ws), dtype=bool)
    for pv in pole_vals:
        infinite |= np.abs(pv - ws) <= INFINITE_TOL * np.maximum(1.0, np.abs(ws))

    out = np.full(len(ws), np.inf)
    todo = np.nonzero(~infinite)[0]
    if not len(todo):
        return out

    if F.degree_in(var) > 2:
        for i in todo:
            out[i] = scalar(complex(ws[i]))
        return out

    # Degree <= 2: the target only shifts the constant coefficient, so
    # the closed-form roots broadcast over a whole chunk of targets.
    zeta, area = _polar_grid(resolution, 2 * resolution)
    coeffs = F.coeffs_in_var(var)
    while len(coeffs) > 1 and not coeffs[-1].terms:
        coeffs.pop()
    d = len(coeffs) - 1
    cbase = np.stack([np.asarray(c(zeta), dtype=complex) for c in coeffs])
    d_var_poly, d_oth_poly = F.partial(var), F.partial(1 - var)
    dvar_cfs = [np.asarray(c(zeta), dtype=complex)
                for c in d_var_poly.coeffs_in_var(var)]
    doth_cfs = [np.asarray(c(zeta), dtype=complex)
                for c in d_oth_poly.coeffs_in_var(var)]
    scale = 1.0 + float(max(abs(c) for c in F.terms.values()))
    if d == 2:
        disc_base = (coeffs[1] * coeffs[1] - 4.0 * coeffs[2] * coeffs[0]).coeffs_1d()
        disc_shift = 4.0 * coeffs[2].coeffs_1d()
        width = max(len(disc_base), len(disc_shift))
        disc_base = np.pad(disc_base, (0, width - len(disc_base)))
        disc_shift = np.pad(disc_shift, (0, width - len(disc_shift)))
        c2_pos = np.abs(cbase[2]) > 0
        c2_safe = np.where(c2_pos, cbase[2], 1.0)

    chunk = max(1, 1_200_000 // (d * len(zeta)))
    for start in range(0, len(todo), chunk):
        idx = todo[start:start + chunk]
        wc = ws[idx][:, None]  # (c, 1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if d == 1:
                c0 = cbase[0][None, :] - wc
                c1 = cbase[1][None, :]
                roots = np.where(np.abs(c1) > 0,
                                 -c0 / np.where(c1 == 0, 1, c1), np.nan)
                roots = roots[:, None, :]  # (c, 1, m)
            else:
                c0 = cbase[0][None, :] - wc
                c1 = cbase[1][None, :]
                disc = c1 * c1 - 4.0 * cbase[2][None, :] * c0
                sq = np.sqrt(disc)
                sq = np.where(np.real(np.conj(c1) * sq) >= 0.0, sq, -sq)
                q = -0.5 * (c1 + sq)
                r1 = np.where(c2_pos, q / c2_safe, np.nan)
                r2 = np.where(np.abs(q) > 0, c0 / np.where(q == 0, 1, q), r1)
                roots = np.stack([r1, r2], axis=1)  # (c, 2, m)
            dv = _coef_horner(dvar_cfs, roots)
            do = _coef_horner(doth_cfs, roots)
            coincident = (np.abs(dv) <= 1e-9 * scale) & (np.abs(do) <= 1e-9 * scale)
            gprime = np.where(np.abs(dv) > 0,
                              -do / np.where(dv == 0, 1, dv), np.nan)
            gprime = np.where(coincident, 0.0, gprime)
        U, dU, _ = _fiber_density(u, zeta, roots, gprime)
        col = (dU * area * fun(U)).sum(axis=1)  # (c, m)
        if d == 1:
            out[idx] = col.sum(axis=1)
            continue
        groups: dict[int, list] = {}
        for row, i in enumerate(idx):
            branch, degen = _disc_roots(disc_base + complex(ws[i]) * disc_shift)
            if degen or not len(branch):
                out[i] = float(col[row].sum())
            else:
                groups.setdefault(len(branch), []).append((row, branch))
        for k, members in groups.items():
            rows = np.array([r for r, _ in members])
            branches = np.stack([b for _, b in members])  # (g, k)
            weight = np.ones((len(rows), len(zeta)))
            for j in range(k):
                weight *= _ramp(np.abs(zeta[None, :] - branches[:, j, None]),
                                eps)
            out[idx[rows]] = (col[rows] * weight).sum(axis=1) + _patch_group(
                coeffs, d_var_poly, d_oth_poly, scale, u, var, branches,
                ws[idx[rows]], fun, eps,
            )
    return out
