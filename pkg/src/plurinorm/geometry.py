r"""Model domains and their plurisubharmonic exhaustions.

Three model domains are supported: the unit disk in C, the unit ball in
C^2, and the bidisk.  Points are plain complex numpy arrays: a scalar
complex number for the disk, an array of shape (..., 2) for the
two-dimensional domains.

Exhaustions u : D -> [-inf, 0) come in six kinds:

``log_abs``        log|z| on the disk or the ball (pole at the origin)
``log_max_abs``    log max(|z1|, |z2|) on the bidisk
``green_pole``     log of the Mobius factor |(z-a)/(1-conj(a)z)| on the disk
``smooth_square``  |z|^2 - 1 on the ball (smooth defining function)
``scaled``         c * u for c > 0
``truncated``      max(u, level) for level < 0

Normalization: with d^c = i(conj-d - d), the Monge-Ampere measure of a
Green-type exhaustion is (2*pi)^n times the unit point mass at its pole,
and (dd^c |z|^2)^2 = 32 dV on C^2.  Every sublevel measure built on these
conventions has total mass (2*pi)^n for the Green family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainMismatchError, ParameterError, UnsupportedConfigurationError

__all__ = [
    "Domain",
    "UNIT_DISK",
    "UNIT_BALL",
    "BIDISK",
    "as_points",
    "Exhaustion",
    "log_abs",
    "log_max_abs",
    "green_pole",
    "smooth_square",
    "scaled",
    "truncated",
    "green_function",
    "levi_min_eigenvalue",
]


@dataclass(frozen=True)
class Domain:
    """One of the three model domains."""

    kind: str  # "disk" | "ball" | "bidisk"

    @property
    def n(self) -> int:
        return 1 if self.kind == "disk" else 2

    def contains(self, z, tol: float = 0.0):
        z = as_points(z, self.n)
        if self.kind == "disk":
            return np.abs(z) < 1.0 + tol
        if self.kind == "ball":
            return np.sqrt(np.sum(np.abs(z) ** 2, axis=-1)) < 1.0 + tol
        return np.max(np.abs(z), axis=-1) < 1.0 + tol

    def boundary_dist(self, z):
        """1 - (the defining radius), positive inside."""
        z = as_points(z, self.n)
        if self.kind == "disk":
            return 1.0 - np.abs(z)
        if self.kind == "ball":
            return 1.0 - np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))
        return 1.0 - np.max(np.abs(z), axis=-1)

    def sample_interior(self, rng: np.random.Generator, size: int, margin: float = 0.0):
        """Uniform-ish random interior points, |z| <= 1 - margin."""
        if self.kind == "disk":
            r = (1.0 - margin) * np.sqrt(rng.uniform(0, 1, size))
            th = rng.uniform(0, 2 * np.pi, size)
            return r * np.exp(1j * th)
        if self.kind == "ball":
            # Uniform in the ball: normalize a complex Gaussian, scale by U^(1/4).
            g = rng.normal(size=(size, 4)).view(np.complex128).reshape(size, 2)
            g /= np.linalg.norm(g, axis=1)[:, None]
            r = (1.0 - margin) * rng.uniform(0, 1, size) ** 0.25
            return g * r[:, None]
        r = (1.0 - margin) * np.sqrt(rng.uniform(0, 1, (size, 2)))
        th = rng.uniform(0, 2 * np.pi, (size, 2))
        return r * np.exp(1j * th)

    def sample_shilov(self, rng: np.random.Generator, size: int):
        """Random points on the Shilov boundary (circle / sphere / torus)."""
        if self.kind == "disk":
            return np.exp(1j * rng.uniform(0, 2 * np.pi, size))
        if self.kind == "ball":
            g = rng.normal(size=(size, 4)).view(np.complex128).reshape(size, 2)
            return g / np.linalg.norm(g, axis=1)[:, None]
        return np.exp(1j * rng.uniform(0, 2 * np.pi, (size, 2)))


UNIT_DISK = Domain("disk")
UNIT_BALL = Domain("ball")
BIDISK = Domain("bidisk")

_DOMAINS = {"disk": UNIT_DISK, "ball": UNIT_BALL, "bidisk": BIDISK}


def domain_by_name(name: str) -> Domain:
    try:
        return _DOMAINS[name]
    except KeyError:
        raise ParameterError(f"unknown domain {name!r}; choose disk, ball, or bidisk")


def as_points(z, n: int) -> np.ndarray:
    """Coerce to a complex array; for n=2 the point axis must be last."""
    z = np.asarray(z, dtype=np.complex128)
    if n == 1:
        return z
    if z.ndim == 0 or z.shape[-1] != 2:
        raise DomainMismatchError(
            f"expected points with 2 complex coordinates, got shape {z.shape}"
        )
    return z


@dataclass(frozen=True)
class Exhaustion:
    """A negative plurisubharmonic exhaustion of a model domain.

    Build instances with the factory functions :func:`log_abs`,
    :func:`green_pole`, :func:`log_max_abs`, :func:`smooth_square`,
    :func:`scaled`, :func:`truncated`.
    """

    kind: str
    domain: Domain
    pole: complex = 0j  # green_pole only
    factor: float = 1.0  # scaled only
    level: float = 0.0  # truncated only
    inner: Optional["Exhaustion"] = None  # scaled / truncated wrap
    family: str = "E0"  # "E0" or "smooth-defining"

    @property
    def n(self) -> int:
        return self.domain.n

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        """Evaluate u at points z; returns real values in [-inf, 0)."""
        z = as_points(z, self.n)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "log_abs":
                if self.n == 1:
                    return _safe_log(np.abs(z))
                return 0.5 * _safe_log(np.sum(np.abs(z) ** 2, axis=-1))
            if self.kind == "log_max_abs":
                return _safe_log(np.max(np.abs(z), axis=-1))
            if self.kind == "green_pole":
                a = self.pole
                return _safe_log(np.abs((z - a) / (1.0 - np.conj(a) * z)))
            if self.kind == "smooth_square":
                return np.sum(np.abs(z) ** 2, axis=-1) - 1.0
            if self.kind == "scaled":
                return self.factor * self.inner.evaluate(z)
            if self.kind == "truncated":
                return np.maximum(self.inner.evaluate(z), self.level)
        raise UnsupportedConfigurationError(f"unknown exhaustion kind {self.kind!r}")

    @property
    def poles(self) -> np.ndarray:
        """The set u^{-1}(-inf) as an array of points, shape (k,) or (k, 2)."""
        if self.kind in ("log_abs", "log_max_abs"):
            return np.zeros(1, dtype=complex) if self.n == 1 else np.zeros((1, 2), dtype=complex)
        if self.kind == "green_pole":
            return np.array([self.pole], dtype=complex)
        if self.kind == "smooth_square":
            return np.zeros((0, 2), dtype=complex)
        if self.kind == "scaled":
            return self.inner.poles
        if self.kind == "truncated":
            # max(u, level) is bounded below: no poles.
            shape = (0,) if self.n == 1 else (0, 2)
            return np.zeros(shape, dtype=complex)
        raise UnsupportedConfigurationError(self.kind)

    def min_value(self) -> float:
        """inf over D of u (the level below which sublevel sets are empty)."""
        if self.kind == "smooth_square":
            return -1.0
        if self.kind == "scaled":
            return self.factor * self.inner.min_value()
        if self.kind == "truncated":
            return max(self.level, self.inner.min_value())
        return -np.inf

    def to_config(self) -> dict:
        cfg: dict = {"kind": self.kind, "domain": self.domain.kind}
        if self.kind == "green_pole":
            cfg["pole"] = [self.pole.real, self.pole.imag]
        if self.kind == "scaled":
            cfg["factor"] = self.factor
            cfg["inner"] = self.inner.to_config()
        if self.kind == "truncated":
            cfg["level"] = self.level
            cfg["inner"] = self.inner.to_config()
        return cfg

    @staticmethod
    def from_config(cfg: dict) -> "Exhaustion":
        domain = domain_by_name(cfg["domain"])
        kind = cfg["kind"]
        if kind == "log_abs":
            return log_abs(domain)
        if kind == "log_max_abs":
            return log_max_abs(domain)
        if kind == "green_pole":
            re, im = cfg.get("pole", [0.0, 0.0])
            return green_pole(domain, complex(re, im))
        if kind == "smooth_square":
            return smooth_square(domain)
        if kind == "scaled":
            return scaled(cfg["factor"], Exhaustion.from_config(cfg["inner"]))
        if kind == "truncated":
            return truncated(cfg["level"], Exhaustion.from_config(cfg["inner"]))
        raise ParameterError(f"unknown exhaustion kind {kind!r}")


def _safe_log(x):
    out = np.log(np.maximum(x, 0.0))
    return out


def log_abs(domain: Domain) -> Exhaustion:
    """log|z| on the disk or the ball."""
    if domain.kind == "bidisk":
        raise UnsupportedConfigurationError(
            "log|z| is not an exhaustion tied to the bidisk's geometry; "
            "use log_max_abs"
        )
    return Exhaustion("log_abs", domain)


def log_max_abs(domain: Domain = BIDISK) -> Exhaustion:
    """log max(|z1|, |z2|), the pluricomplex Green function of the bidisk."""
    if domain.kind != "bidisk":
        raise DomainMismatchError("log_max_abs lives on the bidisk")
    return Exhaustion("log_max_abs", domain)


def green_pole(domain: Domain, pole) -> Exhaustion:
    """Green-type exhaustion with the given interior pole.

    On the disk any pole is allowed (Mobius transport).  On the ball and
    the bidisk only the origin is implemented; other poles raise
    :class:`UnsupportedConfigurationError`.
    """
    if domain.kind == "disk":
        pole = complex(pole)
        if abs(pole) >= 1.0:
            raise ParameterError(f"pole must be interior, got |pole| = {abs(pole)}")
        if pole == 0:
            return log_abs(domain)
        return Exhaustion("green_pole", domain, pole=pole)
    pole_arr = as_points(pole, 2)
    if np.max(np.abs(pole_arr)) != 0.0:
        raise UnsupportedConfigurationError(
            "Green functions with pole off the origin are only implemented "
            "on the disk"
        )
    return log_abs(domain) if domain.kind == "ball" else log_max_abs(domain)


def smooth_square(domain: Domain = UNIT_BALL) -> Exhaustion:
    """|z|^2 - 1 on the ball: smooth, Monge-Ampere density 32 dV."""
    if domain.kind != "ball":
        raise DomainMismatchError("smooth_square is defined on the ball")
    return Exhaustion("smooth_square", domain, family="smooth-defining")


def scaled(factor: float, inner: Exhaustion) -> Exhaustion:
    """factor * u for factor > 0."""
    if factor <= 0:
        raise ParameterError("scaling factor must be positive")
    return Exhaustion("scaled", inner.domain, factor=float(factor), inner=inner,
                      family=inner.family)


def truncated(level: float, inner: Exhaustion) -> Exhaustion:
    """max(u, level) for level < 0: bounded, Monge-Ampere mass on {u = level}."""
    if not level < 0:
        raise ParameterError("truncation level must be negative")
    return Exhaustion("truncated", inner.domain, level=float(level), inner=inner,
                      family=inner.family)


def green_function(domain: Domain, pole, z):
    """Pluricomplex Green function g_D(z, pole) with logarithmic pole.

    Disk: log of the Mobius factor, any interior pole.  Ball and bidisk:
    implemented for pole = 0 only (log|z|, log max|z_i|).
    """
    return green_pole(domain, pole).evaluate(z)


def _levi_values(u_eval, z, direction, h: float):
    """Discrete Levi form (1/4) Delta_t u(z + t*a) at t=0, central differences."""
    zp = np.asarray(z, dtype=complex)
    a = np.asarray(direction, dtype=complex)
    vals = (
        u_eval(zp + h * a)
        + u_eval(zp - h * a)
        + u_eval(zp + 1j * h * a)
        + u_eval(zp - 1j * h * a)
        - 4.0 * u_eval(zp)
    )
    return vals / (4.0 * h * h)


def levi_min_eigenvalue(u_eval, z, n: int, h: float = 1e-4):
    """Smallest eigenvalue of the discrete complex Hessian.

    For n=1 this is the (quarter) Laplacian itself.  For n=2 the 2x2
    Hermitian Hessian is reconstructed from four directional Levi values
    by polarization and diagonalized.  Accepts a batch of points (shape
    (m,) or (m, 2)) and returns an array of the same leading shape.
    """
    if n == 1:
        out = _levi_values(u_eval, z, 1.0, h)
        return out if np.ndim(out) else float(out)
    e1 = np.array([1.0, 0.0], dtype=complex)
    e2 = np.array([0.0, 1.0], dtype=complex)
    h11 = _levi_values(u_eval, z, e1, h)
    h22 = _levi_values(u_eval, z, e2, h)
    s_plus = _levi_values(u_eval, z, e1 + e2, h)
    s_minus = _levi_values(u_eval, z, e1 - e2, h)
    t_plus = _levi_values(u_eval, z, e1 + 1j * e2, h)
    t_minus = _levi_values(u_eval, z, e1 - 1j * e2, h)
    h12 = ((s_plus - s_minus) + 1j * (t_plus - t_minus)) / 4.0
    mat = np.stack(
        [
            np.stack([h11 + 0j, h12], axis=-1),
            np.stack([np.conj(h12), h22 + 0j], axis=-1),
        ],
        axis=-2,
    )
    eig = np.linalg.eigvalsh(mat)
    out = np.min(eig, axis=-1)
    return out if np.ndim(out) else float(out)
