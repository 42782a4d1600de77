r"""Holomorphic functions and maps on the model domains.

Two concrete function classes cover everything the laboratory needs:

* :class:`Polynomial` -- sparse polynomials in one or two variables with
  exact arithmetic on coefficient tables (add, multiply, integer powers,
  substitution), gradients, and per-variable degree capped at 32.
* :class:`TestKernel` -- normalized reproducing-kernel powers
  (1-|z0|^2)^s / (1 - conj(z0) z)^{2s} on the disk, the standard test
  family for necessity arguments.

:class:`HoloMap` bundles components with source and target domains and
samples the containment of the image.  :class:`ComposedFunction` evaluates
f after F without expanding coefficients (used where only point values and
chain-rule gradients are needed).

The module also hosts the tiny expression grammar used by the command line
(variables z or z1, z2; complex literals like 1+2i or 0.5i; +, -, *,
parentheses; integer powers via ^ or **).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainMismatchError, ParameterError
from .geometry import BIDISK, UNIT_BALL, UNIT_DISK, Domain, as_points

__all__ = [
    "Polynomial",
    "TestKernel",
    "HoloMap",
    "ComposedFunction",
    "parse_function",
    "function_from_config",
    "shilov_sup",
]

MAX_DEGREE = 32


class Polynomial:
    """Sparse polynomial sum_e c_e z^e in 1 or 2 complex variables.

    Parameters
    ----------
    nvars : int
        1 or 2.
    terms : dict
        Maps exponent tuples (e.g. ``(2,)`` or ``(1, 3)``) to complex
        coefficients.  Zero coefficients are dropped; exponents above 32
        in any variable are rejected.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict):
        if nvars not in (1, 2):
            raise ParameterError("polynomials support 1 or 2 variables")
        clean: dict = {}
        for exp, coef in terms.items():
            exp = tuple(int(e) for e in (exp if isinstance(exp, tuple) else (exp,)))
            if len(exp) != nvars:
                raise ParameterError(f"exponent {exp} does not match nvars={nvars}")
            if any(e < 0 for e in exp):
                raise ParameterError("negative exponents are not polynomials")
            if any(e > MAX_DEGREE for e in exp):
                raise ParameterError(f"degree above {MAX_DEGREE} per variable")
            coef = complex(coef)
            if coef != 0:
                clean[exp] = clean.get(exp, 0j) + coef
        self.nvars = nvars
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value, nvars: int = 1) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: complex(value)})

    @classmethod
    def variable(cls, var: int = 0, nvars: int = 1) -> "Polynomial":
        exp = tuple(1 if k == var else 0 for k in range(nvars))
        return cls(nvars, {exp: 1.0})

    @classmethod
    def from_coeffs_1d(cls, coeffs: Sequence[complex]) -> "Polynomial":
        """Build a one-variable polynomial from ascending coefficients."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    # -- structure ----------------------------------------------------

    def degree_in(self, var: int) -> int:
        if not self.terms:
            return 0
        return max(e[var] for e in self.terms)

    @property
    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def coeffs_1d(self) -> np.ndarray:
        """Ascending dense coefficient vector (one variable only)."""
        if self.nvars != 1:
            raise ParameterError("coeffs_1d needs a one-variable polynomial")
        out = np.zeros(self.degree_in(0) + 1, dtype=complex)
        for (e,), c in self.terms.items():
            out[e] = c
        return out

    def coeffs_in_var(self, var: int) -> list:
        """Write p = sum_k c_k(other) * x_var^k; return [c_0, c_1, ...].

        Each c_k is a one-variable Polynomial in the other variable.
        Only meaningful for nvars == 2.
        """
        if self.nvars != 2:
            raise ParameterError("coeffs_in_var needs a two-variable polynomial")
        other = 1 - var
        buckets: dict = {}
        for exp, coef in self.terms.items():
            buckets.setdefault(exp[var], {})[(exp[other],)] = coef
        deg = self.degree_in(var)
        return [Polynomial(1, buckets.get(k, {})) for k in range(deg + 1)]

    # -- evaluation ---------------------------------------------------

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.nvars == 1:
            c = self.coeffs_1d()
            out = np.full_like(z, c[-1]) if len(c) else np.zeros_like(z)
            for coef in c[-2::-1]:
                out = out * z + coef
            return out if out.ndim else complex(out)
        z = as_points(z, 2)
        z1, z2 = z[..., 0], z[..., 1]
        d1, d2 = self.degree_in(0), self.degree_in(1)
        p1 = _power_table(z1, d1)
        p2 = _power_table(z2, d2)
        out = np.zeros(z1.shape, dtype=complex)
        for (e1, e2), coef in self.terms.items():
            out = out + coef * p1[e1] * p2[e2]
        return out if out.ndim else complex(out)

    def partial(self, var: int = 0) -> "Polynomial":
        """Exact partial derivative with respect to variable `var`."""
        terms: dict = {}
        for exp, coef in self.terms.items():
            e = exp[var]
            if e == 0:
                continue
            new = list(exp)
            new[var] = e - 1
            terms[tuple(new)] = coef * e
        return Polynomial(self.nvars, terms)

    def grad(self, z):
        """Gradient; shape (...,) for nvars=1 and (..., 2) for nvars=2."""
        if self.nvars == 1:
            return self.partial(0)(z)
        return np.stack([self.partial(0)(z), self.partial(1)(z)], axis=-1)

    # -- algebra ------------------------------------------------------

    def _coerced(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ParameterError("mixed variable counts in polynomial arithmetic")
            return other
        return Polynomial.constant(other, self.nvars)

    def __add__(self, other):
        other = self._coerced(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0j) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerced(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerced(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0j) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ParameterError("polynomial powers must be nonnegative integers")
        out = Polynomial.constant(1.0, self.nvars)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def compose(self, *args: "Polynomial") -> "Polynomial":
        """Substitute a polynomial for each variable, expanding exactly."""
        if len(args) != self.nvars:
            raise ParameterError("compose needs one polynomial per variable")
        nv = args[0].nvars
        out = Polynomial.constant(0.0, nv)
        for exp, coef in self.terms.items():
            term = Polynomial.constant(coef, nv)
            for q, e in zip(args, exp):
                if e:
                    term = term * (q**e)
            out = out + term
        return out

    # -- misc ---------------------------------------------------------

    def to_config(self) -> dict:
        rows = sorted(
            [list(e) + [c.real, c.imag] for e, c in self.terms.items()]
        )
        return {"type": "polynomial", "nvars": self.nvars, "terms": rows}

    def __repr__(self):
        return f"Polynomial(nvars={self.nvars}, terms={self.terms!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items()))))


def _power_table(z: np.ndarray, deg: int) -> list:
    pows = [np.ones_like(z)]
    for _ in range(deg):
        pows.append(pows[-1] * z)
    return pows


@dataclass(frozen=True)
class TestKernel:
    """k_{z0,s}(z) = (1-|z0|^2)^s / (1 - conj(z0) z)^{2s} on the disk.

    Holomorphic on the closed disk for |z0| < 1 (the principal branch is
    fine: Re(1 - conj(z0) z) > 0 there).  k(z0) = (1-|z0|^2)^{-s}.
    """

    z0: complex
    s: float

    def __post_init__(self):
        if abs(self.z0) >= 1.0:
            raise ParameterError("kernel base point must be interior")
        if self.s <= 0:
            raise ParameterError("kernel exponent s must be positive")

    @property
    def nvars(self) -> int:
        return 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = (1.0 - abs(self.z0) ** 2) ** self.s / (1.0 - np.conj(self.z0) * z) ** (
            2.0 * self.s
        )
        return out if out.ndim else complex(out)

    def partial(self, var: int = 0) -> "_KernelDerivative":
        if var != 0:
            raise ParameterError("kernel is a one-variable function")
        return _KernelDerivative(self)

    def grad(self, z):
        return self.partial(0)(z)

    def to_config(self) -> dict:
        return {
            "type": "kernel",
            "z0": [self.z0.real, self.z0.imag],
            "s": self.s,
        }


@dataclass(frozen=True)
class _KernelDerivative:
    base: TestKernel

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        k = self.base
        out = (
            2.0
            * k.s
            * np.conj(k.z0)
            * (1.0 - abs(k.z0) ** 2) ** k.s
            / (1.0 - np.conj(k.z0) * z) ** (2.0 * k.s + 1.0)
        )
        return out if out.ndim else complex(out)


class ComposedFunction:
    """f after F, evaluated pointwise; gradient by the chain rule."""

    def __init__(self, f, F: "HoloMap"):
        self.f = f
        self.F = F
        self.nvars = F.source.n

    def __call__(self, z):
        return self.f(self.F(z))

    def grad(self, z):
        w = self.F(z)
        df = self.f.partial(0)(w)
        if self.nvars == 1:
            return df * self.F.components[0].partial(0)(z)
        comp = self.F.components[0]
        return np.stack(
            [df * comp.partial(0)(z), df * comp.partial(1)(z)], axis=-1
        )

    def partial(self, var: int):
        if self.nvars != 1 or var != 0:
            raise ParameterError("partial on compositions is one-variable only")
        return lambda z: self.grad(z)


class HoloMap:
    """A holomorphic map between model domains, componentwise.

    Containment of the image in the closed target domain is sampled on
    the Shilov boundary of the source at construction time; a violation
    raises :class:`DomainMismatchError` carrying a witness point.
    """

    def __init__(self, components: Iterable, source: Domain, target: Domain,
                 check: bool = True, samples: int = 4096):
        self.components = tuple(components)
        self.source = source
        self.target = target
        if len(self.components) != target.n:
            raise DomainMismatchError(
                f"target {target.kind} needs {target.n} components, "
                f"got {len(self.components)}"
            )
        for comp in self.components:
            if getattr(comp, "nvars", source.n) != source.n:
                raise DomainMismatchError(
                    "component variable count does not match the source domain"
                )
        if check:
            witness = self.containment_witness(samples)
            if witness is not None:
                raise DomainMismatchError(
                    f"map image leaves the closed target domain at z = {witness[0]} "
                    f"(|F(z)| = {witness[1]:.6f})"
                )

    def containment_witness(self, samples: int = 4096):
        """Deterministic Shilov-boundary sample; worst offender or None."""
        pts = _shilov_grid(self.source, samples)
        vals = self(pts)
        if self.target.n == 1:
            radius = np.abs(vals)
        elif self.target.kind == "ball":
            radius = np.sqrt(np.sum(np.abs(vals) ** 2, axis=-1))
        else:
            radius = np.max(np.abs(vals), axis=-1)
        worst = int(np.argmax(radius))
        if radius[worst] > 1.0 + 1e-9:
            return pts[worst], float(radius[worst])
        return None

    def __call__(self, z):
        if self.target.n == 1:
            return self.components[0](z)
        vals = [c(z) for c in self.components]
        return np.stack(np.broadcast_arrays(*vals), axis=-1)

    def to_config(self) -> dict:
        return {
            "type": "map",
            "source": self.source.kind,
            "target": self.target.kind,
            "components": [c.to_config() for c in self.components],
        }


def _shilov_grid(domain: Domain, samples: int) -> np.ndarray:
    """Deterministic quasi-uniform grid on the Shilov boundary."""
    if domain.kind == "disk":
        th = 2 * np.pi * np.arange(samples) / samples
        return np.exp(1j * th)
    m = max(8, int(np.sqrt(samples)))
    th = 2 * np.pi * np.arange(m) / m
    if domain.kind == "bidisk":
        t1, t2 = np.meshgrid(th, th, indexing="ij")
        return np.stack([np.exp(1j * t1), np.exp(1j * t2)], axis=-1).reshape(-1, 2)
    # Sphere: Hopf coordinates with a coarse latitude sweep.
    lat = (np.arange(m) + 0.5) / m
    eta = np.arcsin(np.sqrt(lat))
    t1, t2, et = np.meshgrid(th, th, eta, indexing="ij")
    z1 = np.exp(1j * t1) * np.cos(et)
    z2 = np.exp(1j * t2) * np.sin(et)
    out = np.stack([z1, z2], axis=-1).reshape(-1, 2)
    return out


def shilov_sup(f, domain: Domain, resolution: int = 4096) -> float:
    """sup of |f| over the closed domain via the Shilov boundary grid."""
    pts = _shilov_grid(domain, resolution)
    return float(np.max(np.abs(f(pts))))


# ----------------------------------------------------------------------
# Expression grammar: z | z1 | z2 | i | numbers, + - * ^ ** ( )
# ----------------------------------------------------------------------


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list = []
        self._run()

    def _run(self):
        t = self.text
        i = 0
        while i < len(t):
            ch = t[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*()^":
                if ch == "*" and i + 1 < len(t) and t[i + 1] == "*":
                    self.tokens.append(("op", "^"))
                    i += 2
                    continue
                self.tokens.append(("op", ch))
                i += 1
                continue
            if ch.isdigit() or ch == ".":
                j = i
                while j < len(t) and (t[j].isdigit() or t[j] == "."):
                    j += 1
                num = float(t[i:j])
                if j < len(t) and t[j] == "i":
                    self.tokens.append(("num", num * 1j))
                    j += 1
                else:
                    self.tokens.append(("num", complex(num)))
                i = j
                continue
            if ch.isalpha():
                j = i
                while j < len(t) and (t[j].isalnum() or t[j] == "_"):
                    j += 1
                self.tokens.append(("name", t[i:j]))
                i = j
                continue
            raise ParameterError(f"cannot parse {t!r}: unexpected character {ch!r}")


class _Parser:
    def __init__(self, tokens: list, nvars: int):
        self.tokens = tokens
        self.k = 0
        self.nvars = nvars

    def peek(self):
        return self.tokens[self.k] if self.k < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.k += 1
        return tok

    def parse(self) -> Polynomial:
        out = self.expr()
        if self.k != len(self.tokens):
            raise ParameterError(f"trailing input near token {self.peek()!r}")
        return out

    def expr(self) -> Polynomial:
        kind, val = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        node = self.term()
        if negate:
            node = -node
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                node = node - rhs if val == "-" else node + rhs
            else:
                return node

    def term(self) -> Polynomial:
        node = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                node = node * self.factor()
            else:
                return node

    def factor(self) -> Polynomial:
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.factor()
            return -inner if val == "-" else inner
        node = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind2, val2 = self.take()
            sign = 1
            if kind2 == "op" and val2 in "+-":
                sign = -1 if val2 == "-" else 1
                kind2, val2 = self.take()
            if kind2 != "num" or val2.imag != 0 or val2.real != int(val2.real):
                raise ParameterError("powers must be integer literals")
            if sign < 0:
                raise ParameterError("negative powers are not polynomials")
            node = node ** int(val2.real)
        return node

    def atom(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            return Polynomial.constant(val, self.nvars)
        if kind == "name":
            if val == "i":
                return Polynomial.constant(1j, self.nvars)
            if val == "z":
                if self.nvars != 1:
                    raise ParameterError("variable z is for one-variable expressions")
                return Polynomial.variable(0, 1)
            if val in ("z1", "z2"):
                if self.nvars != 2:
                    raise ParameterError(f"variable {val} needs two-variable context")
                return Polynomial.variable(0 if val == "z1" else 1, 2)
            raise ParameterError(f"unknown symbol {val!r}")
        if kind == "op" and val == "(":
            node = self.expr()
            kind2, val2 = self.take()
            if (kind2, val2) != ("op", ")"):
                raise ParameterError("unbalanced parentheses")
            return node
        raise ParameterError(f"unexpected token {val!r}")


def parse_function(text: str, nvars: int | None = None) -> Polynomial:
    """Parse an expression in z (or z1, z2) into a :class:`Polynomial`.

    If `nvars` is None it is inferred: the expression must mention either
    z or at least one of z1/z2 (pure constants default to one variable).
    """
    tokens = _Tokenizer(text).tokens
    if nvars is None:
        names = {v for k, v in tokens if k == "name"}
        if "z" in names and (names & {"z1", "z2"}):
            raise ParameterError("mix of z and z1/z2 in one expression")
        nvars = 2 if (names & {"z1", "z2"}) else 1
    return _Parser(tokens, nvars).parse()


def function_from_config(cfg: dict):
    """Inverse of to_config for polynomials and kernels."""
    kind = cfg.get("type")
    if kind == "polynomial":
        terms = {}
        for row in cfg["terms"]:
            *exps, re, im = row
            terms[tuple(int(e) for e in exps)] = complex(re, im)
        return Polynomial(int(cfg["nvars"]), terms)
    if kind == "kernel":
        re, im = cfg["z0"]
        return TestKernel(complex(re, im), float(cfg["s"]))
    raise ParameterError(f"unknown function config type {kind!r}")


def map_from_expressions(exprs: Sequence[str], source: Domain, target: Domain,
                         check: bool = True) -> HoloMap:
    comps = [parse_function(e, source.n) for e in exprs]
    return HoloMap(comps, source, target, check=check)


def identity_map(domain: Domain) -> HoloMap:
    if domain.kind == "disk":
        return HoloMap([Polynomial.variable(0, 1)], domain, domain, check=False)
    comps = [Polynomial.variable(0, 2), Polynomial.variable(1, 2)]
    return HoloMap(comps, domain, domain, check=False)
