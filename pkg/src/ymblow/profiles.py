"""
Closed-form objects of the equivariant Yang-Mills blowup problem.

Radial profiles are stored as functions of ``x = rho**2``: a smooth even
function ``u(rho)`` is written ``u(rho) = ũ(rho**2)`` and ``ũ`` is kept as a
Chebyshev series on an interval ``[0, X]`` (default ``[0, 1]``).  Evenness
is then built into the representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a formula."""


@dataclass(frozen=True)
class Params:
    """Dimension-dependent constants.

    Attributes
    ----------
    d : int
        Spatial dimension of the 1-form problem (``d >= 5``).
    alpha, beta : float
        Profile constants of the blowup family.
    k_d : int or None
        Sobolev order ``(d+1)/2`` of the evolution space; ``None`` for even d.
    """

    d: int
    alpha: float
    beta: float
    k_d: Optional[int]

    @property
    def odd(self) -> bool:
        return self.d % 2 == 1


def alpha_beta(d: float) -> tuple[float, float]:
    """Return ``(alpha, beta)`` for a (possibly non-integer) dimension d >= 4."""
    s = math.sqrt((d - 4) / (3 * (d - 2)))
    alpha = 2 * (1 + s)
    beta = (2 * d - 8 + math.sqrt(3 * (d - 2) * (d - 4))) / 3
    return alpha, beta


def make_params(d: int) -> Params:
    """Build the parameter table for dimension ``d``.

    Raises
    ------
    DomainError
        If ``d`` is not an integer ``>= 5``.
    """
    if isinstance(d, bool) or int(d) != d:
        raise DomainError(f"d must be an integer, got {d!r}")
    d = int(d)
    if d < 5:
        raise DomainError(f"d >= 5 required (profile formula), got d={d}")
    alpha, beta = alpha_beta(d)
    k_d = (d + 1) // 2 if d % 2 else None
    return Params(d=d, alpha=alpha, beta=beta, k_d=k_d)


# ---------------------------------------------------------------------------
# Chebyshev representation in x = rho^2

def cheb_nodes(degree: int, X: float = 1.0) -> np.ndarray:
    """Chebyshev-Gauss nodes on ``[0, X]`` in increasing order."""
    return 0.5 * X * (C.chebpts1(degree + 1) + 1.0)


def values_to_coeffs(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from values at the increasing Gauss nodes."""
    v = np.asarray(values)[::-1]
    n = v.shape[0]
    if np.iscomplexobj(v):
        c = (dct(v.real, type=2) + 1j * dct(v.imag, type=2)) / n
    else:
        c = dct(v, type=2) / n
    c[0] *= 0.5
    return c


@dataclass
class RadialFunction:
    """Even radial function ``u(rho) = ũ(rho**2)`` with ũ a Chebyshev series.

    Parameters
    ----------
    coeffs : array_like
        Chebyshev coefficients of ũ on ``[0, X]``; real or complex.
    X : float
        Right end of the x-interval.  The default 1 is the unit lightcone.
    exact : callable, optional
        Exact ``x -> ũ(x)``, used for pointwise evaluation when present.
    """

    coeffs: np.ndarray
    X: float = 1.0
    exact: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs))
        if self.coeffs.dtype.kind not in "fc":
            self.coeffs = self.coeffs.astype(float)

    # construction
    @classmethod
    def from_values(cls, values, X: float = 1.0, exact=None) -> "RadialFunction":
        return cls(values_to_coeffs(values), X, exact)

    @classmethod
    def interpolate(cls, fx: Callable, degree: int = 64, X: float = 1.0,
                    keep_exact: bool = True) -> "RadialFunction":
        """Interpolate ``fx`` (a function of x) at ``degree + 1`` Gauss nodes."""
        x = cheb_nodes(degree, X)
        return cls.from_values(fx(x), X, fx if keep_exact else None)

    @classmethod
    def from_rho(cls, f: Callable, degree: int = 64, X: float = 1.0) -> "RadialFunction":
        """Interpolate an even function given in terms of rho."""
        return cls.interpolate(lambda x: f(np.sqrt(x)), degree, X, keep_exact=False)

    # basic properties
    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def _s(self, x):
        return 2.0 * np.asarray(x) / self.X - 1.0

    def eval_x(self, x, exact: bool = True):
        """Evaluate ũ at x."""
        if exact and self.exact is not None:
            return self.exact(np.asarray(x, dtype=float))
        return C.chebval(self._s(x), self.coeffs)

    def __call__(self, rho, exact: bool = True):
        rho = np.asarray(rho, dtype=float)
        return self.eval_x(rho * rho, exact)

    def values(self, degree: Optional[int] = None, exact: bool = True):
        """Values at the Gauss nodes of the given degree."""
        return self.eval_x(cheb_nodes(self.degree if degree is None else degree, self.X), exact)

    # calculus
    def deriv_x(self, m: int = 1) -> "RadialFunction":
        """``d^m ũ / dx^m`` as a new RadialFunction."""
        if m == 0:
            return RadialFunction(self.coeffs.copy(), self.X)
        c = C.chebder(self.coeffs, m) * (2.0 / self.X) ** m
        if c.size == 0:
            c = np.zeros(1, dtype=self.coeffs.dtype)
        return RadialFunction(c, self.X)

    def rho_series(self) -> C.Chebyshev:
        """The same function as a Chebyshev series in rho on ``[-1, 1]``.

        Uses ``T_n(2 rho^2 - 1) = T_{2n}(rho)``; only valid for ``X == 1``.
        """
        if self.X != 1.0:
            raise DomainError("rho_series needs the unit interval X = 1")
        c = np.zeros(2 * self.coeffs.size - 1, dtype=self.coeffs.dtype)
        c[::2] = self.coeffs
        return C.Chebyshev(c)

    def resample(self, degree: int) -> "RadialFunction":
        """Truncate or zero-pad the coefficient vector."""
        c = np.zeros(degree + 1, dtype=self.coeffs.dtype)
        k = min(degree + 1, self.coeffs.size)
        c[:k] = self.coeffs[:k]
        return RadialFunction(c, self.X, self.exact)

    # arithmetic on coefficients (exact callables survive scaling only)
    def _other(self, other):
        if isinstance(other, RadialFunction):
            if other.X != self.X:
                raise DomainError("RadialFunctions live on different intervals")
            return other.coeffs
        return None

    def __add__(self, other):
        oc = self._other(other)
        if oc is None:
            c = self.coeffs.astype(np.result_type(self.coeffs, other), copy=True)
            c[0] += other
            return RadialFunction(c, self.X)
        return RadialFunction(C.chebadd(self.coeffs, oc), self.X)

    __radd__ = __add__

    def __neg__(self):
        return RadialFunction(-self.coeffs, self.X)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        oc = self._other(other)
        if oc is None:
            ex = None
            if self.exact is not None:
                f = self.exact
                ex = lambda x: other * f(x)  # noqa: E731
            return RadialFunction(self.coeffs * other, self.X, ex)
        return RadialFunction(C.chebmul(self.coeffs, oc), self.X)

    __rmul__ = __mul__

    def conj(self) -> "RadialFunction":
        return RadialFunction(np.conj(self.coeffs), self.X)


@dataclass
class Field:
    """A state ``(psi, phi)`` of the first-order similarity system."""

    psi: RadialFunction
    phi: RadialFunction

    def __add__(self, other: "Field") -> "Field":
        return Field(self.psi + other.psi, self.phi + other.phi)

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.psi - other.psi, self.phi - other.phi)

    def __mul__(self, c) -> "Field":
        return Field(self.psi * c, self.phi * c)

    __rmul__ = __mul__

    def __iter__(self):
        yield self.psi
        yield self.phi


# ---------------------------------------------------------------------------
# blowup family

def u_T(t, r, T, p: Params):
    """Self-similar blowup solution ``(T-t)^-2 alpha / (rho^2 + beta)``.

    Written as ``alpha / (r^2 + beta (T-t)^2)`` which is algebraically equal.
    """
    t, r = np.asarray(t, dtype=float), np.asarray(r, dtype=float)
    if T <= 0:
        raise DomainError("T > 0 required")
    if np.any(t >= T):
        raise DomainError("t < T required (past blowup time)")
    if np.any(r < 0):
        raise DomainError("r >= 0 required")
    s = T - t
    return p.alpha / (r * r + p.beta * s * s)


def u_T_jet(t, r, T, p: Params) -> dict:
    """``u_T`` and its first and second partial derivatives in t and r."""
    u = u_T(t, r, T, p)
    t, r = np.asarray(t, dtype=float), np.asarray(r, dtype=float)
    a, b = p.alpha, p.beta
    s = T - t
    Q = r * r + b * s * s
    return {
        "u": u,
        "u_t": 2 * a * b * s / Q**2,
        "u_tt": -2 * a * b / Q**2 + 8 * a * b * b * s * s / Q**3,
        "u_r": -2 * a * r / Q**2,
        "u_rr": -2 * a / Q**2 + 8 * a * r * r / Q**3,
    }


def equiv_residual(jet: dict, r, d: int, relative: bool = True):
    """Residual of the radial wave equation in dimension d + 2.

    ``u_tt - u_rr - (d+1)/r u_r - (d-2) u^2 (3 - r^2 u)``.  With
    ``relative=True`` the residual is divided by the largest term, which
    keeps the measure meaningful near the tip of the cone.
    """
    r = np.asarray(r, dtype=float)
    u = jet["u"]
    terms = [jet["u_tt"], -jet["u_rr"], -(d + 1) / r * jet["u_r"],
             -(d - 2) * u * u * (3 - r * r * u)]
    res = sum(terms)
    if not relative:
        return res
    scale = np.max(np.abs(np.stack(terms)), axis=0)
    return res / np.where(scale > 0, scale, 1.0)


# ---------------------------------------------------------------------------
# static profile, potential, nonlinearity, gauge mode

def psi_static(p: Params, degree: int = 64) -> Field:
    """Static state ``(alpha/(x+beta), 2 alpha beta/(x+beta)^2)``, x = rho^2."""
    a, b = p.alpha, p.beta
    return Field(RadialFunction.interpolate(lambda x: a / (x + b), degree),
                 RadialFunction.interpolate(lambda x: 2 * a * b / (x + b) ** 2, degree))


def potential_values(x, p: Params):
    a, b = p.alpha, p.beta
    return 3 * (p.d - 2) * a * (2 * b - (a - 2) * x) / (x + b) ** 2


def potential_V(p: Params, degree: int = 64) -> RadialFunction:
    """Potential of the linearized operator."""
    return RadialFunction.interpolate(lambda x: potential_values(x, p), degree)


def full_nonlinearity(psi, x, d: int):
    """Nonlinear source ``(d-2) psi^2 (3 - x psi)`` of the full system."""
    return (d - 2) * psi * psi * (3 - x * psi)


def nonlinear_values(u, x, p: Params):
    """Remainder of the source after removing its linearization at the static state.

    Equals ``N(psi_st + u) - N(psi_st) - V u`` exactly, i.e.
    ``-(d-2) u^2 ((3(alpha-1)x - 3 beta)/(x + beta) + x u)``.
    """
    a, b = p.alpha, p.beta
    return -(p.d - 2) * u * u * ((3 * (a - 1) * x - 3 * b) / (x + b) + x * u)


def nonlinearity_N(u: RadialFunction, p: Params, degree: Optional[int] = None) -> RadialFunction:
    """Pointwise nonlinear remainder applied to a RadialFunction.

    The result keeps an exact evaluator (composition with ``u``) and a
    Chebyshev fit of degree ``3 * u.degree + 16`` unless given.
    """
    if degree is None:
        degree = 3 * u.degree + 16

    def fx(x):
        return nonlinear_values(u.eval_x(x), x, p)

    return RadialFunction.interpolate(fx, degree, u.X)


def gauge_values(x, p: Params):
    """``(g1, g2)`` at x with ``g1 = (x+beta)^-2`` and ``g2 = rho g1' + 3 g1``."""
    b = p.beta
    g1 = 1.0 / (x + b) ** 2
    g2 = 3.0 * g1 - 4.0 * x / (x + b) ** 3
    return g1, g2


def gauge_mode(p: Params, degree: int = 64) -> Field:
    """Symmetry mode at eigenvalue 1 generated by shifting the blowup time."""
    return Field(RadialFunction.interpolate(lambda x: gauge_values(x, p)[0], degree),
                 RadialFunction.interpolate(lambda x: gauge_values(x, p)[1], degree))
