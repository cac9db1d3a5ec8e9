"""
Norm calculus for radial profiles.

Two representations are supported side by side:

* :class:`RhoPoly`, a finite sum ``sum c_e rho^e`` with ``Fraction``
  coefficients, on which ``D_d``, ``K_d``, ``Lambda`` and the radial Laplacian
  act exactly;
* floating point :class:`~ymblow.profiles.RadialFunction` (even) and
  :class:`OddRadialFunction` (``rho * W(rho^2)``) used by the quadratures.

Sobolev norms of radial and corotational functions on balls are computed
without multi-dimensional grids.  Writing ``f(y) = y^nu G(|y|^2)``, every
derivative ``d^alpha f`` is a finite sum of terms ``c y^mu G^(p)(|y|^2)``;
the angular integrals of the monomials are known in closed form, so the
squared seminorm collapses to ``sum_{p,q} W[p,q] int r^e G^(p) G^(q) dr``
with a table ``W`` that depends only on ``(d, k, nu)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, singledispatch
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P
from scipy.special import roots_jacobi, roots_legendre

from .profiles import DomainError, Field, Params, RadialFunction


# ---------------------------------------------------------------------------
# exact polynomials in rho

class RhoPoly:
    """Exact Laurent polynomial ``sum_e c_e rho^e`` with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                t[int(e)] = c
        self.terms = t

    @classmethod
    def from_x_coeffs(cls, coeffs) -> "RhoPoly":
        """Even polynomial ``sum c_j x^j`` with ``x = rho^2``."""
        return cls({2 * j: c for j, c in enumerate(coeffs)})

    @classmethod
    def monomial(cls, e: int, c=1) -> "RhoPoly":
        return cls({e: c})

    def __eq__(self, other):
        return isinstance(other, RhoPoly) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "RhoPoly(0)"
        parts = [f"{c}*rho^{e}" for e, c in sorted(self.terms.items())]
        return "RhoPoly(" + " + ".join(parts) + ")"

    def __add__(self, other):
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return RhoPoly(t)

    def __neg__(self):
        return RhoPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RhoPoly):
            t = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    t[e1 + e2] = t.get(e1 + e2, 0) + c1 * c2
            return RhoPoly(t)
        return RhoPoly({e: c * Fraction(other) for e, c in self.terms.items()})

    __rmul__ = __mul__

    def shift(self, k: int) -> "RhoPoly":
        """Multiply by ``rho^k``."""
        return RhoPoly({e + k: c for e, c in self.terms.items()})

    def deriv(self) -> "RhoPoly":
        return RhoPoly({e - 1: e * c for e, c in self.terms.items() if e != 0})

    def calD(self) -> "RhoPoly":
        """``(1/rho) d/drho``."""
        return RhoPoly({e - 2: e * c for e, c in self.terms.items() if e != 0})

    def calK(self) -> "RhoPoly":
        """``int_0^rho s u(s) ds``; needs all exponents > -2."""
        if any(e <= -2 for e in self.terms):
            raise DomainError("K integral diverges at rho = 0")
        return RhoPoly({e + 2: c / (e + 2) for e, c in self.terms.items()})

    def Lambda(self) -> "RhoPoly":
        """``-rho u'``."""
        return RhoPoly({e: -e * c for e, c in self.terms.items()})

    def laplace(self, d: int) -> "RhoPoly":
        """Radial Laplacian ``rho^(1-d) (rho^(d-1) u')'``."""
        return RhoPoly({e - 2: e * (e + d - 2) * c for e, c in self.terms.items() if e != 0})

    @property
    def is_even(self) -> bool:
        return all(e % 2 == 0 for e in self.terms)

    @property
    def is_odd(self) -> bool:
        return all(e % 2 == 1 for e in self.terms)

    @property
    def min_exponent(self) -> Optional[int]:
        return min(self.terms) if self.terms else None

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return sum(float(c) * rho**e for e, c in self.terms.items()) + 0 * rho

    def to_polynomial(self) -> P.Polynomial:
        """Power-basis numpy polynomial in rho (non-negative exponents only)."""
        if self.terms and self.min_exponent < 0:
            raise DomainError("negative powers of rho")
        n = max(self.terms, default=0)
        c = np.zeros(n + 1)
        for e, v in self.terms.items():
            c[e] = float(v)
        return P.Polynomial(c)


# ---------------------------------------------------------------------------
# odd radial functions rho * W(rho^2)

class OddRadialFunction:
    """Odd function ``w(rho) = rho * W(rho^2)`` with W a RadialFunction."""

    def __init__(self, W: RadialFunction):
        self.W = W

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return rho * self.W(rho, exact=False)

    def deriv(self) -> RadialFunction:
        """``w' = W + 2 x W'``, an even function."""
        return self.W + _times_x(self.W.deriv_x()) * 2.0

    @property
    def degree(self) -> int:
        return self.W.degree


def _times_x(f: RadialFunction, power: int = 1) -> RadialFunction:
    xs = np.array([0.5 * f.X, 0.5 * f.X])
    c = f.coeffs
    for _ in range(power):
        c = C.chebmul(c, xs)
    return RadialFunction(c, f.X)


def _falling(a: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= a - i
    return out


def _check_odd_d(d: int):
    if int(d) != d or d < 3 or d % 2 == 0:
        raise DomainError(f"D_d and K_d are defined for odd d >= 3, got d={d}")


# ---------------------------------------------------------------------------
# D_d and K_d

@singledispatch
def op_D(u, d: int):
    """``D_d u = calD^((d-3)/2) (rho^(d-2) u)`` mapping even to odd functions."""
    raise TypeError(f"op_D does not support {type(u).__name__}")


@op_D.register
def _(u: RhoPoly, d: int) -> RhoPoly:
    _check_odd_d(d)
    w = u.shift(d - 2)
    for _ in range((d - 3) // 2):
        w = w.calD()
    return w


@op_D.register
def _(u: RadialFunction, d: int) -> OddRadialFunction:
    _check_odd_d(d)
    m, a = (d - 3) // 2, (d - 2) / 2
    W = RadialFunction(np.zeros(1, dtype=u.coeffs.dtype), u.X)
    for j in range(m + 1):
        term = _times_x(u.deriv_x(m - j), m - j) * (math.comb(m, j) * _falling(a, j))
        W = W + term
    return OddRadialFunction(W * 2.0**m)


@singledispatch
def op_K(w, d: int):
    """``K_d w = rho^(2-d) calK^((d-3)/2) w``, the inverse of ``D_d``."""
    raise TypeError(f"op_K does not support {type(w).__name__}")


@op_K.register
def _(w: RhoPoly, d: int) -> RhoPoly:
    _check_odd_d(d)
    for _ in range((d - 3) // 2):
        w = w.calK()
    return w.shift(2 - d)


@op_K.register
def _(w: OddRadialFunction, d: int) -> RadialFunction:
    # repeated integrals collapse to a single Gauss-Jacobi quadrature:
    # K_d w(x) = 2^-m / (m-1)! int_0^1 (1-t)^(m-1) t^(1/2) W(x t) dt
    _check_odd_d(d)
    m = (d - 3) // 2
    W = w.W
    if m == 0:
        return RadialFunction(W.coeffs.copy(), W.X)
    n = W.degree + 2
    z, wt = roots_jacobi(n, m - 1, 0.5)
    t = 0.5 * (1 + z)
    scale = 2.0 ** (-(m + 0.5)) * 2.0**-m / math.factorial(m - 1)

    def fx(x):
        x = np.asarray(x, dtype=float)
        vals = W.eval_x(np.multiply.outer(x, t), exact=False)
        return scale * (vals @ wt)

    return RadialFunction.interpolate(fx, W.degree, W.X, keep_exact=False)


# ---------------------------------------------------------------------------
# quadrature helpers

@lru_cache(maxsize=64)
def _gl(n: int):
    z, w = roots_legendre(n)
    return 0.5 * (z + 1), 0.5 * w


def _gl_interval(n: int, R: float = 1.0):
    t, w = _gl(n)
    return R * t, R * w


# ---------------------------------------------------------------------------
# the D inner product and the dissipation identity

def _check_field_params(p: Params):
    if not p.odd:
        raise DomainError("the D inner product needs odd d")


def inner_D(u: Field, v: Field, p: Params, quad_factor: int = 1) -> complex:
    """Graph inner product ``(D u1'|D v1')_L2 + (D u2|D v2)_L2`` on (0, 1).

    ``D = D_{d+2}``.  Gauss-Legendre with enough nodes to be exact on the
    polynomial integrands; ``quad_factor`` multiplies the node count.
    """
    _check_field_params(p)
    dd = p.d + 2
    w1, z1 = op_D(u.psi, dd).deriv(), op_D(v.psi, dd).deriv()
    w2, z2 = op_D(u.phi, dd), op_D(v.phi, dd)
    deg = max(w1.degree, z1.degree, w2.degree + 1, z2.degree + 1)
    r, wt = _gl_interval(quad_factor * (2 * deg + 2))
    a = np.sum(wt * w1(r, exact=False) * np.conj(z1(r, exact=False)))
    b = np.sum(wt * w2(r) * np.conj(z2(r)))
    return complex(a + b)


def norm_D(u: Field, p: Params, quad_factor: int = 1) -> float:
    return math.sqrt(max(inner_D(u, u, p, quad_factor).real, 0.0))


def free_operator(u: Field, d: int) -> Field:
    """Apply the free similarity operator to a polynomial state.

    First row ``u2 - rho u1' - 2 u1``; second row
    ``Laplacian_{d+2} u1 - rho u2' - 3 u2``, all written in x = rho^2.
    """
    u1, u2 = u.psi, u.phi
    d1, d2 = u1.deriv_x(), u2.deriv_x()
    first = u2 - _times_x(d1) * 2.0 - u1 * 2.0
    second = (_times_x(u1.deriv_x(2)) * 4.0 + d1 * (2.0 * (d + 2))
              - _times_x(d2) * 2.0 - u2 * 3.0)
    return Field(first, second)


def dissipation_defect(u: Field, p: Params, quad_factor: int = 1) -> float:
    """``Re(L0 u|u)_D + 3/2 |u|_D^2 + 1/2 |w1'(1) - w2(1)|^2`` which must vanish."""
    _check_field_params(p)
    lu = free_operator(u, p.d)
    w1 = op_D(u.psi, p.d + 2)
    w2 = op_D(u.phi, p.d + 2)
    boundary = w1.deriv()(1.0, exact=False) - w2(1.0)
    re = inner_D(lu, u, p, quad_factor).real
    return float(re + 1.5 * inner_D(u, u, p, quad_factor).real + 0.5 * abs(boundary) ** 2)


def _integral01(f: RhoPoly) -> Fraction:
    if f.terms and f.min_exponent < 0:
        raise DomainError("integrand is singular at rho = 0")
    return sum((c / (e + 1) for e, c in f.terms.items()), Fraction(0))


def inner_D_exact(u: tuple, v: tuple, d: int) -> Fraction:
    """``(u|v)_D`` for real pairs of RhoPolys, in exact rational arithmetic."""
    dd = d + 2
    w1, z1 = op_D(u[0], dd).deriv(), op_D(v[0], dd).deriv()
    w2, z2 = op_D(u[1], dd), op_D(v[1], dd)
    return _integral01(w1 * z1) + _integral01(w2 * z2)


def dissipation_defect_exact(u1: RhoPoly, u2: RhoPoly, d: int) -> Fraction:
    """Exact counterpart of :func:`dissipation_defect` for rational polynomial pairs."""
    _check_odd_d(d)
    lu = (u2 + u1.Lambda() - u1 * 2, u1.laplace(d + 2) + u2.Lambda() - u2 * 3)
    w1 = op_D(u1, d + 2).deriv()
    w2 = op_D(u2, d + 2)
    boundary = sum(w1.terms.values(), Fraction(0)) - sum(w2.terms.values(), Fraction(0))
    u = (u1, u2)
    return inner_D_exact(lu, u, d) + Fraction(3, 2) * inner_D_exact(u, u, d) + boundary ** 2 / 2


# ---------------------------------------------------------------------------
# exact Sobolev seminorms of y^nu G(|y|^2) on balls

@dataclass(frozen=True)
class NormSpec:
    """Sobolev norm request: dimension d, order k, ball radius R."""

    d: int
    k: int
    R: float = 1.0

    def require(self, route: str):
        d, k = self.d, self.k
        if k < 0 or self.R <= 0 or d < 1:
            raise DomainError(f"invalid norm spec {self}")
        limits = {"equiv1": d / 2, "main": d / 2 + 1, "corot": d / 2 + 2}
        if route in limits and not k < limits[route]:
            raise DomainError(f"route {route!r} needs k < {limits[route]:g}, got k={k}")


def _sphere_moment(gamma) -> float:
    """``int_{S^{d-1}} omega^gamma`` (zero unless every entry is even)."""
    if any(g % 2 for g in gamma):
        return 0.0
    d = len(gamma)
    s = sum(math.lgamma((g + 1) / 2) for g in gamma) - math.lgamma((sum(gamma) + d) / 2)
    return 2.0 * math.exp(s)


def _derivative_terms(nu, alpha):
    """``d^alpha (y^nu G(|y|^2))`` as ``{(mu, p): coeff}``."""
    terms = {(tuple(nu), 0): 1}
    for i, ai in enumerate(alpha):
        for _ in range(ai):
            new = {}
            for (mu, p), c in terms.items():
                if mu[i]:
                    lo = mu[:i] + (mu[i] - 1,) + mu[i + 1:]
                    new[(lo, p)] = new.get((lo, p), 0) + c * mu[i]
                hi = mu[:i] + (mu[i] + 1,) + mu[i + 1:]
                new[(hi, p + 1)] = new.get((hi, p + 1), 0) + 2 * c
            terms = new
    return terms


def _arrangements(counts) -> int:
    n = sum(counts)
    out = math.factorial(n)
    for c in counts:
        out //= math.factorial(c)
    return out


def _orbit_multiplicity(parts, slots):
    values = list(parts) + [0] * (slots - len(parts))
    return _arrangements([values.count(v) for v in set(values)])


def _partitions(k, max_parts):
    """Partitions of k (non-increasing tuples) with at most ``max_parts`` parts."""
    def rec(n, largest, left):
        if n == 0:
            yield ()
            return
        if left == 0:
            return
        for first in range(min(n, largest), 0, -1):
            for rest in rec(n - first, first, left - 1):
                yield (first,) + rest
    return list(rec(k, k, max_parts))


@lru_cache(maxsize=None)
def seminorm_table(d: int, k: int, corot: bool) -> np.ndarray:
    """Table ``W[p, q]`` for the squared Hdot^k seminorm on the unit d-ball.

    ``corot=False`` handles ``G(|y|^2)``; ``corot=True`` handles the
    corotational map ``U_i = y_i G(|y|^2)`` summed over ``i``.
    """
    W = np.zeros((k + 1, k + 1))
    groups = []
    if not corot:
        for part in _partitions(k, d):
            alpha = tuple(part) + (0,) * (d - len(part))
            groups.append((alpha, _orbit_multiplicity(part, d)))
        nu = (0,) * d
    else:
        # by symmetry sum_i |d^alpha(y_i G)|^2 integrates to d times the i = 1 term
        for a1 in range(k + 1):
            for part in _partitions(k - a1, d - 1):
                alpha = (a1,) + tuple(part) + (0,) * (d - 1 - len(part))
                groups.append((alpha, d * _orbit_multiplicity(part, d - 1)))
        nu = (1,) + (0,) * (d - 1)
    for alpha, mult in groups:
        terms = list(_derivative_terms(nu, alpha).items())
        for (mu1, p1), c1 in terms:
            for (mu2, p2), c2 in terms:
                gamma = tuple(a + b for a, b in zip(mu1, mu2))
                s = _sphere_moment(gamma)
                if s:
                    W[p1, p2] += mult * c1 * c2 * s
    return W


def hdot_seminorm_sq(G: RadialFunction, d: int, k: int, R: float = 1.0,
                     corot: bool = False, quad_factor: int = 1) -> float:
    """Squared ``Hdot^k(B^d_R)`` seminorm of ``G(|y|^2)`` or of ``y_i G(|y|^2)``.

    The radial integrals are done by Gauss-Legendre in r, exact for
    polynomial G.
    """
    if R * R > G.X * (1 + 1e-12):
        raise DomainError("RadialFunction interval does not cover the ball")
    W = seminorm_table(d, k, corot)
    nu = 1 if corot else 0
    n = quad_factor * (2 * G.degree + k + d + 4)
    r, wt = _gl_interval(n, R)
    x = r * r
    derivs = [G.deriv_x(j).eval_x(x, exact=False) if j <= G.degree + 1 else np.zeros_like(x)
              for j in range(k + 1)]
    total = 0.0
    for p in range(k + 1):
        for q in range(k + 1):
            if W[p, q] == 0.0:
                continue
            e = 2 * nu + 2 * p + 2 * q - 2 * k + d - 1
            total += W[p, q] * np.sum(wt * r**e * (derivs[p] * np.conj(derivs[q])).real)
    return float(total)


def sobolev_norm(G: RadialFunction, d: int, k: int, R: float = 1.0,
                 corot: bool = False, quad_factor: int = 1) -> float:
    """Inhomogeneous ``H^k(B^d_R)`` norm via the exact seminorm tables."""
    s = sum(hdot_seminorm_sq(G, d, j, R, corot, quad_factor) for j in range(k + 1))
    return math.sqrt(max(s, 0.0))


def norm_H(u: RadialFunction, spec: NormSpec, method: str = "exact",
           quad_factor: int = 1) -> float:
    """Radial Sobolev norm of ``u(|.|)`` on ``B^d_R``.

    Methods
    -------
    ``"exact"``
        Full multi-index sum, any k.
    ``"equiv1"``
        ``sum_{n<=k} ||rho^(n+(d-1)/2-k) u^(n)||`` (needs ``k < d/2``).
    ``"main"``
        ``sum_{n<=k} ||rho^((d-1)/2) u^(n)||`` (needs ``k < d/2 + 1``).
    """
    spec.require(method)
    d, k, R = spec.d, spec.k, spec.R
    if method == "exact":
        return sobolev_norm(u, d, k, R, quad_factor=quad_factor)
    if R != 1.0:
        raise DomainError("weighted routes are implemented on the unit interval")
    f = u.rho_series()
    n = quad_factor * (2 * u.degree + d + 2)
    r, wt = _gl_interval(n)
    total = 0.0
    for j in range(k + 1):
        fj = f.deriv(j)(r) if j else f(r)
        power = j + (d - 1) / 2 - k if method == "equiv1" else (d - 1) / 2
        total += math.sqrt(np.sum(wt * r ** (2 * power) * np.abs(fj) ** 2))
    return float(total)


def norm_calH(u: Field, p: Params, quad_factor: int = 1) -> float:
    """Norm of the evolution space ``H^{k_d} x H^{k_d - 1}`` on ``B^{d+2}``."""
    if p.k_d is None:
        raise DomainError("the evolution space is defined for odd d")
    a = sobolev_norm(u.psi, p.d + 2, p.k_d, quad_factor=quad_factor)
    b = sobolev_norm(u.phi, p.d + 2, p.k_d - 1, quad_factor=quad_factor)
    return math.hypot(a, b)


def corot_norm_equiv(u: RadialFunction, spec: NormSpec, quad_factor: int = 1):
    """``(||U||_{H^k(B^d_R)}, ||u(|.|)||_{H^k(B^{d+2}_R)})`` with ``U_i = x_i u``."""
    spec.require("corot")
    lhs = sobolev_norm(u, spec.d, spec.k, spec.R, corot=True, quad_factor=quad_factor)
    rhs = sobolev_norm(u, spec.d + 2, spec.k, spec.R, quad_factor=quad_factor)
    return lhs, rhs


def oneform_norm(u: RadialFunction, spec: NormSpec, quad_factor: int = 1) -> float:
    """``H^k`` norm of the equivariant 1-form with profile u.

    Counting each independent component ``A^{ij}_k`` (``i < j``) once,
    ``||A||^2 = (d - 1) sum_i ||x_i u||^2``.
    """
    lhs, _ = corot_norm_equiv(u, spec, quad_factor)
    return math.sqrt(spec.d - 1) * lhs


# ---------------------------------------------------------------------------
# Hardy inequalities on [0, 1]

def _as_rho_poly(u) -> P.Polynomial:
    if isinstance(u, RadialFunction):
        return u.rho_series().convert(kind=P.Polynomial)
    if isinstance(u, OddRadialFunction):
        return (u.W.rho_series() * C.Chebyshev([0, 1])).convert(kind=P.Polynomial)
    if isinstance(u, RhoPoly):
        return u.to_polynomial()
    if isinstance(u, (P.Polynomial, C.Chebyshev)):
        return u.convert(kind=P.Polynomial)
    raise TypeError(f"unsupported function type {type(u).__name__}")


def _weighted_l2(f: P.Polynomial, power: float) -> float:
    """``||rho^power f||_{L^2(0,1)}`` by Gauss-Jacobi with weight rho^(2 power)."""
    n = f.degree() + 2
    z, w = roots_jacobi(n, 0.0, 2 * power)
    t = 0.5 * (1 + z)
    w = w * 2.0 ** (-(1 + 2 * power))
    return math.sqrt(float(np.sum(w * np.abs(f(t)) ** 2)))


def hardy_check(kind: str, param: float, u) -> tuple[float, float, float]:
    """Evaluate both sides of one of the three Hardy inequalities on [0, 1].

    ``H1``: ``||rho^a u||`` vs ``|u(1)| + ||rho^(a+1) u'||`` (a > -1/2).
    ``H2``: ``|u(1)|`` vs ``||rho^b u|| + ||rho^(b+1) u'||`` (b > -1).
    ``H3``: ``||rho^-n u||`` vs ``||rho^(1-n) u'||`` for u vanishing to
    order n at 0 (n >= 1).

    Returns ``(lhs, rhs, lhs / rhs)``.
    """
    f = _as_rho_poly(u)
    df = f.deriv()
    if kind == "H1":
        if not param > -0.5:
            raise DomainError("H1 needs alpha > -1/2")
        lhs = _weighted_l2(f, param)
        rhs = abs(f(1.0)) + _weighted_l2(df, param + 1)
    elif kind == "H2":
        if not param > -1:
            raise DomainError("H2 needs beta > -1")
        lhs = abs(f(1.0))
        rhs = _weighted_l2(f, param) + _weighted_l2(df, param + 1)
    elif kind == "H3":
        n = int(param)
        if n != param or n < 1:
            raise DomainError("H3 needs an integer n >= 1")
        c = np.pad(f.coef, (0, max(0, n + 1 - f.coef.size)))
        scale = max(np.max(np.abs(c)), 1.0)
        if np.any(np.abs(c[:n]) > 1e-12 * scale):
            raise DomainError(f"H3 needs u to vanish to order {n} at 0")
        q = P.Polynomial(c[n:]) if c.size > n else P.Polynomial([0.0])
        dq = P.Polynomial(df.coef[n - 1:]) if df.coef.size > n - 1 else P.Polynomial([0.0])
        lhs = _weighted_l2(q, 0.0)
        rhs = _weighted_l2(dq, 0.0)
    else:
        raise DomainError(f"unknown Hardy inequality {kind!r}")
    return lhs, rhs, (lhs / rhs if rhs else math.inf)


# ---------------------------------------------------------------------------
# random suites

def suite_rng(seed: int) -> np.random.Generator:
    """Counter-based generator used for all random suites."""
    return np.random.Generator(np.random.Philox(seed))


def random_even_coeffs(rng: np.random.Generator, max_degree: int = 20) -> np.ndarray:
    """Coefficients ``c_n`` of ``sum c_n rho^(2n)`` with ``c_n ~ U[-1, 1] 2^-n``."""
    deg = int(rng.integers(0, max_degree + 1))
    return rng.uniform(-1.0, 1.0, deg + 1) * 2.0 ** -np.arange(deg + 1)


def x_poly_to_radial(coeffs, X: float = 1.0) -> RadialFunction:
    """RadialFunction for the power series ``sum c_n x^n`` on ``[0, X]``."""
    cheb = P.Polynomial(coeffs).convert(kind=C.Chebyshev, domain=[0.0, X])
    c = cheb.coef if cheb.coef.size else np.zeros(1)
    return RadialFunction(c, X)


def random_even_polynomial(rng: np.random.Generator, max_degree: int = 20) -> RadialFunction:
    return x_poly_to_radial(random_even_coeffs(rng, max_degree))


def random_field_suite(n: int, seed: int, max_degree: int = 20) -> list[Field]:
    """``n`` random polynomial states, reproducible from ``seed``."""
    rng = suite_rng(seed)
    return [Field(random_even_polynomial(rng, max_degree), random_even_polynomial(rng, max_degree))
            for _ in range(n)]


def random_rho_polys(n: int, seed: int, max_degree: int = 20, denominator: int = 64) -> list[RhoPoly]:
    """Random exact even polynomials with rational coefficients."""
    rng = suite_rng(seed)
    out = []
    for _ in range(n):
        deg = int(rng.integers(0, max_degree + 1))
        nums = rng.integers(-denominator, denominator + 1, deg + 1)
        out.append(RhoPoly.from_x_coeffs([Fraction(int(a), denominator) for a in nums]))
    return out
