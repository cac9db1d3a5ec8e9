"""
Similarity variables on the backward lightcone and blowup-rate norms.

The backward lightcone of ``(T, 0)`` is mapped to the half cylinder
``[0, inf) x [0, 1]`` by ``tau = ln T - ln(T - t)`` and ``rho = r / (T - t)``;
fields are rescaled by ``psi = (T-t)^2 u`` and ``phi = (T-t)^3 u_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .profiles import DomainError, Field, Params, RadialFunction, u_T_jet
from .sobolev import hdot_seminorm_sq

#: ``field(t, r) -> (u, u_t)``, vectorized in r
PhysicalField = Callable[[float, np.ndarray], tuple]


@dataclass(frozen=True)
class SimCoords:
    """A point of the similarity cylinder together with its blowup time."""

    tau: float
    rho: float
    T: float


def to_similarity(t: float, r: float, T: float) -> SimCoords:
    """Similarity coordinates of the lightcone point ``(t, r)``.

    Raises
    ------
    DomainError
        If ``t >= T``, ``t < 0``, ``T <= 0`` or ``r`` lies outside ``[0, T - t]``.
    """
    if T <= 0:
        raise DomainError(f"T > 0 required, got {T}")
    if t >= T:
        raise DomainError(f"t < T required, got t={t}, T={T}")
    if t < 0:
        raise DomainError(f"t >= 0 required, got {t}")
    s = T - t
    if r < 0 or r > s:
        raise DomainError(f"r={r} is outside the lightcone radius {s}")
    rho = 1.0 if r == s else r / s
    return SimCoords(tau=math.log(T) - math.log(s), rho=rho, T=T)


def from_similarity(c: SimCoords) -> tuple[float, float]:
    """Inverse map ``(tau, rho) -> (t, r)``."""
    if c.tau < 0 or not 0 <= c.rho <= 1:
        raise DomainError(f"({c.tau}, {c.rho}) is outside the cylinder")
    e = math.exp(-c.tau)
    return c.T * (1.0 - e), c.T * c.rho * e


def rescale_fields(u, ut, t: float, T: float):
    """``(psi, phi) = ((T-t)^2 u, (T-t)^3 u_t)``."""
    if t >= T:
        raise DomainError(f"t < T required, got t={t}, T={T}")
    s = T - t
    return s * s * np.asarray(u), s ** 3 * np.asarray(ut)


def unrescale_fields(psi, phi, t: float, T: float):
    """Inverse of :func:`rescale_fields`."""
    if t >= T:
        raise DomainError(f"t < T required, got t={t}, T={T}")
    s = T - t
    return np.asarray(psi) / (s * s), np.asarray(phi) / s ** 3


def blowup_field(p: Params, T: float = 1.0) -> PhysicalField:
    """The self-similar solution ``u_T`` as a physical field ``(u, u_t)``."""

    def f(t, r):
        jet = u_T_jet(t, np.asarray(r, dtype=float), T, p)
        return jet["u"], jet["u_t"]

    return f


def field_from_similarity(state: Field, tau: float, T: float) -> PhysicalField:
    """Physical field at the single time ``t = T(1 - e^{-tau})`` of a similarity state.

    The returned callable ignores its time argument apart from a consistency
    check.
    """
    t0 = T * (1.0 - math.exp(-tau))

    def f(t, r):
        if abs(t - t0) > 1e-12 * max(1.0, T):
            raise DomainError(f"state is known at t={t0} only")
        s = T - t0
        x = (np.asarray(r, dtype=float) / s) ** 2
        return unrescale_fields(state.psi.eval_x(x), state.phi.eval_x(x), t0, T)

    return f


def similarity_state(field: PhysicalField, t: float, T: float, degree: int = 64) -> Field:
    """Sample a physical field inside the lightcone and rescale to ``(psi, phi)``."""
    if t >= T:
        raise DomainError(f"t < T required, got t={t}, T={T}")
    s = T - t

    def comp(i):
        def fx(x):
            u = field(t, s * np.sqrt(x))
            return rescale_fields(u[0], u[1], t, T)[i]
        return fx

    return Field(RadialFunction.interpolate(comp(0), degree, keep_exact=False),
                 RadialFunction.interpolate(comp(1), degree, keep_exact=False))


def _check_k(k: int, p: Params):
    if not p.odd:
        raise DomainError("blowup-rate norms are set up for odd d")
    if int(k) != k or not 1 <= k <= p.k_d:
        raise DomainError(f"k must be in 1..{p.k_d} for d={p.d}, got {k}")


def lightcone_norm(field: PhysicalField, t: float, T: float, k: int, p: Params,
                   degree: int = 64) -> float:
    """``Hdot^k x Hdot^{k-1}`` norm of the equivariant 1-form on ``B^d_{T-t}``.

    With ``A^{ij}_k = (delta^j_k x_i - delta^i_k x_j) u`` and each
    independent pair ``i < j`` counted once, ``||A||^2 = (d-1) sum_i
    ||x_i u||^2``.  The ball of radius ``s = T - t`` is scaled to the unit
    ball, where the rescaled fields ``psi, phi`` live, and the power of ``s``
    is applied analytically::

        ||A[t]|| = s^(d/2 - 1 - k) sqrt((d-1)(|y psi|^2_{Hdot^k} + |y phi|^2_{Hdot^{k-1}}))
    """
    _check_k(k, p)
    s = T - t
    u = similarity_state(field, t, T, degree)
    a = hdot_seminorm_sq(u.psi, p.d, k, corot=True)
    b = hdot_seminorm_sq(u.phi, p.d, k - 1, corot=True)
    return s ** (p.d / 2 - 1 - k) * math.sqrt(max((p.d - 1) * (a + b), 0.0))


@dataclass
class RateFit:
    """Blowup-rate samples and the fitted log-log slope."""

    t: np.ndarray
    Tmt: np.ndarray
    norm: np.ndarray
    local_slope: np.ndarray
    slope: float
    expected: float


def blowup_rate(field: PhysicalField, T: float, k: int, p: Params,
                Tmt_range: tuple = (1e-3, 1e-1), npts: int = 20,
                degree: int = 64) -> RateFit:
    """Fit ``log ||A[t]||`` against ``log(T - t)`` on log-spaced samples.

    The expected exponent is ``d/2 - 1 - k``.
    """
    _check_k(k, p)
    lo, hi = Tmt_range
    if not 0 < lo < hi <= T:
        raise DomainError(f"need 0 < {lo} < {hi} <= T")
    Tmt = np.geomspace(hi, lo, npts)
    t = T - Tmt
    norms = np.array([lightcone_norm(field, ti, T, k, p, degree) for ti in t])
    lx, ly = np.log(Tmt), np.log(norms)
    slope = float(np.polyfit(lx, ly, 1)[0])
    local = np.gradient(ly, lx)
    return RateFit(t=t, Tmt=Tmt, norm=norms, local_slope=local, slope=slope,
                   expected=p.d / 2 - 1 - k)
