"""
Similarity-variable dynamics near the blowup profile.

States are stored by their values at the Chebyshev-Gauss nodes in
``x = rho**2`` (see :func:`ymblow.profiles.cheb_nodes`); a :class:`Field`
is converted to and from the stacked nodal vector ``[psi; phi]``.  The
differentiation matrix is the barycentric one for these nodes, and no
boundary condition is imposed at the lightcone ``x = 1``.

In x the system reads::

    psi_tau = phi - 2 x psi' - 2 psi
    phi_tau = 4 x psi'' + 2 (d + 2) psi' - 2 x phi' - 3 phi + (d - 2) psi^2 (3 - x psi)

and its linearization at the static state adds ``V psi`` to the second row.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq

from .profiles import (DomainError, Field, Params, RadialFunction, cheb_nodes, full_nonlinearity,
                       gauge_mode, gauge_values, nonlinear_values, potential_values)
from .sobolev import norm_D, norm_calH


class DivergenceError(RuntimeError):
    """The discrete state left the region where the evolution is trusted."""

    def __init__(self, tau: float, norm: float):
        super().__init__(f"state norm {norm:.3g} exceeded the guard at tau={tau:.6g}")
        self.tau = tau
        self.norm = norm


class BracketError(ValueError):
    """The shooting functional has no sign change on the bracket."""


# ---------------------------------------------------------------------------
# operator assembly

def diff_matrix(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and barycentric differentiation matrix on ``[0, 1]``.

    The ``n`` nodes are the increasing Chebyshev-Gauss points; their
    barycentric weights are ``(-1)**j sin((2j+1) pi / (2n))``.
    """
    x = cheb_nodes(n - 1)
    j = np.arange(n)
    w = (-1.0) ** j * np.sin((2 * j + 1) * np.pi / (2 * n))
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    D = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return x, D


@dataclass(frozen=True)
class OperatorMatrix:
    """Discretized linear operators on stacked nodal vectors.

    Attributes
    ----------
    L0, Lp, L : ndarray
        Free operator, potential part and their sum.
    P : ndarray
        Rank-one spectral projection onto the eigenvalue nearest 1.
    lam1 : complex
        That eigenvalue.
    right, left : ndarray
        Right eigenvector scaled to the nodal gauge mode, and left
        eigenvector scaled so that ``left @ right = 1``.
    """

    p: Params
    degree: int
    x: np.ndarray
    D: np.ndarray
    L0: np.ndarray
    Lp: np.ndarray
    L: np.ndarray
    P: np.ndarray
    lam1: complex
    right: np.ndarray
    left: np.ndarray
    g: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.x.size

    def vec(self, u: Field) -> np.ndarray:
        """Nodal vector of a Field."""
        return np.concatenate([u.psi.eval_x(self.x), u.phi.eval_x(self.x)])

    def field(self, v: np.ndarray) -> Field:
        """Field interpolating a nodal vector."""
        n = self.n
        return Field(RadialFunction.from_values(v[:n]), RadialFunction.from_values(v[n:]))

    def proj_coeff(self, v: np.ndarray) -> complex:
        """Coefficient c with ``P v = c * g``."""
        c = complex(self.left @ v)
        return c.real if abs(c.imag) <= 1e-14 * max(1.0, abs(c)) else c

    def static_vec(self) -> np.ndarray:
        a, b = self.p.alpha, self.p.beta
        return np.concatenate([a / (self.x + b), 2 * a * b / (self.x + b) ** 2])


def _blocks(x, D, p: Params):
    n = x.size
    I = np.eye(n)
    XD = x[:, None] * D
    D2 = D @ D
    Z = np.zeros((n, n))
    L0 = np.block([[-2 * XD - 2 * I, I],
                   [4 * x[:, None] * D2 + 2 * (p.d + 2) * D, -2 * XD - 3 * I]])
    Lp = np.block([[Z, Z], [np.diag(potential_values(x, p)), Z]])
    return L0, Lp


def _inverse_iteration(M: np.ndarray, mu: complex, start: np.ndarray, steps: int = 4) -> np.ndarray:
    lu = sla.lu_factor(M - mu * np.eye(M.shape[0]))
    v = start.astype(complex)
    for _ in range(steps):
        v = sla.lu_solve(lu, v)
        v /= np.linalg.norm(v)
    return v


def assemble_operators(p: Params, degree: int = 64) -> OperatorMatrix:
    """Collocation matrices of the linearized operator at ``degree + 1`` nodes.

    Parameters
    ----------
    p : Params
        Odd dimension required.
    degree : int
        Polynomial degree in x, at least 16.
    """
    if not p.odd:
        raise DomainError("the evolution is set up for odd d")
    if degree < 16:
        raise DomainError(f"degree >= 16 required, got {degree}")
    x, D = diff_matrix(degree + 1)
    L0, Lp = _blocks(x, D, p)
    L = L0 + Lp
    g1, g2 = gauge_values(x, p)
    g = np.concatenate([g1, g2])
    # eigenvalue nearest 1 with its right and left vectors
    mu = 1.0 + 1e-7
    r = _inverse_iteration(L, mu, g)
    lam1 = complex(r.conj() @ (L @ r) / (r.conj() @ r))
    r = r * ((g @ r.conj()) / (r @ r.conj()))  # scale to match g
    l = _inverse_iteration(L.T, mu, g)
    l = l / (l @ r)
    if np.allclose(r.imag, 0, atol=1e-13 * np.abs(r).max()):
        r, l = r.real, l.real
        lam1 = complex(lam1.real, 0.0) if abs(lam1.imag) < 1e-12 else lam1
    P = np.outer(r, l)
    return OperatorMatrix(p=p, degree=degree, x=x, D=D, L0=L0, Lp=Lp, L=L, P=P,
                          lam1=lam1, right=r, left=l, g=g)


# ---------------------------------------------------------------------------
# spectrum

def _flint_diff(n: int):
    """Nodes and differentiation matrix in the current flint precision."""
    from flint import arb, arb_mat

    pi = arb.pi()
    x = [(1 + (pi * (2 * (n - 1 - j) + 1) / (2 * n)).cos()) / 2 for j in range(n)]
    w = [(-1) ** j * (pi * (2 * j + 1) / (2 * n)).sin() for j in range(n)]
    D = arb_mat(n, n)
    for i in range(n):
        s = arb(0)
        for j in range(n):
            if i != j:
                v = w[j] / w[i] / (x[i] - x[j])
                D[i, j] = v
                s += v
        D[i, i] = -s
    return x, D


def _flint_ab(d: int):
    from flint import arb

    a = 2 * (1 + (arb(d - 4) / (3 * (d - 2))).sqrt())
    b = (2 * d - 8 + arb(3 * (d - 2) * (d - 4)).sqrt()) / 3
    return a, b


def _flint_matrix(p: Params, degree: int):
    from flint import acb_mat

    n = degree + 1
    x, D = _flint_diff(n)
    D2 = D * D
    d = p.d
    a, b = _flint_ab(d)
    M = acb_mat(2 * n, 2 * n)
    for i in range(n):
        for j in range(n):
            M[i, j] = -2 * x[i] * D[i, j]
            M[n + i, j] = 4 * x[i] * D2[i, j] + 2 * (d + 2) * D[i, j]
            M[n + i, n + j] = -2 * x[i] * D[i, j]
        M[i, i] += -2
        M[i, n + i] += 1
        M[n + i, n + i] += -3
        M[n + i, i] += 3 * (d - 2) * a * (2 * b - (a - 2) * x[i]) / (x[i] + b) ** 2
    return M


def static_residual(p: Params, degree: int = 64, precision: str = "double",
                    bits: int = 128) -> float:
    """Max-norm of ``L0 Ψ_st + F(Ψ_st)`` at the collocation nodes.

    In double precision the second-derivative matrix amplifies rounding by
    roughly ``degree**4``, which sets a floor near 1e-8 at degree 64; the
    ``extended`` variant evaluates the same discrete operator in
    ``bits``-bit arithmetic and measures the discretization alone.
    """
    if precision == "double":
        op = assemble_operators(p, degree)
        st = op.static_vec()
        res = op.L0 @ st
        res[op.n:] += full_nonlinearity(st[:op.n], op.x, p.d)
        return float(np.max(np.abs(res)))
    if precision != "extended":
        raise ValueError(f"unknown precision {precision!r}")
    import flint
    from flint import arb_mat

    n = degree + 1
    with flint.ctx.workprec(bits):
        x, D = _flint_diff(n)
        a, b = _flint_ab(p.d)
        psi = arb_mat([[a / (xi + b)] for xi in x])
        phi = arb_mat([[2 * a * b / (xi + b) ** 2] for xi in x])
        dpsi, dphi = D * psi, D * phi
        d2psi = D * dpsi
        worst = 0.0
        for i in range(n):
            r1 = phi[i, 0] - 2 * x[i] * dpsi[i, 0] - 2 * psi[i, 0]
            r2 = (4 * x[i] * d2psi[i, 0] + 2 * (p.d + 2) * dpsi[i, 0] - 2 * x[i] * dphi[i, 0]
                  - 3 * phi[i, 0] + (p.d - 2) * psi[i, 0] ** 2 * (3 - x[i] * psi[i, 0]))
            worst = max(worst, abs(float(r1.mid())), abs(float(r2.mid())))
        return worst


def gauge_residual(p: Params, degree: int = 64, precision: str = "double",
                   bits: int = 128) -> float:
    """Max-norm of ``L g - g`` at the collocation nodes.

    As for :func:`static_residual`, the ``extended`` variant removes the
    rounding floor of double precision and exposes the spectral decay of
    the discretization error.
    """
    if precision == "double":
        op = assemble_operators(p, degree)
        g = op.vec(gauge_mode(p))
        return float(np.max(np.abs(op.L @ g - g)))
    if precision != "extended":
        raise ValueError(f"unknown precision {precision!r}")
    import flint
    from flint import acb_mat

    with flint.ctx.workprec(bits):
        M = _flint_matrix(p, degree)
        x, _ = _flint_diff(degree + 1)
        _, b = _flint_ab(p.d)
        g = acb_mat([[1 / (xi + b) ** 2] for xi in x]
                    + [[3 / (xi + b) ** 2 - 4 * xi / (xi + b) ** 3] for xi in x])
        r = M * g - g
        return max(abs(complex(r[i, 0].mid())) for i in range(r.nrows()))


def eigen_error_estimates(L: np.ndarray):
    """Eigenvalues with first-order rounding-error estimates ``eps ||L|| kappa_i``."""
    w, vl, vr = sla.eig(L, left=True, right=True)
    kappa = (np.linalg.norm(vl, axis=0) * np.linalg.norm(vr, axis=0)
             / np.abs(np.sum(vl.conj() * vr, axis=0)))
    est = np.finfo(float).eps * np.linalg.norm(L, 2) * kappa
    return w, est


def discrete_spectrum(p: Params, degree: int, precision: str = "auto",
                      bits: int = 128, op: Optional[OperatorMatrix] = None,
                      re_watch: float = -1.0, est_tol: float = 1e-8) -> np.ndarray:
    """Eigenvalues of the assembled operator, sorted by decreasing real part.

    Parameters
    ----------
    precision : {"auto", "double", "extended"}
        The operator is far from normal, so double-precision eigenvalues can
        carry rounding errors far above machine epsilon.  ``auto`` computes
        in double with eigenvalue condition numbers and switches to
        ``bits``-bit arithmetic when the error estimate of any eigenvalue
        with ``Re >= re_watch`` exceeds ``est_tol``.
    """
    if op is None and precision != "extended":
        op = assemble_operators(p, degree)
    if precision == "double":
        ev = np.linalg.eigvals(op.L)
        return ev[np.argsort(-ev.real, kind="stable")]
    if precision == "auto":
        ev, est = eigen_error_estimates(op.L)
        if np.all(est[ev.real >= re_watch] <= est_tol):
            return ev[np.argsort(-ev.real, kind="stable")]
    elif precision != "extended":
        raise ValueError(f"unknown precision {precision!r}")
    import flint
    with flint.ctx.workprec(bits):
        M = _flint_matrix(p, degree)
        vals = M.eig(nonstop=True, algorithm="approx")
        ev = np.array([complex(v.mid()) for v in vals])
    return ev[np.argsort(-ev.real, kind="stable")]


@dataclass
class GapReport:
    """Refinement-stable eigenvalues and the resulting spectral gap."""

    d: int
    degrees: tuple
    stable: list
    spectra: dict
    gap: float
    unstable_ok: bool


def stable_eigenvalues(p: Params, degrees: Sequence[int] = (48, 64, 96), re_min: float = -0.1,
                       tol: float = 1e-6, precision: str = "auto") -> GapReport:
    """Eigenvalues with ``Re >= re_min`` that persist under degree refinement.

    An eigenvalue of the finest discretization counts as stable if every
    other degree has an eigenvalue within ``tol``.  The gap is minus the
    largest real part among stable eigenvalues with negative real part
    (searched without the ``re_min`` cut).
    """
    spectra = {n: discrete_spectrum(p, n, precision) for n in degrees}
    finest = spectra[max(degrees)]

    def stable(ev):
        return all(np.min(np.abs(spectra[n] - ev)) < tol for n in degrees)

    top = [complex(e) for e in finest if e.real >= re_min and stable(e)]
    neg = [e for e in finest if e.real < -1e-8 and stable(e)]
    gap = -max(e.real for e in neg) if neg else float("nan")
    ok = len(top) == 1 and abs(top[0] - 1) < tol
    return GapReport(d=p.d, degrees=tuple(degrees), stable=top, spectra=spectra,
                     gap=float(gap), unstable_ok=ok)


# ---------------------------------------------------------------------------
# time stepping

def _rhs(op: OperatorMatrix, mode: str):
    n = op.n
    x = op.x
    p = op.p
    L = op.L
    if mode == "linear":
        return lambda v: L @ v
    if mode == "nonlinear":
        def f(v):
            out = L @ v
            out[n:] += nonlinear_values(v[:n], x, p)
            return out
        return f
    if mode == "full":
        L0 = op.L0

        def f(v):
            out = L0 @ v
            out[n:] += full_nonlinearity(v[:n], x, p.d)
            return out
        return f
    raise ValueError(f"mode must be 'linear' or 'nonlinear', got {mode!r}")


def default_dtau(degree: int) -> float:
    """Conservative step ``0.5 / degree**2``."""
    return 0.5 / degree ** 2


def _rk4(f, v, h):
    k1 = f(v)
    k2 = f(v + 0.5 * h * k1)
    k3 = f(v + 0.5 * h * k2)
    k4 = f(v + h * k3)
    return v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def step(state: Union[Field, np.ndarray], dtau: float, op: OperatorMatrix,
         p: Optional[Params] = None, mode: str = "nonlinear", guard: float = 1e3):
    """One classical Runge-Kutta step.

    In ``nonlinear`` mode ``state`` is the full state Ψ; the step advances
    ``Φ = Ψ - Ψ_st`` by ``Φ' = L Φ + N(Φ)``, which is the full system
    written around the static state and keeps Ψ_st exactly fixed.  In
    ``linear`` mode ``state`` is a perturbation Φ advanced by ``Φ' = L Φ``.
    A Field in gives a Field out; a nodal vector in gives a nodal vector out.

    Raises
    ------
    DivergenceError
        If the new state has a non-finite entry or max-norm above ``guard``.
    """
    if p is not None and p.d != op.p.d:
        raise ValueError("Params do not match the operator")
    if mode not in ("linear", "nonlinear"):
        raise ValueError(f"mode must be 'linear' or 'nonlinear', got {mode!r}")
    as_field = isinstance(state, Field)
    v = op.vec(state) if as_field else np.asarray(state, dtype=float)
    if mode == "nonlinear":
        st = op.static_vec()
        w = st + _rk4(_rhs(op, "nonlinear"), v - st, dtau)
    else:
        w = _rk4(_rhs(op, "linear"), v, dtau)
    nrm = float(np.max(np.abs(w)))
    if not np.isfinite(nrm) or nrm > guard:
        raise DivergenceError(dtau, nrm)
    return op.field(w) if as_field else w


@dataclass
class Trajectory:
    """Sampled evolution of a perturbation Φ = Ψ - Ψ_st (or of Φ itself in linear mode)."""

    tau: np.ndarray
    states: list
    norm_H: np.ndarray
    norm_D: np.ndarray
    proj: np.ndarray
    op: OperatorMatrix = field(repr=False)
    mode: str = "nonlinear"
    stopped: Optional[str] = None

    def field(self, i: int) -> Field:
        return self.op.field(self.states[i])

    def l2(self) -> np.ndarray:
        """Discrete nodal l2 norms (cheap diagnostic)."""
        return np.array([np.linalg.norm(s) / math.sqrt(s.size) for s in self.states])


def evolve(state0: Union[Field, np.ndarray], tau_end: float, op: OperatorMatrix,
           mode: str = "nonlinear", dtau: Optional[float] = None, sample_every: float = 0.1,
           guard: float = 1e3, stop_proj: Optional[float] = None,
           norms: bool = True) -> Trajectory:
    """Integrate from ``tau = 0`` to ``tau_end`` with fixed-step RK4.

    Parameters
    ----------
    state0 : Field or ndarray
        Nonlinear mode: the full initial state Ψ(0); the perturbation
        ``Ψ - Ψ_st`` is evolved (which keeps Ψ_st exactly fixed).  Linear
        mode: the perturbation itself.
    tau_end : float
    op : OperatorMatrix
    dtau : float, optional
        Defaults to :func:`default_dtau`.
    sample_every : float
        Sampling interval in tau (rounded to whole steps).
    guard : float
        Max-norm threshold of the divergence guard.
    stop_proj : float, optional
        Stop early (without error) once the projection coefficient exceeds
        this magnitude; used by the shooting routines.
    norms : bool
        Compute ℋ and D norms at the samples.

    Raises
    ------
    DivergenceError
    """
    if dtau is None:
        dtau = default_dtau(op.degree)
    v = op.vec(state0) if isinstance(state0, Field) else np.array(state0, dtype=float)
    if mode == "nonlinear":
        v = v - op.static_vec()
    f = _rhs(op, mode)
    nsteps = int(math.ceil(tau_end / dtau - 1e-9))
    h = tau_end / nsteps if nsteps else 0.0
    every = max(1, int(round(sample_every / h))) if nsteps else 1
    taus, states = [0.0], [v.copy()]
    stopped = None
    for k in range(1, nsteps + 1):
        v = _rk4(f, v, h)
        nrm = float(np.max(np.abs(v)))
        if not np.isfinite(nrm) or nrm > guard:
            raise DivergenceError(k * h, nrm)
        if stop_proj is not None and abs(op.proj_coeff(v)) > stop_proj:
            taus.append(k * h)
            states.append(v.copy())
            stopped = "projection"
            break
        if k % every == 0 or k == nsteps:
            taus.append(k * h)
            states.append(v.copy())
    proj = np.array([op.proj_coeff(s) for s in states])
    if norms:
        p = op.p
        fields = [op.field(s) for s in states]
        nh = np.array([norm_calH(u, p) for u in fields])
        nd = np.array([norm_D(u, p) for u in fields])
    else:
        nh = nd = np.full(len(states), np.nan)
    return Trajectory(tau=np.array(taus), states=states, norm_H=nh, norm_D=nd, proj=proj,
                      op=op, mode=mode, stopped=stopped)


# ---------------------------------------------------------------------------
# decay fits

@dataclass(frozen=True)
class DecayFit:
    """Fit ``norm ≈ C exp(-omega tau)``; ``residual`` is the RMS log-misfit."""

    omega: float
    C: float
    residual: float


def measure_decay(trajectory, window: tuple, norm: str = "norm_H",
                  monotone_tol: float = 1e-3) -> DecayFit:
    """Least-squares fit of ``log norm`` against tau inside ``window``.

    Parameters
    ----------
    trajectory : Trajectory or tuple (tau, norms)
    window : (tau_lo, tau_hi)
    norm : str
        Trajectory attribute used as the norm.
    monotone_tol : float
        Relative tolerance for the monotonicity check; violations only warn.
    """
    if isinstance(trajectory, Trajectory):
        tau, y = trajectory.tau, getattr(trajectory, norm)
    else:
        tau, y = (np.asarray(a, dtype=float) for a in trajectory)
    lo, hi = window
    if lo < tau[0] - 1e-12 or hi > tau[-1] + 1e-12 or lo >= hi:
        raise DomainError(f"window {window} not inside [{tau[0]}, {tau[-1]}]")
    m = (tau >= lo - 1e-12) & (tau <= hi + 1e-12)
    t, yy = tau[m], np.asarray(y)[m]
    if t.size < 2 or np.any(~(yy > 0)):
        raise DomainError("need at least two positive norms in the window")
    ly = np.log(yy)
    slope, icpt = np.polyfit(t, ly, 1)
    res = float(np.sqrt(np.mean((ly - (slope * t + icpt)) ** 2)))
    diffs = np.diff(yy) * np.sign(-slope)
    if np.any(diffs > monotone_tol * yy[:-1]):
        warnings.warn("norms are not monotone in the fit window; low-quality fit",
                      RuntimeWarning, stacklevel=2)
    return DecayFit(omega=float(-slope), C=float(math.exp(icpt)), residual=res)


# ---------------------------------------------------------------------------
# initial data and shooting

def _eval_x(f, x):
    if isinstance(f, RadialFunction):
        if f.exact is None and np.max(x) > f.X * (1 + 1e-12):
            raise DomainError(f"data given on [0, {f.X}] cannot be evaluated at x = {np.max(x):.4g}; "
                              "supply an exact evaluator or a longer interval")
        return f.eval_x(x)
    return np.asarray(f(x))


def initial_data_U(v: Optional[Field], T: float, op: OperatorMatrix) -> np.ndarray:
    """Nodal vector of the initial perturbation for data ``u_1[0] + v`` and blowup time T.

    ``U = (T^2 v1(T.), T^3 v2(T.)) + (T^2 psi_st(T.) - psi_st, T^3 phi_st(T.) - phi_st)``,
    where ``v1, v2`` are functions of ``x = r**2`` (RadialFunctions or
    callables; they are evaluated at ``T**2 x``).
    """
    a, b = op.p.alpha, op.p.beta
    x = op.x
    y = T * T * x
    psi = T ** 2 * a / (y + b) - a / (x + b)
    phi = T ** 3 * 2 * a * b / (y + b) ** 2 - 2 * a * b / (x + b) ** 2
    if v is not None:
        psi = psi + T ** 2 * _eval_x(v.psi, y)
        phi = phi + T ** 3 * _eval_x(v.phi, y)
    return np.concatenate([psi, phi])


def _shoot_value(U: np.ndarray, op: OperatorMatrix, tau_star: float, dtau: float,
                 functional: str, saturate: float = 1.0) -> float:
    """Late-time gauge coefficient (or integrated correction term) from data U."""
    traj = evolve(U + op.static_vec(), tau_star, op, "nonlinear", dtau,
                  sample_every=0.05 if functional == "correction" else tau_star,
                  guard=1e6, stop_proj=saturate, norms=False)
    if traj.stopped == "projection" or functional == "projection":
        return float(np.real(traj.proj[-1]))
    # correction term P(U + int_0^tau* e^{-s} N(Phi(s)) ds), trapezoid in s
    n = op.n
    vals = []
    for s in traj.states:
        nv = np.zeros(2 * n)
        nv[n:] = nonlinear_values(s[:n], op.x, op.p)
        vals.append(np.real(op.proj_coeff(nv)))
    integrand = np.exp(-traj.tau) * np.array(vals)
    return float(np.real(op.proj_coeff(U)) + np.trapezoid(integrand, traj.tau))


def fit_blowup_time(v: Optional[Field], T_bracket: tuple, p: Params,
                    op: Optional[OperatorMatrix] = None, tau_star: float = 10.0,
                    dtau: Optional[float] = None, xtol: float = 1e-8,
                    functional: str = "projection", degree: int = 48) -> float:
    """Blowup time for the data ``u_1[0] + v`` by shooting on the gauge coefficient.

    The functional is the projection coefficient of Φ(τ*) (or, with
    ``functional="correction"``, the integrated correction term).  A run in
    which the coefficient exceeds 1 in magnitude is stopped and that value
    is used, so brackets may contain times whose solutions leave the
    perturbative regime.  The root is located by Brent's method to
    ``|ΔT| < xtol``.

    Raises
    ------
    BracketError
        If the functional has no sign change on the bracket.
    """
    if op is None:
        op = assemble_operators(p, degree)
    if dtau is None:
        dtau = 4.0 / op.degree ** 2
    lo, hi = T_bracket
    if not 0 < lo < hi:
        raise DomainError(f"bracket must satisfy 0 < lo < hi, got {T_bracket}")
    if v is None:
        # U(0, 1) = 0 exactly, and T = 1 is the answer if it lies in the bracket
        if lo <= 1.0 <= hi:
            return 1.0

    def F(T):
        return _shoot_value(initial_data_U(v, T, op), op, tau_star, dtau, functional)

    f_lo, f_hi = F(lo), F(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(f"no sign change of the gauge coefficient on [{lo}, {hi}]: "
                           f"F(lo)={f_lo:.3g}, F(hi)={f_hi:.3g}")
    return float(brentq(F, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200))


def remove_gauge_mode(Phi0: np.ndarray, op: OperatorMatrix, tau_end: float,
                      dtau: Optional[float] = None, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Adjust the gauge amplitude of a perturbation so it does not grow.

    Returns ``(Phi0 + c g, c)`` with c chosen so the projection coefficient
    at ``tau_end`` vanishes under the nonlinear flow.  Even if ``P Phi0 = 0``,
    quadratic terms feed the growing mode; this is the discrete counterpart
    of choosing the blowup time.
    """
    if dtau is None:
        dtau = 4.0 / op.degree ** 2
    def F(c):
        return _shoot_value(Phi0 + c * op.right, op, tau_end, dtau, "projection")

    f0 = F(0.0)
    if abs(f0) < tol:
        return Phi0.copy(), 0.0
    # linear estimate, then widen until the sign flips
    guess = -f0 * math.exp(-tau_end) if abs(f0) < 1 else -math.copysign(1e-3, f0)
    width = max(abs(guess), 1e-14)
    a, b = guess - width, guess + width
    fa, fb = F(a), F(b)
    k = 0
    while np.sign(fa) == np.sign(fb):
        width *= 4
        a, b = guess - width, guess + width
        fa, fb = F(a), F(b)
        k += 1
        if k > 20:
            raise BracketError("could not bracket the gauge amplitude")
    c = brentq(F, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return Phi0 + c * op.right, float(c)
