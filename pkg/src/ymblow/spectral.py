"""
Mode stability of the blowup profile.

The eigenvalue problem for the linearized operator reduces to a radial ODE
with regular singular points at ``rho = 0`` and ``rho = 1``.  A smooth
solution on ``[0, 1]`` exists exactly when the power series of the analytic
solution at the origin, written in ``x = rho**2``, has radius of convergence
larger than one.  This module builds those series from their three-term
recurrences, tracks the coefficient ratios, compares them with an explicit
quasi-solution and classifies spectral parameters by the ratio limit.

Two series are available:

``susy``
    The Heun series of the transformed equation from which the symmetry
    mode ``lambda = 1`` has been removed.
``original``
    The series of the untransformed eigenvalue equation.  Writing
    ``u1 = z(x) / (x + beta)**2`` turns the equation into one with a
    three-term recurrence for ``z``; the coefficients of ``u1`` follow by
    dividing by ``(x + beta)**2``.

Three number backends are supported: ``double`` (Python complex),
``extended`` (ball arithmetic from python-flint, 128 bits by default) and
``exact`` (elements of ``Q(i)(sqrt D)``, see :class:`Surd`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .profiles import DomainError, Params, RadialFunction, alpha_beta, potential_values

EXTENDED_BITS = 128
DOUBLE_LIMIT = 1000
CLASSIFY_TOL = 1e-3


# ---------------------------------------------------------------------------
# exact numbers a + b sqrt(D) over the Gaussian rationals

def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    # shortest decimal representation, so 0.1 becomes 1/10
    return Fraction(repr(float(v)))


class _GQ:
    """Gaussian rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    def __add__(self, o):
        return _GQ(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return _GQ(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        return _GQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __neg__(self):
        return _GQ(-self.re, -self.im)

    def scale(self, q: Fraction) -> "_GQ":
        return _GQ(self.re * q, self.im * q)

    def conj(self) -> "_GQ":
        return _GQ(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inv(self) -> "_GQ":
        n = self.abs2()
        if n == 0:
            raise ZeroDivisionError("division by exact zero")
        return _GQ(self.re / n, -self.im / n)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))


class Surd:
    """Exact number ``a + b*sqrt(D)`` with Gaussian rational ``a, b``.

    ``D`` is a positive square-free integer shared by all operands; ``D = 1``
    means the field is just ``Q(i)`` and ``b`` stays zero.
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a: _GQ, b: _GQ, D: int):
        self.a, self.b, self.D = a, b, D
        if D == 1 and not b.is_zero():
            self.a, self.b = a + b, _GQ()

    @classmethod
    def const(cls, value, D: int) -> "Surd":
        if isinstance(value, complex):
            return cls(_GQ(value.real, value.imag), _GQ(), D)
        return cls(_GQ(value), _GQ(), D)

    def _wrap(self, o) -> "Surd":
        if isinstance(o, Surd):
            if o.D != self.D:
                raise ValueError("surds with different radicands")
            return o
        return Surd.const(o, self.D)

    def __add__(self, o):
        o = self._wrap(o)
        return Surd(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._wrap(o)
        return Surd(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, o):
        return self._wrap(o) - self

    def __neg__(self):
        return Surd(-self.a, -self.b, self.D)

    def __mul__(self, o):
        o = self._wrap(o)
        a = self.a * o.a + (self.b * o.b).scale(Fraction(self.D))
        b = self.a * o.b + self.b * o.a
        return Surd(a, b, self.D)

    __rmul__ = __mul__

    def inv(self) -> "Surd":
        # 1/(a + b s) = (a - b s) / (a^2 - b^2 D)
        den = self.a * self.a - (self.b * self.b).scale(Fraction(self.D))
        g = den.inv()
        return Surd(self.a * g, -(self.b * g), self.D)

    def __truediv__(self, o):
        return self * self._wrap(o).inv()

    def __rtruediv__(self, o):
        return self._wrap(o) * self.inv()

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, float, complex, Surd)):
            return (self - o).is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.a.re, self.a.im, self.b.re, self.b.im, self.D))

    def abs2(self) -> tuple[Fraction, Fraction]:
        """``|z|**2 = P + Q*sqrt(D)`` with rational ``P, Q``."""
        P = self.a.abs2() + self.b.abs2() * self.D
        Q = 2 * (self.a.re * self.b.re + self.a.im * self.b.im)
        return P, Q

    def abs_le(self, bound) -> bool:
        """Exact test ``|z| <= bound`` for a rational bound ``>= 0``."""
        P, Q = self.abs2()
        return _surd_nonneg(Fraction(bound) ** 2 - P, -Q, self.D)

    def __complex__(self):
        s = math.sqrt(self.D)
        return complex(self.a) + complex(self.b) * s

    def __repr__(self):
        return f"Surd({complex(self)!r}, D={self.D})"


def _surd_nonneg(p: Fraction, q: Fraction, D: int) -> bool:
    """Exact sign test ``p + q*sqrt(D) >= 0``."""
    if p >= 0 and q >= 0:
        return True
    if p <= 0 and q <= 0:
        return p == 0 and q == 0
    if p > 0:  # q < 0
        return p * p >= q * q * D
    return q * q * D >= p * p  # p < 0 < q


def _squarefree(n: int) -> tuple[int, int]:
    """Split ``n = k**2 * D`` with square-free ``D``; returns ``(k, D)``."""
    k, D, f = 1, 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            k *= f
        f += 1
    return k, n * D


# ---------------------------------------------------------------------------
# number backends

class _Backend:
    """Arithmetic context for one precision mode."""

    def __init__(self, precision: str, d: int, bits: int = EXTENDED_BITS):
        if precision not in ("double", "extended", "exact"):
            raise ValueError(f"unknown precision {precision!r}")
        self.precision = precision
        self.d = d
        self.bits = bits
        if precision == "double":
            self.beta = alpha_beta(d)[1]
        elif precision == "extended":
            import flint
            with flint.ctx.workprec(bits):
                self.beta = (2 * d - 8 + flint.arb(3 * (d - 2) * (d - 4)).sqrt()) / 3
        else:
            k, D = _squarefree(3 * (d - 2) * (d - 4))
            self.D = D
            # beta = (2d - 8 + k sqrt(D)) / 3
            a = _GQ(Fraction(2 * d - 8, 3))
            b = _GQ(Fraction(k, 3))
            self.beta = Surd(a, b, D) if D > 1 else Surd(a + b, _GQ(), 1)

    def const(self, p, q=1):
        if self.precision == "double":
            return p / q
        if self.precision == "extended":
            import flint
            return flint.acb(p) / q
        return Surd.const(Fraction(p, q), self.D)

    def number(self, z):
        z = complex(z) if not isinstance(z, Surd) else z
        if self.precision == "double":
            return z
        if self.precision == "extended":
            import flint
            return flint.acb(z.real, z.imag)
        if isinstance(z, Surd):
            return z
        return Surd.const(z, self.D)

    def is_zero(self, z) -> bool:
        if self.precision == "exact":
            return z.is_zero()
        if self.precision == "extended":
            return z == 0
        return z == 0

    def to_complex(self, z) -> complex:
        if self.precision == "extended":
            return complex(z.mid())
        return complex(z)


def _heun_coeffs(n, d, lam, beta, c):
    """SUSY recurrence coefficients for backend constant maker ``c``."""
    den = beta * c(2 * (n + 2) * (2 * n + d + 6))
    A = ((lam + c(2 * n + 8)) * (lam + c(2 * n + 3)) * beta
         - c((2 * n + 4) * (2 * n + d - 2))) / den
    B = (lam + c(2 * n + 3)) * (lam + c(2 * n)) / den
    return A, B


def _original_coeffs(n, d, lam, beta, c):
    """Recurrence coefficients of the ``z`` series of the original equation."""
    den = beta * c(2 * (n + 2) * (2 * n + d + 4))
    A = ((lam + c(2 * n + 1)) * (lam + c(2 * n + 8)) * beta
         - c(2 * (n + 1) * (2 * n + d - 6))) / den
    B = (lam + c(2 * n - 1)) * (lam + c(2 * n - 2)) / den
    return A, B


def _quasi(n, d, lam, c):
    den = c(2 * (n + 1) * (2 * n + d + 4))
    return lam * lam / den + lam * c(4 * n + 7) / den + c(2 * n + 4, 2 * n + d + 4)


def _float_c(p, q=1):
    return p / q


def heun_AB(n: int, d: int, lam) -> tuple:
    """Coefficients ``(A_n, B_n)`` of the SUSY Heun recurrence.

    Parameters
    ----------
    n : int
        Index, ``n >= -1``.  ``B`` is not defined for ``n = -1`` and is
        returned as ``None`` there.
    d : int
        Dimension.
    lam : complex or ndarray
        Spectral parameter.

    Returns
    -------
    (A, B)
    """
    if n < -1:
        raise ValueError("n >= -1 required")
    beta = alpha_beta(d)[1]
    A, B = _heun_coeffs(n, d, np.asarray(lam, dtype=complex) if np.ndim(lam) else complex(lam),
                        beta, _float_c)
    return A, (None if n == -1 else B)


def original_AB(n: int, d: int, lam) -> tuple:
    """Coefficients of the three-term recurrence for the original equation.

    The analytic solution of the eigenvalue equation is written
    ``u1 = z(x) / (x + beta)**2`` with ``z = sum b_n x**n``, ``b_0 = 1``,
    ``b_1 = A_{-1}`` and ``b_{n+2} = A_n b_{n+1} + B_n b_n``.
    """
    if n < -1:
        raise ValueError("n >= -1 required")
    beta = alpha_beta(d)[1]
    A, B = _original_coeffs(n, d, np.asarray(lam, dtype=complex) if np.ndim(lam) else complex(lam),
                            beta, _float_c)
    return A, (None if n == -1 else B)


def quasi_r(n, d: int, lam):
    """Explicit quasi-solution of the ratio recurrence (vectorized in n and lam)."""
    n = np.asarray(n, dtype=float)
    lam = np.asarray(lam, dtype=complex)
    den = 2 * (n + 1) * (2 * n + d + 4)
    out = lam * lam / den + (4 * n + 7) * lam / den + (2 * n + 4) / (2 * n + d + 4)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# traces

@dataclass(frozen=True)
class SpectralQuery:
    """A spectral parameter together with dimension and truncation."""

    lam: complex
    d: int
    N: int = 10_000

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 5:
            raise DomainError(f"integer d >= 5 required, got {self.d!r}")
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"N >= 2 required, got {self.N!r}")


@dataclass(frozen=True)
class RecurrenceTrace:
    """Coefficients, ratios and quasi-solution comparison of the SUSY series.

    Index conventions: ``a[n]`` for ``0 <= n <= N+2``; ``r``, ``delta``,
    ``eps``, ``C``, ``A``, ``B`` for ``0 <= n <= N``; ``rtilde`` for
    ``0 <= n <= N+1``.  ``A_minus1`` holds ``A_{-1}``.  All arrays except
    ``a`` are complex128 (rounded from the working precision); ``a`` holds
    the working-precision numbers themselves because it may leave the
    double range.
    """

    query: SpectralQuery
    precision: str
    a: np.ndarray
    r: np.ndarray
    rtilde: np.ndarray
    delta: np.ndarray
    eps: np.ndarray
    C: np.ndarray
    A: np.ndarray
    B: np.ndarray
    A_minus1: complex
    flags: tuple = ()
    exact: Optional[dict] = field(default=None, repr=False, compare=False)


def _lam_for(backend: _Backend, lam):
    if backend.precision == "exact":
        if isinstance(lam, Surd):
            return lam
        lam = complex(lam)
        return Surd(_GQ(_frac(lam.real), _frac(lam.imag)), _GQ(), backend.D)
    return backend.number(lam)


def _trace_loop(backend: _Backend, d: int, lam, N: int, start: int = 0, state=None):
    """Run the recurrence for ``start <= n <= N`` in one backend.

    ``state`` carries ``(a_n, a_{n+1}, r_n, ratio_mode)`` from a previous
    stage.  Returns a dict of lists plus the final state.
    """
    c = backend.const
    beta = backend.beta
    lam = _lam_for(backend, lam)
    out = {k: [] for k in ("a", "r", "rtilde", "delta", "eps", "C", "A", "B")}
    flags = []
    if state is None:
        A_m1, _ = _heun_coeffs(-1, d, lam, beta, c)
        a0, a1 = c(1), A_m1
        r = A_m1
        ratio_mode = True
        out["a"].extend([a0, a1])
    else:
        a0, a1, r, ratio_mode = state
        A_m1 = None
    rt = _quasi(start, d, lam, c)
    for n in range(start, N + 1):
        A, B = _heun_coeffs(n, d, lam, beta, c)
        rt_next = _quasi(n + 1, d, lam, c)
        a2 = A * a1 + B * a0
        out["a"].append(a2)
        # r_n and its comparison with the quasi-solution
        out["r"].append(r)
        out["rtilde"].append(rt)
        prod = rt * rt_next
        out["delta"].append(r / rt - c(1) if r is not None else None)
        out["eps"].append((A * rt + B) / prod - c(1))
        out["C"].append(B / prod)
        out["A"].append(A)
        out["B"].append(B)
        # advance to r_{n+1}
        if ratio_mode and r is not None and not backend.is_zero(r):
            r = A + B / r
        else:
            if ratio_mode:
                flags.append(n)
                ratio_mode = False
            r = None if backend.is_zero(a2) or backend.is_zero(a1) else a2 / a1
        a0, a1 = a1, a2
        rt = rt_next
    out["rtilde"].append(rt)
    return out, flags, A_m1, (a0, a1, r, ratio_mode)


def _to_c(backend, seq):
    return np.array([np.nan + 0j if v is None else backend.to_complex(v) for v in seq],
                    dtype=complex)


def run_recurrence(q: SpectralQuery, precision: str = "auto",
                   bits: int = EXTENDED_BITS) -> RecurrenceTrace:
    """Fill the SUSY recurrence trace up to ``q.N``.

    Parameters
    ----------
    q : SpectralQuery
    precision : {"auto", "double", "extended", "exact"}
        ``auto`` uses double precision for ``n <= 1000`` and continues in
        ``bits``-bit ball arithmetic beyond.  ``exact`` works in
        ``Q(i)(sqrt D)`` and is meant for short traces; the exact values are
        kept in ``trace.exact``.
    bits : int
        Working precision of the extended stage.

    Notes
    -----
    If some ratio ``r_n`` vanishes, the index is recorded in ``flags`` and
    later ratios are formed from the coefficients directly.
    """
    d, N = int(q.d), int(q.N)
    if precision == "auto":
        stages = [("double", min(N, DOUBLE_LIMIT))]
        if N > DOUBLE_LIMIT:
            stages.append(("extended", N))
    elif precision in ("double", "extended", "exact"):
        stages = [(precision, N)]
    else:
        raise ValueError(f"unknown precision {precision!r}")

    merged = {k: [] for k in ("a", "r", "rtilde", "delta", "eps", "C", "A", "B")}
    flags: list = []
    state, A_m1, start = None, None, 0
    exact = None
    used = []
    for mode, stop in stages:
        backend = _Backend(mode, d, bits)
        if state is not None:
            # hand the double-precision state over to the next backend
            a0, a1, r, ratio_mode = state
            state = (backend.number(a0), backend.number(a1),
                     None if r is None else backend.number(r), ratio_mode)

        def run():
            return _trace_loop(backend, d, q.lam, stop, start, state)

        if mode == "extended":
            import flint
            with flint.ctx.workprec(bits):
                out, fl, am1, state = run()
                conv_out = {k: (np.array(v, dtype=object) if k == "a" else _to_c(backend, v))
                            for k, v in out.items()}
        else:
            out, fl, am1, state = run()
            if mode == "exact":
                exact = {k: list(v) for k, v in out.items()}
            conv_out = {k: (np.array(v, dtype=object) if k == "a" and mode == "exact"
                            else _to_c(backend, v)) for k, v in out.items()}
        if A_m1 is None:
            A_m1 = backend.to_complex(am1)
        # the last rtilde of a stage is the first of the next
        if merged["rtilde"]:
            merged["rtilde"].pop()
        for k, v in conv_out.items():
            merged[k].extend(list(v))
        flags.extend(fl)
        used.append(mode)
        start = stop + 1

    if len(used) > 1:
        # mixed stages: keep a as Python objects of mixed type
        a = np.empty(len(merged["a"]), dtype=object)
        a[:] = merged["a"]
    else:
        a = (np.array(merged["a"], dtype=object) if used[0] != "double"
             else np.array(merged["a"], dtype=complex))
    arr = {k: np.array(merged[k], dtype=complex) for k in
           ("r", "rtilde", "delta", "eps", "C", "A", "B")}
    return RecurrenceTrace(query=q, precision="+".join(used), a=a, A_minus1=A_m1,
                           flags=tuple(flags), exact=exact, **arr)


# ---------------------------------------------------------------------------
# bound verification

def bound_table(d: int, n: np.ndarray) -> dict:
    """Bounds on ``|delta_1|``, ``|eps_n|``, ``|C_n|``, ``|delta_n|``.

    For ``d >= 7`` the bounds are constant in n; for ``d = 6`` they depend
    on n, and the induction they feed closes at ``|delta_n| <= 1/3``,
    which is reported as ``delta_d6``.
    """
    n = np.asarray(n, dtype=float)
    if d >= 7:
        e = np.full_like(n, 5 / 12 - 4 / (2 * d + 1))
        cb = np.full_like(n, 1 / 12 + 4 / (2 * d + 1))
        return {"delta1": 0.5, "eps": e, "C": cb, "delta": np.full_like(n, 0.5)}
    if d == 6:
        return {"delta1": 1 / 3, "eps": 1 / 12 + 1 / (4 * (n + 1)),
                "C": 0.5 - 1 / (2 * (n + 1)), "delta": np.full_like(n, 0.5),
                "delta_d6": np.full_like(n, 1 / 3)}
    raise DomainError(f"bounds are stated for d >= 6, got d={d}")


def _exact_bounds(d: int, n: int) -> dict:
    if d >= 7:
        b = {"delta1": Fraction(1, 2), "eps": Fraction(5, 12) - Fraction(4, 2 * d + 1),
             "C": Fraction(1, 12) + Fraction(4, 2 * d + 1), "delta": Fraction(1, 2)}
    else:
        b = {"delta1": Fraction(1, 3), "eps": Fraction(1, 12) + Fraction(1, 4 * (n + 1)),
             "C": Fraction(1, 2) - Fraction(1, 2 * (n + 1)), "delta": Fraction(1, 2),
             "delta_d6": Fraction(1, 3)}
    return b


@dataclass
class BoundsReport:
    """Outcome of :func:`verify_bounds`.

    ``worst`` maps each quantity to the entry with the smallest margin
    ``bound - |value|``; ``violations`` lists every failure.
    """

    d: int
    N: int
    precision: str
    lambdas: list
    passed: bool
    violations: list
    worst: dict

    def to_dict(self) -> dict:
        def cz(z):
            z = complex(z)
            return {"re": z.real, "im": z.imag}

        return {
            "schema": "ymblow-schema v1",
            "kind": "recurrence-bounds",
            "d": self.d, "N": self.N, "precision": self.precision,
            "lambdas": [cz(l) for l in self.lambdas],
            "passed": self.passed,
            "n_violations": len(self.violations),
            "violations": [{**v, "lambda": cz(v["lambda"])} for v in self.violations[:100]],
            "worst": {k: {**v, "lambda": cz(v["lambda"])} for k, v in self.worst.items()},
        }


def verify_bounds(d: int, lambda_grid: Sequence[complex], N: int,
                  precision: str = "auto", bits: int = EXTENDED_BITS,
                  traces: Optional[list] = None) -> BoundsReport:
    """Check the quasi-solution estimates for ``1 <= n <= N`` on a λ grid.

    Parameters
    ----------
    d : int
        Dimension, ``d >= 6``.
    lambda_grid : sequence of complex
        Points on the imaginary axis.
    N : int
        Last index checked.
    precision : str
        Passed to :func:`run_recurrence`.  With ``exact`` every comparison is
        decided exactly.
    traces : list, optional
        Receives the computed traces.
    """
    if d < 6:
        raise DomainError(f"verify_bounds needs d >= 6, got d={d}")
    lams = [complex(l) for l in lambda_grid]
    for l in lams:
        if l.real != 0:
            raise DomainError(f"lambda must be purely imaginary, got {l}")
    n = np.arange(1, N + 1)
    bounds = bound_table(d, n)
    violations, worst = [], {}

    def note(name, lam, idx, value, bound, ok=None):
        margin = float(bound) - abs(complex(value))
        if ok is None:
            ok = margin >= 0
        w = worst.get(name)
        if w is None or margin < w["margin"]:
            worst[name] = {"margin": margin, "lambda": lam, "n": int(idx),
                           "value": abs(complex(value)), "bound": float(bound)}
        if not ok:
            violations.append({"d": d, "lambda": lam, "n": int(idx), "quantity": name,
                               "value": abs(complex(value)), "bound": float(bound)})

    for lam in lams:
        tr = run_recurrence(SpectralQuery(lam, d, N), precision=precision, bits=bits)
        if traces is not None:
            traces.append(tr)
        if precision == "exact":
            ex = tr.exact
            for k in range(1, N + 1):
                b = _exact_bounds(d, k)
                if k == 1:
                    note("delta1", lam, 1, ex["delta"][1], b["delta1"],
                         ex["delta"][1].abs_le(b["delta1"]))
                note("eps", lam, k, ex["eps"][k], b["eps"], ex["eps"][k].abs_le(b["eps"]))
                note("C", lam, k, ex["C"][k], b["C"], ex["C"][k].abs_le(b["C"]))
                note("delta", lam, k, ex["delta"][k], b["delta"],
                     ex["delta"][k].abs_le(b["delta"]))
                if "delta_d6" in b:
                    note("delta_d6", lam, k, ex["delta"][k], b["delta_d6"],
                         ex["delta"][k].abs_le(b["delta_d6"]))
            continue
        note("delta1", lam, 1, tr.delta[1], bounds["delta1"])
        for name, seq in (("eps", tr.eps), ("C", tr.C), ("delta", tr.delta),
                          ("delta_d6", tr.delta)):
            if name not in bounds:
                continue
            vals = np.abs(seq[1:N + 1])
            margin = bounds[name] - vals
            bad = np.nonzero(~(margin >= 0))[0]
            i = int(np.argmin(np.where(np.isnan(margin), -np.inf, margin)))
            note(name, lam, n[i], seq[1 + i], bounds[name][i])
            for j in bad:
                if j != i:
                    violations.append({"d": d, "lambda": lam, "n": int(n[j]),
                                       "quantity": name, "value": float(vals[j]),
                                       "bound": float(bounds[name][j])})
    return BoundsReport(d=d, N=N, precision=precision, lambdas=lams,
                        passed=not violations, violations=violations, worst=worst)


# ---------------------------------------------------------------------------
# ratio limits and classification

class Verdict(str, Enum):
    EIGENVALUE = "Eigenvalue"
    NOT_EIGENVALUE = "NotEigenvalue"
    INCONCLUSIVE = "Inconclusive"


def ratio_limits(d: int, lams, N: int, which: str = "susy") -> np.ndarray:
    """Coefficient ratio ``r_N = a_{N+1} / a_N`` for many λ at once.

    The coefficients are advanced in double precision and rescaled every
    few steps; the recursion is forward-stable for the dominant solution.
    """
    lam = np.atleast_1d(np.asarray(lams, dtype=complex))
    beta = alpha_beta(d)[1]
    c = _float_c
    if which == "susy":
        a0 = np.ones_like(lam)
        a1 = _heun_coeffs(-1, d, lam, beta, c)[0] * np.ones_like(lam)
        for n in range(N):
            A, B = _heun_coeffs(n, d, lam, beta, c)
            a0, a1 = a1, A * a1 + B * a0
            if n % 8 == 7:
                s = np.maximum(np.abs(a0), np.abs(a1))
                s[s == 0] = 1.0
                a0, a1 = a0 / s, a1 / s
        with np.errstate(divide="ignore", invalid="ignore"):
            return a1 / a0
    if which == "original":
        # z_n from its recurrence, y_n = (z_n - 2 beta y_{n-1} - y_{n-2}) / beta^2
        z0 = np.ones_like(lam)
        z1 = _original_coeffs(-1, d, lam, beta, c)[0] * np.ones_like(lam)
        y1 = np.zeros_like(lam)  # y_{n-1}
        y2 = np.zeros_like(lam)  # y_{n-2}
        b2 = beta * beta
        for n in range(N + 2):
            y = (z0 - 2 * beta * y1 - y2) / b2
            A, B = _original_coeffs(n, d, lam, beta, c)
            z0, z1 = z1, A * z1 + B * z0
            y2, y1 = y1, y
            if n % 8 == 7:
                s = np.maximum.reduce([np.abs(z0), np.abs(z1), np.abs(y1), np.abs(y2)])
                s[s == 0] = 1.0
                z0, z1, y1, y2 = z0 / s, z1 / s, y1 / s, y2 / s
        with np.errstate(divide="ignore", invalid="ignore"):
            return y1 / y2
    raise ValueError(f"which must be 'susy' or 'original', got {which!r}")


@dataclass
class ScanResult:
    """Per-point ratio, distances to the two admissible limits and verdicts."""

    d: int
    which: str
    lams: np.ndarray
    ratio: np.ndarray
    dist_one: np.ndarray
    dist_neg: np.ndarray
    verdicts: list
    N_used: np.ndarray


def _verdicts(d1, d2, tol):
    out = []
    for x1, x2 in zip(d1, d2):
        if x2 < tol and x2 < x1:
            out.append(Verdict.EIGENVALUE)
        elif x1 < tol:
            out.append(Verdict.NOT_EIGENVALUE)
        else:
            out.append(Verdict.INCONCLUSIVE)
    return out


def scan(d: int, lams, N: int = 10_000, which: str = "susy", tol: float = CLASSIFY_TOL,
         max_factor: int = 8) -> ScanResult:
    """Classify every λ in ``lams`` by the limit of the coefficient ratio.

    Inconclusive points are rerun with ``N`` doubled, up to ``max_factor * N``.
    Results keep the input order.
    """
    lam = np.atleast_1d(np.asarray(lams, dtype=complex)).ravel()
    beta = alpha_beta(d)[1]
    ratio = ratio_limits(d, lam, N, which)
    n_used = np.full(lam.shape, N)
    d1, d2 = np.abs(ratio - 1), np.abs(ratio + 1 / beta)
    verdicts = _verdicts(d1, d2, tol)
    NN = N
    while NN < max_factor * N:
        todo = np.array([v is Verdict.INCONCLUSIVE for v in verdicts])
        if not todo.any():
            break
        NN *= 2
        rr = ratio_limits(d, lam[todo], NN, which)
        ratio[todo] = rr
        n_used[todo] = NN
        d1, d2 = np.abs(ratio - 1), np.abs(ratio + 1 / beta)
        verdicts = _verdicts(d1, d2, tol)
    return ScanResult(d=d, which=which, lams=lam, ratio=ratio, dist_one=d1, dist_neg=d2,
                      verdicts=verdicts, N_used=n_used)


def classify_lambda(q: SpectralQuery, which: str = "susy", tol: float = CLASSIFY_TOL) -> Verdict:
    """Decide whether ``q.lam`` is an eigenvalue of the chosen equation.

    A ratio limit of 1 means radius of convergence 1, so no smooth solution
    exists; a limit of ``-1/beta`` means the analytic solution extends past
    ``rho = 1`` and is an eigenfunction.
    """
    if complex(q.lam).real < 0:
        raise DomainError("classification is meaningful for Re(lambda) >= 0 only")
    return scan(q.d, [q.lam], q.N, which, tol).verdicts[0]


# ---------------------------------------------------------------------------
# series solutions

def heun_series(lam, d: int, N: int) -> np.ndarray:
    """Coefficients ``a_0..a_N`` of the normalized SUSY Heun series."""
    lam = complex(lam)
    beta = alpha_beta(d)[1]
    a = np.zeros(N + 1, dtype=complex)
    a[0] = 1
    if N >= 1:
        a[1] = _heun_coeffs(-1, d, lam, beta, _float_c)[0]
    for n in range(N - 1):
        A, B = _heun_coeffs(n, d, lam, beta, _float_c)
        a[n + 2] = A * a[n + 1] + B * a[n]
    return a


def eigen_series(lam, p: Params, N: int) -> np.ndarray:
    """x-power-series coefficients of the analytic solution ``u1`` at the origin.

    Normalized by ``u1(0) = 1``.
    """
    lam = complex(lam)
    d, beta = p.d, p.beta
    z = np.zeros(N + 1, dtype=complex)
    z[0] = 1
    if N >= 1:
        z[1] = _original_coeffs(-1, d, lam, beta, _float_c)[0]
    for n in range(N - 1):
        A, B = _original_coeffs(n, d, lam, beta, _float_c)
        z[n + 2] = A * z[n + 1] + B * z[n]
    y = np.zeros_like(z)
    for n in range(N + 1):
        y[n] = (z[n] - 2 * beta * (y[n - 1] if n >= 1 else 0)
                - (y[n - 2] if n >= 2 else 0)) / beta ** 2
    return y * beta ** 2


# ---------------------------------------------------------------------------
# ODE residuals

Jet = tuple  # (f, f', f'', ...) as arrays at the sample points


def radial_jet(f: RadialFunction, rho, order: int = 2) -> Jet:
    """rho-derivatives of the even function ``f(rho) = f̃(rho**2)``."""
    rho = np.asarray(rho, dtype=float)
    x = rho * rho
    fx = [f.eval_x(x)]
    g = f
    for _ in range(3):
        g = g.deriv_x()
        fx.append(g.eval_x(x))
    jet = [fx[0], 2 * rho * fx[1], 2 * fx[1] + 4 * x * fx[2],
           12 * rho * fx[2] + 8 * rho * x * fx[3]]
    return tuple(jet[:order + 1])


def gauge_jet(p: Params, rho) -> Jet:
    """``g1 = (rho**2 + beta)**-2`` and its first two rho-derivatives."""
    rho = np.asarray(rho, dtype=float)
    q = rho * rho + p.beta
    return (q ** -2, -4 * rho * q ** -3, -4 * q ** -3 + 24 * rho * rho * q ** -4)


def _V(rho, p: Params):
    return potential_values(np.asarray(rho, dtype=float) ** 2, p)


def eigen_residual(jet: Jet, rho, lam, p: Params):
    """Residual of the radial eigenvalue equation for ``u1``."""
    u, du, d2u = jet[:3]
    rho = np.asarray(rho, dtype=float)
    return ((1 - rho ** 2) * d2u + ((p.d + 1) / rho - 2 * (lam + 3) * rho) * du
            - (lam + 2) * (lam + 3) * u + _V(rho, p) * u)


def canon_residual(jet: Jet, rho, lam, p: Params):
    """Residual of the canonical form obtained with ``u1 = v / rho**2``."""
    v, dv, d2v = jet[:3]
    rho = np.asarray(rho, dtype=float)
    return ((1 - rho ** 2) * d2v + ((p.d - 3) / rho - 2 * (lam + 1) * rho) * dv
            - lam * (lam + 1) * v + (_V(rho, p) - (2 * p.d - 4) / rho ** 2) * v)


def V_tilde(rho, d: int):
    """Potential of the SUSY partner equation."""
    rho = np.asarray(rho, dtype=float)
    b = alpha_beta(d)[1]
    r2 = rho * rho
    num = (4 * b - d + 5) * r2 * r2 - 2 * b * (2 * b - d + 3) * r2 + 3 * b * b * (d - 1)
    return -num / (r2 * (r2 + b) ** 2)


def susy_residual(jet: Jet, rho, lam, p: Params):
    """Residual of the SUSY partner equation for ``ṽ``."""
    v, dv, d2v = jet[:3]
    rho = np.asarray(rho, dtype=float)
    return ((1 - rho ** 2) * d2v + ((p.d - 3) / rho - 2 * (lam + 1) * rho) * dv
            - lam * (lam + 1) * v + (V_tilde(rho, p.d) + 2) * v)


def heun_residual(jet_x: Jet, x, lam, d: int):
    """Residual of the Heun equation in ``x`` (multiplied through by ``4x(x-1)(x+beta)``)."""
    y, dy, d2y = jet_x[:3]
    x = np.asarray(x, dtype=float)
    b = alpha_beta(d)[1]
    den = 4 * x * (x - 1) * (x + b)
    coef1 = (d + 4) / (2 * x) + (2 * lam + 5 - d) / (2 * (x - 1)) - 2 / (x + b)
    coef0 = lam * (lam + 3) * x + (lam + 6) * (lam + 1) * b - 2 * d + 8
    return den * (d2y + coef1 * dy) + coef0 * y


# ---------------------------------------------------------------------------
# SUSY transform

def _interior(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0) or np.any(rho >= 1):
        raise DomainError("the SUSY map is evaluated at interior points 0 < rho < 1 only")
    return rho


def susy_transform(v: Union[RadialFunction, Callable], lam, p: Params, rho=None,
                   derivs: int = 0, delta: float = 0.05, npts: int = 64):
    """Apply the SUSY map to a solution of the canonical equation.

    Parameters
    ----------
    v : RadialFunction or callable
        Even function ``v(rho)`` given in x-form, or a callable returning the
        jet ``(v, v', v'', v''')`` at given points.
    lam : complex
        Spectral parameter.
    p : Params
    rho : array_like, optional
        Interior evaluation points; default is a Chebyshev grid on
        ``[delta, 1 - delta]``.
    derivs : {0, 1, 2}
        Number of rho-derivatives of ``ṽ`` to return as well.

    Returns
    -------
    ndarray or tuple of ndarray
        ``ṽ`` (and its derivatives) at ``rho``.

    Notes
    -----
    After stripping the power prefactors the map reads
    ``ṽ = (1 - rho**2) v' + c(rho) v`` with
    ``c = (1 - rho**2)(4 rho/(rho**2 + beta) - 2/rho) + (1 - lam) rho``.
    """
    if rho is None:
        t = 0.5 * (np.polynomial.chebyshev.chebpts1(npts) + 1)
        rho = delta + (1 - 2 * delta) * t
    rho = _interior(rho)
    jet = radial_jet(v, rho, 3) if isinstance(v, RadialFunction) else tuple(v(rho))
    f, f1, f2, f3 = jet
    b = p.beta
    q = rho * rho + b
    s = 1 - rho * rho
    h = -2 / rho + 4 * rho / q
    h1 = 2 / rho ** 2 + 4 * (b - rho * rho) / q ** 2
    h2 = -4 / rho ** 3 - 8 * rho / q ** 2 - 16 * rho * (b - rho * rho) / q ** 3
    c0 = s * h + (1 - lam) * rho
    c1 = -2 * rho * h + s * h1 + (1 - lam)
    c2 = -2 * h - 4 * rho * h1 + s * h2
    out = [s * f1 + c0 * f,
           -2 * rho * f1 + s * f2 + c1 * f + c0 * f1,
           -2 * f1 - 4 * rho * f2 + s * f3 + c2 * f + 2 * c1 * f1 + c0 * f2]
    return out[0] if derivs == 0 else tuple(out[:derivs + 1])


# ---------------------------------------------------------------------------
# indices and the w-parametrization

def frobenius_indices(point: str, lam, d) -> tuple:
    """Frobenius indices of the eigenvalue equation at ``rho = 0`` or ``rho = 1``."""
    if point == "zero":
        return (0, -d)
    if point == "one":
        s2 = (d - 3) / 2 - lam
        if isinstance(s2, complex) and s2.imag == 0:
            s2 = s2.real
        return (0, s2)
    raise ValueError(f"point must be 'zero' or 'one', got {point!r}")


def d_of_w(w: float) -> tuple[float, float]:
    """Dimension and ``beta`` in the rational parametrization by ``w > 0``.

    The parametrization makes ``sqrt(3(d-2)(d-4))`` rational in ``w``.
    """
    if w <= 0:
        raise DomainError("w > 0 required")
    d = 2 * (w * w + 8 * w + 14) / (2 * w + 5)
    beta = 2 * (w + 2) * ((w + 3) * math.sqrt(3) + 2 * (w + 2)) / (3 * (2 * w + 5))
    return d, beta
