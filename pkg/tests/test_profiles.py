import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from ymblow.profiles import (DomainError, RadialFunction, equiv_residual,
                             full_nonlinearity, gauge_mode, gauge_values, make_params,
                             nonlinear_values, nonlinearity_N, potential_V, potential_values,
                             psi_static, u_T, u_T_jet)

rho_s, x_s, t_s, r_s, T_s, d_s = sp.symbols("rho x t r T d", positive=True)


def _sym_ab(d):
    s = sp.sqrt(sp.Rational(d - 4, 3 * (d - 2)))
    return 2 * (1 + s), (2 * d - 8 + sp.sqrt(3 * (d - 2) * (d - 4))) / 3


# ---- make_params -----------------------------------------------------------

def test_params_d5_rational():
    p = make_params(5)
    assert p.alpha == pytest.approx(8 / 3, abs=1e-15)
    assert p.beta == pytest.approx(5 / 3, abs=1e-15)
    assert p.k_d == 3


def test_params_d6_beta():
    p = make_params(6)
    assert p.beta == pytest.approx(4 / 3 + 2 / 3 * math.sqrt(6), abs=1e-14)
    assert p.k_d is None and not p.odd


def test_params_d7_radicals():
    p = make_params(7)
    assert p.alpha == pytest.approx(2 * (1 + 1 / math.sqrt(5)), abs=1e-14)
    assert p.beta == pytest.approx(2 + math.sqrt(5), abs=1e-14)
    assert p.alpha == pytest.approx(2.8944272, abs=1e-7)
    assert p.beta == pytest.approx(4.2360680, abs=1e-7)


@pytest.mark.parametrize("d", range(5, 16))
def test_params_ranges_against_sympy(d):
    p = make_params(d)
    a, b = _sym_ab(d)
    assert abs(p.alpha - float(a)) < 1e-14 and abs(p.beta - float(b)) < 1e-14
    assert 2 < p.alpha < 2 + 2 / math.sqrt(3)
    assert p.beta > 1


@pytest.mark.parametrize("d", [4, 3, 0, -1, 5.5])
def test_params_rejects(d):
    with pytest.raises(DomainError):
        make_params(d)


# ---- u_T -------------------------------------------------------------------

def test_uT_origin_d5():
    assert u_T(0.0, 0.0, 1.0, make_params(5)) == pytest.approx(1.6, abs=1e-15)


@given(st.floats(0, 0.99), st.floats(0, 1), st.floats(0.5, 3))
def test_uT_scaling(tf, rf, T):
    p = make_params(7)
    t = tf * T
    r = rf * (T - t)
    lam = 2.0
    assert u_T(lam * t, lam * r, lam * T, p) == pytest.approx(u_T(t, r, T, p) / lam ** 2, rel=1e-14)


def test_uT_past_blowup():
    with pytest.raises(DomainError):
        u_T(1.0, 0.0, 1.0, make_params(5))


def test_uT_symbolic_solution():
    # oracle: symbolic substitution into the radial wave equation in dimension d+2
    for d in (5, 7, 9, 11):
        a, b = _sym_ab(d)
        u = a / (r_s ** 2 + b * (T_s - t_s) ** 2)
        res = (sp.diff(u, t_s, 2) - sp.diff(u, r_s, 2) - (d + 1) / r_s * sp.diff(u, r_s)
               - (d - 2) * u ** 2 * (3 - r_s ** 2 * u))
        assert sp.simplify(sp.radsimp(sp.together(res))) == 0


def test_uT_jet_matches_sympy():
    p = make_params(7)
    a, b = _sym_ab(7)
    u = a / (r_s ** 2 + b * (T_s - t_s) ** 2)
    names = {"u": u, "u_t": sp.diff(u, t_s), "u_tt": sp.diff(u, t_s, 2),
             "u_r": sp.diff(u, r_s), "u_rr": sp.diff(u, r_s, 2)}
    jet = u_T_jet(0.3, 0.4, 1.2, p)
    for k, e in names.items():
        assert jet[k] == pytest.approx(float(e.subs({t_s: 0.3, r_s: 0.4, T_s: 1.2})), rel=1e-13)


@pytest.mark.parametrize("d", [5, 7, 9, 11])
def test_uT_residual_compact(d):
    p = make_params(d)
    rng = np.random.default_rng(d)
    t = rng.uniform(0, 0.9, 100)
    r = rng.uniform(0.01, 1, 100) * (1 - t)
    res = equiv_residual(u_T_jet(t, r, 1.0, p), r, d, relative=False)
    assert np.max(np.abs(res)) < 1e-10


# ---- static profile ----------------------------------------------------------

def test_psi_static_origin_d5():
    s = psi_static(make_params(5))
    assert s.psi(0.0) == pytest.approx(1.6, abs=1e-15)
    assert s.phi(0.0) == pytest.approx(3.2, abs=1e-15)


def test_psi_static_second_component_sympy():
    p = make_params(9)
    a, b = _sym_ab(9)
    psi = a / (rho_s ** 2 + b)
    phi = sp.lambdify(rho_s, rho_s * sp.diff(psi, rho_s) + 2 * psi)
    s = psi_static(p)
    rho = np.linspace(0, 1, 21)
    assert np.max(np.abs(s.phi(rho) - phi(rho))) < 1e-13


def test_psi_static_is_self_similar_rescaling(p5):
    from ymblow.simvars import rescale_fields
    s = psi_static(p5)
    for t in (0.0, 0.5, 0.9):
        rho = np.linspace(0, 1, 11)
        r = rho * (1 - t)
        jet = u_T_jet(t, r, 1.0, p5)
        psi, phi = rescale_fields(jet["u"], jet["u_t"], t, 1.0)
        assert np.max(np.abs(psi - s.psi(rho))) < 1e-12
        assert np.max(np.abs(phi - s.phi(rho))) < 1e-12


# ---- potential, nonlinearity ---------------------------------------------------

def test_V_origin_d5(p5):
    assert potential_V(p5)(0.0) == pytest.approx(28.8, abs=1e-13)
    assert potential_values(0.0, p5) == pytest.approx(6 * 3 * p5.alpha / p5.beta, abs=1e-13)


@pytest.mark.parametrize("d", [5, 8, 13])
def test_V_negative_at_large_rho(d):
    p = make_params(d)
    big = np.array([1e3, 1e4, 1e6]) ** 2
    v = potential_values(big, p)
    assert np.all(v < 0)
    lead = -3 * (d - 2) * p.alpha * (p.alpha - 2) / big
    assert np.allclose(v / lead, 1, rtol=1e-2)


def test_V_is_linearization_sympy():
    # oracle: symbolic derivative of the full source at the static profile
    for d in (5, 7):
        a, b = _sym_ab(d)
        psi = sp.Symbol("psi")
        src = (d - 2) * psi ** 2 * (3 - x_s * psi)
        V = sp.diff(src, psi).subs(psi, a / (x_s + b))
        f = sp.lambdify(x_s, V)
        x = np.linspace(0, 1, 9)
        assert np.max(np.abs(potential_values(x, make_params(d)) - f(x))) < 1e-12


def test_V_even_representation(p5):
    V = potential_V(p5)
    c = V.rho_series().coef
    assert np.max(np.abs(c[1::2])) < 1e-14


def test_N_zero(p5):
    zero = RadialFunction(np.zeros(5))
    assert np.all(nonlinearity_N(zero, p5).coeffs == 0)


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=8))
def test_N_decomposition(coeffs):
    p = make_params(7)
    x = np.linspace(0, 1, 17)
    phi = np.polynomial.polynomial.polyval(x, coeffs)
    psi = p.alpha / (x + p.beta)
    lhs = (full_nonlinearity(psi + phi, x, p.d) - full_nonlinearity(psi, x, p.d)
           - potential_values(x, p) * phi)
    assert np.max(np.abs(lhs - nonlinear_values(phi, x, p))) < 1e-10


def test_N_matches_sympy_expansion():
    d = 5
    a, b = _sym_ab(d)
    u = sp.Symbol("u")
    psi = a / (x_s + b)
    src = lambda q: (d - 2) * q ** 2 * (3 - x_s * q)
    V = sp.diff(src(sp.Symbol("q")), sp.Symbol("q")).subs(sp.Symbol("q"), psi)
    rem = sp.simplify(sp.expand(src(psi + u) - src(psi) - V * u))
    f = sp.lambdify((x_s, u), rem)
    x = np.linspace(0, 1, 7)
    for uu in (-0.3, 0.2, 1.1):
        assert np.allclose(nonlinear_values(uu, x, make_params(d)), f(x, uu), atol=1e-13)


def test_N_local_lipschitz(p5):
    rng = np.random.default_rng(3)
    x = np.linspace(0, 1, 65)
    K = []
    for _ in range(50):
        u = 0.1 * rng.standard_normal() * (1 + x * rng.standard_normal())
        v = 0.1 * rng.standard_normal() * (1 + x * rng.standard_normal())
        num = np.max(np.abs(nonlinear_values(u, x, p5) - nonlinear_values(v, x, p5)))
        den = (np.max(np.abs(u)) + np.max(np.abs(v))) * np.max(np.abs(u - v))
        K.append(num / den)
    assert max(K) < 3 * (p5.d - 2) * 3 * 2


# ---- gauge mode ------------------------------------------------------------------

def test_gauge_origin_d5(p5):
    g = gauge_mode(p5)
    assert g.psi(0.0) == pytest.approx(0.36, abs=1e-15)
    assert g.phi(0.0) == pytest.approx(1.08, abs=1e-14)


def test_gauge_second_component_sympy():
    a, b = _sym_ab(7)
    g1 = (rho_s ** 2 + b) ** -2
    g2 = sp.lambdify(rho_s, rho_s * sp.diff(g1, rho_s) + 3 * g1)
    rho = np.linspace(0, 1, 11)
    assert np.allclose(gauge_values(rho ** 2, make_params(7))[1], g2(rho), atol=1e-15)


@pytest.mark.parametrize("d", [5, 7, 9])
def test_gauge_eigen_residual_sympy(d):
    # oracle: g1 plugged into the eigenvalue equation at lambda = 1 symbolically
    a, b = _sym_ab(d)
    g1 = (rho_s ** 2 + b) ** -2
    V = 3 * (d - 2) * a * (2 * b - (a - 2) * rho_s ** 2) / (rho_s ** 2 + b) ** 2
    lam = 1
    res = ((1 - rho_s ** 2) * sp.diff(g1, rho_s, 2)
           + ((d + 1) / rho_s - 2 * (lam + 3) * rho_s) * sp.diff(g1, rho_s)
           - (lam + 2) * (lam + 3) * g1 + V * g1)
    assert sp.simplify(sp.radsimp(sp.together(res))) == 0


# ---- RadialFunction ----------------------------------------------------------------

@given(st.lists(st.floats(-2, 2), min_size=1, max_size=12))
def test_radial_roundtrip(coeffs):
    f = RadialFunction(np.array(coeffs))
    g = RadialFunction.from_values(f.values())
    assert np.max(np.abs(g.coeffs - f.coeffs)) < 1e-12


def test_radial_evenness_and_deriv():
    f = RadialFunction.interpolate(lambda x: np.exp(x), 24)
    rho = np.linspace(0, 1, 7)
    assert np.allclose(f(rho), f(-rho))
    assert np.allclose(f.deriv_x().eval_x(rho ** 2, exact=False), np.exp(rho ** 2), atol=1e-12)


def test_scalar_multiple_keeps_exact(p5):
    g = gauge_mode(p5)
    h = g.psi * 3.0
    assert h.exact is not None
    assert h.eval_x(1.5) == pytest.approx(3.0 / (1.5 + p5.beta) ** 2, rel=1e-15)
