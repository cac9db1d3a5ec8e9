import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from ymblow.profiles import DomainError, make_params
from ymblow.simvars import (SimCoords, blowup_field, blowup_rate, from_similarity,
                            lightcone_norm, rescale_fields, to_similarity, unrescale_fields)


def test_origin_maps_to_origin():
    c = to_similarity(0.0, 0.0, 1.0)
    assert (c.tau, c.rho) == (0.0, 0.0)


def test_unit_point():
    c = to_similarity(1 - math.exp(-1), math.exp(-1), 1.0)
    assert c.tau == pytest.approx(1.0, abs=1e-14)
    assert c.rho == pytest.approx(1.0, abs=1e-14)


def test_boundary_is_exactly_one():
    rng = np.random.default_rng(11)
    for _ in range(50):
        T = rng.uniform(0.1, 5)
        t = rng.uniform(0, T * 0.999)
        assert to_similarity(t, T - t, T).rho == 1.0


@given(st.floats(0, 3), st.floats(0, 1), st.floats(0.1, 10))
def test_roundtrip_cylinder(tau, rho, T):
    # T - t is formed by cancellation, so the tau error grows like eps e^tau
    t, r = from_similarity(SimCoords(tau, rho, T))
    c = to_similarity(t, min(r, T - t), T)
    assert c.tau == pytest.approx(tau, abs=1e-14)
    assert c.rho == pytest.approx(rho, abs=1e-14)


@given(st.floats(0, 0.999), st.floats(0, 1), st.floats(0.1, 10))
def test_roundtrip_lightcone(tf, rf, T):
    t = tf * T
    r = rf * (T - t)
    t2, r2 = from_similarity(to_similarity(t, r, T))
    assert t2 == pytest.approx(t, abs=1e-14 * T / (1 - tf) + 1e-15)
    assert r2 == pytest.approx(r, abs=1e-14 * T)


@pytest.mark.parametrize("args", [(1.0, 0.0, 1.0), (1.5, 0.0, 1.0), (0.5, 0.6, 1.0),
                                  (-0.1, 0.0, 1.0), (0.0, 0.0, 0.0)])
def test_outside_domain(args):
    with pytest.raises(DomainError):
        to_similarity(*args)


def test_rescale_zero():
    psi, phi = rescale_fields(0.0, 0.0, 0.3, 1.0)
    assert psi == 0 and phi == 0


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 0.99), st.floats(0.5, 2))
def test_rescale_roundtrip(u, ut, tf, T):
    t = tf * T
    a, b = unrescale_fields(*rescale_fields(u, ut, t, T), t, T)
    assert a == pytest.approx(u, rel=1e-12, abs=1e-300)
    assert b == pytest.approx(ut, rel=1e-12, abs=1e-300)


def test_rescale_past_T():
    with pytest.raises(DomainError):
        rescale_fields(1.0, 1.0, 1.0, 1.0)


def test_norm_zero_field():
    p = make_params(5)
    zero = lambda t, r: (np.zeros_like(r), np.zeros_like(r))
    assert lightcone_norm(zero, 0.5, 1.0, 2, p, degree=16) == 0.0


@pytest.mark.parametrize("k", [0, 4])
def test_norm_k_out_of_range(k):
    with pytest.raises(DomainError):
        lightcone_norm(blowup_field(make_params(5)), 0.5, 1.0, k, make_params(5))


def test_norm_even_d_rejected():
    with pytest.raises(DomainError):
        lightcone_norm(blowup_field(make_params(6)), 0.5, 1.0, 1, make_params(6))


def test_norm_d7_k1_quadrature_oracle():
    # For k = 1 on B^7 with U_i = x_i u: |grad U|^2 = d u^2 + 2 r u u' + r^2 u'^2 summed
    # over i, j; the 1-form norm carries (d-1).  Radial integral by adaptive quadrature.
    d, k, T, t = 7, 1, 1.0, 0.95
    p = make_params(d)
    a, b = p.alpha, p.beta
    s = T - t
    u = lambda r: a / (r * r + b * s * s)
    du = lambda r: -2 * a * r / (r * r + b * s * s) ** 2
    ut = lambda r: 2 * a * b * s / (r * r + b * s * s) ** 2
    area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    grad = integrate.quad(lambda r: (d * u(r) ** 2 + 2 * r * u(r) * du(r) + r * r * du(r) ** 2)
                          * r ** (d - 1), 0, s, epsabs=0, epsrel=1e-13)[0]
    l2 = integrate.quad(lambda r: r * r * ut(r) ** 2 * r ** (d - 1), 0, s,
                        epsabs=0, epsrel=1e-13)[0]
    oracle = math.sqrt((d - 1) * area * (grad + l2))
    assert lightcone_norm(blowup_field(p), t, T, k, p) == pytest.approx(oracle, rel=1e-10)


@pytest.mark.parametrize("d,k", [(5, 2), (7, 1)])
def test_rate_examples(d, k):
    p = make_params(d)
    fit = blowup_rate(blowup_field(p), 1.0, k, p)
    assert fit.slope == pytest.approx(d / 2 - 1 - k, rel=0.02)
    assert fit.expected == d / 2 - 1 - k
