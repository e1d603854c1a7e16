import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from minlag import earthquake_family as eq
from minlag.errors import DomainError
from minlag.geometry import (
    HALF_PI,
    BandBoundaryPoint,
    BandPoint,
    BoundaryPoint,
    band_boundary_to_rp1,
    band_to_uhp_xy,
)
from minlag.special_functions import elliptic_E, elliptic_K

# lambda at eps = 1e-4, 1e-6, 1e-8, 1e-10, 0.5 from mpmath.quad at 40 digits
LAMBDA_REF = {
    1e-4: 14.400925188441644993,
    1e-6: 20.913875362969902134,
    1e-8: 27.426572863281295221,
    1e-10: 33.939267039063835893,
    0.5: 1.7156318191532339118,
}

ks = st.floats(0.01, 0.99)
us = st.floats(-HALF_PI + 1e-3, HALF_PI - 1e-3)


def simpson(f, a, b, n):
    x = np.linspace(a, b, n + 1)
    y = f(x)
    return (b - a) / (3 * n) * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


# -- profile ---------------------------------------------------------------


def test_params():
    p = eq.EarthquakeParams(0.6)
    assert p.eps == pytest.approx(0.64, abs=2e-16)
    q = eq.EarthquakeParams.from_eps(1e-12)
    assert q.eps == 1e-12 and q.k2 == 1.0 - 1e-12
    for bad in (-0.1, 1.0):
        with pytest.raises(DomainError):
            eq.EarthquakeParams(bad)
    with pytest.raises(DomainError):
        eq.EarthquakeParams.from_eps(0.0)


def test_h_prime_examples():
    for k in (0.1, 0.5, 0.9):
        assert eq.h_prime(k, 0.0) == pytest.approx(2 * k * k / math.sqrt(1 - k**4), rel=1e-14)
        assert eq.h_prime(k, HALF_PI) == 0.0 and eq.h_prime(k, -HALF_PI) == 0.0
    assert eq.h_prime(0.0, 0.7) == 0.0
    assert np.all(eq.h_prime(0.0, np.linspace(-1, 1, 9)) == 0.0)


def test_h_prime_domain():
    with pytest.raises(DomainError):
        eq.h_prime(0.5, 2.0)
    with pytest.raises(DomainError):
        eq.h_prime(1.0, 0.0)


def test_h_prime_eps_form_matches_direct():
    k, u = 0.7, 0.4
    c = math.cos(u)
    assert eq.h_prime(k, u) == pytest.approx(2 * k * k * c * c / math.sqrt(1 - k**4 * c**4), rel=1e-14)


def test_h_second_against_central_differences():
    rng = np.random.default_rng(7)
    for k, u in zip(rng.uniform(0.05, 0.95, 100), rng.uniform(-1.5, 1.5, 100)):
        h = 1e-5
        fd = (eq.h_prime(k, u + h) - eq.h_prime(k, u - h)) / (2 * h)
        assert abs(fd - eq.h_second(k, u)) <= 1e-6 * (1 + abs(fd))


def test_closed_form_solves_codazzi_ode_symbolically():
    u, k = sp.symbols("u k", positive=True)
    c = sp.cos(u)
    hp = 2 * k**2 * c**2 / sp.sqrt(1 - k**4 * c**4)
    hpp = sp.diff(hp, u)
    assert sp.simplify(hpp + 4 * k**2 * sp.sin(u) * c * (1 - k**4 * c**4) ** sp.Rational(-3, 2)) == 0
    residual = sp.tan(u) + 2 * hpp / ((4 + hp**2) * hp)
    for kv, uv in ((0.3, 0.2), (0.8, -1.1), (0.95, 0.7)):
        assert abs(float(residual.subs({k: kv, u: uv}))) < 1e-13


@given(ks, us)
def test_codazzi_residual_closed_vanishes(k, u):
    r = eq.codazzi_residual_closed(eq.h_prime(k, u), eq.h_second(k, u), u)
    assert abs(r) <= 1e-9


def test_codazzi_residual_closed_examples():
    assert eq.codazzi_residual_closed(1.0, 0.0, math.pi / 4) == pytest.approx(1.0)
    with pytest.raises(ZeroDivisionError):
        eq.codazzi_residual_closed(0.0, 1.0, 0.3)


# -- weight ----------------------------------------------------------------


def test_lambda_zero():
    assert eq.lambda_k(0.0) == 0.0
    assert eq.h_value(0.0, 0.3) == 0.0


def test_lambda_half_modulus_against_simpson():
    k = 1 / math.sqrt(2)
    oracle = simpson(lambda u: 2 * 0.5 * np.cos(u) ** 2 / np.sqrt(1 - 0.25 * np.cos(u) ** 4), -HALF_PI, HALF_PI, 10**6)
    assert eq.lambda_k(k) == pytest.approx(oracle, abs=1e-8)
    assert eq.lambda_k(eq.EarthquakeParams.from_eps(0.5)) == pytest.approx(LAMBDA_REF[0.5], abs=1e-12)


@pytest.mark.parametrize("eps", [1e-4, 1e-6, 1e-8, 1e-10])
def test_lambda_near_one_against_reference(eps):
    assert eq.lambda_k(eq.EarthquakeParams.from_eps(eps)) == pytest.approx(LAMBDA_REF[eps], rel=1e-11)


def test_lambda_extreme_eps():
    lam = eq.lambda_k(eq.EarthquakeParams.from_eps(1e-17))
    assert math.isfinite(lam) and lam > LAMBDA_REF[1e-10]


@pytest.mark.parametrize("k", np.round(np.arange(0.05, 1.0, 0.05), 2))
def test_sandwich(k):
    F = 4 * (elliptic_K(k) - elliptic_E(k))
    lam = eq.lambda_k(k)
    assert F / math.sqrt(1 + k * k) <= lam <= F


def test_lambda_monotone_and_growth():
    grid = np.round(np.arange(0.05, 1.0, 0.05), 2)
    lams = [eq.lambda_k(k) for k in grid]
    assert all(b > a for a, b in zip(lams, lams[1:]))
    assert eq.lambda_k(1e-4) < 1e-7
    assert LAMBDA_REF[1e-8] > LAMBDA_REF[1e-4]


def test_h_value_is_odd_about_midpoint():
    # h' is even so h(u) + h(-u) = lambda
    for k in (0.3, 0.9):
        lam = eq.lambda_k(k)
        for u in (0.2, 1.0):
            assert eq.h_value(k, u) + eq.h_value(k, -u) == pytest.approx(lam, rel=1e-12)


def test_shear_profile_matches_quadrature():
    for par in (eq.EarthquakeParams(0.5), eq.EarthquakeParams.from_eps(1e-3)):
        prof = eq.ShearProfile(par)
        assert prof.interpolant is not None
        for u in np.linspace(-HALF_PI, HALF_PI, 13):
            assert prof(u) == pytest.approx(eq.h_value(par, u), abs=1e-9)
            assert prof.derivative(u) == pytest.approx(eq.h_prime(par, u), abs=1e-8)


def test_shear_profile_fallback_for_sharp_peaks():
    par = eq.EarthquakeParams.from_eps(1e-9)
    prof = eq.ShearProfile(par, max_degree=256)
    assert prof.interpolant is None
    assert prof(0.4) == pytest.approx(eq.h_value(par, 0.4), abs=1e-12)


# -- map and boundary --------------------------------------------------------


def test_apply_f_k():
    p = BandPoint(0.3, -1.0)
    assert eq.apply_f_k(0.0, p) == p
    lam = eq.lambda_k(0.6)
    assert eq.apply_f_k(0.6, BandBoundaryPoint(1, 0.5)).v == pytest.approx(0.5 + lam)
    assert eq.apply_f_k(0.6, BandBoundaryPoint(-1, 0.5)).v == 0.5
    a = eq.apply_f_k(0.6, BandPoint(0.3, 2.0))
    b = eq.apply_f_k(0.6, BandPoint(0.3, 2.0 + 0.7))
    assert b.u == a.u and b.v == pytest.approx(a.v + 0.7, abs=1e-14)


def test_boundary_phi_examples():
    assert eq.boundary_phi(3.0, BoundaryPoint.from_real(-2.0)).x == -2.0
    assert eq.boundary_phi(1.0, BoundaryPoint.from_real(1.0)).x == pytest.approx(math.e, rel=1e-15)
    assert eq.boundary_phi(5.0, BoundaryPoint.infinity()).is_infinite
    assert eq.boundary_phi(5.0, BoundaryPoint.from_real(0.0)).x == 0.0
    for x in np.linspace(-10, 10, 20):
        b = BoundaryPoint.from_real(x)
        assert eq.boundary_phi(0.0, b) == b
    with pytest.raises(DomainError):
        eq.boundary_phi(-1.0, BoundaryPoint.from_real(1.0))


def test_boundary_phi_large_weight_no_overflow():
    out = eq.boundary_phi(2000.0, BoundaryPoint.from_real(1.0))
    assert out.q > 0.0 or out.is_infinite


def test_boundary_coherence():
    # push interior points to u = +-pi/2 and compare with the earthquake
    k = 0.8
    lam = eq.lambda_k(k)
    f = eq.f_k_map(k)
    for side in (-1, 1):
        for v in np.linspace(-2, 2, 10):
            u = side * (HALF_PI - 1e-7)
            uu, vv = f(u, v)
            x, y = band_to_uhp_xy(uu, vv)
            want = eq.boundary_phi(lam, band_boundary_to_rp1(side, v)).x
            assert float(x) == pytest.approx(want, abs=1e-6 * (1 + abs(want)))
            assert y < 1e-6 * math.exp(vv)


# -- tensor and dilatation ---------------------------------------------------


def test_b_tensor_identity_at_zero():
    assert np.allclose(eq.b_tensor_earthquake(0.0, 0.4).matrix, np.eye(2), atol=0)


def test_b_tensor_det_trace():
    rng = np.random.default_rng(3)
    k = rng.uniform(0, 0.99, 100)
    u = rng.uniform(-1.55, 1.55, 100)
    for ki, ui in zip(k, u):
        b = eq.b_tensor_earthquake(ki, ui)
        hp = eq.h_prime(ki, ui)
        assert abs(b.det - 1.0) <= 1e-12
        assert abs(b.trace - math.sqrt(4 + hp * hp)) <= 1e-12
        assert b.is_self_adjoint()


def test_b_tensor_vectorized_and_domain():
    u = np.linspace(-1, 1, 7)
    b = eq.b_tensor_earthquake(0.5, u)
    assert b.matrix.shape == (7, 2, 2)
    with pytest.raises(DomainError):
        eq.b_tensor_earthquake(0.5, HALF_PI)


def test_b_squares_to_pullback_operator():
    k, u = 0.7, 0.3
    hp = eq.h_prime(k, u)
    b = eq.b_tensor_earthquake(k, u).matrix
    assert np.allclose(b @ b, [[1 + hp * hp, hp], [hp, 1.0]], atol=1e-14)


def test_max_dilatation_examples():
    assert eq.max_dilatation_earthquake(0.0) == 1.0
    assert eq.max_dilatation_earthquake(math.sqrt(1 / 3)) == pytest.approx(2.0, rel=1e-15)
    assert eq.max_dilatation_earthquake(eq.EarthquakeParams.from_eps(1e-10)) == (2 - 1e-10) / 1e-10
    assert eq.log_max_dilatation_earthquake(0.01) == pytest.approx(math.log((1 + 1e-4) / (1 - 1e-4)), rel=1e-15)


@pytest.mark.parametrize("k", [0.2, 0.5, 0.9])
def test_max_dilatation_is_peak_stretch(k):
    u = np.linspace(-1.5, 1.5, 3001)
    eta = eq.eta_plus(k, u)
    assert np.argmax(eta) == 1500
    assert np.max(eta) ** 2 == pytest.approx(eq.max_dilatation_earthquake(k), rel=1e-13)
