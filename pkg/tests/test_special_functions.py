import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minlag.errors import DomainError, NoConvergence
from minlag.special_functions import (
    QuadratureConfig,
    adaptive_quad,
    adaptive_quad_breaks,
    agm,
    elliptic_E,
    elliptic_E_from_eps,
    elliptic_K,
    elliptic_K_from_eps,
)

# frozen from mpmath.ellipk / ellipe at 40 digits
K_HALF = 1.854074677301371918433850347195260046218
E_HALF = 1.350643881047675502520174735338725841350
# mpmath.ellipk(1 - 1e-8)
K_EPS_1E8 = 10.59663475708766032025554029746832575135

R = 1.0 / math.sqrt(2.0)


def test_values_at_zero_are_exact():
    assert elliptic_K(0.0) == math.pi / 2
    assert elliptic_E(0.0) == math.pi / 2
    assert elliptic_E(1.0) == 1.0


def test_half_modulus_values():
    assert elliptic_K(R) == pytest.approx(1.8540746773, abs=1e-9)
    assert elliptic_E(R) == pytest.approx(1.3506438810, abs=1e-9)
    assert elliptic_K(R) == pytest.approx(K_HALF, rel=2e-15)
    assert elliptic_E(R) == pytest.approx(E_HALF, rel=2e-15)


def test_agm_basics():
    assert agm(1.0, 1.0) == 1.0
    assert agm(2.0, 0.0) == 0.0
    assert agm(1.0, 2.0) == pytest.approx(agm(2.0, 1.0), rel=1e-16)
    # Gauss's constant
    assert 1.0 / agm(1.0, math.sqrt(2.0)) == pytest.approx(0.8346268416740731862814297, rel=1e-15)
    with pytest.raises(DomainError):
        agm(-1.0, 1.0)


def test_eps_form_near_one():
    # against the frozen 40-digit reference
    assert elliptic_K_from_eps(1e-8) == pytest.approx(K_EPS_1E8, rel=1e-15)
    # two-term expansion with remainder O(eps^2 log eps)
    eps = 1e-8
    lead = math.log(4.0) - 0.5 * math.log(eps)
    two_term = lead + 0.25 * eps * (lead - 1.0)
    assert elliptic_K_from_eps(eps) == pytest.approx(two_term, abs=1e-14)


def test_log_asymptotic_of_first_order_only():
    # the leading-order form misses K by the eps log eps term, ~2.4e-8 at eps = 1e-8
    for eps in (1e-10, 1e-12, 1e-14):
        lead = math.log(4.0) - 0.5 * math.log(eps)
        assert abs(elliptic_K_from_eps(eps) - lead) <= eps * math.log(1.0 / eps)


def test_E_near_one():
    # mpmath.ellipe(1 - 1e-10); the 1 - sum step costs a dozen ulps here
    assert elliptic_E_from_eps(1e-10) == pytest.approx(1.000000000619960991326660739121511051338, abs=5e-15)


def test_domain_errors():
    for bad in (-0.1, 1.0, 1.5):
        with pytest.raises(DomainError):
            elliptic_K(bad)
    for bad in (-0.1, 1.1):
        with pytest.raises(DomainError):
            elliptic_E(bad)
    with pytest.raises(DomainError):
        elliptic_K_from_eps(0.0)


@pytest.mark.parametrize("k", np.arange(1, 10) / 10.0)
def test_agm_against_quadrature(k):
    quad = adaptive_quad(lambda t: 1.0 / np.sqrt(1.0 - (k * np.sin(t)) ** 2), 0.0, math.pi / 2)
    assert abs(elliptic_K(k) - quad) <= 1e-9
    quad_e = adaptive_quad(lambda t: np.sqrt(1.0 - (k * np.sin(t)) ** 2), 0.0, math.pi / 2)
    assert abs(elliptic_E(k) - quad_e) <= 1e-9


@given(st.floats(0.0, 0.1))
def test_small_modulus_expansions(k):
    # 1e-15 floor: below k ~ 1e-4 the k^4 bound drops under rounding
    tol = 2 * k**4 + 1e-15
    assert abs(elliptic_K(k) - math.pi / 2 - math.pi / 8 * k * k) <= tol
    assert abs(elliptic_E(k) - math.pi / 2 + math.pi / 8 * k * k) <= tol


def test_monotonicity():
    ks = np.linspace(0.0, 0.999, 400)
    K = np.array([elliptic_K(k) for k in ks])
    E = np.array([elliptic_E(k) for k in ks])
    assert np.all(np.diff(K) > 0) and np.all(np.diff(E) < 0)


def test_legendre_relation():
    for k in (0.2, 0.5, R, 0.9):
        kp = math.sqrt(1 - k * k)
        lhs = elliptic_E(k) * elliptic_K(kp) + elliptic_E(kp) * elliptic_K(k) - elliptic_K(k) * elliptic_K(kp)
        assert lhs == pytest.approx(math.pi / 2, rel=1e-14)


def test_ratio_constant():
    assert 2.0 * elliptic_E(R) / elliptic_K(R) - 1.0 == pytest.approx(0.457, abs=1e-3)


# -- quadrature ------------------------------------------------------------


def test_quad_examples():
    assert adaptive_quad(np.cos, 0.0, math.pi / 2) == pytest.approx(1.0, abs=1e-12)
    f = lambda t: 1.0 / np.sqrt(1.0 - 0.5 * np.sin(t) ** 2)
    assert adaptive_quad(f, 0.0, math.pi / 2) == pytest.approx(elliptic_K(R), abs=1e-10)


def test_quad_scalar_callable():
    assert adaptive_quad(lambda x: math.exp(x), 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-13)


def test_quad_peaked_and_singular_integrands():
    # narrow Lorentzian: arctan form
    w = 1e-4
    got = adaptive_quad_breaks(lambda x: w / (x * x + w * w), [-1.0, 0.0, 1.0])
    assert got == pytest.approx(2 * math.atan(1 / w), rel=1e-11)
    # an endpoint singularity is out of reach at this tolerance and must say so
    with pytest.raises(NoConvergence):
        adaptive_quad(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0)


def test_quad_deterministic():
    f = lambda x: np.sin(30 * x) * np.exp(-x)
    assert adaptive_quad(f, 0.0, 3.0) == adaptive_quad(f, 0.0, 3.0)


def test_quad_no_convergence():
    cfg = QuadratureConfig(rel_tol=1e-15, abs_tol=1e-300, max_depth=10)
    with pytest.raises(NoConvergence):
        adaptive_quad(lambda x: np.sign(x - 0.3141), 0.0, 1.0, cfg)


def test_quad_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureConfig(max_depth=5)
    with pytest.raises(DomainError):
        adaptive_quad(np.cos, 1.0, 0.0)
