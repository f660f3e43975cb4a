import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pointflux import numerics as nm

mp.mp.dps = 30


# --- digamma / trigamma -----------------------------------------------------

@pytest.mark.parametrize("x", [1e-3, 0.1, 0.5, 1.0, 1.5, 2.7, 10.0, 123.4, 1e5])
def test_digamma_matches_mpmath(x):
    np.testing.assert_allclose(nm.digamma(x), float(mp.digamma(x)), rtol=1e-13, atol=1e-14)


@pytest.mark.parametrize("x", [-0.5, -1.3, -7.25])
def test_digamma_reflection_negative_arguments(x):
    np.testing.assert_allclose(nm.digamma(x), float(mp.digamma(x)), rtol=1e-12)


def test_digamma_special_values():
    np.testing.assert_allclose(nm.digamma(1.0), -nm.EULER_GAMMA, rtol=1e-15)
    np.testing.assert_allclose(nm.digamma(0.5), -nm.EULER_GAMMA - 2 * math.log(2), rtol=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -4.0])
def test_digamma_poles(x):
    with pytest.raises(nm.PoleError):
        nm.digamma(x)


@given(st.floats(0.1, 50.0))
def test_digamma_recurrence(x):
    assert abs(nm.digamma(x + 1) - nm.digamma(x) - 1 / x) <= 1e-11 * max(1.0, 1 / x)


def test_digamma_recurrence_bulk():
    rng = np.random.default_rng(7)
    xs = rng.uniform(0.1, 50.0, 1000)
    res = [abs(nm.digamma(x + 1) - nm.digamma(x) - 1 / x) for x in xs]
    assert max(res) <= 1e-11


@pytest.mark.parametrize("x", [1e-3, 0.3, 1.0, 2.5, 17.0, 1e4, -0.5, -2.75])
def test_trigamma_matches_mpmath(x):
    np.testing.assert_allclose(nm.trigamma(x), float(mp.psi(1, x)), rtol=1e-12)


def test_trigamma_special_value():
    np.testing.assert_allclose(nm.trigamma(1.0), math.pi ** 2 / 6, rtol=1e-14)


@given(st.floats(0.05, 40.0))
def test_trigamma_positive_and_recurrence(x):
    assert nm.trigamma(x) > 0
    assert abs(nm.trigamma(x) - nm.trigamma(x + 1) - 1 / x ** 2) <= 1e-11 * max(1.0, x ** -2)


def test_trigamma_pole():
    with pytest.raises(nm.PoleError):
        nm.trigamma(-2.0)


def test_ln_gamma():
    np.testing.assert_allclose(nm.ln_gamma(0.5), 0.5 * math.log(math.pi), rtol=1e-14)
    with pytest.raises(nm.DomainError):
        nm.ln_gamma(-1.0)


# --- Tricomi U(a, 1; x) -----------------------------------------------------

@pytest.mark.parametrize("a,x", [(0.5, 0.1), (1.0, 1.0), (2.3, 0.7), (0.25, 5.0),
                                 (7.5, 3.0), (40.0, 0.02), (3.0, 60.0)])
def test_tricomi_matches_mpmath(a, x):
    ref = float(mp.hyperu(a, 1, x))
    np.testing.assert_allclose(nm.tricomi_u(a, x), ref, rtol=1e-11)


def test_tricomi_a_one_is_exponential_integral():
    # U(1, 1; x) = e^x E1(x)
    for x in (0.05, 1.0, 8.0):
        np.testing.assert_allclose(nm.tricomi_u(1.0, x), float(mp.e ** x * mp.e1(x)),
                                   rtol=1e-11)


@pytest.mark.parametrize("a,x", [(0.5, 0.3), (1.7, 2.0), (4.0, 1.0), (1.0, 5.0)])
def test_tricomi_series_and_integral_routes_agree(a, x):
    series, rel = nm.gamma_tricomi_series(a, x)
    quad = nm.gamma_tricomi_integral(a, x)
    assert rel < 1e-10
    np.testing.assert_allclose(series, quad, rtol=1e-11)


def test_tricomi_checked_route():
    np.testing.assert_allclose(nm.tricomi_u(1.3, 0.9, check=True),
                               float(mp.hyperu(1.3, 1, 0.9)), rtol=1e-11)


def test_tricomi_series_refuses_ill_conditioned():
    with pytest.raises(nm.NonConvergenceError):
        nm.tricomi_u_series(30.0, 80.0)


def test_tricomi_domain():
    with pytest.raises(nm.DomainError):
        nm.tricomi_u(-0.5, 1.0)
    with pytest.raises(nm.DomainError):
        nm.tricomi_u(0.5, 0.0)


@pytest.mark.parametrize("a", [-0.3, -1.6, -2.5])
def test_gamma_tricomi_negative_a_by_recurrence(a):
    x = 0.8
    ref = float(mp.gamma(a) * mp.hyperu(a, 1, x))
    np.testing.assert_allclose(nm.gamma_tricomi(a, x), ref, rtol=1e-10)
    np.testing.assert_allclose(nm.gamma_tricomi_array(a, np.array([x]))[0], ref, rtol=1e-10)


def test_gamma_tricomi_pole_at_nonpositive_integer():
    with pytest.raises(nm.PoleError):
        nm.gamma_tricomi(-1.0, 0.5)


def test_gamma_tricomi_contiguous_relation():
    # g(a-1) (a-1) = (2a + x - 1) g(a) - a g(a+1)
    a, x = 2.4, 1.1
    lhs = (a - 1) * nm.gamma_tricomi(a - 1, x)
    rhs = (2 * a + x - 1) * nm.gamma_tricomi(a, x) - a * nm.gamma_tricomi(a + 1, x)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_gamma_tricomi_derivative_in_a():
    a, x, h = 1.4, 0.6, 1e-5
    fd = (nm.gamma_tricomi_integral(a + h, x) - nm.gamma_tricomi_integral(a - h, x)) / (2 * h)
    np.testing.assert_allclose(nm.gamma_tricomi_integral(a, x, deriv=True), fd, rtol=1e-8)


# --- modified Bessel functions -----------------------------------------------

@pytest.mark.parametrize("nu,x", [(0.0, 0.5), (0.3, 2.0), (2.5, 10.0), (10.2, 0.7),
                                  (0.7, 300.0)])
def test_bessel_scaled_matches_mpmath(nu, x):
    ie, ke = nm.bessel_ik_scaled(nu, x)
    np.testing.assert_allclose(ie, float(mp.besseli(nu, x) * mp.e ** -x), rtol=1e-13)
    np.testing.assert_allclose(ke, float(mp.besselk(nu, x) * mp.e ** x), rtol=1e-13)


@given(st.floats(0.0, 30.0), st.floats(0.01, 50.0))
def test_bessel_wronskian(nu, x):
    # I_nu K_{nu+1} + I_{nu+1} K_nu = 1/x
    i0, k0 = nm.bessel_ik_scaled(nu, x)
    i1, k1 = nm.bessel_ik_scaled(nu + 1, x)
    np.testing.assert_allclose(x * (i0 * k1 + i1 * k0), 1.0, rtol=1e-12)


def test_bessel_ik_product_and_derivative():
    nu, x = 1.3, 0.9
    ref = mp.besseli(nu, x) * mp.besselk(nu, x)
    np.testing.assert_allclose(nm.bessel_ik_product(nu, x), float(ref), rtol=1e-13)
    dref = mp.diff(lambda t: mp.besseli(nu, t) * mp.besselk(nu, t), x)
    np.testing.assert_allclose(nm.bessel_ik_product_dx(nu, x), float(dref), rtol=1e-12)


@pytest.mark.parametrize("nu,x", [(60.0, 1.0), (75.3, 40.0), (500.0, 3.0), (2000.0, 900.0)])
def test_debye_product_matches_mpmath(nu, x):
    ref = mp.besseli(nu, x) * mp.besselk(nu, x)
    np.testing.assert_allclose(nm.debye_ik_product(nu, x), float(ref), rtol=2e-11)
    dref = mp.diff(lambda t: mp.besseli(nu, t) * mp.besselk(nu, t), x)
    np.testing.assert_allclose(nm.debye_ik_product(nu, x, deriv=True), float(dref), rtol=1e-9)


@pytest.mark.parametrize("nu,a,b", [(3.5, 0.4, 1.2), (59.0, 1.0, 1.5), (61.0, 1.0, 1.5),
                                    (400.0, 2.0, 2.2), (1500.0, 0.3, 30.0)])
def test_bessel_cross_product(nu, a, b):
    ref = mp.besseli(nu, a) * mp.besselk(nu, b)
    np.testing.assert_allclose(nm.bessel_ik_cross(nu, a, b), float(ref), rtol=1e-10,
                               atol=1e-300)


def test_bessel_cross_continuous_across_switch():
    below = nm.bessel_ik_cross(60.0 - 1e-12, 1.0, 1.3)
    above = nm.bessel_ik_cross(60.0, 1.0, 1.3)
    np.testing.assert_allclose(below, above, rtol=1e-11)


# --- quadrature, roots, series ------------------------------------------------

def test_integrate_examples():
    np.testing.assert_allclose(nm.integrate(lambda x: x, 0.0, 1.0), 0.5, rtol=1e-14)
    np.testing.assert_allclose(nm.integrate(lambda x: math.exp(-x), 0.0, math.inf), 1.0,
                               rtol=1e-12)
    np.testing.assert_allclose(nm.integrate(lambda x: math.exp(-x * x), 0.0, math.inf),
                               math.sqrt(math.pi) / 2, rtol=1e-12)


def test_integrate_endpoint_singularity():
    np.testing.assert_allclose(nm.integrate(lambda x: math.log(x), 0.0, 1.0), -1.0,
                               rtol=1e-10)


def test_integrate_reports_failure():
    with pytest.raises(nm.NonConvergenceError) as info:
        nm.integrate(lambda x: 1.0 / x, 0.0, 1.0, nm.Tolerance(max_iter=5))
    assert info.value.estimate is not None


def test_find_root_examples():
    np.testing.assert_allclose(nm.find_root_bracketed(lambda x: x * x - 2, 1.0, 2.0),
                               math.sqrt(2), rtol=1e-10)
    np.testing.assert_allclose(nm.find_root_bracketed(math.cos, 0.0, 2.0), math.pi / 2,
                               rtol=1e-10)
    tight = nm.Tolerance(abs_tol=1e-15, rel_tol=1e-15)
    np.testing.assert_allclose(nm.find_root_bracketed(math.cos, 0.0, 2.0, tight),
                               math.pi / 2, rtol=1e-14)
    root = nm.find_root_bracketed(lambda x: nm.digamma(x) + 0.4613, 0.5, 2.0)
    assert abs(nm.digamma(root) + 0.4613) < 1e-12
    assert 1.0 < root < 1.1


def test_find_root_needs_sign_change():
    with pytest.raises(nm.NoSignChangeError):
        nm.find_root_bracketed(lambda x: x * x + 1, -1.0, 1.0)


def test_sum_series_examples():
    zero = nm.sum_series(lambda m: np.zeros(len(m)), lambda m: 0.0)
    assert zero == 0.0
    value = nm.sum_series(lambda m: 1.0 / (m * m + 1.0), lambda m: 2.0 / m,
                          tail_estimate=lambda m: 2.0 / (m + 0.5),
                          tol=nm.Tolerance(abs_tol=1e-3, max_iter=1000))
    np.testing.assert_allclose(value, math.pi / math.tanh(math.pi), rtol=1e-6)
    geo = nm.sum_series(lambda m: 0.5 ** np.abs(m), lambda m: 2 * 0.5 ** m)
    np.testing.assert_allclose(geo, 3.0, rtol=1e-14)


def test_sum_series_failure():
    with pytest.raises(nm.NonConvergenceError):
        nm.sum_series(lambda m: 1.0 / (np.abs(m) + 1.0), lambda m: 1.0,
                      tol=nm.Tolerance(max_iter=3))


def test_sum_series_is_deterministic():
    f = lambda m: 1.0 / (m * m + 0.3)  # noqa: E731
    runs = {nm.sum_series(f, lambda m: 2.0 / m, tol=nm.Tolerance(abs_tol=1e-2))
            for _ in range(3)}
    assert len(runs) == 1


def test_central_difference_and_gauss_legendre():
    np.testing.assert_allclose(nm.central_difference(math.sin, 0.3, 1e-3), math.cos(0.3),
                               rtol=1e-12)
    x, w = nm.gauss_legendre(8, 0.0, 2.0)
    np.testing.assert_allclose(np.sum(w * x ** 7), 2.0 ** 8 / 8, rtol=1e-14)


def test_tolerance_validation():
    with pytest.raises(nm.DomainError):
        nm.Tolerance(abs_tol=0.0)
    with pytest.raises(nm.DomainError):
        nm.Tolerance(max_iter=0)


def test_bessel_subnormal_order():
    ie, ke = nm.bessel_ik_scaled(2.2250738585e-313, 1.0)
    np.testing.assert_allclose(ke, float(mp.besselk(0, 1) * mp.e), rtol=1e-13)
    np.testing.assert_allclose(ie, float(mp.besseli(0, 1) / mp.e), rtol=1e-13)
