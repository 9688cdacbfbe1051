import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import assume, given, settings, strategies as st

from fvo.errors import ConvergenceError, DomainError, PoleError
from fvo.specfun import (
    SeriesAccuracy,
    bessel_j,
    bessel_j_array,
    frobenius_coefficients,
    heunb_eval,
    heunb_ode_residual,
    heunb_theta,
    hyp1f1,
    hyp1f1_array,
    truncation_deltas,
    truncation_index,
    whittaker_m,
)


# -- Kummer 1F1 -------------------------------------------------------------


def test_hyp1f1_examples():
    assert hyp1f1(-0.3, 2.5, 0.0) == 1.0
    assert hyp1f1(1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-15)
    assert hyp1f1(-1.0, 3.0, 2.0) == pytest.approx(1.0 / 3.0, rel=1e-15)


def test_hyp1f1_polynomial_terminates():
    acc = SeriesAccuracy()
    hyp1f1(-4.0, 1.5, 3.0, acc)
    assert acc.converged and acc.terms_used <= 5


def test_hyp1f1_pole():
    with pytest.raises(PoleError):
        hyp1f1(1.0, -2.0, 1.0)
    # polynomial of lower degree than the pole is allowed
    assert hyp1f1(-1.0, -2.0, 1.0) == pytest.approx(1.5)


def test_hyp1f1_term_cap():
    with pytest.raises(ConvergenceError) as info:
        hyp1f1(0.5, 1.5, 30.0, SeriesAccuracy(max_terms=10))
    assert info.value.terms_used == 10


@settings(max_examples=300, deadline=None)
@given(a=st.floats(-8, 8), b=st.floats(0.3, 10), x=st.floats(-15, 15))
def test_hyp1f1_against_scipy(a, b, x):
    ref = sp.hyp1f1(a, b, x)
    assume(np.isfinite(ref))
    assert hyp1f1(a, b, x) == pytest.approx(ref, rel=1e-9, abs=1e-12 * max(1.0, math.exp(abs(x))))


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0.5, 5), b=st.floats(0.5, 5), x=st.floats(0, 10))
def test_kummer_transformation(a, b, x):
    lhs = hyp1f1(a, b, x)
    rhs = math.exp(x) * hyp1f1(b - a, b, -x)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_hyp1f1_exp_identity_grid():
    xs = np.linspace(0, 10, 201)
    np.testing.assert_allclose(hyp1f1_array(1.0, 1.0, xs), np.exp(xs), rtol=1e-12)


# -- Bessel J ---------------------------------------------------------------


def test_bessel_examples():
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(1.5, 0.0) == 0.0
    assert abs(bessel_j(0.0, 2.404825557695773)) < 1e-9


def test_bessel_rejects_negative():
    with pytest.raises(DomainError):
        bessel_j(-1.0, 1.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, -1.0)


@settings(max_examples=300, deadline=None)
@given(nu=st.floats(0, 12), x=st.just(0.0) | st.floats(1e-6, 60))
def test_bessel_against_scipy(nu, x):
    assert bessel_j(nu, x) == pytest.approx(sp.jv(nu, x), abs=1e-12)


def test_bessel_asymptotic_regime_recorded():
    acc = SeriesAccuracy()
    bessel_j(0.0, 40.0, acc)
    assert any("asymptotic" in note for note in acc.notes)


@pytest.mark.parametrize("nu", [0, 1, 2])
def test_bessel_ode_residual(nu):
    # five-point stencil; h = 1e-3 keeps roundoff and truncation near 1e-10
    kappa, h = 1.3, 1e-3
    r = np.linspace(0.2, 15, 120)

    def f(x):
        return bessel_j_array(nu, kappa * x)

    d1 = (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h)
    d2 = (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h * h)
    res = d2 + d1 / r - nu * nu * f(r) / r**2 + kappa**2 * f(r)
    assert np.max(np.abs(res)) <= 1e-8


# -- Whittaker M -------------------------------------------------------------


def test_whittaker_example():
    assert whittaker_m(0.0, 0.5, 2.0) == pytest.approx(2 * math.sinh(1.0), rel=1e-14)


def test_whittaker_small_z_linear():
    z = 1e-8
    assert whittaker_m(0.7, 0.5, z) == pytest.approx(z, rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(kw=st.floats(-3, 3), mu=st.floats(0, 3), z=st.floats(0.01, 8))
def test_whittaker_composition(kw, mu, z):
    expected = math.exp(-z / 2) * z ** (mu + 0.5) * hyp1f1(mu - kw + 0.5, 1 + 2 * mu, z)
    assert whittaker_m(kw, mu, z) == pytest.approx(expected, rel=1e-13)


# -- Frobenius / biconfluent Heun ---------------------------------------------


def test_frobenius_examples():
    s = frobenius_coefficients(1.0, 4.0, 2.0, 6)
    assert s.coeffs[0] == 1.0
    assert s.coeffs[1] == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert s.coeffs[2] == pytest.approx(-1.0 / 3.0, rel=1e-15)
    assert s.zeta_H == 3.0


def test_frobenius_rejects_short_series():
    with pytest.raises(DomainError):
        frobenius_coefficients(1.0, 2.0, 0.0, 1)


@given(g=st.floats(0, 5), theta=st.floats(-10, 10), delta=st.floats(-5, 5))
def test_recurrence_holds(g, theta, delta):
    s = frobenius_coefficients(g, theta, delta, 12)
    a, zh = s.coeffs, 2 * g + 1
    for j in range(11):
        rhs = (delta * a[j + 1] - (theta - 2 * j) * a[j]) / ((j + 2) * (j + 1 + zh))
        assert a[j + 2] == pytest.approx(rhs, rel=1e-14, abs=1e-300)


def test_truncation_index():
    assert truncation_index(4.0) == 2
    assert truncation_index(3.0) is None
    assert truncation_index(-2.0) is None


def test_truncation_deltas_example():
    np.testing.assert_allclose(truncation_deltas(1.0, 1), [-math.sqrt(6), math.sqrt(6)], rtol=1e-14)
    np.testing.assert_array_equal(truncation_deltas(2.0, 0), [0.0])


@settings(max_examples=100, deadline=None)
@given(g=st.floats(0, 4), n=st.integers(1, 6), pick=st.integers(0, 6))
def test_truncation_gives_polynomial(g, n, pick):
    roots = truncation_deltas(g, n)
    delta = roots[pick % roots.size]
    s = frobenius_coefficients(g, 2.0 * n, delta, n + 50)
    head = np.max(np.abs(s.coeffs[: n + 1]))
    assert np.max(np.abs(s.coeffs[n + 1 :])) <= 1e-12 * head
    assert s.truncated_at == n


def test_heunb_eval_examples():
    assert heunb_eval(1.3, 2.0, 0.7, 0.0) == 1.0
    np.testing.assert_array_equal(heunb_eval(0.5, 0.0, 0.0, np.array([0.3, 2.0])), [1.0, 1.0])
    coeffs = frobenius_coefficients(1.0, 4.0, 2.0, 200).coeffs
    expected = np.polynomial.polynomial.polyval(0.5, coeffs)
    assert heunb_eval(1.0, 4.0, 2.0, 0.5) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1 + 2 / 3 * 0.5 - 1 / 3 * 0.25 + sum(coeffs[3:] * 0.5 ** np.arange(3, 201)))


@pytest.mark.parametrize("g,theta,delta", [(1.0, 4.0, 2.0), (0.3, 1.7, -0.8), (2.5, 6.0, 1.2)])
def test_heunb_ode_residual(g, theta, delta):
    kk = np.linspace(0.1, 3.0, 40)
    assert np.max(np.abs(heunb_ode_residual(g, theta, delta, kk))) <= 1e-7


@settings(max_examples=60, deadline=None)
@given(g=st.floats(0, 3), theta=st.floats(-6, 6), kk=st.floats(0, 2.5))
def test_heunb_lambda_zero_is_kummer(g, theta, kk):
    # delta = 0 leaves only even powers: O(K) = 1F1(-theta/4, |gamma| + 1, K^2)
    assert heunb_eval(g, theta, 0.0, kk) == pytest.approx(hyp1f1(-theta / 4, g + 1, kk * kk), rel=1e-10)


def test_heunb_theta_forms_differ_by_gamma():
    beta_sq, mw, g = 3.0, 0.5, 0.8
    rec = heunb_theta(beta_sq, mw, g)
    printed = heunb_theta(beta_sq, mw, g, form="as_printed")
    assert rec - printed == pytest.approx(2 * g)
