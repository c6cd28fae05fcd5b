import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bbm_qp.asymptotics import (
    asymptotic_vs_quadrature, decay_fit, extract_local_data, olver_leading_term, variation_check,
)
from bbm_qp.errors import ConfigurationError


def test_doubled_convention_reference_values():
    d = extract_local_data("I4", 1.0, 1.0, 0.0, convention="doubled")
    assert d.P == 0.5
    np.testing.assert_allclose(abs(olver_leading_term(d, 1e4)), 0.0062666, atol=1e-7)


@pytest.mark.parametrize("segment", ["I2", "I4"])
@pytest.mark.parametrize("alpha, gamma", [(1.0, 1.0), (2.0, 0.25), (-1.5, 3.0)])
def test_taylor_constant_is_half_the_curvature(segment, alpha, gamma):
    d = extract_local_data(segment, alpha, gamma, 1.0)
    np.testing.assert_allclose(d.P, abs(alpha) * math.sqrt(gamma) / 4.0, rtol=1e-15)
    # the phase curvature at the endpoint, by finite differences
    a, h = d.a, 1e-4
    p = lambda s: -alpha * s / (1 + gamma * s * s)  # noqa: E731
    curvature = (p(a + h) - 2 * p(a) + p(a - h)) / h**2
    np.testing.assert_allclose(0.5 * abs(curvature), d.P, rtol=1e-6)
    assert d.sign == (1 if curvature > 0 else -1)


def test_local_data_layout():
    d2 = extract_local_data("I2", 1.0, 4.0, 2.0, M=100.0)
    d4 = extract_local_data("I4", 1.0, 4.0, 2.0, M=100.0)
    assert (d2.a, d2.b, d2.sign) == (-0.5, 0.0, -1)
    assert (d4.a, d4.b, d4.sign) == (0.5, 100.0, 1)
    np.testing.assert_allclose(d4.Q, 0.5 * np.exp(1j))
    assert (d2.mu, d2.lam) == (2.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.0, 1e6))
def test_leading_term_decays_like_inverse_sqrt(t):
    d = extract_local_data("I2", 1.0, 1.0, 1.0)
    np.testing.assert_allclose(abs(olver_leading_term(d, 4 * t)), 0.5 * abs(olver_leading_term(d, t)), rtol=1e-12)


def test_leading_terms_are_conjugate_at_the_origin():
    t = 123.0
    a = olver_leading_term(extract_local_data("I2", 1.0, 1.0, 0.0), t)
    b = olver_leading_term(extract_local_data("I4", 1.0, 1.0, 0.0), t)
    np.testing.assert_allclose(a, np.conj(b), rtol=1e-14)


@pytest.mark.parametrize("segment", ["I2", "I4"])
def test_taylor_term_converges_and_doubled_does_not(segment):
    taylor = [asymptotic_vs_quadrature(segment, 1.0, 1.0, 0.0, t).rel_err for t in (1e2, 1e3, 1e4)]
    assert taylor[0] > taylor[1] > taylor[2]
    assert taylor[2] < 0.02
    doubled = asymptotic_vs_quadrature(segment, 1.0, 1.0, 0.0, 1e4, convention="doubled").rel_err
    assert doubled > 0.2


def test_comparison_row_layout():
    res = asymptotic_vs_quadrature("I4", 1.0, 1.0, 1.0, 100.0)
    row = res.row()
    assert row[:5] == ("I4", 1.0, 1.0, 1.0, 100.0)
    assert row[-1] == res.rel_err


def test_alpha_zero_rejected():
    with pytest.raises(ConfigurationError, match="stationary phase undefined for alpha = 0"):
        extract_local_data("I2", 0.0, 1.0, 0.0)
    with pytest.raises(ConfigurationError):
        asymptotic_vs_quadrature("I4", 0.0, 1.0, 0.0, 10.0)


def test_bad_segment_and_convention():
    with pytest.raises(ConfigurationError):
        extract_local_data("I1", 1.0, 1.0, 0.0)
    with pytest.raises(ConfigurationError):
        extract_local_data("I2", 1.0, 1.0, 0.0, convention="printed")


# --- decay fits -------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.floats(-2.0, 0.5), st.floats(0.01, 100.0))
def test_decay_fit_recovers_power_law(slope, c):
    ts = np.geomspace(1.0, 1e3, 7)
    fit = decay_fit(zip(ts, c * ts**slope))
    np.testing.assert_allclose(fit.slope, slope, atol=1e-10)
    np.testing.assert_allclose(fit.predict(10.0), c * 10.0**slope, rtol=1e-9)
    assert fit.residual < 1e-10


def test_decay_fit_drops_floor_and_flags_degenerate():
    ts = np.geomspace(10.0, 1e4, 6)
    vals = ts ** -0.5
    vals[[1, 3]] = 0.0
    fit = decay_fit(zip(ts, vals), floor=1e-12)
    assert fit.dropped == 2 and fit.degenerate and fit.n == 4
    fit = decay_fit(zip(ts, vals), floor=1e-12, min_samples=4)
    np.testing.assert_allclose(fit.slope, -0.5)


def test_decay_fit_needs_span():
    with pytest.raises(ConfigurationError, match="decades"):
        decay_fit(zip(np.linspace(10, 20, 6), np.ones(6)))
    with pytest.raises(ConfigurationError):
        decay_fit([(0.0, 1.0)] * 5)


# --- variation ---------------------------------------------------------------

def test_variation_grows_as_the_endpoint_is_approached():
    values = [variation_check("I4", 1.0, 1.0, 0.0, eps, 10.0) for eps in (0.5, 0.1, 0.02)]
    assert values[0] < values[1] < values[2]


def test_variation_saturates_in_M_without_oscillation():
    near = variation_check("I4", 1.0, 1.0, 0.0, 0.1, 10.0)
    far = variation_check("I4", 1.0, 1.0, 0.0, 0.1, 1e6)
    np.testing.assert_allclose(near, 9.50, atol=0.01)
    np.testing.assert_allclose(far, 9.52, atol=0.01)


def test_variation_grows_linearly_in_M_with_oscillation():
    a = variation_check("I4", 1.0, 1.0, 1.0, 0.1, 1e3)
    b = variation_check("I4", 1.0, 1.0, 1.0, 0.1, 2e3)
    np.testing.assert_allclose(b - a, 1e3, rtol=0.01)


def test_variation_on_inner_segment_is_finite():
    assert 0 < variation_check("I2", 1.0, 1.0, 2.0, 0.1, 10.0) < 1e3
