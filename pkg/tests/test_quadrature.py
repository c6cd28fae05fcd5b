import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from bbm_qp.errors import ConfigurationError
from bbm_qp.quadrature import (
    PhaseDescriptor, QuadratureConfig, TruncationClampWarning, beta, beta_prime, canonical_segments,
    gk_integrate, integrate_phi_raw, integrate_segment, stationary_points, tail_bound_M,
    tail_integral_bound, tail_integral_direct,
)


@pytest.mark.parametrize(
    "eps, gamma, expected",
    [(0.02, 1.0, 1.0 / math.tan(0.005)), (0.02, 4.0, 0.5 / math.tan(0.01)), (1e-6, 1.0, None)],
)
def test_tail_bound_M_closed_form(eps, gamma, expected):
    M = tail_bound_M(eps, gamma)
    if expected is not None:
        np.testing.assert_allclose(M, expected, rtol=1e-12)
    assert tail_integral_bound(M, gamma) < 0.5 * eps


def test_tail_bound_M_reference_values():
    np.testing.assert_allclose(tail_bound_M(0.02, 1.0), 199.99833, atol=1e-5)
    np.testing.assert_allclose(tail_bound_M(0.02, 4.0), 49.99833, atol=1e-5)


def test_tail_bound_M_clamps_loose_tolerance():
    with pytest.warns(TruncationClampWarning):
        assert tail_bound_M(10.0, 1.0) == 1.0


@pytest.mark.parametrize("bad", [(0.0, 1.0), (1e-3, 0.0), (-1.0, 1.0)])
def test_tail_bound_M_rejects_nonpositive(bad):
    with pytest.raises(ConfigurationError):
        tail_bound_M(*bad)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-8, 1e-1), st.floats(0.05, 20.0))
def test_tail_direct_matches_bound(eps, gamma):
    M = tail_bound_M(eps, gamma)
    np.testing.assert_allclose(tail_integral_direct(M, gamma), tail_integral_bound(M, gamma), rtol=1e-8)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        QuadratureConfig(epsilon=0.0)
    with pytest.raises(ConfigurationError):
        QuadratureConfig(tail="none")
    with pytest.raises(ConfigurationError):
        QuadratureConfig(M=0.5).truncation(1.0)


@pytest.mark.parametrize("edges", [[0.0, 1.0], np.linspace(0.0, 1.0, 7), [0.0, 0.3, 0.3, 1.0]])
def test_gk_integrate_polynomial_and_oscillatory(edges):
    val, err = gk_integrate(lambda s: np.stack([s**5, np.exp(40j * s)]), edges, rel_tol=1e-12)
    np.testing.assert_allclose(val[0], 1.0 / 6.0, rtol=1e-13)
    np.testing.assert_allclose(val[1], (np.exp(40j) - 1) / 40j, rtol=1e-11)
    assert np.all(err >= 0)


def test_beta_and_derivative():
    xi = np.linspace(-5, 5, 101)
    h = 1e-6
    fd = (beta(xi + h, 2.0, 3.0) - beta(xi - h, 2.0, 3.0)) / (2 * h)
    np.testing.assert_allclose(beta_prime(xi, 2.0, 3.0), fd, atol=1e-8)
    # maximum group velocity alpha at zero frequency
    assert beta_prime(0.0, 2.0, 3.0) == 2.0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(0.1, 100.0), st.floats(0.2, 3.0), st.floats(0.2, 4.0))
def test_stationary_points_are_roots(x, t, alpha, gamma):
    for xi in stationary_points(x, t, alpha, gamma):
        scale = max(1.0, abs(x))
        assert abs(x - t * beta_prime(xi, alpha, gamma)) < 1e-8 * scale


def test_stationary_points_at_origin_are_inflection_frequencies():
    np.testing.assert_allclose(stationary_points(0.0, 5.0, 1.0, 4.0), [-0.5, 0.5])
    assert stationary_points(3.0, 0.0, 1.0, 1.0).size == 0


@pytest.mark.parametrize("x", [0.0, 0.5, 2.0, 10.0])
@pytest.mark.parametrize("gamma", [0.25, 1.0, 4.0])
def test_kernel_at_time_zero_closed_form(x, gamma):
    raw = integrate_phi_raw(PhaseDescriptor(1.3, gamma, x, 0.0), QuadratureConfig(rel_tol=1e-12))
    sg = math.sqrt(gamma)
    np.testing.assert_allclose(raw.value.real, math.pi / sg * math.exp(-x / sg), rtol=1e-9, atol=1e-13)
    assert abs(raw.value.imag) < 1e-10


def _kernel_reference(x, t, alpha, gamma, cut=60.0):
    """Real part of the raw kernel integral with scipy: plain quad on [0, cut],
    Fourier-weighted quad on the tail."""

    def full(s):
        return 2.0 * math.cos(x * s - beta(s, alpha, gamma) * t) / (1 + gamma * s * s)

    head, _ = integrate.quad(full, 0.0, cut, limit=4000, epsabs=1e-13, epsrel=1e-13)
    if x == 0.0:
        tail, _ = integrate.quad(full, cut, np.inf, limit=400, epsabs=1e-13)
        return head + tail

    def c(s):
        return 2.0 * math.cos(beta(s, alpha, gamma) * t) / (1 + gamma * s * s)

    def sn(s):
        return 2.0 * math.sin(beta(s, alpha, gamma) * t) / (1 + gamma * s * s)

    tc, _ = integrate.quad(c, cut, np.inf, weight="cos", wvar=x, limlst=200)
    ts, _ = integrate.quad(sn, cut, np.inf, weight="sin", wvar=x, limlst=200)
    return head + tc + ts


@pytest.mark.parametrize("x, t", [(0.0, 1.0), (1.0, 3.0), (5.0, 2.0), (2.0, 30.0), (10.0, 0.5)])
def test_kernel_matches_scipy(x, t):
    raw = integrate_phi_raw(PhaseDescriptor(1.0, 1.0, x, t), QuadratureConfig(rel_tol=1e-11))
    np.testing.assert_allclose(raw.value.real, _kernel_reference(x, t, 1.0, 1.0), atol=1e-8)


def test_raw_integral_symmetry_in_alpha():
    # reversing alpha and x conjugates the integrand
    a = integrate_phi_raw(PhaseDescriptor(1.0, 1.0, 2.0, 7.0)).value
    b = integrate_phi_raw(PhaseDescriptor(-1.0, 1.0, -2.0, 7.0)).value
    np.testing.assert_allclose(a, np.conj(b), atol=1e-10)


def test_truncate_mode_reports_certified_bound():
    quad = QuadratureConfig(epsilon=1e-2, tail="truncate")
    pd = PhaseDescriptor(1.0, 1.0, 1.0, 5.0)
    trunc = integrate_phi_raw(pd, quad)
    full = integrate_phi_raw(pd, QuadratureConfig(epsilon=1e-2))
    assert trunc.tail == 0
    assert abs(trunc.value - full.value) <= trunc.tail_bound
    np.testing.assert_allclose(full.truncated, trunc.truncated, atol=1e-8)


def test_segments_sum_to_truncated_integral():
    quad = QuadratureConfig(epsilon=1e-2)
    pd = PhaseDescriptor(1.0, 1.0, 1.0, 20.0)
    M = quad.truncation(1.0)
    total = sum(integrate_segment(pd, a, b, quad) for a, b in canonical_segments(1.0, M).values())
    np.testing.assert_allclose(total, integrate_phi_raw(pd, quad).truncated, atol=1e-8)


def test_inner_segment_at_rest():
    quad = QuadratureConfig(rel_tol=1e-12)
    val = integrate_segment(PhaseDescriptor(1.0, 1.0, 0.0, 0.0), -1.0, 0.0, quad)
    np.testing.assert_allclose(val, math.pi / 4, rtol=1e-12)


def test_segment_outside_window_rejected():
    with pytest.raises(ConfigurationError):
        integrate_segment(PhaseDescriptor(1.0, 1.0, 0.0, 1.0), -1e9, 0.0, QuadratureConfig(epsilon=1e-2))


def test_phase_descriptor_requires_dispersion():
    with pytest.raises(ConfigurationError):
        PhaseDescriptor(1.0, 0.0, 0.0, 1.0)
