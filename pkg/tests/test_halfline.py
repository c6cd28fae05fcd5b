import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bbm_qp.errors import AccuracyError, ConfigurationError
from bbm_qp.halfline import (
    boundary_series, closed_form_transform, default_xi_grid, forward, invert, l2_norm_sq,
    plancherel_defect, sine_cosine_parts, transform,
)
from bbm_qp.problem import FunctionDescriptor as G
from bbm_qp.quadrature import QuadratureConfig

INTEGRABLE = [
    G.gaussian(1.0, 3.0, 0.5),
    G.gaussian(-0.4, 0.5, 1.2),
    G.exp_decay(1.0, 1.0),
    G.exp_decay(2.5, 3.0),
    G.poly_exp(0.0, 1.0, -0.5, 0.1, 1.0),
    G.poly_exp(0.0, 0.3, 0.0, 0.2, 0.7),
]


def test_exp_decay_transform_is_rational():
    xi = np.linspace(-20, 20, 41)
    np.testing.assert_allclose(closed_form_transform(G.exp_decay(2.0, 3.0), xi), 2.0 / (3.0 + 1j * xi),
                               rtol=1e-14)


@pytest.mark.parametrize("u", INTEGRABLE, ids=lambda d: d.kind)
def test_closed_form_matches_quadrature(u):
    xi = np.array([-7.0, -1.0, 0.0, 0.3, 2.0, 15.0])
    np.testing.assert_allclose(forward(u, xi, QuadratureConfig(rel_tol=1e-12)),
                               closed_form_transform(u, xi), atol=1e-10)


@pytest.mark.parametrize("u", INTEGRABLE, ids=lambda d: d.kind)
def test_sine_cosine_parts_assemble_transform(u):
    for xi in (0.0, 0.8, 4.0):
        S, C = sine_cosine_parts(u, xi)
        np.testing.assert_allclose(C - 1j * S, closed_form_transform(u, np.array([xi]))[0], atol=1e-10)


@pytest.mark.parametrize("u", INTEGRABLE, ids=lambda d: d.kind)
def test_round_trip(u):
    samples = transform(u, default_xi_grid(u, 10.0))
    for x in np.linspace(0.1, 10.0, 23):
        assert abs(invert(samples, x) - u(x)) < 1e-4


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 10.0))
def test_round_trip_random_points(x):
    u = G.gaussian(1.0, 3.0, 0.5)
    samples = transform(u, default_xi_grid(u, 10.0))
    assert abs(invert(samples, x) - u(x)) < 1e-4


def test_cosine_inversion_recovers_boundary_value():
    # the cosine form inverts the even extension, which is continuous at 0
    u = G.exp_decay(1.0, 1.0)
    samples = transform(u, default_xi_grid(u, 10.0))
    np.testing.assert_allclose(invert(samples, 0.0), 1.0, atol=1e-4)


@pytest.mark.parametrize("u", INTEGRABLE, ids=lambda d: d.kind)
def test_plancherel(u):
    assert plancherel_defect(u) < 1e-6


def test_l2_norm_closed_forms():
    np.testing.assert_allclose(l2_norm_sq(G.exp_decay(2.0, 1.5)), 4.0 / 3.0, rtol=1e-12)
    # gaussian far from the boundary: a² s √π
    np.testing.assert_allclose(l2_norm_sq(G.gaussian(1.0, 10.0, 0.5)), 0.5 * math.sqrt(math.pi), rtol=1e-12)


def test_boundary_series_agrees_at_large_frequency():
    u = G.poly_exp(0.0, 1.0, -0.5, 0.1, 1.0)
    xi = np.array([300.0, -500.0])
    np.testing.assert_allclose(boundary_series(u, xi), closed_form_transform(u, xi), rtol=1e-12)


def test_non_integrable_rejected():
    with pytest.raises(ConfigurationError):
        closed_form_transform(G.sine(1.0, 2.0), np.array([1.0]))


def test_inversion_requires_resolving_grid():
    u = G.exp_decay(1.0, 1.0)
    samples = transform(u, default_xi_grid(u, 1.0))
    with pytest.raises(AccuracyError):
        invert(samples, 50.0)
    with pytest.raises(ConfigurationError):
        invert(samples, -1.0)
