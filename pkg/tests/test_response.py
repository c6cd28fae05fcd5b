import cmath

import numpy as np
import pytest
from scipy import integrate

from bbm_qp.problem import FunctionDescriptor as G
from bbm_qp.response import exp_moments, temporal_response


def _reference(c, b, t, t0, t1):
    re, _ = integrate.quad(lambda s: (cmath.exp(-1j * b * (t - s)) * c(s)).real, t0, t1, limit=500,
                           epsabs=1e-13, epsrel=1e-13)
    im, _ = integrate.quad(lambda s: (cmath.exp(-1j * b * (t - s)) * c(s)).imag, t0, t1, limit=500,
                           epsabs=1e-13, epsrel=1e-13)
    return re + 1j * im


@pytest.mark.parametrize(
    "c",
    [G.sine(1.0, 2.0), G.sine_ramped(0.5, 3.0, 1.5), G.exp_decay(2.0, 0.7),
     G.poly_exp(0.0, 1.0, -0.5, 0.1, 1.0), G.gaussian(1.0, 3.0, 0.5)],
    ids=lambda d: d.kind,
)
@pytest.mark.parametrize("window", [(0.0, None), (-2.0, 0.0), (1.0, 4.0)])
def test_response_matches_scipy(c, window):
    t = 5.0
    t0, t1 = window
    betas = np.array([0.0, 1e-9, 0.3, -0.45, 0.5])
    got = temporal_response(c, betas, t, t0=t0, t1=t1)
    want = [_reference(c, b, t, t0, t if t1 is None else t1) for b in betas]
    np.testing.assert_allclose(got, want, atol=1e-11)


def test_empty_window_and_zero_data():
    assert np.all(temporal_response(G.sine(1.0, 2.0), np.array([0.2]), 1.0, t0=2.0, t1=1.0) == 0)
    assert np.all(temporal_response(G.zero(), np.array([0.2]), 1.0) == 0)


@pytest.mark.parametrize("w", [0.0, 1e-3, -0.3 + 2j, -40.0, 25j, -5 - 300j])
def test_exp_moments(w):
    moments = exp_moments(np.array([w]), 4)
    for n, m in enumerate(moments):
        re, _ = integrate.quad(lambda s: (s**n * cmath.exp(w * s)).real, 0, 1, limit=400, epsabs=1e-14)
        im, _ = integrate.quad(lambda s: (s**n * cmath.exp(w * s)).imag, 0, 1, limit=400, epsabs=1e-14)
        np.testing.assert_allclose(m[0], re + 1j * im, atol=1e-12)
