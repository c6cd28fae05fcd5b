import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bbm_qp.asymptotics import DecayFit
from bbm_qp.errors import ConfigurationError, RangeError
from bbm_qp.periodicity import (
    PeriodicityReport, bound_constant, default_schedule, defect_direct, defect_representation,
    magnitude_bound, periodicity_study, window_sup,
)
from bbm_qp.problem import FunctionDescriptor as G, Grid
from bbm_qp.semianalytic import SolutionField, solve_u
from conftest import bump, make_spec

PERIODIC = make_spec(alpha=1.0, gamma=1.0, u0=G.gaussian(0.5, 3.0, 0.5), g=G.sine(0.1, 2.0), period=2.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 10.0), st.integers(0, 400))
def test_periodic_field_has_zero_defect(x, k):
    t = k / 4.0

    def u(xx, tt):
        return math.exp(-xx) * math.sin(math.pi * (tt % 2.0))

    assert defect_direct(u, x, t, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_zero_data_defect():
    spec = make_spec(period=2.0)
    assert defect_representation(spec, 1.0, 10.0) == 0.0


@pytest.mark.parametrize("x, t", [(1.0, 20.0), (3.0, 7.5), (0.5, 40.0)])
def test_routes_agree(x, t):
    direct = defect_direct(lambda xx, tt: solve_u(PERIODIC, xx, tt), x, t, 2.0)
    np.testing.assert_allclose(defect_representation(PERIODIC, x, t), direct, atol=1e-7)


def test_routes_agree_with_forcing():
    from bbm_qp.problem import ForcingDescriptor

    spec = make_spec(alpha=0.7, gamma=2.0, u0=bump(0.3), g=G.sine(0.2, 3.0),
                     f=ForcingDescriptor(G.exp_decay(1.0, 1.0), G.sine(0.5, 1.5)), period=3.0)
    direct = defect_direct(lambda xx, tt: solve_u(spec, xx, tt), 2.0, 12.0, 3.0)
    np.testing.assert_allclose(defect_representation(spec, 2.0, 12.0), direct, atol=1e-7)


def test_defect_bounded_by_kernel_estimate():
    for t in (5.0, 20.0, 60.0):
        assert abs(defect_representation(PERIODIC, 1.0, t)) <= magnitude_bound(PERIODIC, t)


def test_bound_constant_pieces():
    only_g = make_spec(alpha=2.0, g=G.sine(1.0, 2.0), period=2.0)
    # |α| ∫_0^T0 |sin| = 2 · 4/π
    np.testing.assert_allclose(bound_constant(only_g), 8.0 / math.pi, rtol=1e-10)
    only_u0 = make_spec(alpha=1.0, u0=G.gaussian(1.0, 10.0, 1.0), period=2.0)
    # ∫|u0'| for a bump is twice its height
    np.testing.assert_allclose(bound_constant(only_u0), 2.0 * 2.0, rtol=1e-8)


def test_field_range_is_enforced():
    grid = Grid([0.0, 1.0], [0.0, 1.0, 2.0, 3.0])
    sol = SolutionField(grid, np.zeros(grid.shape), PERIODIC, "integral_equation")
    assert defect_direct(sol, 1.0, 1.0, 2.0) == 0.0
    with pytest.raises(RangeError):
        defect_direct(sol, 1.0, 2.0, 2.0)
    with pytest.raises(ConfigurationError):
        defect_direct(sol, 1.0, 0.0, 0.0)


def test_window_sup():
    np.testing.assert_allclose(window_sup(lambda s: math.sin(s), math.pi, math.pi, 33), 1.0)
    assert window_sup(lambda s: s, 1.0, 5.0, 9) == 1.0


def test_report_invariants():
    fit = DecayFit(-0.5, 0.0, 0.0)
    with pytest.raises(ConfigurationError):
        PeriodicityReport(1.0, [2.0, 1.0], [0.1, 0.1], fit, "semianalytic", 1.0)
    with pytest.raises(ConfigurationError):
        PeriodicityReport(1.0, [1.0, 2.0], [0.1, -0.1], fit, "semianalytic", 1.0)


def test_study_report():
    ts = [10.0, 20.0, 40.0, 80.0, 160.0]
    rep = periodicity_study(PERIODIC, 1.0, ts, compare=True, window=2.0, window_points=5)
    assert rep.defect.shape == (5,) and np.all(rep.defect >= 0)
    np.testing.assert_allclose(rep.extra["signed"], rep.defect_repr, atol=1e-7)
    assert np.all(rep.window_sup >= rep.defect - 1e-15)
    rows = list(rep.rows())
    assert rows[0][:3] == (1.0, 10.0, rep.extra["signed"][0])
    assert not rep.fit.degenerate and rep.fit.slope < 0


def test_study_requires_period_and_compatibility():
    with pytest.raises(ConfigurationError):
        periodicity_study(make_spec(g=G.sine(1.0, 2.0)), 1.0, [10.0])
    with pytest.raises(ConfigurationError):
        periodicity_study(PERIODIC, 1.0, [10.0], solver="fd")
    with pytest.raises(ConfigurationError):
        periodicity_study(PERIODIC, 1.0, [10.0], solver="integral_equation")


def test_default_schedule():
    ts = default_schedule()
    assert ts.size == 8 and ts[0] == 10.0
    np.testing.assert_allclose(ts[-1], 1e3)
