import dataclasses

import numpy as np
import pytest

from bbm_qp.errors import ConfigurationError, UnsupportedConfigurationError
from bbm_qp.problem import ForcingDescriptor, FunctionDescriptor as G, Grid
from bbm_qp.reference import (
    DomainTruncationWarning, FdConfig, KernelOperator, PicardConfig, fd_solve, integral_equation_solve,
    picard_residual,
)
from bbm_qp.semianalytic import solve_field
from bbm_qp.kernels import kernel_K
from conftest import bump, make_spec

pytestmark = pytest.mark.filterwarnings("ignore::bbm_qp.reference.DomainTruncationWarning")

SMALL_GRID = Grid(np.linspace(0.0, 10.0, 21), np.linspace(0.0, 4.0, 5))
PROBLEM = dict(alpha=1.0, gamma=1.0, u0=G.gaussian(0.5, 3.0, 0.5), g=G.sine(0.1, 2.0))


def test_fd_without_advection_matches_exact():
    spec = make_spec(alpha=0.0, u0=bump(), g=G.sine(1.0, 2.0))
    sol = fd_solve(spec, FdConfig(L=40.0, nx=1024, dt=2e-3), SMALL_GRID)
    X, T = np.meshgrid(SMALL_GRID.x_values, SMALL_GRID.t_values, indexing="ij")
    assert sol.method == "fd_reference"
    np.testing.assert_allclose(sol.u_values, spec.u0(X) + spec.g(T) * np.exp(-X), atol=1e-4)


def test_fd_zero_data():
    sol = fd_solve(make_spec(), FdConfig(nx=256, dt=1e-2), SMALL_GRID)
    np.testing.assert_array_equal(sol.u_values, 0.0)


def test_fd_second_order_convergence():
    spec = make_spec(alpha=0.0, u0=bump(), g=G.sine(1.0, 2.0))
    X, T = np.meshgrid(SMALL_GRID.x_values, SMALL_GRID.t_values, indexing="ij")
    exact = spec.u0(X) + spec.g(T) * np.exp(-X)
    coarse = np.max(np.abs(fd_solve(spec, FdConfig(nx=512, dt=4e-3), SMALL_GRID).u_values - exact))
    fine = np.max(np.abs(fd_solve(spec, FdConfig(nx=1024, dt=2e-3), SMALL_GRID).u_values - exact))
    # second order in space at least; the spline resampling can make it look better
    assert coarse / fine > 3.5


def test_fd_boundary_is_imposed():
    spec = make_spec(**PROBLEM)
    sol = fd_solve(spec, FdConfig(nx=512, dt=5e-3), SMALL_GRID)
    np.testing.assert_allclose(sol.u_values[0], spec.g(SMALL_GRID.t_values), atol=1e-8)


def test_fd_domain_length_insensitive():
    spec = make_spec(**PROBLEM)
    a = fd_solve(spec, FdConfig(L=40.0, nx=1024, dt=5e-3), SMALL_GRID).u_values
    b = fd_solve(spec, FdConfig(L=80.0, nx=2048, dt=5e-3), SMALL_GRID).u_values
    np.testing.assert_allclose(a, b, atol=1e-5)


def test_fd_warns_on_short_domain():
    with pytest.warns(DomainTruncationWarning):
        FdConfig(L=10.0).check_domain(make_spec(**PROBLEM), 10.0)


@pytest.mark.parametrize("kwargs", [dict(nx=32), dict(L=0.0), dict(dt=-1.0), dict(right_bc="open")])
def test_fd_config_validation(kwargs):
    with pytest.raises(ConfigurationError):
        FdConfig(**kwargs)


def test_fd_rejects_unsupported():
    with pytest.raises(UnsupportedConfigurationError):
        fd_solve(make_spec(gamma=0.0), FdConfig(), SMALL_GRID)
    with pytest.raises(UnsupportedConfigurationError):
        fd_solve(make_spec(beta_nl=1.0), FdConfig(), SMALL_GRID)


def test_kernel_operator_matches_direct_quadrature():
    mesh = np.linspace(0.0, 30.0, 3001)
    N = np.exp(-((mesh - 4.0) ** 2))
    got = KernelOperator(mesh, 1.0).apply(N)
    fine = np.linspace(0.0, 30.0, 300001)
    Nf = np.exp(-((fine - 4.0) ** 2))
    for i in (0, 300, 500, 1200):
        want = np.trapezoid(kernel_K(mesh[i], fine, 1.0) * Nf, fine)
        # N is interpolated linearly between nodes: O(h²) with h = 0.01
        np.testing.assert_allclose(got[i], want, atol=2e-5)


def test_ie_without_advection_matches_exact():
    spec = make_spec(alpha=0.0, u0=bump(), g=G.sine(1.0, 2.0))
    sol = integral_equation_solve(spec, PicardConfig(), SMALL_GRID)
    X, T = np.meshgrid(SMALL_GRID.x_values, SMALL_GRID.t_values, indexing="ij")
    np.testing.assert_allclose(sol.u_values, spec.u0(X) + spec.g(T) * np.exp(-X), atol=1e-10)


def test_ie_zero_data():
    sol = integral_equation_solve(make_spec(), PicardConfig(), SMALL_GRID)
    np.testing.assert_array_equal(sol.u_values, 0.0)


def test_ie_residual_and_perturbation():
    spec = make_spec(**PROBLEM)
    pcfg = PicardConfig()
    native = integral_equation_solve(spec, pcfg, SMALL_GRID).info["native"]
    assert picard_residual(native, spec, pcfg) <= 10 * pcfg.fp_tol
    bumped = dataclasses.replace(native, u_values=native.u_values + 0.1 * bump()(native.grid.x_values)[:, None])
    assert picard_residual(bumped, spec, pcfg) >= 0.05


def test_fd_and_ie_agree():
    spec = make_spec(**PROBLEM)
    fd = fd_solve(spec, FdConfig(nx=2048, dt=1e-3), SMALL_GRID).u_values
    ie = integral_equation_solve(spec, PicardConfig(), SMALL_GRID).u_values
    np.testing.assert_allclose(fd, ie, atol=2e-4)


def test_corrected_representation_agrees_with_fd():
    spec = make_spec(**PROBLEM)
    fd = fd_solve(spec, FdConfig(nx=2048, dt=1e-3), SMALL_GRID).u_values
    sa = solve_field(spec, SMALL_GRID, boundary_flux=True).u_values
    np.testing.assert_allclose(sa, fd, atol=1e-3)


def test_ie_nonlinear_runs_and_keeps_boundary():
    spec = make_spec(beta_nl=1.0, **PROBLEM)
    sol = integral_equation_solve(spec, PicardConfig(dt=0.02), SMALL_GRID)
    np.testing.assert_allclose(sol.u_values[0], spec.g(SMALL_GRID.t_values), atol=1e-8)


def test_ie_rejects_forcing():
    spec = make_spec(f=ForcingDescriptor(G.exp_decay(1.0, 1.0), G.sine(1.0, 2.0)))
    with pytest.raises(UnsupportedConfigurationError):
        integral_equation_solve(spec, PicardConfig(), SMALL_GRID)


def test_picard_residual_input_checks():
    field_ = solve_field(make_spec(), Grid([0.0, 1.0, 3.0], [0.0, 1.0]))
    with pytest.raises(ConfigurationError):
        picard_residual(field_, make_spec())
