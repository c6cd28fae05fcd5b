"""Independent solvers used to cross-check the representation formula.

``fd_solve`` is a method-of-lines scheme for the linear equation on a
truncated interval. ``integral_equation_solve`` marches the Volterra form

    u = u0 + g(t) exp(-x/√γ) + ∫_0^t ∫_0^∞ K(x, y) (αu + ½βu²)(y, τ) dy dτ

and handles the nonlinear term.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import lapack
from scipy.signal import lfilter

from .errors import ConfigurationError, PicardDivergenceError, StabilityError, UnsupportedConfigurationError
from .problem import Grid, ProblemSpec, require_valid
from .semianalytic import SolutionField

RIGHT_BCS = ("clamp_to_initial", "homogeneous_dirichlet")


class DomainTruncationWarning(UserWarning):
    """The truncated interval may be too short for the requested horizon."""


@dataclass(frozen=True)
class FdConfig:
    L: float = 40.0
    nx: int = 2048
    dt: float = 1e-3
    right_bc: str = "clamp_to_initial"

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ConfigurationError("fd.L must be > 0")
        if self.nx < 64:
            raise ConfigurationError("fd.nx must be ≥ 64")
        if not self.dt > 0:
            raise ConfigurationError("fd.dt must be > 0")
        if self.right_bc not in RIGHT_BCS:
            raise ConfigurationError(f"fd.right_bc must be one of {RIGHT_BCS}")

    def check_domain(self, spec: ProblemSpec, t_final: float) -> None:
        """Warn when ``L < 5·max(√γ, |α|t + support of u0)``."""
        supp = spec.u0.support_end() if not spec.u0.is_zero else 0.0
        need = 5.0 * max(spec.sqrt_gamma, abs(spec.alpha) * t_final + supp)
        if self.L < need:
            warnings.warn(
                f"fd.L = {self.L} is below the recommended {need:.3g} for t = {t_final}",
                DomainTruncationWarning, stacklevel=3,
            )


@dataclass(frozen=True)
class PicardConfig:
    dt: float = 0.01
    max_iter: int = 50
    fp_tol: float = 1e-10
    y_quadrature_nodes: int = 3001
    y_max: float | None = None

    def __post_init__(self) -> None:
        if not self.fp_tol > 0:
            raise ConfigurationError("picard.tol must be > 0")
        if self.max_iter < 3:
            raise ConfigurationError("picard.max_iter must be ≥ 3")
        if not self.dt > 0:
            raise ConfigurationError("picard.dt must be > 0")
        if self.y_quadrature_nodes < 16:
            raise ConfigurationError("picard.y_quadrature_nodes must be ≥ 16")


def _substeps(t_values: np.ndarray, dt: float):
    """Yield ``(j, h, n)``: ``n`` equal steps of size ``h`` reaching ``t_values[j]``."""
    for j in range(1, t_values.size):
        span = t_values[j] - t_values[j - 1]
        n = max(1, int(math.ceil(span / dt - 1e-9)))
        yield j, span / n, n


def _resample(mesh: np.ndarray, values: np.ndarray, xs: np.ndarray) -> np.ndarray:
    if xs[-1] > mesh[-1] + 1e-12:
        raise ConfigurationError(f"output x up to {xs[-1]} exceeds the solver domain {mesh[-1]}")
    return CubicSpline(mesh, values, axis=0)(xs)


def _with_start(grid: Grid) -> np.ndarray:
    ts = grid.t_values
    return ts if ts[0] == 0.0 else np.concatenate([[0.0], ts])


# ---------------------------------------------------------------------------
# finite differences


def fd_solve(spec: ProblemSpec, fdcfg: FdConfig | None = None, grid: Grid | None = None) -> SolutionField:
    """Method of lines: ``(I - γD₂) u̇ = f - αD₁u`` with classical RK4.

    The left value is imposed strongly from ``g``; its rate ``g'`` enters the
    first row of the tridiagonal system. The factorization is done once.
    """
    fdcfg = fdcfg or FdConfig()
    if grid is None:
        raise ConfigurationError("fd_solve needs an output grid")
    if not spec.gamma > 0:
        raise UnsupportedConfigurationError("fd_solve requires gamma > 0")
    if spec.beta_nl != 0:
        raise UnsupportedConfigurationError("fd_solve handles the linear equation only (beta = 0)")
    require_valid(spec)
    ts = _with_start(grid)
    fdcfg.check_domain(spec, float(ts[-1]))

    mesh = np.linspace(0.0, fdcfg.L, fdcfg.nx)
    dx = mesh[1] - mesh[0]
    inner = mesh[1:-1]
    m = inner.size
    c = spec.gamma / (dx * dx)
    dl = np.full(m - 1, -c)
    d = np.full(m, 1.0 + 2.0 * c)
    du = np.full(m - 1, -c)
    dl, d, du, du2, ipiv, info = lapack.dgttrf(dl, d, du)
    if info != 0:
        raise StabilityError("tridiagonal factorization failed")
    right = spec.u0(fdcfg.L) if fdcfg.right_bc == "clamp_to_initial" else 0.0
    forcing = not spec.f.is_zero
    fx = spec.f.spatial(inner) if forcing else None

    def rate(t: float, v: np.ndarray) -> np.ndarray:
        full = np.concatenate([[spec.g(t)], v, [right]])
        rhs = -spec.alpha * (full[2:] - full[:-2]) / (2.0 * dx)
        if forcing:
            rhs = rhs + fx * spec.f.temporal(t)
        rhs[0] += c * spec.g.derivative(t, 1)
        sol, info_ = lapack.dgttrs(dl, d, du, du2, ipiv, rhs)
        return sol

    v = spec.u0(inner).astype(float)
    out = np.empty((mesh.size, ts.size))
    out[:, 0] = np.concatenate([[spec.g(ts[0])], v, [right]])
    t = float(ts[0])
    for j, h, n in _substeps(ts, fdcfg.dt):
        for _ in range(n):
            k1 = rate(t, v)
            k2 = rate(t + 0.5 * h, v + 0.5 * h * k1)
            k3 = rate(t + 0.5 * h, v + 0.5 * h * k2)
            k4 = rate(t + h, v + h * k3)
            v = v + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        t = float(ts[j])
        norm = float(np.max(np.abs(v)))
        if not np.isfinite(norm) or norm > 1e10:
            raise StabilityError(f"finite-difference solution blew up at t={t}; reduce fd.dt", norm)
        out[:, j] = np.concatenate([[spec.g(t)], v, [right]])
    if ts.size != grid.t_values.size:
        out = out[:, 1:]
    u = _resample(mesh, out, grid.x_values)
    u[grid.x_values == 0.0] = spec.g(grid.t_values)[None, :]
    return SolutionField(grid, u, spec, "fd_reference", {"dx": dx, "dt": fdcfg.dt})


# ---------------------------------------------------------------------------
# integral equation


@dataclass(frozen=True)
class KernelOperator:
    """``N ↦ ∫_0^Y K(x_i, y) N(y) dy`` for piecewise-linear ``N`` on a uniform mesh.

    Integrates the exponentials exactly against each linear piece, so the
    kink of ``K`` at ``y = x`` sits on a node by construction. The three
    one-sided sums are first-order recursions evaluated with ``lfilter``.
    """

    mesh: np.ndarray
    gamma: float

    @property
    def _coeffs(self):
        h = self.mesh[1] - self.mesh[0]
        sg = math.sqrt(self.gamma)
        kappa = h / sg
        r = math.exp(-kappa)
        m0 = -math.expm1(-kappa) / kappa
        m1 = (1.0 - r * (1.0 + kappa)) / kappa**2 if kappa > 1e-4 else 0.5 - kappa / 3.0 + kappa**2 / 8.0
        return h, sg, r, m0, m1

    def apply(self, N: np.ndarray) -> np.ndarray:
        h, sg, r, m0, m1 = self._coeffs
        near = h * (m1 * N[:-1] + (m0 - m1) * N[1:])
        far = h * ((m0 - m1) * N[:-1] + m1 * N[1:])
        A = np.concatenate([[0.0], lfilter([1.0], [1.0, -r], near)])
        B = np.concatenate([lfilter([1.0], [1.0, -r], far[::-1])[::-1], [0.0]])
        return (np.exp(-self.mesh / sg) * B[0] + A - B) / (2.0 * self.gamma)


def _nonlinearity(spec: ProblemSpec, u: np.ndarray) -> np.ndarray:
    return spec.alpha * u + 0.5 * spec.beta_nl * u * u


def _ie_mesh(spec: ProblemSpec, pcfg: PicardConfig, t_final: float) -> np.ndarray:
    supp = spec.u0.support_end() if not spec.u0.is_zero else 0.0
    y_max = pcfg.y_max or (abs(spec.alpha) * t_final + supp + 40.0 * spec.sqrt_gamma)
    return np.linspace(0.0, y_max, pcfg.y_quadrature_nodes)


def integral_equation_solve(
    spec: ProblemSpec, pcfg: PicardConfig | None = None, grid: Grid | None = None,
) -> SolutionField:
    """Trapezoid rule in ``τ`` with Picard iteration for the implicit level.

    ``info["native"]`` holds the field on the solver's own mesh and time
    levels, which is what :func:`picard_residual` expects.
    """
    pcfg = pcfg or PicardConfig()
    if grid is None:
        raise ConfigurationError("integral_equation_solve needs an output grid")
    if not spec.gamma > 0:
        raise UnsupportedConfigurationError("integral-equation solver requires gamma > 0")
    if not spec.f.is_zero:
        raise UnsupportedConfigurationError("integral-equation solver does not take a forcing f")
    require_valid(spec)
    ts = _with_start(grid)
    mesh = _ie_mesh(spec, pcfg, float(ts[-1]))
    op = KernelOperator(mesh, spec.gamma)
    base = spec.u0(mesh)
    layer = np.exp(-mesh / spec.sqrt_gamma)

    levels = [0.0]
    u = base + spec.g(0.0) * layer
    history = [u]
    acc = np.zeros_like(u)  # ∫_0^{t_n} KN dτ by the trapezoid rule
    Ku = op.apply(_nonlinearity(spec, u))
    t = 0.0
    worst_change = 0.0
    for _, h, n in _substeps(ts, pcfg.dt):
        for _ in range(n):
            t_new = t + h
            fixed = base + spec.g(t_new) * layer + acc + 0.5 * h * Ku
            guess = u + h * Ku
            change = np.inf
            prev_change = np.inf
            growth = 0
            for it in range(pcfg.max_iter):
                K_new = op.apply(_nonlinearity(spec, guess))
                nxt = fixed + 0.5 * h * K_new
                change = float(np.max(np.abs(nxt - guess)))
                guess = nxt
                if not np.isfinite(change):
                    break
                if change <= pcfg.fp_tol:
                    break
                growth = growth + 1 if change > prev_change else 0
                if growth >= 3:
                    break
                prev_change = change
            if not change <= pcfg.fp_tol:
                raise PicardDivergenceError(
                    f"Picard iteration did not contract at t={t_new:.6g}; reduce picard.dt or the data amplitude",
                    change,
                )
            K_new = op.apply(_nonlinearity(spec, guess))
            acc = acc + 0.5 * h * (Ku + K_new)
            u, Ku, t = guess, K_new, t_new
            worst_change = max(worst_change, change)
            levels.append(t)
            history.append(u)
    native_t = np.array(levels)
    native_u = np.array(history).T
    native = SolutionField(Grid(mesh, native_t), native_u, spec, "integral_equation")
    idx = np.searchsorted(native_t, grid.t_values - 1e-9 * max(1.0, native_t[-1]))
    idx = np.minimum(idx, native_t.size - 1)
    out = _resample(mesh, native_u[:, idx], grid.x_values)
    info = {"native": native, "fp_change": worst_change, "y_max": float(mesh[-1])}
    return SolutionField(grid, out, spec, "integral_equation", info)


def picard_residual(u_field: SolutionField, spec: ProblemSpec, pcfg: PicardConfig | None = None) -> float:
    """Sup-norm defect of the integral equation for a field on a solver mesh.

    The field's x-grid must be uniform and start at 0; its t-grid must start at
    0. The kernel integral is evaluated with the solver's quadratures.
    """
    xs, ts = u_field.grid.x_values, u_field.grid.t_values
    if xs[0] != 0.0 or ts[0] != 0.0:
        raise ConfigurationError("picard_residual needs a grid starting at x = 0 and t = 0")
    if not np.allclose(np.diff(xs), xs[1] - xs[0], rtol=1e-9, atol=0):
        raise ConfigurationError("picard_residual needs a uniform x-grid")
    op = KernelOperator(xs, spec.gamma)
    U = u_field.u_values
    K = np.stack([op.apply(_nonlinearity(spec, U[:, j])) for j in range(ts.size)], axis=1)
    dts = np.diff(ts)
    integral = np.concatenate(
        [np.zeros((xs.size, 1)), np.cumsum(0.5 * dts * (K[:, 1:] + K[:, :-1]), axis=1)], axis=1
    )
    rhs = spec.u0(xs)[:, None] + spec.g(ts)[None, :] * np.exp(-xs / spec.sqrt_gamma)[:, None] + integral
    return float(np.max(np.abs(U - rhs)))
