"""Explicit solution representation for the linear quarter-plane problem.

``u = g(t) exp(-x/√γ) + w`` where ``w`` evolves its half-line transform as

    P(w)(ξ, t) = exp(-iβt) P(u0)(ξ)
                 + 1/(1+γξ²) ∫_0^t exp(-iβ(t-τ)) P(f̃)(ξ, τ) dτ

and ``f̃ = f + (α/√γ) g(t) exp(-x/√γ)``. Also contains the transport limit
``γ = 0``, the sine/cosine spectral pair with its ODE checks, and an
optional boundary-flux correction that restores ``w(0, t) = 0`` when
``α ≠ 0`` (see :func:`solve_field`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, ConfigurationError, RangeError, UnsupportedConfigurationError
from .halfline import closed_form_transform
from .kernels import gamma_term
from .problem import FunctionDescriptor, Grid, ProblemSpec, effective_pieces, require_valid
from .quadrature import QuadratureConfig, beta
from .response import temporal_response
from .spectral import (
    SpectralTerm, data_shift, data_window, eval_series, invert_terms, series_coefficients,
)

METHODS = ("semianalytic", "transport_closed_form", "fd_reference", "integral_equation")


@dataclass
class SolutionField:
    """Solution samples ``u_values[i, j] = u(x_i, t_j)``."""

    grid: Grid
    u_values: np.ndarray
    spec: ProblemSpec
    method: str
    info: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method tag {self.method!r}")
        self.u_values = np.asarray(self.u_values, dtype=float)
        if self.u_values.shape != self.grid.shape:
            raise ConfigurationError("u_values shape does not match the grid")

    def at(self, x: float, t: float) -> float:
        """Value at a grid point, or cubic interpolation in between."""
        xs, ts = self.grid.x_values, self.grid.t_values
        tol = 1e-12 * max(1.0, ts[-1])
        if t < ts[0] - tol or t > ts[-1] + tol:
            raise RangeError(f"t={t} outside the solved range [{ts[0]}, {ts[-1]}]")
        if x < xs[0] or x > xs[-1]:
            raise RangeError(f"x={x} outside the solved range [{xs[0]}, {xs[-1]}]")
        from scipy.interpolate import RectBivariateSpline

        i = np.flatnonzero(np.isclose(xs, x, rtol=0, atol=1e-12))
        j = np.flatnonzero(np.isclose(ts, t, rtol=0, atol=tol))
        if i.size and j.size:
            return float(self.u_values[i[0], j[0]])
        kx, kt = min(3, xs.size - 1), min(3, ts.size - 1)
        spline = RectBivariateSpline(xs, ts, self.u_values, kx=kx, ky=kt)
        return float(spline(x, t)[0, 0])

    def rows(self):
        for i, x in enumerate(self.grid.x_values):
            for j, t in enumerate(self.grid.t_values):
                yield (x, t, self.u_values[i, j], self.method)


def effective_forcing(spec: ProblemSpec, y, tau):
    """``f(y, τ) + (α/√γ) g(τ) exp(-y/√γ)``."""
    if not spec.gamma > 0:
        raise ConfigurationError("gamma must be > 0")
    y = np.asarray(y, dtype=float)
    tau = np.asarray(tau, dtype=float)
    out = spec.f(y, tau) + spec.alpha / spec.sqrt_gamma * spec.g(tau) * np.exp(-y / spec.sqrt_gamma)
    return float(out) if np.ndim(out) == 0 else out


def forcing_term(
    spatial: FunctionDescriptor, temporal: FunctionDescriptor, weight: float,
    t: float, alpha: float, gamma: float, *, t0: float = 0.0, t1: float | None = None,
) -> SpectralTerm:
    """Spectral term ``weight · P(s)(ξ) R(ξ, t) / (1+γξ²)`` of a separable forcing."""
    coeffs = series_coefficients(spatial)

    def response(xi):
        return temporal_response(temporal, beta(xi, alpha, gamma), t, t0=t0, t1=t1)

    def exact(xi):
        amp = weight / (1.0 + gamma * xi * xi)
        return amp * closed_form_transform(spatial, xi) * response(xi)

    def tail(z):
        amp = weight / (1.0 + gamma * z * z)
        return amp * eval_series(coeffs, z) * response(z)

    return SpectralTerm(exact, tail, data_shift(spatial), data_window(spatial))


def _check_solvable(spec: ProblemSpec) -> None:
    if not spec.gamma > 0:
        raise UnsupportedConfigurationError(
            "the spectral representation needs gamma > 0; use transport_solution for gamma = 0"
        )
    require_valid(spec)


def spectral_terms(spec: ProblemSpec, t: float) -> list[SpectralTerm]:
    terms = []
    if not spec.u0.is_zero:
        terms.append(gamma_term(spec.u0, t, spec.alpha, spec.gamma))
    for spatial, temporal, weight in effective_pieces(spec):
        terms.append(forcing_term(spatial, temporal, weight, t, spec.alpha, spec.gamma))
    return terms


def _interior_row(spec: ProblemSpec, xs: np.ndarray, t: float, quad: QuadratureConfig):
    try:
        return invert_terms(spectral_terms(spec, t), xs, t, spec.alpha, spec.gamma, quad)
    except AccuracyError as exc:
        raise AccuracyError(f"solution integral at t={t}: {exc}", exc.achieved) from exc


def solve_field(
    spec: ProblemSpec, grid: Grid, quad: QuadratureConfig | None = None, *,
    boundary_flux: bool = False, flux_dt: float = 0.05,
) -> SolutionField:
    """Evaluate the representation formula on a grid.

    Parameters
    ----------
    boundary_flux : bool
        Add the single-layer correction ``-γ ∫_0^t Φ(x, t-τ) q(τ) dτ`` whose
        density ``q`` is chosen so the interior part vanishes at ``x = 0``.
        Without it the formula reproduces ``g`` at the boundary only when
        ``α = 0``.
    flux_dt : float
        Time step of the density ``q`` when ``boundary_flux`` is set.
    """
    quad = quad or QuadratureConfig()
    _check_solvable(spec)
    xs = grid.x_values
    u = np.empty(grid.shape)
    worst = 0.0
    for j, t in enumerate(grid.t_values):
        w, err = _interior_row(spec, xs, float(t), quad)
        worst = max(worst, err)
        u[:, j] = spec.g(t) * spec.boundary_layer(xs) + w
    info = {"quad_error": worst, "boundary_flux": False}
    if boundary_flux and spec.alpha != 0.0 and grid.t_values[-1] > 0:
        flux = BoundaryFlux.build(spec, float(grid.t_values[-1]), quad, dt=flux_dt)
        for j, t in enumerate(grid.t_values):
            u[:, j] += flux.correction(xs, float(t), quad)
        info.update(boundary_flux=True, flux_residual=flux.residual)
    return SolutionField(grid, u, spec, "semianalytic", info)


def solve_u(spec: ProblemSpec, x: float, t: float, quad: QuadratureConfig | None = None,
            *, boundary_flux: bool = False) -> float:
    """Representation formula at a single point."""
    if x < 0 or t < 0:
        raise ConfigurationError("x and t must be ≥ 0")
    field_ = solve_field(spec, Grid([x], [t]), quad, boundary_flux=boundary_flux)
    return float(field_.u_values[0, 0])


def box_response(b, a: float, c: float, t: float):
    """``∫_a^c exp(-iβ(t-τ)) dτ`` for complex ``β``."""
    b = np.asarray(b, dtype=complex)
    small = np.abs(b) * max(c - a, 1e-300) < 1e-6
    bs = np.where(small, 1.0, b)
    exact = (np.exp(-1j * bs * (t - c)) - np.exp(-1j * bs * (t - a))) / (1j * bs)
    # second-order expansion around β = 0
    mid = t - 0.5 * (a + c)
    approx = (c - a) * (1.0 - 1j * b * mid)
    return np.where(small, approx, exact)


def _box_term(weights: np.ndarray, starts: np.ndarray, ends: np.ndarray, t: float,
              alpha: float, gamma: float) -> SpectralTerm:
    """``Σ_k weights_k ∫_{starts_k}^{ends_k} exp(-iβ(t-τ)) dτ / (1+γξ²)``."""

    def value(xi):
        b = beta(xi, alpha, gamma)
        acc = np.zeros(np.shape(xi), dtype=complex)
        for wk, a, c in zip(weights, starts, ends):
            acc = acc + wk * box_response(b, a, c, t)
        return acc / (1.0 + gamma * xi * xi)

    return SpectralTerm(value, value, 0.0, 0.0)


@dataclass
class BoundaryFlux:
    """Piecewise-constant density ``q`` of the boundary single layer.

    The half-line transform of ``w_xxt`` carries the boundary term
    ``-γ w_xt(0, t)``. The representation without it misses the correction
    ``-γ ∫_0^t Φ(x, t-τ) q(τ) dτ`` with ``q = w_xt(0, ·)``. ``q`` solves the
    first-kind Volterra equation obtained by requiring the corrected interior
    part to vanish at ``x = 0``; it is collocated at the step ends.
    """

    gamma: float
    alpha: float
    dt: float
    q: np.ndarray
    residual: float

    @classmethod
    def build(cls, spec: ProblemSpec, t_final: float, quad: QuadratureConfig,
              dt: float = 0.05) -> "BoundaryFlux":
        n = max(1, int(math.ceil(t_final / dt - 1e-9)))
        dt = t_final / n
        zero = np.zeros(1)
        one = np.ones(1)
        # ψ_j = ∫_0^{j dt} Φ(0, s) ds, the Toeplitz weights of the collocation system
        psi = np.zeros(n + 1)
        for j in range(1, n + 1):
            s = j * dt
            term = _box_term(one, zero, np.array([s]), s, spec.alpha, spec.gamma)
            psi[j] = invert_terms([term], zero, s, spec.alpha, spec.gamma, quad)[0][0]
        defect = np.array([_interior_row(spec, zero, (j + 1) * dt, quad)[0][0] for j in range(n)])
        weights = np.diff(psi)
        q = np.zeros(n)
        for k in range(n):
            hist = np.dot(weights[k:0:-1], q[:k]) if k else 0.0
            q[k] = (defect[k] / spec.gamma - hist) / weights[0]
        resid = 0.0
        for k in range(n):
            resid = max(resid, abs(spec.gamma * np.dot(weights[k::-1], q[:k + 1]) - defect[k]))
        return cls(spec.gamma, spec.alpha, dt, q, resid)

    def correction(self, xs: np.ndarray, t: float, quad: QuadratureConfig) -> np.ndarray:
        if t <= 0:
            return np.zeros(np.shape(xs))
        m = min(self.q.size, int(math.ceil(t / self.dt - 1e-9)))
        starts = np.arange(m) * self.dt
        ends = np.minimum(starts + self.dt, t)
        term = _box_term(self.q[:m], starts, ends, t, self.alpha, self.gamma)
        vals, _ = invert_terms([term], xs, t, self.alpha, self.gamma, quad)
        return -self.gamma * vals


def transport_solution(spec: ProblemSpec, x, t):
    """Closed-form solution for ``γ = 0``: ``u0(x-αt)`` ahead of the boundary signal,
    ``g(t - x/α)`` behind it."""
    if spec.gamma != 0:
        raise UnsupportedConfigurationError("transport solution requires gamma = 0")
    if not spec.alpha > 0:
        raise UnsupportedConfigurationError("transport solution requires alpha > 0 when gamma = 0")
    if not spec.f.is_zero:
        raise UnsupportedConfigurationError("transport solution requires f = 0")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    ahead = x >= spec.alpha * t
    arg_u = np.where(ahead, x - spec.alpha * t, 0.0)
    arg_g = np.where(ahead, 0.0, t - x / spec.alpha)
    out = np.where(ahead, spec.u0(arg_u), spec.g(arg_g))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Sine/cosine spectral pair


@dataclass(frozen=True)
class SpectralPair:
    """``X = ∫ sin(xξ) w dx`` and ``Y = ∫ cos(xξ) w dx`` at one ``(ξ, t)``."""

    xi: float
    X: float
    Y: float
    t: float


def _gk_nodes(edges: np.ndarray):
    from .quadrature import KRONROD_NODES, KRONROD_WEIGHTS

    c, h = 0.5 * (edges[:-1] + edges[1:]), 0.5 * np.diff(edges)
    return (c[:, None] + h[:, None] * KRONROD_NODES).ravel(), (h[:, None] * KRONROD_WEIGHTS).ravel()


def _spatial_sc(d: FunctionDescriptor, xi: float, refine: int) -> tuple[float, float]:
    """``(∫ sin(xξ) d, ∫ cos(xξ) d)`` over the half line by fixed GK panels."""
    if d.is_zero:
        return 0.0, 0.0
    shift = data_shift(d)
    end = shift + 40.0 * d.decay_length() + (60.0 / d.params[-1] if d.kind == "poly_exp" else 0.0)
    width = min(0.5 * d.decay_length(), 0.5 * math.pi / max(abs(xi), 1e-12)) / refine
    edges = np.linspace(0.0, end, int(math.ceil(end / width)) + 1)
    if 0 < shift < end:
        edges = np.unique(np.append(edges, shift))
    x, w = _gk_nodes(edges)
    v = d(x)
    return float(np.sum(w * np.sin(x * xi) * v)), float(np.sum(w * np.cos(x * xi) * v))


def _temporal_sc(c: FunctionDescriptor, b: float, t: float, refine: int) -> tuple[float, float]:
    """``(∫_0^t sin(β(t-τ)) c, ∫_0^t cos(β(t-τ)) c)`` on at least 32 panels per unit time."""
    if c.is_zero or t <= 0:
        return 0.0, 0.0
    scales = [1.0 / 32.0, 0.5 * math.pi / max(abs(b), 1e-12)]
    if c.kind in ("sine", "sine_ramped"):
        scales.append(c.params[1] / 8.0)
    elif c.kind == "gaussian":
        scales.append(c.params[2] / 2.0)
    n = max(1, int(math.ceil(t / (min(scales) / refine))))
    tau, w = _gk_nodes(np.linspace(0.0, t, n + 1))
    v = c(tau)
    arg = b * (t - tau)
    return float(np.sum(w * np.sin(arg) * v)), float(np.sum(w * np.cos(arg) * v))


def _xy_direct(spec: ProblemSpec, xi: float, t: float, refine: int) -> tuple[float, float]:
    # sin(xξ + θ) = sin(xξ)cos θ + cos(xξ)sin θ, and the data are separable, so
    # each double integral factors into a spatial and a temporal quadrature.
    b = float(beta(xi, spec.alpha, spec.gamma))
    sx, cx = _spatial_sc(spec.u0, xi, refine)
    X = sx * math.cos(b * t) + cx * math.sin(b * t)
    Y = cx * math.cos(b * t) - sx * math.sin(b * t)
    amp = 1.0 / (1.0 + spec.gamma * xi * xi)
    for spatial, temporal, weight in effective_pieces(spec):
        sx, cx = _spatial_sc(spatial, xi, refine)
        st, ct = _temporal_sc(temporal, b, t, refine)
        X += amp * weight * (sx * ct + cx * st)
        Y += amp * weight * (cx * ct - sx * st)
    return X, Y


def spectral_XY(spec: ProblemSpec, xi: float, t: float, quad: QuadratureConfig | None = None) -> SpectralPair:
    """Sine/cosine spectral pair from the explicit double-integral formulas.

    ``X = ∫ sin(xξ + βt) u0 dx + (1+γξ²)⁻¹ ∫_0^t ∫ sin(xξ + β(t-τ)) f̃ dx dτ``
    and ``Y`` likewise with cosines. Panels are doubled until the change is
    below ``rel_tol``.
    """
    quad = quad or QuadratureConfig()
    if not spec.gamma > 0:
        raise ConfigurationError("gamma must be > 0")
    if t < 0:
        raise ConfigurationError("t must be ≥ 0")
    prev = _xy_direct(spec, xi, t, 1)
    change = math.inf
    for level in (2, 4, 8):
        cur = _xy_direct(spec, xi, t, level)
        change = max(abs(cur[0] - prev[0]), abs(cur[1] - prev[1]))
        if change <= quad.rel_tol * max(1.0, abs(cur[0]), abs(cur[1])):
            return SpectralPair(xi, cur[0], cur[1], t)
        prev = cur
    raise AccuracyError("spectral pair quadrature did not settle", achieved=change)


def forcing_moments(spec: ProblemSpec, xi: float, tau) -> tuple[np.ndarray, np.ndarray]:
    """``(h1, h2) = (∫ sin(xξ) f̃ dx, ∫ cos(xξ) f̃ dx) / (1+γξ²)`` at times ``tau``."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    amp = 1.0 / (1.0 + spec.gamma * xi * xi)
    h1 = np.zeros(tau.shape)
    h2 = np.zeros(tau.shape)
    for spatial, temporal, weight in effective_pieces(spec):
        sx, cx = _spatial_sc(spatial, xi, 2)
        c = temporal(tau)
        h1 += amp * weight * sx * c
        h2 += amp * weight * cx * c
    return h1, h2


def ode_residual(spec: ProblemSpec, xi: float, t: float, h: float = 1e-4,
                 quad: QuadratureConfig | None = None) -> float:
    """Largest residual of ``X' - βY = h1`` and ``Y' + βX = h2`` by centred differences."""
    quad = quad or QuadratureConfig(rel_tol=1e-13)
    if t - h < 0:
        raise ConfigurationError("t must exceed the difference step")
    b = beta(xi, spec.alpha, spec.gamma)
    lo = spectral_XY(spec, xi, t - h, quad)
    mid = spectral_XY(spec, xi, t, quad)
    hi = spectral_XY(spec, xi, t + h, quad)
    dX = (hi.X - lo.X) / (2 * h)
    dY = (hi.Y - lo.Y) / (2 * h)
    h1, h2 = forcing_moments(spec, xi, [t])
    return float(max(abs(dX - b * mid.Y - h1[0]), abs(dY + b * mid.X - h2[0])))


def fundamental_matrix(b: float, t: float) -> np.ndarray:
    e, ei = np.exp(1j * b * t), np.exp(-1j * b * t)
    return np.array([[e, ei], [1j * e, -1j * ei]])


def fundamental_matrix_inverse(b: float, t: float) -> np.ndarray:
    e, ei = np.exp(1j * b * t), np.exp(-1j * b * t)
    return 0.5 * np.array([[ei, -1j * ei], [e, 1j * e]])


def fundamental_matrix_check(xi: float, t: float, spec: ProblemSpec,
                             quad: QuadratureConfig | None = None) -> float:
    """Deviation between variation of parameters and the explicit pair.

    Evaluates ``Ψ(t)Ψ⁻¹(0)[X0, Y0] + Ψ(t) ∫_0^t Ψ⁻¹(τ)[h1, h2] dτ`` with the
    forcing moments computed at each τ node, and compares with
    :func:`spectral_XY`.
    """
    quad = quad or QuadratureConfig(rel_tol=1e-12)
    b = float(beta(xi, spec.alpha, spec.gamma))
    start = spectral_XY(spec, xi, 0.0, quad)
    target = spectral_XY(spec, xi, t, quad)
    psi_t = fundamental_matrix(b, t)
    rhs = psi_t @ fundamental_matrix_inverse(b, 0.0) @ np.array([start.X, start.Y])
    if t > 0:
        n = max(16, int(math.ceil(t * 32)), int(math.ceil(t * abs(b) * 4)))
        tau, wt = _gk_nodes(np.linspace(0.0, t, n + 1))
        h1, h2 = forcing_moments(spec, xi, tau)
        integrand = np.stack([fundamental_matrix_inverse(b, s) @ np.array([p, q])
                              for s, p, q in zip(tau, h1, h2)], axis=1)
        rhs = rhs + psi_t @ (integrand @ wt)
    return float(max(abs(rhs[0] - target.X), abs(rhs[1] - target.Y)))
