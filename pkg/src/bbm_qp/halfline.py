"""Half-line Fourier transform ``P(u)(ξ) = ∫_0^∞ exp(-i y ξ) u(y) dy``.

Closed forms exist for every integrable catalog function and are what the
solvers use. The quadrature routes here are the independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, ConfigurationError
from .problem import FunctionDescriptor
from .quadrature import QUARTER_TURN, QuadratureConfig, gk_integrate

SQRT_HALF_PI = math.sqrt(0.5 * math.pi)


@dataclass(frozen=True)
class HalfLineTransform:
    """Samples of the half-line transform on a frequency grid."""

    xi_values: np.ndarray
    values: np.ndarray
    source_norm_sq: float


def _require_integrable(u: FunctionDescriptor) -> None:
    if not u.integrable:
        raise ConfigurationError(
            f"{u.kind} is not integrable on the half line; its transform is undefined"
        )


def closed_form_transform(u: FunctionDescriptor, xi) -> np.ndarray:
    """Exact ``P(u)(ξ)`` for real ``ξ``."""
    _require_integrable(u)
    xi = np.asarray(xi, dtype=float)
    if u.kind == "gaussian":
        return _gaussian_transform(*u.params, xi)
    out = np.zeros(xi.shape, dtype=complex)
    for term in u.exp_terms():
        out += term.coef * math.factorial(term.power) / (1j * xi - term.rate) ** (term.power + 1)
    return out


def _gaussian_transform(a: float, x0: float, s: float, xi: np.ndarray) -> np.ndarray:
    # Complete the square and express the half-line cut with the Faddeeva
    # function w(z) = exp(-z^2) erfc(-iz), which stays finite for large ξ.
    r = s / math.sqrt(2.0)
    if x0 >= 0:
        full = 2.0 * np.exp(-1j * xi * x0 - 0.5 * (xi * s) ** 2)
        cut = math.exp(-x0 * x0 / (2 * s * s)) * special.wofz(xi * r + 1j * x0 / (2 * r))
        return a * s * SQRT_HALF_PI * (full - cut)
    return a * s * SQRT_HALF_PI * math.exp(-x0 * x0 / (2 * s * s)) * special.wofz(
        -xi * r - 1j * x0 / (2 * r)
    )


def boundary_series(u: FunctionDescriptor, xi, terms: int = 8) -> np.ndarray:
    """Large-``|ξ|`` expansion ``Σ u^(n)(0) / (iξ)^(n+1)``; accepts complex ``ξ``."""
    coeffs = u.boundary_derivatives(terms)
    xi = np.asarray(xi, dtype=complex)
    inv = 1.0 / (1j * xi)
    out = np.zeros(xi.shape, dtype=complex)
    power = inv.copy()
    for c in coeffs:
        out += c * power
        power = power * inv
    return out


def _spatial_extent(u: FunctionDescriptor) -> float:
    """Upper limit of the spatial quadrature."""
    if u.kind == "gaussian":
        return max(u.params[1], 0.0) + 40.0 * u.params[2]
    return 40.0 * u.decay_length() + (60.0 / u.params[-1] if u.kind == "poly_exp" else 0.0)


def spatial_tail_bound(u: FunctionDescriptor, Y: float) -> float:
    """Bound on ``∫_Y^∞ |u|``."""
    if u.kind == "zero":
        return 0.0
    if u.kind == "gaussian":
        a, x0, s = u.params
        return abs(a) * s * SQRT_HALF_PI * special.erfc((Y - x0) / (s * math.sqrt(2.0)))
    k = u.params[-1]
    total = 0.0
    for term in u.exp_terms():
        n = term.power
        total += abs(term.coef) * math.factorial(n) / k ** (n + 1) * special.gammaincc(n + 1, k * Y)
    return total


def _spatial_integral(u: FunctionDescriptor, kernel, xi_max: float, quad: QuadratureConfig):
    """``∫_0^Y kernel(y) u(y) dy`` with panels resolving ``exp(i y ξ_max)``."""
    Y = _spatial_extent(u)
    tail = spatial_tail_bound(u, Y)
    if tail > 0.1 * quad.epsilon:
        raise AccuracyError("spatial tail of the data is not certified", achieved=tail)
    width = min(QUARTER_TURN / max(xi_max, 1e-300), u.decay_length())
    n = max(8, int(math.ceil(Y / width)))
    edges = np.linspace(0.0, Y, n + 1)
    if u.kind == "gaussian" and 0 < u.params[1] < Y:
        edges = np.unique(np.append(edges, u.params[1]))
    try:
        val, _ = gk_integrate(lambda y: kernel(y) * u(y), edges,
                              rel_tol=quad.rel_tol * 1e-3, max_depth=quad.max_panel_depth)
    except AccuracyError as exc:
        raise AccuracyError(f"half-line transform: {exc}", exc.achieved) from exc
    return val


def forward(u: FunctionDescriptor, xi, quad: QuadratureConfig | None = None):
    """Half-line transform by direct adaptive quadrature in ``y``.

    Parameters
    ----------
    u : FunctionDescriptor
        Integrable catalog function.
    xi : float or array_like
        Frequencies.

    Returns
    -------
    complex or ndarray
    """
    quad = quad or QuadratureConfig()
    _require_integrable(u)
    xis = np.atleast_1d(np.asarray(xi, dtype=float))
    if u.kind == "zero":
        out = np.zeros(xis.shape, dtype=complex)
    else:
        xmax = float(np.max(np.abs(xis)))
        out = _spatial_integral(
            u, lambda y: np.exp(-1j * np.outer(xis, y)), xmax, quad
        )
    return complex(out[0]) if np.ndim(xi) == 0 else out


def sine_cosine_parts(u: FunctionDescriptor, xi: float, quad: QuadratureConfig | None = None):
    """Sine and cosine transforms ``(S, C)`` so that ``P(u) = C - iS``."""
    quad = quad or QuadratureConfig()
    _require_integrable(u)
    if u.kind == "zero":
        return 0.0, 0.0
    xi = float(xi)
    val = _spatial_integral(
        u, lambda y: np.stack([np.sin(xi * y), np.cos(xi * y)]), abs(xi), quad
    )
    return float(val[0]), float(val[1])


def transform(
    u: FunctionDescriptor, xi_values, quad: QuadratureConfig | None = None, *, method: str = "closed_form"
) -> HalfLineTransform:
    """Sample the transform on a grid, recording ``∫|u|²`` alongside."""
    xi = np.asarray(xi_values, dtype=float)
    if method == "closed_form":
        vals = closed_form_transform(u, xi)
    elif method == "quadrature":
        vals = np.asarray(forward(u, xi, quad))
    else:
        raise ConfigurationError("method must be 'closed_form' or 'quadrature'")
    return HalfLineTransform(xi, vals, l2_norm_sq(u))


def default_xi_grid(u: FunctionDescriptor, x_max: float) -> np.ndarray:
    """Symmetric uniform grid resolving ``exp(i x ξ)`` up to ``x_max``.

    The spacing is ``π/(4 x_max)``; the grid reaches ``200/decay length`` (at
    least 60), far enough for the real part to follow its ``1/ξ²`` tail.
    """
    h = math.pi / (4.0 * max(x_max, 1.0))
    scale = 1.0 / u.decay_length() if u.kind != "zero" else 1.0
    top = max(200.0 * scale, 60.0)
    n = int(math.ceil(top / h))
    return np.arange(-n, n + 1) * h


def invert(samples: HalfLineTransform, x: float) -> float:
    """Recover ``u(x)`` from transform samples on a uniform symmetric grid.

    Uses ``u(x) = (2/π) ∫_0^∞ Re P(ξ) cos(x ξ) dξ`` by the trapezoid rule, with
    the part beyond the last sample closed off by a fitted ``c/ξ²`` tail.
    """
    if x < 0:
        raise ConfigurationError("inversion is defined for x ≥ 0")
    xi = samples.xi_values
    pos = xi >= 0
    xp = xi[pos]
    cp = np.real(samples.values[pos])
    if xp.size < 3 or xp[0] != 0.0:
        raise AccuracyError("frequency grid must be symmetric and contain 0")
    h = xp[1] - xp[0]
    if not np.allclose(np.diff(xp), h, rtol=1e-9, atol=0):
        raise AccuracyError("frequency grid must be uniform")
    if x > 0 and h > math.pi / (4.0 * x) * (1 + 1e-12):
        raise AccuracyError(
            f"frequency spacing {h:.3g} under-resolves x={x}; need ≤ π/(4x)",
            achieved=h,
        )
    weights = np.full(xp.size, h)
    weights[0] = weights[-1] = 0.5 * h
    body = float(np.sum(weights * cp * np.cos(x * xp)))
    Xi = xp[-1]
    c2 = cp[-1] * Xi * Xi
    # ∫_Xi^∞ cos(xξ)/ξ² dξ = cos(xXi)/Xi - x (π/2 - Si(x Xi))
    if x == 0:
        tail = c2 / Xi
    else:
        si, _ = special.sici(x * Xi)
        tail = c2 * (math.cos(x * Xi) / Xi - x * (0.5 * math.pi - si))
    return 2.0 / math.pi * (body + tail)


def l2_norm_sq(u: FunctionDescriptor) -> float:
    """``∫_0^∞ u²`` by adaptive quadrature on the spatial side."""
    if u.kind == "zero":
        return 0.0
    Y = _spatial_extent(u)
    pts = [u.params[1]] if u.kind == "gaussian" and 0 < u.params[1] < Y else None
    val, _ = integrate.quad(lambda y: u(y) ** 2, 0.0, Y, points=pts, limit=500,
                            epsabs=1e-15, epsrel=1e-13)
    return val


def plancherel_defect(u: FunctionDescriptor, quad: QuadratureConfig | None = None) -> float:
    """``|(1/2π)∫|P(u)|² dξ - ∫_0^∞ u² dy|``."""
    _require_integrable(u)
    if u.kind == "zero":
        return 0.0

    def power(xi):
        return abs(complex(closed_form_transform(u, np.array([xi]))[0])) ** 2

    # |P(-ξ)| = |P(ξ)| for real u, so integrate the positive half twice
    spectral = 0.0
    scale = 1.0 / u.decay_length()
    edges = [0.0, scale, 4 * scale, 16 * scale, 64 * scale]
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, _ = integrate.quad(power, lo, hi, limit=500, epsabs=1e-15, epsrel=1e-13)
        spectral += v
    v, _ = integrate.quad(power, edges[-1], np.inf, limit=500, epsabs=1e-15, epsrel=1e-13)
    spectral += v
    spectral = 2.0 * spectral / (2.0 * math.pi)
    return abs(spectral - l2_norm_sq(u))
