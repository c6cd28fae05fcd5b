"""Normalized kernels: Φ, the Γ-convolution and the integral-equation kernel K."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ConfigurationError
from .halfline import closed_form_transform
from .problem import FunctionDescriptor, Grid
from .quadrature import PhaseDescriptor, QuadratureConfig, beta, integrate_phi_raw
from .spectral import (
    SpectralTerm, data_shift, data_window, eval_series, invert_terms, series_coefficients,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class KernelField:
    """Samples of Φ on a grid, normalized by ``1/(2π)``."""

    grid: Grid
    phi_values: np.ndarray
    config: QuadratureConfig
    params: tuple[float, float]

    def to_rows(self):
        for i, x in enumerate(self.grid.x_values):
            for j, t in enumerate(self.grid.t_values):
                yield (x, t, self.phi_values[i, j])


def phi(x: float, t: float, alpha: float, gamma: float, quad: QuadratureConfig | None = None) -> float:
    """``Φ(x, t) = (1/2π) ∫ exp(ixξ - iβ(ξ)t) / (1+γξ²) dξ``."""
    quad = quad or QuadratureConfig()
    raw = integrate_phi_raw(PhaseDescriptor(alpha, gamma, x, t), quad)
    if abs(raw.value.imag) > 10.0 * quad.epsilon:
        raise AccuracyError("kernel integral is not real to tolerance", abs(raw.value.imag))
    return raw.value.real / TWO_PI


def phi_field(grid: Grid, alpha: float, gamma: float, quad: QuadratureConfig | None = None) -> KernelField:
    quad = quad or QuadratureConfig()
    vals = np.array([[phi(x, t, alpha, gamma, quad) for t in grid.t_values] for x in grid.x_values])
    return KernelField(grid, vals, quad, (alpha, gamma))


def gamma_term(u0: FunctionDescriptor, t: float, alpha: float, gamma: float) -> SpectralTerm:
    """Spectral term ``exp(-iβt) P(u0)(ξ)`` of the initial-data propagation."""
    coeffs = series_coefficients(u0)
    c0 = float(coeffs[0])

    def exact(xi):
        return np.exp(-1j * beta(xi, alpha, gamma) * t) * closed_form_transform(u0, xi)

    def tail(z):
        phase = np.exp(-1j * beta(z, alpha, gamma) * t)
        out = phase * eval_series(coeffs, z, skip_first=True)
        if c0 != 0.0:
            # the c0/(iz) part without the phase is added analytically
            out = out + c0 * (phase - 1.0) / (1j * z)
        return out

    return SpectralTerm(exact, tail, data_shift(u0), data_window(u0), sine_coef=c0)


def gamma_convolve_many(
    u0: FunctionDescriptor, xs, t: float, alpha: float, gamma: float,
    quad: QuadratureConfig | None = None,
) -> np.ndarray:
    """``∫_0^∞ Γ(x - y, t) u0(y) dy`` for an array of ``x ≥ 0``."""
    quad = quad or QuadratureConfig()
    if not gamma > 0:
        raise ConfigurationError("gamma must be > 0; use the transport solution for gamma = 0")
    if not u0.integrable:
        raise ConfigurationError("u0 must have certified spatial decay")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < 0):
        raise ConfigurationError("x must be ≥ 0")
    if u0.is_zero:
        return np.zeros(xs.shape)
    vals, _ = invert_terms([gamma_term(u0, t, alpha, gamma)], xs, t, alpha, gamma, quad)
    return vals


def gamma_convolve(
    u0: FunctionDescriptor, x: float, t: float, alpha: float, gamma: float,
    quad: QuadratureConfig | None = None,
) -> float:
    """Γ-convolution of the initial datum evaluated in frequency space."""
    return float(gamma_convolve_many(u0, [x], t, alpha, gamma, quad)[0])


def kernel_K(x, y, gamma: float):
    """``K(x,y) = (1/2γ)[exp(-(x+y)/√γ) + sgn(x-y) exp(-|x-y|/√γ)]`` with ``sgn(0) = 0``."""
    if not gamma > 0:
        raise ConfigurationError("gamma must be > 0")
    sg = math.sqrt(gamma)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    out = (np.exp(-(x + y) / sg) + np.sign(d) * np.exp(-np.abs(d) / sg)) / (2.0 * gamma)
    return float(out) if out.ndim == 0 else out
