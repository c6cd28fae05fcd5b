"""Shared engine for inverse half-line transforms of evolving spectra.

Every solution term has the form ``(1/2π) ∫ exp(i x ξ) W(ξ) dξ`` with
``W(-ξ) = conj W(ξ)``, so it equals ``(1/π) Re ∫_0^∞ exp(i x ξ) W(ξ) dξ``.
The finite window ``[0, M]`` is integrated on phase-adapted panels for all
``x`` at once; beyond ``M`` the data transforms are replaced by their
boundary expansions, which are analytic, and the remainder is integrated
along a vertical ray.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .problem import FunctionDescriptor
from .quadrature import (
    QuadratureConfig, beta, canonical_breaks, gk_integrate, phase_edges, ray_integral,
)

SERIES_TERMS = 8


@dataclass
class SpectralTerm:
    """One additive piece of ``W``.

    ``exact(xi)`` is used on the real window, ``tail(z)`` beyond it (complex
    ``z``). ``shift`` is the spatial offset of the data, which adds to the
    phase rate. ``window`` is the smallest ``M`` for which ``tail`` is an
    accurate replacement. ``sine_coef`` is a coefficient ``c`` whose
    ``c/(iξ)`` contribution is handled analytically (see ``_sine_tail``).
    """

    exact: Callable[[np.ndarray], np.ndarray]
    tail: Callable[[np.ndarray], np.ndarray]
    shift: float
    window: float
    sine_coef: float = 0.0


def data_window(d: FunctionDescriptor) -> float:
    """Frequency beyond which the boundary expansion of ``P(d)`` is accurate."""
    if d.kind == "gaussian":
        return 9.0 / d.params[2]
    if d.kind == "zero":
        return 0.0
    return 20.0 * max(abs(term.rate) for term in d.exp_terms())


def data_shift(d: FunctionDescriptor) -> float:
    return max(d.params[1], 0.0) if d.kind == "gaussian" else 0.0


def series_coefficients(d: FunctionDescriptor, terms: int = SERIES_TERMS) -> np.ndarray:
    return d.boundary_derivatives(terms)


def eval_series(coeffs: np.ndarray, z, skip_first: bool = False) -> np.ndarray:
    """``Σ_n c_n / (iz)^(n+1)``."""
    inv = 1.0 / (1j * np.asarray(z, dtype=complex))
    out = np.zeros(inv.shape, dtype=complex)
    power = inv.copy()
    for n, c in enumerate(coeffs):
        if not (skip_first and n == 0) and c != 0.0:
            out += c * power
        power = power * inv
    return out


def _sine_tail(x: np.ndarray, M: float) -> np.ndarray:
    """``Re ∫_M^∞ exp(ixξ)/(iξ) dξ``, which is ``π/2 - Si(xM)`` for x > 0."""
    si, _ = special.sici(x * M)
    return np.where(x > 0, 0.5 * math.pi - si, 0.0)


def invert_terms(
    terms: list[SpectralTerm],
    xs: np.ndarray,
    t: float,
    alpha: float,
    gamma: float,
    quad: QuadratureConfig,
) -> tuple[np.ndarray, float]:
    """Evaluate ``(1/π) Re ∫_0^∞ exp(ixξ) Σ W_k(ξ) dξ`` at every ``x``.

    Returns
    -------
    values : ndarray
        One value per entry of ``xs``.
    error : float
        Largest quadrature error estimate over ``xs``.
    """
    xs = np.asarray(xs, dtype=float)
    if not terms:
        return np.zeros(xs.shape), 0.0
    M = max([2.0 / math.sqrt(gamma)] + [tm.window for tm in terms])
    if alpha * t < 0:
        M = max(M, 2.0 * abs(alpha * t) / gamma)
    shift = max(tm.shift for tm in terms)
    x_rate = float(np.max(xs)) + shift

    def window_integrand(xi):
        w = sum(tm.exact(xi) for tm in terms)
        return np.exp(1j * np.outer(xs, xi)) * w[None, :]

    def tail_integrand(z):
        w = sum(tm.tail(z) for tm in terms)
        return np.exp(1j * np.outer(xs, z)) * w[None, :]

    edges = phase_edges(0.0, M, x_rate=x_rate, t=t, alpha=alpha, gamma=gamma,
                        breakpoints=canonical_breaks(gamma))
    win, err_w = gk_integrate(window_integrand, edges, rel_tol=quad.rel_tol,
                              max_depth=quad.max_panel_depth, min_width=quad.min_panel_width)
    osc = abs(t * beta(M, alpha, gamma)) + 1.0
    decay = float(np.min(xs[xs > 0])) if np.any(xs > 0) else 0.0
    tail, err_t = ray_integral(tail_integrand, complex(M), 1, oscillation=osc,
                               decay=decay, quad=quad)
    total = np.real(win + tail)
    sine = sum(tm.sine_coef for tm in terms)
    if sine != 0.0:
        total = total + sine * _sine_tail(xs, M)
    return total / math.pi, float(np.max(err_w + err_t)) / math.pi

