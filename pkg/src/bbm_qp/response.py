"""Time convolutions ``∫_{t0}^{t1} exp(-i β (t - τ)) c(τ) dτ`` for catalog functions.

Exponential-polynomial data integrate in closed form through the moments
``E_n(w) = ∫_0^1 s^n exp(w s) ds``; the Gaussian falls back to quadrature.
"""

from __future__ import annotations

import math

import numpy as np

from .problem import ExpTerm, FunctionDescriptor
from .quadrature import QUARTER_TURN, gk_integrate


def exp_moments(w, n_max: int) -> list[np.ndarray]:
    """``[E_0(w), ..., E_{n_max}(w)]`` for complex ``w``, stable for all magnitudes
    with ``Re w ≤ 0``."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 0.5
    out = []
    ws = np.where(small, w, 0.0)
    wl = np.where(small, 1.0, w)
    ew = np.exp(wl)
    prev = None
    for n in range(n_max + 1):
        # series: Σ w^k / (k! (n + k + 1))
        ser = np.zeros(w.shape, dtype=complex)
        term = np.ones(w.shape, dtype=complex)
        for k in range(24):
            ser += term / (n + k + 1)
            term = term * ws / (k + 1)
        rec = (ew - 1.0) / wl if n == 0 else (ew - n * prev) / wl
        prev = rec
        out.append(np.where(small, ser, rec))
    return out


def _term_response(term: ExpTerm, beta: np.ndarray, t0: float, t1: float, t: float) -> np.ndarray:
    """``∫_{t0}^{t1} exp(-iβ(t-τ)) c τ^n exp(λτ) dτ`` for one term."""
    n, lam = term.power, term.rate
    L = t1 - t0
    if L <= 0:
        return np.zeros(beta.shape, dtype=complex)
    z = lam + 1j * beta
    # shift τ = t0 + L s, expand (t0 + L s)^n binomially
    forward = np.real(z) <= 0
    zf = np.where(forward, z, 0.0)
    zb = np.where(forward, 0.0, z)
    # forward form: exp(-iβ(t - t0)) exp(λ t0) L ∫ (t0+Ls)^n exp(z L s) ds
    mf = exp_moments(zf * L, n)
    # backward form: τ = t1 - L s: exp(-iβ(t - t1)) exp(λ t1) L ∫ (t1-Ls)^n exp(-z L s) ds
    mb = exp_moments(-zb * L, n)
    acc_f = np.zeros(beta.shape, dtype=complex)
    acc_b = np.zeros(beta.shape, dtype=complex)
    for j in range(n + 1):
        coef = math.comb(n, j)
        acc_f += coef * t0 ** (n - j) * L ** j * mf[j]
        acc_b += coef * t1 ** (n - j) * (-L) ** j * mb[j]
    pf = np.exp(-1j * beta * (t - t0) + lam * t0)
    pb = np.exp(-1j * beta * (t - t1) + lam * t1)
    return term.coef * L * np.where(forward, pf * acc_f, pb * acc_b)


def temporal_response(
    c: FunctionDescriptor, beta, t: float, *, t0: float = 0.0, t1: float | None = None,
    rel_tol: float = 1e-11,
) -> np.ndarray:
    """``∫_{t0}^{t1} exp(-i β (t - τ)) c(τ) dτ`` elementwise over ``beta``.

    ``t1`` defaults to ``t``. Complex ``beta`` is allowed.
    """
    beta = np.asarray(beta, dtype=complex)
    t1 = t if t1 is None else t1
    out = np.zeros(beta.shape, dtype=complex)
    if t1 <= t0 or c.is_zero:
        return out
    terms = c.exp_terms()
    if terms is not None:
        for term in terms:
            out += _term_response(term, beta, t0, t1, t)
        return out
    return _quadrature_response(c, beta, t, t0, t1, rel_tol)


def _quadrature_response(c, beta, t, t0, t1, rel_tol):
    flat = beta.ravel()
    rate = float(np.max(np.abs(np.real(flat)))) if flat.size else 0.0
    width = QUARTER_TURN / max(rate, 1e-12)
    n = max(16, int(math.ceil((t1 - t0) / width)))
    edges = np.linspace(t0, t1, n + 1)

    def f(tau):
        return np.exp(-1j * np.outer(flat, t - tau)) * c(tau)[None, :]

    val, _ = gk_integrate(f, edges, rel_tol=rel_tol, max_depth=30)
    return val.reshape(beta.shape)
