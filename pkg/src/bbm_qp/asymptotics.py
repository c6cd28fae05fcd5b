"""Endpoint stationary-phase asymptotics of the kernel segments.

On ``I2 = [-1/√γ, 0]`` and ``I4 = [1/√γ, M]`` the integrand is
``q(ξ) exp(i t p(ξ))`` with ``p = -β`` and ``q = exp(ixξ)/(1+γξ²)``. The phase
is stationary at the left endpoint ``a = ∓1/√γ`` where
``p(ξ) - p(a) ≈ ½ p''(a) (ξ-a)²``. The leading term of the endpoint expansion
is

    exp(±iλπ/(2μ)) (Q/μ) Γ(λ/μ) exp(i t p(a)) / (P t)^(λ/μ)

with ``μ = 2``, ``λ = 1``, ``Q = q(a)`` and ``P = |p''(a)|/2 = |α|√γ/4``. The
sign is that of ``p''(a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ConfigurationError
from .quadrature import PhaseDescriptor, QuadratureConfig, beta, integrate_segment

SEGMENTS = ("I2", "I4")
CONVENTIONS = ("taylor", "doubled")


@dataclass(frozen=True)
class StationaryPhaseData:
    """Local data ``p(ξ) - p(a) ~ P (ξ-a)^μ``, ``q(ξ) ~ Q (ξ-a)^(λ-1)`` at ``a``."""

    a: float
    b: float
    P: float
    mu: float
    lam: float
    Q: complex
    p_at_a: float
    sign: int

    def __post_init__(self) -> None:
        if not self.P > 0:
            raise ConfigurationError("phase growth constant P must be > 0")
        if not (0 < self.lam < self.mu):
            raise ConfigurationError("need 0 < lambda < mu")
        if self.sign not in (1, -1):
            raise ConfigurationError("sign must be ±1")


def _require_alpha(alpha: float) -> None:
    if alpha == 0:
        raise ConfigurationError("stationary phase undefined for alpha = 0")


def extract_local_data(
    segment: str, alpha: float, gamma: float, x: float, *, M: float = math.inf,
    convention: str = "taylor",
) -> StationaryPhaseData:
    """Local data at the stationary endpoint of ``I2`` or ``I4``.

    Parameters
    ----------
    convention : {"taylor", "doubled"}
        ``"taylor"`` uses ``P = |α|√γ/4``, the quadratic Taylor coefficient of
        the phase. ``"doubled"`` uses ``P = |α|√γ/2``; it is kept so that
        tables built with that constant can be reproduced.
    """
    _require_alpha(alpha)
    if not gamma > 0:
        raise ConfigurationError("gamma must be > 0")
    if segment not in SEGMENTS:
        raise ConfigurationError(f"segment must be one of {SEGMENTS}")
    if convention not in CONVENTIONS:
        raise ConfigurationError(f"convention must be one of {CONVENTIONS}")
    sg = math.sqrt(gamma)
    if segment == "I2":
        a, b = -1.0 / sg, 0.0
    else:
        a, b = 1.0 / sg, M
    # p = -β, and β''(±1/√γ) = ∓α√γ/2
    p2 = alpha * sg / 2.0 if segment == "I4" else -alpha * sg / 2.0
    P = abs(p2) / 2.0 if convention == "taylor" else abs(p2)
    Q = 0.5 * np.exp(1j * x * a)
    return StationaryPhaseData(
        a=a, b=b, P=P, mu=2.0, lam=1.0, Q=complex(Q),
        p_at_a=float(-beta(a, alpha, gamma)), sign=1 if p2 > 0 else -1,
    )


def olver_leading_term(d: StationaryPhaseData, t: float) -> complex:
    """Leading term of the endpoint expansion for ``∫_a^b q exp(itp)``."""
    if not t > 0:
        raise ConfigurationError("t must be > 0")
    ratio = d.lam / d.mu
    rot = np.exp(d.sign * 1j * d.lam * math.pi / (2.0 * d.mu))
    return complex(rot * (d.Q / d.mu) * special.gamma(ratio)
                   * np.exp(1j * t * d.p_at_a) / (d.P * t) ** ratio)


@dataclass(frozen=True)
class AsymptoticComparison:
    segment: str
    alpha: float
    gamma: float
    x: float
    t: float
    approx: complex
    exact: complex
    rel_err: float
    meaningful: bool = True

    def row(self) -> tuple:
        return (self.segment, self.alpha, self.gamma, self.x, self.t, self.exact.real,
                self.exact.imag, self.approx.real, self.approx.imag, self.rel_err)


ASYMPTOTIC_COLUMNS = ("segment", "alpha", "gamma", "x", "t", "re_exact", "im_exact",
                      "re_approx", "im_approx", "rel_err")


def asymptotic_vs_quadrature(
    segment: str, alpha: float, gamma: float, x: float, t: float,
    quad: QuadratureConfig | None = None, *, convention: str = "taylor",
) -> AsymptoticComparison:
    """Compare the leading term with the raw segment integral."""
    quad = quad or QuadratureConfig(rel_tol=1e-11)
    _require_alpha(alpha)
    if not t > 0:
        raise ConfigurationError("t must be > 0")
    M = quad.truncation(gamma)
    d = extract_local_data(segment, alpha, gamma, x, M=M, convention=convention)
    lo, hi = (d.a, d.b) if d.a < d.b else (d.b, d.a)
    exact = integrate_segment(PhaseDescriptor(alpha, gamma, x, t), lo, hi, quad)
    approx = olver_leading_term(d, t)
    meaningful = abs(exact) > 10.0 * quad.epsilon * quad.rel_tol
    rel = abs(approx - exact) / abs(exact) if abs(exact) > 0 else math.inf
    return AsymptoticComparison(segment, alpha, gamma, x, t, approx, complex(exact),
                                float(rel) if meaningful else math.nan, meaningful)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares line through ``(log t, log |value|)``."""

    slope: float
    intercept: float
    residual: float
    dropped: int = 0
    degenerate: bool = False
    n: int = 0

    def predict(self, t):
        return np.exp(self.intercept) * np.asarray(t, dtype=float) ** self.slope


def decay_fit(samples, *, min_samples: int = 5, min_decades: float = 2.0,
              floor: float = 0.0) -> DecayFit:
    """OLS fit of ``log|value| = intercept + slope · log t``.

    Samples with magnitude ``≤ floor`` are dropped and counted. The fit is
    flagged degenerate when fewer than ``min_samples`` remain.

    Returns
    -------
    DecayFit
        ``residual`` is the RMS deviation in ``log|value|``.
    """
    arr = np.asarray(list(samples), dtype=float).reshape(-1, 2)
    t, mag = arr[:, 0], np.abs(arr[:, 1])
    if np.any(t <= 0):
        raise ConfigurationError("sample times must be > 0")
    keep = mag > floor
    dropped = int(np.count_nonzero(~keep))
    t, mag = t[keep], mag[keep]
    if t.size < min_samples:
        return DecayFit(math.nan, math.nan, math.nan, dropped, True, int(t.size))
    span = math.log10(t.max() / t.min())
    if span < min_decades - 1e-9:
        raise ConfigurationError(
            f"samples span {span:.2f} decades in t; at least {min_decades} are required"
        )
    lt, lm = np.log(t), np.log(mag)
    A = np.column_stack([lt, np.ones_like(lt)])
    (slope, intercept), *_ = np.linalg.lstsq(A, lm, rcond=None)
    resid = float(np.sqrt(np.mean((A @ [slope, intercept] - lm) ** 2)))
    return DecayFit(float(slope), float(intercept), resid, dropped, False, int(t.size))


def variation_check(segment: str, alpha: float, gamma: float, x: float, eps: float, M: float) -> float:
    """Total variation of ``q/p' = -(1+γξ²) exp(ixξ) / (α(1-γξ²))`` on the segment.

    The segment is ``[-1/√γ + ε, 0]`` for ``I2`` and ``[1/√γ + ε, M]`` for ``I4``.
    """
    _require_alpha(alpha)
    if not eps > 0:
        raise ConfigurationError("eps must be > 0")
    sg = math.sqrt(gamma)
    if segment == "I2":
        lo, hi = -1.0 / sg + eps, 0.0
    elif segment == "I4":
        lo, hi = 1.0 / sg + eps, M
    else:
        raise ConfigurationError(f"segment must be one of {SEGMENTS}")
    if not hi > lo:
        raise ConfigurationError("empty segment")

    def integrand(s):
        d = 1.0 - gamma * s * s
        r = -(1.0 + gamma * s * s) / (alpha * d)
        dr = -4.0 * gamma * s / (alpha * d * d)
        return math.hypot(x * r, dr)

    # log-spaced breakpoints keep every piece well scaled
    pts = [lo]
    if hi > 0 and lo > 0:
        pts += list(np.geomspace(lo * 2.0, hi, num=max(2, int(math.log2(hi / lo)) + 1)))
    else:
        pts.append(hi)
    pts = sorted(set(p for p in pts if lo <= p <= hi))
    total = 0.0
    for p, q in zip(pts[:-1], pts[1:]):
        v, _ = integrate.quad(integrand, p, q, limit=200, epsabs=0.0, epsrel=1e-10)
        total += v
    return total
