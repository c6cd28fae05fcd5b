"""Eventual periodicity: the defect ``D(x, t) = u(x, t+T0) - u(x, t)``.

Two routes are provided. :func:`defect_direct` differences any solution.
:func:`defect_representation` integrates the one-period source

    f(y, τ) - α u0'(y) + (α/√γ) g(τ) exp(-y/√γ),   τ ∈ [-T0, 0],

against ``Φ(x-y, t-τ)``, which equals ``D`` when ``f`` and ``g`` are
``T0``-periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .asymptotics import DecayFit, decay_fit
from .errors import ConfigurationError, RangeError
from .halfline import closed_form_transform
from .kernels import phi
from .problem import COMPATIBILITY_TOL, FunctionDescriptor, ProblemSpec, effective_pieces, require_valid
from .quadrature import QuadratureConfig, beta
from .semianalytic import SolutionField, box_response, forcing_term, solve_u
from .spectral import SpectralTerm, data_shift, data_window, eval_series, invert_terms, series_coefficients

PERIODICITY_COLUMNS = ("x", "t", "defect_direct", "defect_repr", "slope")
SOLVERS = ("semianalytic", "representation", "integral_equation")


def default_schedule(n: int = 8, t_min: float = 10.0, t_max: float = 1e3) -> np.ndarray:
    return np.geomspace(t_min, t_max, n)


def defect_direct(u, x: float, t: float, T0: float) -> float:
    """``u(x, t+T0) - u(x, t)`` for a callable ``u(x, t)`` or a :class:`SolutionField`."""
    if not T0 > 0:
        raise ConfigurationError("T0 must be > 0")
    if isinstance(u, SolutionField):
        ts = u.grid.t_values
        tol = 1e-12 * max(1.0, ts[-1])
        if t < ts[0] - tol or t + T0 > ts[-1] + tol:
            raise RangeError(f"[{t}, {t + T0}] is outside the solved range [{ts[0]}, {ts[-1]}]")
        return u.at(x, t + T0) - u.at(x, t)
    return float(u(x, t + T0)) - float(u(x, t))


def _require_period(spec: ProblemSpec) -> float:
    if spec.period is None:
        raise ConfigurationError("spec has no period set")
    return float(spec.period)


def _slope_term(u0: FunctionDescriptor, alpha: float, gamma: float, t: float, T0: float) -> SpectralTerm:
    """``-α P(u0')(ξ) ∫_{-T0}^0 exp(-iβ(t-τ)) dτ / (1+γξ²)`` with ``P(u0') = iξP(u0) - u0(0)``."""
    coeffs = series_coefficients(u0)
    c0 = float(coeffs[0])

    def exact(xi):
        slope = 1j * xi * closed_form_transform(u0, xi) - c0
        return -alpha * slope * box_response(beta(xi, alpha, gamma), -T0, 0.0, t) / (1.0 + gamma * xi * xi)

    def tail(z):
        slope = eval_series(coeffs[1:], z) * (1j * z)
        return -alpha * slope * box_response(beta(z, alpha, gamma), -T0, 0.0, t) / (1.0 + gamma * z * z)

    return SpectralTerm(exact, tail, data_shift(u0), data_window(u0))


def defect_representation(spec: ProblemSpec, x: float, t: float, quad: QuadratureConfig | None = None) -> float:
    """One-period integral representation of ``D(x, t)``."""
    quad = quad or QuadratureConfig()
    T0 = _require_period(spec)
    if not spec.gamma > 0:
        raise ConfigurationError("gamma must be > 0")
    require_valid(spec)
    terms = [
        forcing_term(s, c, w, t, spec.alpha, spec.gamma, t0=-T0, t1=0.0)
        for s, c, w in effective_pieces(spec)
    ]
    if spec.alpha != 0 and not spec.u0.is_zero:
        terms.append(_slope_term(spec.u0, spec.alpha, spec.gamma, t, T0))
    vals, _ = invert_terms(terms, np.array([float(x)]), t, spec.alpha, spec.gamma, quad)
    return float(vals[0])


def bound_constant(spec: ProblemSpec) -> float:
    """``∫∫|f| + |α| T0 ∫|u0'| + |α| ∫|g|`` over one period ``[-T0, 0]``."""
    T0 = _require_period(spec)
    a = abs(spec.alpha)

    def l1_time(c: FunctionDescriptor) -> float:
        if c.is_zero:
            return 0.0
        # periodic data: one period anywhere has the same L1 norm
        v, _ = integrate.quad(lambda s: abs(c(s)), 0.0, T0, limit=400)
        return v

    total = 0.0
    if not spec.f.is_zero:
        total += spec.f.spatial.l1_norm() * l1_time(spec.f.temporal)
    if not spec.u0.is_zero and a > 0:
        end = spec.u0.support_end() * 2.0 + 10.0
        v, _ = integrate.quad(lambda y: abs(spec.u0.derivative(y, 1)), 0.0, end, limit=400,
                              points=[data_shift(spec.u0)] if data_shift(spec.u0) > 0 else None)
        total += a * T0 * v
    total += a * l1_time(spec.g)
    return total


def magnitude_bound(spec: ProblemSpec, t: float, quad: QuadratureConfig | None = None,
                    *, x_max: float = 20.0, samples: int = 21) -> float:
    """``sup|Φ| · bound_constant`` with the sup sampled over ``x ∈ [0, x_max]``
    and kernel times ``[t, t+T0]``, the lags that occur in the representation."""
    T0 = _require_period(spec)
    xs = np.linspace(0.0, x_max, samples)
    ss = np.linspace(t, t + T0, 5)
    sup = max(abs(phi(x, s, spec.alpha, spec.gamma, quad)) for x in xs for s in ss)
    return sup * bound_constant(spec)


@dataclass
class PeriodicityReport:
    x: float
    t_samples: np.ndarray
    defect: np.ndarray
    fit: DecayFit
    method: str
    bound_constant: float
    defect_repr: np.ndarray | None = None
    window_sup: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.t_samples = np.asarray(self.t_samples, dtype=float)
        self.defect = np.asarray(self.defect, dtype=float)
        if np.any(np.diff(self.t_samples) <= 0):
            raise ConfigurationError("t_samples must be strictly increasing")
        if np.any(self.defect < 0):
            raise ConfigurationError("defect entries must be ≥ 0")

    def rows(self):
        """``(x, t, defect_direct, defect_repr, slope)`` with signed defects."""
        direct = self.extra.get("signed", self.defect)
        for i, t in enumerate(self.t_samples):
            rep = self.defect_repr[i] if self.defect_repr is not None else math.nan
            yield (self.x, t, direct[i], rep, self.fit.slope)


def window_sup(defect: Callable[[float], float], t: float, length: float, points: int = 33) -> float:
    """``max |defect(s)|`` over the trailing window ``s ∈ [t - length, t]`` (uniform sample)."""
    return max(abs(defect(s)) for s in np.linspace(max(t - length, 0.0), t, points))


def periodicity_study(
    spec: ProblemSpec, x: float, t_schedule=None, solver: str = "semianalytic",
    quad: QuadratureConfig | None = None, *, window: float | None = None,
    window_points: int = 33, compare: bool = False, field_: SolutionField | None = None,
) -> PeriodicityReport:
    """Defect at each scheduled time, its decay fit and optional window sups.

    Parameters
    ----------
    solver : {"semianalytic", "representation", "integral_equation"}
        ``"integral_equation"`` needs a precomputed ``field_`` covering
        ``t + T0`` for every scheduled ``t``.
    window : float, optional
        If given, also record ``max |D|`` over the trailing window ``[t - window, t]``.
    compare : bool
        Also evaluate the representation route at each time.
    """
    quad = quad or QuadratureConfig()
    T0 = _require_period(spec)
    if abs(spec.g(0.0)) > COMPATIBILITY_TOL:
        raise ConfigurationError("g(0) must vanish")
    ts = default_schedule() if t_schedule is None else np.asarray(t_schedule, dtype=float)
    if solver not in SOLVERS:
        raise ConfigurationError(f"solver must be one of {SOLVERS}")

    if solver == "semianalytic":
        def D(s):
            return defect_direct(lambda xx, tt: solve_u(spec, xx, tt, quad), x, s, T0)
    elif solver == "representation":
        def D(s):
            return defect_representation(spec, x, s, quad)
    else:
        if field_ is None:
            raise ConfigurationError("integral_equation study needs a solved field")

        def D(s):
            return defect_direct(field_, x, s, T0)

    values = np.array([D(float(s)) for s in ts])
    mags = np.abs(values)
    floor = 10.0 * quad.epsilon * 1e-3
    fit = decay_fit(zip(ts, mags), floor=floor, min_decades=0.0) if ts.size else DecayFit(
        math.nan, math.nan, math.nan, degenerate=True)
    repr_vals = None
    if compare and solver != "representation":
        repr_vals = np.array([defect_representation(spec, x, float(s), quad) for s in ts])
    sups = None
    if window is not None:
        sups = np.array([window_sup(D, float(s), window, window_points) for s in ts])
    return PeriodicityReport(x, ts, mags, fit, solver, bound_constant(spec),
                             defect_repr=repr_vals, window_sup=sups,
                             extra={"signed": values})
