"""Problem description: function catalog, forcing, grids and validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite as _herm

from .errors import ConfigurationError

# kind -> parameter names, in config order
CATALOG: dict[str, tuple[str, ...]] = {
    "zero": (),
    "gaussian": ("a", "x0", "s"),
    "exp_decay": ("a", "k"),
    "sine": ("a", "T0"),
    "sine_ramped": ("a", "T0", "tau_r"),
    "poly_exp": ("c0", "c1", "c2", "c3", "k"),
}

INTEGRABLE_KINDS = frozenset({"zero", "gaussian", "exp_decay", "poly_exp"})

# Catalog values below this magnitude at the origin count as compatible.
COMPATIBILITY_TOL = 1e-6


@dataclass(frozen=True)
class ExpTerm:
    """One term ``coef * s**power * exp(rate * s)`` of an exponential polynomial."""

    coef: complex
    power: int
    rate: complex


@dataclass(frozen=True)
class FunctionDescriptor:
    """A named, parameterized scalar function from the closed catalog.

    Parameters
    ----------
    kind : str
        One of ``CATALOG``.
    params : tuple of float
        Parameters in the order listed in ``CATALOG[kind]``.
    """

    kind: str
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in CATALOG:
            raise ConfigurationError(
                f"unknown function kind {self.kind!r}; expected one of {sorted(CATALOG)}"
            )
        params = tuple(float(p) for p in self.params)
        expected = len(CATALOG[self.kind])
        if len(params) != expected:
            names = ", ".join(CATALOG[self.kind]) or "none"
            raise ConfigurationError(
                f"{self.kind} takes {expected} parameters ({names}), got {len(params)}"
            )
        object.__setattr__(self, "params", params)

    # convenience constructors
    @classmethod
    def zero(cls) -> FunctionDescriptor:
        return cls("zero")

    @classmethod
    def gaussian(cls, a: float, x0: float, s: float) -> FunctionDescriptor:
        return cls("gaussian", (a, x0, s))

    @classmethod
    def exp_decay(cls, a: float, k: float) -> FunctionDescriptor:
        return cls("exp_decay", (a, k))

    @classmethod
    def sine(cls, a: float, T0: float) -> FunctionDescriptor:
        return cls("sine", (a, T0))

    @classmethod
    def sine_ramped(cls, a: float, T0: float, tau_r: float) -> FunctionDescriptor:
        return cls("sine_ramped", (a, T0, tau_r))

    @classmethod
    def poly_exp(cls, c0: float, c1: float, c2: float, c3: float, k: float) -> FunctionDescriptor:
        return cls("poly_exp", (c0, c1, c2, c3, k))

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "poly_exp":
            return all(c == 0.0 for c in self.params[:4])
        return self.params[0] == 0.0

    @property
    def integrable(self) -> bool:
        """True when the function lies in L1 of the half line."""
        return self.kind in INTEGRABLE_KINDS

    def scaled(self, factor: float) -> FunctionDescriptor:
        """Return the descriptor of ``factor * self``."""
        p = list(self.params)
        if self.kind == "zero":
            return self
        if self.kind == "poly_exp":
            p[:4] = [factor * c for c in p[:4]]
        else:
            p[0] *= factor
        return FunctionDescriptor(self.kind, tuple(p))

    def exp_terms(self) -> list[ExpTerm] | None:
        """Exponential-polynomial decomposition, or None for the Gaussian.

        The terms sum to a real function.
        """
        k, p = self.kind, self.params
        if k == "zero":
            return []
        if k == "exp_decay":
            return [ExpTerm(p[0], 0, -p[1])]
        if k in ("sine", "sine_ramped"):
            a, w = p[0], 2.0 * math.pi / p[1]
            h = a / 2j
            terms = [ExpTerm(h, 0, 1j * w), ExpTerm(-h, 0, -1j * w)]
            if k == "sine_ramped":
                r = 1.0 / p[2]
                terms += [ExpTerm(-h, 0, 1j * w - r), ExpTerm(h, 0, -1j * w - r)]
            return terms
        if k == "poly_exp":
            return [ExpTerm(c, n, -p[4]) for n, c in enumerate(p[:4]) if c != 0.0]
        return None

    def __call__(self, s):
        return self.derivative(s, 0)

    def derivative(self, s, order: int = 1):
        """Exact derivative of the given order, vectorized over ``s``."""
        s_arr = np.asarray(s, dtype=float)
        if self.kind == "gaussian":
            a, x0, w = self.params
            z = (s_arr - x0) / (w * math.sqrt(2.0))
            coeffs = np.zeros(order + 1)
            coeffs[order] = 1.0
            h = _herm.hermval(z, coeffs)
            out = a * (-1.0 / (w * math.sqrt(2.0))) ** order * h * np.exp(-z * z)
        elif self.kind == "sine":
            # reduce modulo the period first so that f(s + T0) == f(s) exactly
            a, T0 = self.params
            w = 2.0 * math.pi / T0
            phase = w * np.mod(s_arr, T0)
            base = np.sin(phase) if order % 2 == 0 else np.cos(phase)
            out = (-1.0 if order % 4 in (2, 3) else 1.0) * a * w**order * base
        else:
            out = np.zeros_like(s_arr)
            for term in self.exp_terms():
                out = out + np.real(_exp_term_derivative(term, s_arr, order))
        if np.ndim(s) == 0:
            return float(out)
        return out

    def boundary_derivatives(self, count: int) -> np.ndarray:
        """Values ``f(0), f'(0), ..., f^(count-1)(0)``."""
        return np.array([self.derivative(0.0, m) for m in range(count)])

    def decay_length(self) -> float:
        """Length scale of the spatial decay (integrable kinds only)."""
        if self.kind == "gaussian":
            return self.params[2]
        if self.kind in ("exp_decay", "poly_exp"):
            return 1.0 / self.params[-1]
        return 1.0

    def support_end(self) -> float:
        """Point beyond which the function is negligible (integrable kinds)."""
        if self.kind == "gaussian":
            return max(self.params[1], 0.0) + 5.0 * self.params[2]
        if self.kind in ("exp_decay", "poly_exp"):
            return 10.0 / self.params[-1]
        return 0.0

    def l1_norm(self) -> float:
        """Integral of ``|f|`` over the half line (integrable kinds only)."""
        from scipy import integrate

        if self.kind == "zero":
            return 0.0
        end = self.support_end() * 4.0 + 40.0 * self.decay_length()
        val, _ = integrate.quad(lambda y: abs(self(y)), 0.0, end, limit=400)
        return val


def _exp_term_derivative(term: ExpTerm, s: np.ndarray, order: int) -> np.ndarray:
    # d^m/ds^m [s^n e^{lam s}] = sum_j C(m,j) n!/(n-j)! s^(n-j) lam^(m-j) e^{lam s}
    n, lam = term.power, term.rate
    acc = np.zeros(s.shape, dtype=complex)
    for j in range(min(order, n) + 1):
        acc += (
            math.comb(order, j)
            * math.factorial(n) / math.factorial(n - j)
            * s ** (n - j)
            * lam ** (order - j)
        )
    return term.coef * acc * np.exp(lam * s)


@dataclass(frozen=True)
class ForcingDescriptor:
    """Separable forcing ``f(x, t) = spatial(x) * temporal(t)``."""

    spatial: FunctionDescriptor = field(default_factory=FunctionDescriptor.zero)
    temporal: FunctionDescriptor = field(default_factory=FunctionDescriptor.zero)

    @property
    def is_zero(self) -> bool:
        return self.spatial.is_zero or self.temporal.is_zero

    def __call__(self, x, t):
        return self.spatial(x) * self.temporal(t)


@dataclass(frozen=True)
class ProblemSpec:
    """Quarter-plane problem ``u_t + a u_x + b u u_x - c u_xxt = f``.

    ``alpha``, ``beta_nl`` and ``gamma`` are the transport, nonlinear and
    dispersive coefficients; ``u0`` and ``g`` are the initial and boundary
    data. ``period`` declares the common period of ``g`` and ``f``.
    """

    alpha: float
    gamma: float
    u0: FunctionDescriptor = field(default_factory=FunctionDescriptor.zero)
    g: FunctionDescriptor = field(default_factory=FunctionDescriptor.zero)
    f: ForcingDescriptor = field(default_factory=ForcingDescriptor)
    beta_nl: float = 0.0
    period: float | None = None

    @property
    def sqrt_gamma(self) -> float:
        return math.sqrt(self.gamma)

    def boundary_layer(self, x):
        """The profile ``exp(-x / sqrt(gamma))``."""
        return np.exp(-np.asarray(x, dtype=float) / self.sqrt_gamma)


@dataclass(frozen=True)
class Grid:
    """Tensor grid of sample points in space and time."""

    x_values: np.ndarray
    t_values: np.ndarray

    def __post_init__(self) -> None:
        for name in ("x_values", "t_values"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if arr.ndim != 1 or arr.size == 0:
                raise ConfigurationError(f"{name} must be a non-empty 1-D sequence")
            if np.any(arr < 0):
                raise ConfigurationError(f"{name} must be nonnegative")
            if np.any(np.diff(arr) <= 0):
                raise ConfigurationError(f"{name} must be strictly increasing")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def linspace(cls, x_max: float, nx: int, t_max: float, nt: int) -> Grid:
        return cls(np.linspace(0.0, x_max, nx), np.linspace(0.0, t_max, nt))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x_values.size, self.t_values.size)


def eval_function(d: FunctionDescriptor, s: float) -> float:
    """Evaluate a catalog function at ``s >= 0``."""
    if s < 0:
        raise ValueError("catalog functions are defined for s >= 0")
    return float(d(s))


def _param_violations(name: str, d: FunctionDescriptor) -> list[str]:
    p = d.params
    out = []
    if d.kind == "gaussian" and p[2] <= 0:
        out.append(f"{name}: gaussian width s must be > 0")
    if d.kind in ("exp_decay", "poly_exp") and p[-1] <= 0:
        out.append(f"{name}: decay rate k must be > 0")
    if d.kind in ("sine", "sine_ramped") and p[1] <= 0:
        out.append(f"{name}: period T0 must be > 0")
    if d.kind == "sine_ramped" and p[2] <= 0:
        out.append(f"{name}: ramp time tau_r must be > 0")
    return out


def _is_periodic(d: FunctionDescriptor, period: float) -> bool:
    if d.is_zero:
        return True
    if d.kind != "sine":
        return False
    ratio = period / d.params[1]
    return abs(ratio - round(ratio)) < 1e-12 and round(ratio) >= 1


def validate(spec: ProblemSpec) -> list[str]:
    """Check a problem against the hypotheses of the solution theory.

    Returns
    -------
    list of str
        One message per failed rule; empty when the problem is admissible.
    """
    out: list[str] = []
    if not spec.gamma >= 0:
        out.append("gamma must be ≥ 0")
    for name, d in (("u0", spec.u0), ("g", spec.g), ("f.spatial", spec.f.spatial),
                    ("f.temporal", spec.f.temporal)):
        out += _param_violations(name, d)
    if out:
        return out
    if not spec.u0.integrable:
        out.append("u0 must be integrable on the half line")
    if not spec.f.spatial.integrable:
        out.append("f.spatial must be integrable on the half line")
    if abs(spec.u0(0.0)) > COMPATIBILITY_TOL:
        out.append("u0(0) ≠ 0")
    if abs(spec.g(0.0)) > COMPATIBILITY_TOL:
        out.append("g(0) ≠ 0")
    if spec.period is not None:
        if not spec.period > 0:
            out.append("period must be > 0")
        else:
            if not _is_periodic(spec.g, spec.period):
                out.append("g must be periodic with the declared period")
            if not spec.f.is_zero and not _is_periodic(spec.f.temporal, spec.period):
                out.append("f.temporal must be periodic with the declared period")
    return out


def require_valid(spec: ProblemSpec) -> None:
    """Raise ConfigurationError listing every violated rule."""
    problems = validate(spec)
    if problems:
        raise ConfigurationError("; ".join(problems))


def effective_pieces(spec: ProblemSpec) -> list[tuple[FunctionDescriptor, FunctionDescriptor, float]]:
    """Separable pieces ``(spatial, temporal, weight)`` of the effective forcing.

    The effective forcing is ``f + (alpha/sqrt(gamma)) g(t) exp(-x/sqrt(gamma))``.
    """
    pieces = []
    if not spec.f.is_zero:
        pieces.append((spec.f.spatial, spec.f.temporal, 1.0))
    if spec.alpha != 0.0 and not spec.g.is_zero:
        layer = FunctionDescriptor.exp_decay(1.0, 1.0 / spec.sqrt_gamma)
        pieces.append((layer, spec.g, spec.alpha / spec.sqrt_gamma))
    return pieces

