"""Adaptive quadrature for the oscillatory frequency integrals.

The integrals of interest have the form ``∫ exp(i x ξ - i β(ξ) t) A(ξ) dξ``
with ``β(ξ) = α ξ / (1 + γ ξ²)``. Panels are sized so the phase changes by
at most a quarter turn across each one, then refined adaptively with a
Gauss–Kronrod 7/15 pair. Tails beyond a finite window are rotated onto
vertical rays in the complex plane, where the integrand decays instead of
oscillating.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import AccuracyError, ConfigurationError

# Kronrod 15-point abscissae (positive half, descending) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
# Gauss 7-point weights for abscissae _XGK[1], _XGK[3], _XGK[5], _XGK[7].
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

# Ascending 15-point layout on [-1, 1]; Gauss nodes sit at the odd indices.
KRONROD_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG[:3], [_WG[3]], _WG[2::-1]])

_EPS = np.finfo(float).eps
QUARTER_TURN = 0.5 * math.pi


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and truncation for the frequency integrals.

    Parameters
    ----------
    epsilon : float
        Target absolute tolerance. Sets the default truncation through
        :func:`tail_bound_M`.
    M : float, optional
        Truncation point of the frequency axis. ``None`` derives it from
        ``epsilon``.
    max_panel_depth : int
        Maximum number of adaptive bisections of any panel.
    rel_tol : float
        Relative accuracy target of every adaptive integral.
    min_panel_width : float
        Panels narrower than this are accepted without further bisection.
    tail : {"contour", "truncate"}
        ``"contour"`` adds the exact tail beyond ``M`` evaluated on rotated
        rays; ``"truncate"`` drops it and relies on the certified bound.
    """

    epsilon: float = 1e-6
    M: float | None = None
    max_panel_depth: int = 40
    rel_tol: float = 1e-9
    min_panel_width: float = 0.0
    tail: str = "contour"

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ConfigurationError("quad.epsilon must be > 0")
        if self.M is not None and not self.M > 0:
            raise ConfigurationError("quad.M must be > 0")
        if self.max_panel_depth < 4:
            raise ConfigurationError("quad.max_panel_depth must be ≥ 4")
        if not self.rel_tol > 0:
            raise ConfigurationError("quad.rel_tol must be > 0")
        if self.tail not in ("contour", "truncate"):
            raise ConfigurationError("quad.tail must be 'contour' or 'truncate'")

    def truncation(self, gamma: float) -> float:
        """Truncation point for the given dispersion coefficient."""
        if self.M is not None:
            if self.M < 1.0 / math.sqrt(gamma):
                raise ConfigurationError("quad.M must be ≥ 1/sqrt(gamma)")
            return self.M
        return tail_bound_M(self.epsilon, gamma)


@dataclass(frozen=True)
class PhaseDescriptor:
    """Parameters of the phase ``θ(ξ) = x ξ - β(ξ) t``."""

    alpha: float
    gamma: float
    x: float
    t: float

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ConfigurationError("gamma must be > 0 for the frequency integrals")

    def theta(self, xi):
        return self.x * xi - beta(xi, self.alpha, self.gamma) * self.t


@dataclass(frozen=True)
class PhiIntegral:
    """Raw kernel integral split into its truncated part and tail."""

    value: complex
    truncated: complex
    tail: complex
    tail_bound: float
    error: float
    M: float


class TruncationClampWarning(UserWarning):
    """The requested tolerance allowed a truncation below ``1/sqrt(gamma)``."""


def beta(xi, alpha: float, gamma: float):
    """Dispersion relation ``α ξ / (1 + γ ξ²)``; accepts complex input."""
    return alpha * xi / (1.0 + gamma * xi * xi)


def beta_prime(xi, alpha: float, gamma: float):
    g2 = gamma * xi * xi
    return alpha * (1.0 - g2) / (1.0 + g2) ** 2


def tail_integral_bound(M: float, gamma: float) -> float:
    """Value of ``∫_{|ξ|>M} dξ / (1 + γ ξ²)``."""
    sg = math.sqrt(gamma)
    # pi/2 - arctan(z) = arctan(1/z) avoids cancellation for large z
    return 2.0 / sg * math.atan(1.0 / (sg * M))


def tail_integral_direct(M: float, gamma: float) -> float:
    """``∫_{|ξ|>M} dξ/(1+γξ²)`` by adaptive quadrature, independent of the closed form."""
    from scipy import integrate

    # s = 1/v maps the tail onto the finite interval (0, 1/M]
    val, _ = integrate.quad(lambda v: 1.0 / (v * v + gamma), 0.0, 1.0 / M,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return 2.0 * val


def tail_bound_M(epsilon: float, gamma: float) -> float:
    """Smallest truncation ``M`` whose Lorentzian tail mass is below ``ε/2``.

    Solves ``(2/√γ)(π/2 - arctan(√γ M)) = ε/2`` in closed form. When the
    tolerance is so loose that ``M < 1/√γ``, the result is clamped to
    ``1/√γ`` and a :class:`TruncationClampWarning` is issued.
    """
    if not (epsilon > 0 and gamma > 0):
        raise ConfigurationError("epsilon and gamma must be > 0")
    sg = math.sqrt(gamma)
    floor = 1.0 / sg
    angle = epsilon * sg / 4.0
    if angle >= QUARTER_TURN:
        warnings.warn("truncation clamped to 1/sqrt(gamma)", TruncationClampWarning, stacklevel=2)
        return floor
    M = 1.0 / (math.tan(angle) * sg)
    # nudge upward so the strict inequality holds despite rounding
    while tail_integral_bound(M, gamma) >= 0.5 * epsilon:
        M = math.nextafter(M, math.inf) * (1.0 + 1e-15)
    if M < floor:
        warnings.warn("truncation clamped to 1/sqrt(gamma)", TruncationClampWarning, stacklevel=2)
        return floor
    return M


# ---------------------------------------------------------------------------
# Adaptive Gauss–Kronrod on panels


def gk_integrate(
    func: Callable[[np.ndarray], np.ndarray],
    edges: Iterable[float],
    *,
    rel_tol: float,
    abs_tol: float = 0.0,
    max_depth: int = 40,
    min_width: float = 0.0,
    max_nodes: int = 20_000_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate a vector-valued function over consecutive panels.

    Parameters
    ----------
    func : callable
        Maps a 1-D array of nodes to values of shape ``(n,)`` or ``(m, n)``.
    edges : sequence of float
        Increasing panel boundaries.
    rel_tol, abs_tol : float
        Acceptance uses ``max(abs_tol, rel_tol*|I|, 1e-3*rel_tol*∫|f|)``,
        shared among panels in proportion to their width.
    max_depth : int
        Bisection levels allowed before raising :class:`AccuracyError`.

    Returns
    -------
    value, error : ndarray
        Integral estimate and summed error estimate, each of shape ``(m,)``
        (``m = 1`` for scalar integrands).
    """
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=float)
    a, b = e[:-1], e[1:]
    mask = b > a
    a, b = a[mask], b[mask]
    if a.size == 0:
        return np.zeros(1, dtype=complex), np.zeros(1)
    total_width = float(np.sum(b - a))
    acc = acc_err = acc_abs = None

    for depth in range(max_depth + 1):
        if a.size * 15 > max_nodes:
            raise AccuracyError(
                f"quadrature needs more than {max_nodes} nodes",
                achieved=None if acc_err is None else float(np.max(acc_err)),
            )
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        nodes = (c[:, None] + h[:, None] * KRONROD_NODES[None, :]).ravel()
        vals = np.asarray(func(nodes))
        if vals.ndim == 1:
            vals = vals[None, :]
        vals = vals.reshape(vals.shape[0], a.size, 15)
        kron = (vals @ KRONROD_WEIGHTS) * h
        gauss = (vals[..., 1::2] @ GAUSS_WEIGHTS) * h
        resabs = (np.abs(vals) @ KRONROD_WEIGHTS) * h
        mean = kron / (2.0 * h)
        resasc = (np.abs(vals - mean[..., None]) @ KRONROD_WEIGHTS) * h
        err = np.abs(kron - gauss)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
        err = np.where((resasc > 0) & (err > 0), scaled, err)
        err = np.maximum(err, 50.0 * _EPS * resabs)

        if acc is None:
            acc = np.zeros(vals.shape[0], dtype=kron.dtype)
            acc_err = np.zeros(vals.shape[0])
            acc_abs = np.zeros(vals.shape[0])
        estimate = acc + kron.sum(axis=1)
        l1 = acc_abs + resabs.sum(axis=1)
        tol = np.maximum(abs_tol, np.maximum(rel_tol * np.abs(estimate), 1e-3 * rel_tol * l1))
        # each panel may use its share of the width or of the absolute mass
        share = np.maximum((2.0 * h / total_width)[None, :], resabs / np.maximum(l1, 1e-300)[:, None])
        ok = np.all((err <= tol[:, None] * share) | (err <= 100.0 * _EPS * resabs), axis=0)
        ok |= 2.0 * h <= min_width
        if depth == max_depth and not np.all(ok):
            achieved = float(np.max(acc_err + err.sum(axis=1)))
            raise AccuracyError(
                f"adaptive quadrature did not converge after {max_depth} bisections",
                achieved=achieved,
            )
        acc = acc + kron[:, ok].sum(axis=1)
        acc_err = acc_err + err[:, ok].sum(axis=1)
        acc_abs = acc_abs + resabs[:, ok].sum(axis=1)
        if np.all(ok):
            break
        bad = ~ok
        ab, cb, bb = a[bad], c[bad], b[bad]
        a = np.concatenate([ab, cb])
        b = np.concatenate([cb, bb])
    return acc, acc_err


# ---------------------------------------------------------------------------
# Panel layout


def _phase_budget(xi, x_rate: float, t: float, alpha: float, gamma: float):
    """Monotone upper bound for the accumulated phase from 0 to ξ."""
    xi = np.asarray(xi, dtype=float)
    s = 1.0 / math.sqrt(gamma)
    bmax = abs(alpha) * 0.5 * s
    mag = np.abs(xi)
    b = abs(alpha) * mag / (1.0 + gamma * mag * mag)
    variation = np.where(mag <= s, b, 2.0 * bmax - b)
    return x_rate * xi + abs(t) * np.sign(xi) * variation


def stationary_points(x: float, t: float, alpha: float, gamma: float) -> np.ndarray:
    """Real roots of ``θ'(ξ) = x - t β'(ξ)``."""
    at = alpha * t
    if at == 0.0:
        return np.empty(0)
    if x == 0.0:
        roots_u = [1.0]
    else:
        # x u² + (2x + αt) u + (x - αt) = 0 with u = γξ², solved without cancellation
        b = 2.0 * x + at
        disc = at * (at + 8.0 * x)
        if disc < 0:
            return np.empty(0)
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        roots_u = [q / x, (x - at) / q] if q != 0.0 else [-b / x]
    pts = []
    for u in roots_u:
        if u >= 0:
            r = math.sqrt(u / gamma)
            pts += [-r, r] if r > 0 else [0.0]
    return np.unique(np.array(pts))


def phase_edges(
    a: float,
    b: float,
    *,
    x_rate: float,
    t: float,
    alpha: float,
    gamma: float,
    breakpoints: Iterable[float] = (),
    graded: Iterable[float] = (),
    grading_depth: int = 12,
    max_phase: float = QUARTER_TURN,
) -> np.ndarray:
    """Panel boundaries on ``[a, b]`` with at most ``max_phase`` phase change each.

    ``breakpoints`` are forced edges; panels are additionally graded
    geometrically (ratio 1/2) toward each point in ``graded``.
    """
    if b <= a:
        return np.array([a, b])
    la = float(_phase_budget(a, x_rate, t, alpha, gamma))
    lb = float(_phase_budget(b, x_rate, t, alpha, gamma))
    n = max(1, int(math.ceil((lb - la) / max_phase)))
    levels = np.linspace(la, lb, n + 1)[1:-1]
    lo = np.full(levels.shape, a)
    hi = np.full(levels.shape, b)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = _phase_budget(mid, x_rate, t, alpha, gamma) < levels
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    pieces = [np.array([a, b]), 0.5 * (lo + hi)]
    pieces.append(np.array([p for p in breakpoints if a < p < b]))
    half_width = 0.5 / math.sqrt(gamma)
    for p in graded:
        if not a <= p <= b:
            continue
        d = min(half_width, max(p - a, b - p))
        offs = d * 0.5 ** np.arange(1, grading_depth + 1)
        pieces.append(np.array([p]))
        pieces.append(np.concatenate([p - offs, p + offs]))
    edges = np.unique(np.concatenate(pieces))
    edges = edges[(edges >= a) & (edges <= b)]
    keep = np.concatenate([[True], np.diff(edges) > 1e-13 * max(1.0, abs(a), abs(b))])
    edges = edges[keep]
    edges[0], edges[-1] = a, b
    return edges


def canonical_breaks(gamma: float) -> tuple[float, float, float]:
    """Forced edges at the turning points of β and at the origin."""
    s = 1.0 / math.sqrt(gamma)
    return (-s, 0.0, s)


# ---------------------------------------------------------------------------
# Contour pieces


@dataclass(frozen=True)
class ContourPlan:
    """Window size, rotation direction and lift of the integration path.

    ``sigma = +1`` rotates tails into the upper half plane. ``lift`` moves
    the finite window off the real axis to ``Im ξ = sigma*lift``.
    """

    window: float
    sigma: int
    lift: float = 0.0


def contour_plan(x: float, t: float, alpha: float, gamma: float, *, allow_lift: bool = True) -> ContourPlan:
    """Choose a deformation of the real axis that keeps the integrand bounded."""
    at = alpha * t
    sigma = 1 if (x > 0 or (x == 0 and at >= 0)) else -1
    window = 2.0 / math.sqrt(gamma)
    same_side = sigma * at >= 0
    if not same_side:
        # |exp(-i β t)| on the rays is at most exp(|α t| / (2 γ M))
        window = max(window, 2.0 * abs(at) / gamma)
    lift = 0.0
    if allow_lift and same_side and x != 0:
        cmax = 0.5 / math.sqrt(gamma)
        c = np.linspace(0.0, cmax, 65)
        growth = c * (abs(at) / (1.0 - gamma * c * c) - abs(x))
        best = int(np.argmin(growth))
        if growth[best] < 0:
            lift = float(c[best])
    return ContourPlan(window=window, sigma=sigma, lift=lift)


def ray_integral(
    func: Callable[[np.ndarray], np.ndarray],
    start: complex,
    sigma: int,
    *,
    oscillation: float,
    decay: float,
    quad: QuadratureConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate along ``start + i σ s`` for ``s`` from 0 to infinity.

    Uses ``s = R tan φ`` with ``R = |Re start|`` so the half-infinite ray
    becomes ``φ ∈ [0, π/2)``.

    Parameters
    ----------
    oscillation : float
        Estimate of the total phase change along the ray.
    decay : float
        Exponential decay rate in ``s`` (used to cluster initial panels).
    """
    R = abs(start.real)
    if R == 0:
        raise ConfigurationError("ray must start away from the imaginary axis")

    def mapped(phi):
        tan = np.tan(phi)
        z = start + 1j * sigma * R * tan
        jac = 1j * sigma * R / np.cos(phi) ** 2
        return func(z) * jac

    n0 = max(4, int(math.ceil(oscillation / QUARTER_TURN)))
    edges = [np.linspace(0.0, QUARTER_TURN, n0 + 1)]
    if decay * R > 1.0:
        s_scale = 1.0 / decay
        edges.append(np.arctan(s_scale * 2.0 ** np.arange(-3, 7) / R))
    edges = np.unique(np.concatenate(edges))
    return gk_integrate(
        mapped, edges, rel_tol=quad.rel_tol, max_depth=quad.max_panel_depth,
        min_width=quad.min_panel_width,
    )


def line_integral(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    x_rate: float,
    t: float,
    alpha: float,
    gamma: float,
    quad: QuadratureConfig,
    lift: complex = 0.0,
    graded: Iterable[float] = (),
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate along the horizontal segment from ``a + lift`` to ``b + lift``."""
    edges = phase_edges(
        a, b, x_rate=x_rate, t=t, alpha=alpha, gamma=gamma,
        breakpoints=canonical_breaks(gamma), graded=graded,
        grading_depth=min(quad.max_panel_depth, 12),
    )
    if lift == 0:
        integrand = func
    else:
        def integrand(s):
            return func(s + lift)
    return gk_integrate(
        integrand, edges, rel_tol=quad.rel_tol, max_depth=quad.max_panel_depth,
        min_width=quad.min_panel_width,
    )


# ---------------------------------------------------------------------------
# The kernel integral


def _phi_integrand(pd: PhaseDescriptor):
    x, t, alpha, gamma = pd.x, pd.t, pd.alpha, pd.gamma

    def f(xi):
        return np.exp(1j * (x * xi - beta(xi, alpha, gamma) * t)) / (1.0 + gamma * xi * xi)

    return f


class _PathIntegrator:
    """Exact real-line pieces of ``∫ exp(iθ) A dξ`` via contour deformation."""

    def __init__(self, func, pd: PhaseDescriptor, quad: QuadratureConfig, allow_lift: bool = True):
        self.func = func
        self.pd = pd
        self.quad = quad
        self.plan = contour_plan(pd.x, pd.t, pd.alpha, pd.gamma, allow_lift=allow_lift)
        self.graded = stationary_points(pd.x, pd.t, pd.alpha, pd.gamma)
        self.error = 0.0

    def _ray(self, start: complex) -> complex:
        pd = self.pd
        osc = abs(pd.t * beta(start.real, pd.alpha, pd.gamma)) + 1.0
        val, err = ray_integral(self.func, start, self.plan.sigma, oscillation=osc,
                                decay=abs(pd.x), quad=self.quad)
        self.error += float(err[0])
        return complex(val[0])

    def _real(self, a: float, b: float, lift: float = 0.0) -> complex:
        pd = self.pd
        val, err = line_integral(
            self.func, a, b, x_rate=abs(pd.x), t=pd.t, alpha=pd.alpha, gamma=pd.gamma,
            quad=self.quad, lift=1j * self.plan.sigma * lift, graded=self.graded,
        )
        self.error += float(err[0])
        return complex(val[0])

    def right_tail(self, c: float) -> complex:
        """``∫_c^∞`` along the real axis, for ``c ≥ window``."""
        return self._ray(complex(c))

    def left_tail(self, c: float) -> complex:
        """``∫_{-∞}^c`` along the real axis, for ``c ≤ -window``."""
        return -self._ray(complex(c))

    def full(self) -> complex:
        w, c, sig = self.plan.window, self.plan.lift, self.plan.sigma
        mid = self._real(-w, w, lift=c)
        return mid + self._ray(complex(w, sig * c)) - self._ray(complex(-w, sig * c))

    def segment(self, a: float, b: float) -> complex:
        """``∫_a^b`` on the real axis for any finite ``a ≤ b``."""
        if b <= a:
            return 0.0j
        w = self.plan.window
        total = 0.0j
        lo, hi = max(a, -w), min(b, w)
        if hi > lo:
            total += self._real(lo, hi)
        if b > w:
            start = max(a, w)
            total += self.right_tail(start) - self.right_tail(b)
        if a < -w:
            end = min(b, -w)
            total += self.left_tail(end) - self.left_tail(a)
        return total


def integrate_phi_raw(pd: PhaseDescriptor, quad: QuadratureConfig | None = None) -> PhiIntegral:
    """Raw kernel integral ``∫ exp(i x ξ - i β t) / (1 + γ ξ²) dξ``.

    The result records the integral over ``[-M, M]`` (``truncated``), the
    remainder beyond ``±M`` (``tail``, zero in ``"truncate"`` mode) and the
    certified bound on that remainder.
    """
    quad = quad or QuadratureConfig()
    M = quad.truncation(pd.gamma)
    path = _PathIntegrator(_phi_integrand(pd), pd, quad)
    bound = tail_integral_bound(M, pd.gamma)
    if quad.tail == "truncate":
        trunc = path._real(-M, M)
        return PhiIntegral(trunc, trunc, 0.0j, bound, path.error, M)
    value = path.full()
    if M <= path.plan.window:
        trunc = path._real(-M, M)
        tail = value - trunc
    else:
        tail = path.right_tail(M) + path.left_tail(-M)
        trunc = value - tail
    return PhiIntegral(value, trunc, tail, bound, path.error, M)


def integrate_segment(
    pd: PhaseDescriptor, a: float, b: float, quad: QuadratureConfig | None = None
) -> complex:
    """Raw kernel integrand integrated over the real segment ``[a, b]``."""
    quad = quad or QuadratureConfig()
    M = quad.truncation(pd.gamma)
    if a < -M * (1 + 1e-12) or b > M * (1 + 1e-12):
        raise ConfigurationError("segment must lie inside [-M, M]")
    if b <= a:
        return 0.0j
    path = _PathIntegrator(_phi_integrand(pd), pd, quad, allow_lift=False)
    return path.segment(a, b)


def canonical_segments(gamma: float, M: float) -> dict[str, tuple[float, float]]:
    """The four pieces of ``[-M, M]`` split at ``-1/√γ``, 0 and ``1/√γ``."""
    s = 1.0 / math.sqrt(gamma)
    return {"I1": (-M, -s), "I2": (-s, 0.0), "I3": (0.0, s), "I4": (s, M)}
