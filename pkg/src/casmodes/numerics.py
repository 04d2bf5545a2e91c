"""Bracketed root finding, adaptive quadrature, branch continuation, power-law fits."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    AccuracyError,
    BranchLostError,
    ConvergenceError,
    DomainError,
    NoBracketError,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RootConfig:
    abs_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy contract of :func:`integrate_adaptive`.

    ``tail_cutoff_decades`` is the number of consecutive geometrically growing
    tail panels that must each fall below the tolerance before a semi-infinite
    integral is truncated.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_subdivisions: int = 10_000
    tail_cutoff_decades: int = 3

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 1 or self.tail_cutoff_decades < 1:
            raise DomainError("max_subdivisions and tail_cutoff_decades must be positive")

    def tightened(self, factor: float = 0.5) -> "QuadratureConfig":
        return QuadratureConfig(
            self.rel_tol * factor, self.abs_tol * factor, self.max_subdivisions, self.tail_cutoff_decades
        )


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    subdivisions: int = 0


@dataclass(frozen=True)
class FitResult:
    exponent: float
    prefactor: float
    residual: float
    window: tuple[float, float]
    offset: float = 0.0

    def __call__(self, x):
        return self.prefactor * np.asarray(x, dtype=float) ** self.exponent + self.offset


# ---------------------------------------------------------------------------
# root finding


def find_root_bracketed(f: Callable[[float], float], lo: float, hi: float, cfg: RootConfig | None = None) -> float:
    """Brent's method: inverse quadratic / secant steps with bisection fallback.

    Returns a point inside ``[lo, hi]`` whose final bracket is narrower than
    ``cfg.abs_tol`` (plus a few ulps of the root).
    """
    cfg = cfg or RootConfig()
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if not (math.isfinite(fa) and math.isfinite(fb)) or (fa > 0) == (fb > 0):
        raise NoBracketError(f"no sign change on [{a!r}, {b!r}]: f = {fa!r}, {fb!r}")

    c, fc = a, fa
    d = e = b - a
    for _ in range(cfg.max_iter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * _EPS * abs(b) + 0.5 * cfg.abs_tol
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            return b
        if abs(e) >= tol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol else math.copysign(tol, m)
        fb = f(b)
    raise ConvergenceError(f"Brent iteration did not converge in {cfg.max_iter} steps", best=b)


# ---------------------------------------------------------------------------
# quadrature

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21)
_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525434550, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # ascending, 21 nodes
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(21)
G_WEIGHTS[1:10:2] = _WG
G_WEIGHTS[11:20:2] = _WG[::-1]


def gauss_kronrod(f, a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod (10, 21) panel; ``f`` is evaluated on an array of nodes."""
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * GK_NODES
    y = np.asarray(f(x), dtype=float)
    k = half * float(y @ GK_WEIGHTS)
    g = half * float(y @ G_WEIGHTS)
    err = abs(k - g)
    if not math.isfinite(k):
        raise AccuracyError(f"non-finite integrand on [{a!r}, {b!r}]", value=k, error=math.inf)
    # error below roundoff of the panel itself is meaningless
    roundoff = 50.0 * _EPS * half * float(np.abs(y) @ GK_WEIGHTS)
    return k, max(err, roundoff)


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    cfg: QuadratureConfig | None = None,
    *,
    breakpoints: Sequence[float] = (),
    scale: float | None = None,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod quadrature.

    ``f`` must accept a 1-D array of abscissae.  ``hi`` may be ``math.inf``:
    the half line is then covered by panels of geometrically growing width
    (first width ``scale``, doubling) until ``cfg.tail_cutoff_decades``
    consecutive panels each contribute less than the tolerance; the last
    panel's magnitude is added to the error as a truncation estimate.
    Panel bisection order is by error and fully deterministic.
    """
    cfg = cfg or QuadratureConfig()
    lo = float(lo)
    points = sorted({float(p) for p in breakpoints if lo < p < hi})

    panels: list[tuple[float, float, float, float]] = []

    def add(a, b):
        v, e = gauss_kronrod(f, a, b)
        panels.append((a, b, v, e))
        return v, e

    edges = [lo, *points]
    if math.isinf(hi):
        for a, b in zip(edges[:-1], edges[1:]):
            add(a, b)
        width = scale if scale is not None else max(1.0, abs(edges[-1]))
        a = edges[-1]
        quiet = 0
        tail = 0.0
        total = sum(p[2] for p in panels)
        while quiet < cfg.tail_cutoff_decades:
            b = a + width
            v, e = _adaptive_panel(f, a, b, cfg, abs(total))
            panels.append((a, b, v, e))
            total += v
            if abs(v) + e <= max(cfg.abs_tol, cfg.rel_tol * abs(total)):
                quiet += 1
            else:
                quiet = 0
            tail = abs(v)
            a, width = b, 2.0 * width
            if len(panels) > cfg.max_subdivisions:
                raise AccuracyError("semi-infinite tail did not decay", value=total, error=math.inf)
            if not math.isfinite(b):
                raise AccuracyError("semi-infinite tail did not decay", value=total, error=math.inf)
        truncation = tail
    else:
        edges.append(float(hi))
        for a, b in zip(edges[:-1], edges[1:]):
            add(a, b)
        truncation = 0.0

    value, error, n = _refine(f, panels, cfg, truncation)
    return QuadResult(value, error, n)


def _adaptive_panel(f, a, b, cfg, running):
    """Integrate one tail panel to the tolerance of the running total."""
    v, e = gauss_kronrod(f, a, b)
    floor = max(cfg.abs_tol, cfg.rel_tol * running)
    if e <= max(floor, cfg.rel_tol * abs(v)):
        return v, e
    res, err, _ = _refine(f, [(a, b, v, e)], cfg, 0.0, floor)
    return res, err


def _refine(f, panels, cfg, truncation, floor=0.0):
    # heap keyed on (-error, a) so ties resolve by position: deterministic order
    heap = [(-e, a, b, v) for a, b, v, e in panels]
    heapq.heapify(heap)
    value = math.fsum(item[3] for item in heap)
    error = sum(-item[0] for item in heap) + truncation
    n = 0
    while error > max(cfg.abs_tol, floor, cfg.rel_tol * abs(value)):
        if n >= cfg.max_subdivisions:
            raise AccuracyError(
                f"max_subdivisions={cfg.max_subdivisions} reached (value={value!r}, error={error!r})",
                value=value,
                error=error,
            )
        neg_e, a, b, v = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not (a < m < b):
            # interval exhausted at machine precision: keep it as is
            heapq.heappush(heap, (0.0, a, b, v))
            error += neg_e
            if all(item[0] == 0.0 for item in heap):
                break
            continue
        v1, e1 = gauss_kronrod(f, a, m)
        v2, e2 = gauss_kronrod(f, m, b)
        heapq.heappush(heap, (-e1, a, m, v1))
        heapq.heappush(heap, (-e2, m, b, v2))
        n += 1
        value = math.fsum(item[3] for item in heap) if n % 64 == 0 else value - v + v1 + v2
        error = error + neg_e + e1 + e2
    value = math.fsum(item[3] for item in heap)
    error = sum(-item[0] for item in heap) + truncation
    return value, error, n


# ---------------------------------------------------------------------------
# continuation


@dataclass
class RootProblem:
    """Parametrized scalar root problem ``f(x, p) = 0`` on ``domain(p) = (lo, hi)``."""

    f: Callable[[float, float], float]
    domain: Callable[[float], tuple[float, float]]
    root_cfg: RootConfig = field(default_factory=RootConfig)


@dataclass
class ContinuationResult:
    params: list[float]
    roots: list[float]
    completed: bool = True
    lost_at: float | None = None


def _bracket_near(g, x0, lo, hi, h0):
    """Closest sign change of ``g`` around ``x0`` within ``[lo, hi]``, or None."""
    g0 = g(x0)
    if g0 == 0.0:
        return x0, x0
    h = h0
    left, right = x0, x0
    gl = gr = g0
    while True:
        moved = False
        if right < hi:
            nr = min(x0 + h, hi)
            gn = g(nr)
            if (gn > 0) != (gr > 0) or gn == 0.0:
                return right, nr
            right, gr = nr, gn
            moved = True
        if left > lo:
            nl = max(x0 - h, lo)
            gn = g(nl)
            if (gn > 0) != (gl > 0) or gn == 0.0:
                return nl, left
            left, gl = nl, gn
            moved = True
        if not moved:
            return None
        h *= 2.0


def continue_branch(
    problem: RootProblem,
    start_param: float,
    start_root: float,
    schedule: Sequence[float],
    *,
    step_floor: float = 1e-6,
    seed_window: float = 1e-3,
    edge_tol: float = 1e-6,
) -> ContinuationResult:
    """Track a root of ``problem`` along ``schedule`` (natural-parameter continuation).

    The previous root seeds a bracket search in a window that grows from
    ``seed_window`` times the domain width.  If no bracket exists the parameter
    step is halved, down to ``step_floor`` times the scheduled step.  If the
    floor is reached with the last root within ``edge_tol`` (relative) of a
    domain end, the branch is considered to have left the domain and the
    result is flagged ``completed=False``; otherwise :class:`BranchLostError`
    is raised.
    """
    cfg = problem.root_cfg
    p_cur, x_cur = float(start_param), float(start_root)
    lo, hi = problem.domain(p_cur)
    if abs(problem.f(x_cur, p_cur)) > 1e-6 * (1.0 + abs(x_cur)):
        # tolerate a loose seed but polish it
        br = _bracket_near(lambda x: problem.f(x, p_cur), x_cur, lo, hi, seed_window * (hi - lo))
        if br is None:
            raise BranchLostError("start_root does not solve the problem", start_param, start_root)
        x_cur = find_root_bracketed(lambda x: problem.f(x, p_cur), *br, cfg)

    params, roots = [], []
    for target in schedule:
        target = float(target)
        full = target - p_cur
        step = full
        while p_cur != target:
            p_new = target if abs(step) >= abs(target - p_cur) else p_cur + step
            lo, hi = problem.domain(p_new)
            g = lambda x, p=p_new: problem.f(x, p)  # noqa: E731
            seed = min(max(x_cur, lo), hi)
            br = _bracket_near(g, seed, lo, hi, seed_window * (hi - lo))
            if br is not None and br[0] == br[1]:
                x_new = br[0]
            elif br is not None:
                x_new = find_root_bracketed(g, br[0], br[1], cfg)
            else:
                x_new = None
            if x_new is not None and abs(x_new - x_cur) <= 0.25 * (hi - lo):
                p_cur, x_cur = p_new, x_new
                step = target - p_cur if p_cur != target else step
                continue
            step *= 0.5
            if full == 0 or abs(step) < step_floor * abs(full):
                width = hi - lo
                near_edge = min(x_cur - lo, hi - x_cur) <= edge_tol * max(width, 1.0) + 10 * cfg.abs_tol
                if near_edge or br is None:
                    return ContinuationResult(params, roots, completed=False, lost_at=p_cur)
                raise BranchLostError(f"lost branch near p={p_cur!r}", p_cur, x_cur)
        params.append(p_cur)
        roots.append(x_cur)
    return ContinuationResult(params, roots)


# ---------------------------------------------------------------------------
# fits


def fit_power_law(
    x,
    y,
    *,
    exponent: float | None = None,
    offset: float = 0.0,
    fit_offset: bool = False,
) -> FitResult:
    """Least-squares power law ``y = a * x**b + c``.

    * ``exponent=None``: ``a`` and ``b`` from a log-log linear regression of
      ``y - offset``.
    * fixed ``exponent``: only ``a`` is fitted (in log space).
    * ``fit_offset=True`` (fixed exponent required): ``a`` and ``c`` from a
      linear least-squares fit in the variable ``x**b``.

    ``residual`` is the RMS of the log-space residuals ``log|y - c| - log|a x^b|``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-D arrays of equal length")
    if x.size < 4:
        raise DomainError("a power-law fit needs at least 4 points")
    if np.any(x <= 0):
        raise DomainError("x must be positive")
    window = (float(x.min()), float(x.max()))

    if fit_offset:
        if exponent is None:
            raise DomainError("fit_offset requires a fixed exponent")
        design = np.column_stack([x**exponent, np.ones_like(x)])
        (a, c), *_ = np.linalg.lstsq(design, y, rcond=None)
        offset = float(c)
        b = float(exponent)
        shifted = y - offset
        if np.any(shifted == 0) or not (np.all(shifted > 0) or np.all(shifted < 0)):
            raise DomainError("y - offset changes sign; not a power law")
        resid = np.log(np.abs(shifted)) - np.log(np.abs(a) * x**b)
        return FitResult(b, float(a), float(np.sqrt(np.mean(resid**2))), window, offset)

    shifted = y - offset
    if np.any(shifted == 0) or not (np.all(shifted > 0) or np.all(shifted < 0)):
        raise DomainError("y - offset changes sign; not a power law")
    sign = 1.0 if shifted[0] > 0 else -1.0
    ly = np.log(sign * shifted)
    lx = np.log(x)
    if exponent is None:
        b, la = np.polyfit(lx, ly, 1)
    else:
        b = float(exponent)
        la = float(np.mean(ly - b * lx))
    resid = ly - (la + b * lx)
    return FitResult(float(b), float(sign * math.exp(la)), float(np.sqrt(np.mean(resid**2))), window, float(offset))
