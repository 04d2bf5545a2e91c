"""Hot numeric kernels: cavity mode functions, plasmon root solvers, Lifshitz integrand.

Every batch kernel exists twice: a numba version (scalar Brent iterations in
a compiled loop) and a pure-numpy version (vectorized bisection over the whole
batch).  The public dispatchers follow the module flag ``USE_NUMBA``, which
is seeded from :data:`casmodes._backend.USE_NUMBA`.

The mode functions are the cavity condition ``r_TM**2 exp(2 i kz L) = 1``
(resp. TE) factored into its symmetric (``plus``) and antisymmetric
(``minus``) parts and multiplied by non-vanishing factors so that they are
real, pole-free and continuous through the light line::

    evanescent (kappa = sqrt(k^2 - w^2)), scaled by 1/cosh(kappa L/2):
        g_plus  = eps + kappa_m tanh(kappa L/2)/kappa
        g_minus = eps kappa tanh(kappa L/2) + kappa_m
    propagating (q = sqrt(w^2 - k^2)):
        g_plus  = eps cos(qL/2) + kappa_m sin(qL/2)/q
        g_minus = -eps q sin(qL/2) + kappa_m cos(qL/2)
        h_plus  = cos(qL/2) + kappa_m sin(qL/2)/q          (TE)
        h_minus = -q sin(qL/2) + kappa_m cos(qL/2)         (TE)

with ``kappa_m = sqrt(k^2 + wp^2 - w^2)``.  The upper plasmon is the lowest
zero of ``g_plus``, the lower plasmon the (single) zero of ``g_minus`` below
the light line.
"""
import math

import numpy as np

from ._backend import USE_NUMBA, jit

GP_EVAN, GM_EVAN, GP_PROP, GM_PROP, HP_PROP, HM_PROP = range(6)

_SMALL = 1e-4
_EPS = 2.220446049250313e-16


# ---------------------------------------------------------------------------
# scalar kernels (compiled)


@jit
def omega_sp(k, wp):
    """Single-interface surface plasmon frequency, cancellation-free form."""
    wp2 = wp * wp
    return math.sqrt(0.5 * (wp2 - wp2 * wp2 / (2.0 * k * k + math.sqrt(wp2 * wp2 + 4.0 * k**4))))


@jit
def _tanhc(kappa, L):
    x = 0.5 * kappa * L
    if x < _SMALL:
        return 0.5 * L * (1.0 - x * x / 3.0)
    return math.tanh(x) / kappa


@jit
def _sinc_half(q, L):
    x = 0.5 * q * L
    if x < _SMALL:
        return 0.5 * L * (1.0 - x * x / 6.0)
    return math.sin(x) / q


@jit
def mode_value(code, x, k, L, wp):
    """Mode function ``code`` at ``x`` (x = w in evanescent forms, q in propagating)."""
    wp2 = wp * wp
    if code == GP_EVAN or code == GM_EVAN:
        kap2 = (k - x) * (k + x)
        kap = math.sqrt(kap2) if kap2 > 0.0 else 0.0
        kapm = math.sqrt(kap2 + wp2)
        eps = 1.0 - wp2 / (x * x)
        if code == GP_EVAN:
            return eps + kapm * _tanhc(kap, L)
        return eps * kap * math.tanh(0.5 * kap * L) + kapm
    q = x
    kapm2 = wp2 - q * q
    kapm = math.sqrt(kapm2) if kapm2 > 0.0 else 0.0
    c = math.cos(0.5 * q * L)
    if code == HP_PROP:
        return c + kapm * _sinc_half(q, L)
    if code == HM_PROP:
        return -q * math.sin(0.5 * q * L) + kapm * c
    eps = 1.0 - wp2 / (k * k + q * q)
    if code == GP_PROP:
        return eps * c + kapm * _sinc_half(q, L)
    return -eps * q * math.sin(0.5 * q * L) + kapm * c


@jit
def brent(code, a, b, k, L, wp, xtol, maxiter):
    """Brent root of ``mode_value(code, ., k, L, wp)`` on a sign-changing bracket."""
    fa = mode_value(code, a, k, L, wp)
    fb = mode_value(code, b, k, L, wp)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        return math.nan
    c = a
    fc = fa
    d = b - a
    e = d
    for _ in range(maxiter):
        if (fb > 0.0) == (fc > 0.0):
            c = a
            fc = fa
            d = b - a
            e = d
        if abs(fc) < abs(fb):
            a = b
            b = c
            c = a
            fa = fb
            fb = fc
            fc = fa
        tol = 2.0 * _EPS * abs(b) + 0.5 * xtol
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            return b
        if abs(e) >= tol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                qq = 1.0 - s
            else:
                qq = fa / fc
                r = fb / fc
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0))
                qq = (qq - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                qq = -qq
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * qq - abs(tol * qq), abs(e * qq)):
                e = d
                d = p / qq
            else:
                d = m
                e = m
        else:
            d = m
            e = m
        a = b
        fa = fb
        if abs(d) > tol:
            b += d
        else:
            b += tol if m > 0.0 else -tol
        fb = mode_value(code, b, k, L, wp)
    return b


@jit
def _lower_bracket(code, k, L, wp):
    """Largest w = k/2**n with mode function negative (w -> 0 limit is -inf)."""
    w = 0.5 * k
    for _ in range(1100):
        if mode_value(code, w, k, L, wp) < 0.0:
            return w
        w *= 0.5
    return w


@jit
def omega_minus(k, L, wp, xtol):
    lo = _lower_bracket(GM_EVAN, k, L, wp)
    return brent(GM_EVAN, lo, k, k, L, wp, xtol, 300)


@jit
def omega_plus(k, L, wp, xtol):
    """Upper plasmon frequency and whether it lies above the light line."""
    g0 = 1.0 - wp * wp / (k * k) + 0.5 * wp * L
    if g0 == 0.0:
        return k, True
    nscan = 16
    if g0 > 0.0:
        lo = _lower_bracket(GP_EVAN, k, L, wp)
        a = lo
        for i in range(1, nscan + 1):
            b = lo + (k - lo) * i / nscan
            if mode_value(GP_EVAN, b, k, L, wp) > 0.0:
                return brent(GP_EVAN, a, b, k, L, wp, xtol, 300), False
            a = b
        return math.nan, False
    qhi = min(math.pi / L, wp)
    a = 0.0
    for i in range(1, nscan + 1):
        b = qhi * i / nscan
        if mode_value(GP_PROP, b, k, L, wp) > 0.0:
            q = brent(GP_PROP, a, b, k, L, wp, xtol * 1e-2, 300)
            return math.sqrt(k * k + q * q), True
        a = b
    return math.nan, True


@jit
def _plasmon_batch_jit(ks, L, wp, xtol):
    n = ks.size
    wplus = np.empty(n)
    wminus = np.empty(n)
    above = np.empty(n, dtype=np.bool_)
    for i in range(n):
        k = ks[i]
        wminus[i] = omega_minus(k, L, wp, xtol)
        wplus[i], above[i] = omega_plus(k, L, wp, xtol)
    return wplus, wminus, above


@jit
def _photonic_roots_jit(code, k, L, wp, dq, xtol):
    """All sign changes of a propagating mode function on (0, wp), refined."""
    n = max(64, int(math.ceil(wp / dq)))
    out = np.empty(n)
    m = 0
    a = 0.0
    fa = mode_value(code, a, k, L, wp)
    for i in range(1, n + 1):
        b = wp * i / n
        fb = mode_value(code, b, k, L, wp)
        if fa != 0.0 and ((fa > 0.0) != (fb > 0.0) or fb == 0.0):
            out[m] = brent(code, a, b, k, L, wp, xtol, 300)
            m += 1
        a = b
        fa = fb
    return out[:m]


# ---------------------------------------------------------------------------
# numpy twins (vectorized over the batch)


def omega_sp_np(k, wp):
    k = np.asarray(k, dtype=float)
    wp2 = wp * wp
    return np.sqrt(0.5 * (wp2 - wp2 * wp2 / (2.0 * k * k + np.sqrt(wp2 * wp2 + 4.0 * k**4))))


def _tanhc_np(kappa, L):
    x = 0.5 * kappa * L
    small = x < _SMALL
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.tanh(x) / kappa
    return np.where(small, 0.5 * L * (1.0 - x * x / 3.0), big)


def _sinc_half_np(q, L):
    x = 0.5 * q * L
    small = x < _SMALL
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.sin(x) / q
    return np.where(small, 0.5 * L * (1.0 - x * x / 6.0), big)


def mode_value_np(code, x, k, L, wp):
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    wp2 = wp * wp
    if code in (GP_EVAN, GM_EVAN):
        kap = np.sqrt(np.maximum((k - x) * (k + x), 0.0))
        kapm = np.sqrt(kap * kap + wp2)
        with np.errstate(divide="ignore"):
            eps = 1.0 - wp2 / (x * x)
        if code == GP_EVAN:
            return eps + kapm * _tanhc_np(kap, L)
        return eps * kap * np.tanh(0.5 * kap * L) + kapm
    q = x
    kapm = np.sqrt(np.maximum(wp2 - q * q, 0.0))
    c = np.cos(0.5 * q * L)
    if code == HP_PROP:
        return c + kapm * _sinc_half_np(q, L)
    if code == HM_PROP:
        return -q * np.sin(0.5 * q * L) + kapm * c
    eps = 1.0 - wp2 / (k * k + q * q)
    if code == GP_PROP:
        return eps * c + kapm * _sinc_half_np(q, L)
    return -eps * q * np.sin(0.5 * q * L) + kapm * c


def bisect_np(code, lo, hi, k, L, wp, xtol, maxiter=200):
    """Vectorized bisection; ``mode_value(lo) < 0 < mode_value(hi)`` is not required,
    only opposite signs."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    flo = mode_value_np(code, lo, k, L, wp)
    for _ in range(maxiter):
        width = hi - lo
        if np.all(width <= 2.0 * _EPS * np.abs(hi) + xtol):
            break
        mid = lo + 0.5 * width
        fm = mode_value_np(code, mid, k, L, wp)
        same = (fm > 0.0) == (flo > 0.0)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _lower_bracket_np(code, k, L, wp):
    w = 0.5 * k
    for _ in range(1100):
        bad = mode_value_np(code, w, k, L, wp) >= 0.0
        if not np.any(bad):
            break
        w = np.where(bad, 0.5 * w, w)
    return w


def _plasmon_batch_np(ks, L, wp, xtol):
    ks = np.asarray(ks, dtype=float)
    lo = _lower_bracket_np(GM_EVAN, ks, L, wp)
    wminus = bisect_np(GM_EVAN, lo, ks, ks, L, wp, xtol)

    wplus = np.full(ks.shape, np.nan)
    g0 = 1.0 - wp * wp / (ks * ks) + 0.5 * wp * L
    above = g0 <= 0.0
    nscan = 16
    steps = np.arange(1, nscan + 1) / nscan

    ev = ~above
    if np.any(ev):
        k_e = ks[ev]
        lo = _lower_bracket_np(GP_EVAN, k_e, L, wp)
        grid = lo[:, None] + (k_e - lo)[:, None] * steps[None, :]
        vals = mode_value_np(GP_EVAN, grid, k_e[:, None], L, wp)
        first = np.argmax(vals > 0.0, axis=1)
        b = grid[np.arange(k_e.size), first]
        a = np.where(first == 0, lo, grid[np.arange(k_e.size), first - 1])
        wplus[ev] = bisect_np(GP_EVAN, a, b, k_e, L, wp, xtol)

    if np.any(above):
        k_p = ks[above]
        qhi = min(math.pi / L, wp)
        grid = np.broadcast_to(qhi * steps, (k_p.size, nscan))
        vals = mode_value_np(GP_PROP, grid, k_p[:, None], L, wp)
        first = np.argmax(vals > 0.0, axis=1)
        b = grid[np.arange(k_p.size), first]
        a = np.where(first == 0, 0.0, grid[np.arange(k_p.size), first - 1])
        q = bisect_np(GP_PROP, a, b, k_p, L, wp, xtol * 1e-2)
        wplus[above] = np.sqrt(k_p * k_p + q * q)
        wplus[above & (g0 == 0.0)] = ks[above & (g0 == 0.0)]
    return wplus, wminus, above


def _photonic_roots_np(code, k, L, wp, dq, xtol):
    n = max(64, int(math.ceil(wp / dq)))
    grid = wp * np.arange(0, n + 1) / n
    vals = mode_value_np(code, grid, k, L, wp)
    fa, fb = vals[:-1], vals[1:]
    idx = np.nonzero((fa != 0.0) & (((fa > 0.0) != (fb > 0.0)) | (fb == 0.0)))[0]
    if idx.size == 0:
        return np.empty(0)
    return bisect_np(code, grid[idx], grid[idx + 1], k, L, wp, xtol)


# ---------------------------------------------------------------------------
# Lifshitz integrand (same source compiles under numba and runs under numpy)


def _lifshitz_log_src(xi, kappa, L, wp):
    """Sum over TE, TM of ``log(1 - r(i xi, k)^2 exp(-2 kappa L))`` at ``kappa = hypot(k, xi)``."""
    wp2 = wp * wp
    kappa_m = np.sqrt(kappa * kappa + wp2)
    e = np.exp(-2.0 * kappa * L)
    r_te = -wp2 / (kappa + kappa_m) ** 2
    xi2 = xi * xi
    r_tm = wp2 * (kappa - xi2 / (kappa + kappa_m)) / ((xi2 + wp2) * kappa + xi2 * kappa_m)
    return np.log1p(-r_te * r_te * e) + np.log1p(-r_tm * r_tm * e)


lifshitz_log_np = _lifshitz_log_src
_lifshitz_log_jit = jit(_lifshitz_log_src)


# ---------------------------------------------------------------------------
# dispatchers

XTOL = 1e-16


def plasmon_batch(ks, L, wp=1.0, xtol=XTOL, use_numba=None):
    """Upper/lower plasmon frequencies for an array of transverse wavevectors.

    Returns ``(w_plus, w_minus, plus_above_light_line)``.
    """
    ks = np.ascontiguousarray(ks, dtype=float)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _plasmon_batch_jit(ks, float(L), float(wp), float(xtol))
    return _plasmon_batch_np(ks, float(L), float(wp), float(xtol))


def photonic_roots(code, k, L, wp=1.0, dq=None, xtol=XTOL, use_numba=None):
    """Sorted ``q`` values of all zeros of a propagating mode function on (0, wp)."""
    if dq is None:
        dq = math.pi / (64.0 * L)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _photonic_roots_jit(code, float(k), float(L), float(wp), float(dq), float(xtol))
    return _photonic_roots_np(code, float(k), float(L), float(wp), float(dq), float(xtol))


def lifshitz_log(xi, kappa, L, wp=1.0, use_numba=None):
    if use_numba is None:
        use_numba = USE_NUMBA
    xi = np.asarray(xi, dtype=float)
    if use_numba:
        return _lifshitz_log_jit(xi, np.broadcast_to(np.asarray(kappa, dtype=float), xi.shape).copy(), float(L), float(wp))
    return lifshitz_log_np(xi, kappa, L, wp)
