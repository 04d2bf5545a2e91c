"""Casimir energy between plasma mirrors and its plasmonic/photonic split.

All energies are per unit area.  Reduction factors are ratios to the ideal
(perfect-mirror) value ``-pi**2 / (720 L**3)``.

* total: Lifshitz formula along imaginary frequencies, written in the polar
  variables ``kappa = hypot(k, xi)`` and ``xi``;
* plasmonic: ``(1/4pi) int k dk [w+ + w- - 2 w_sp]`` from the solved branches;
* photonic: total minus plasmonic, with an independent real-frequency
  evaluation (phase of ``1 - r**2 exp(2i kz L)``) as cross-check.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BranchLostError, CasmodesError, NoBracketError
from .modes import light_line_crossing
from .numerics import (
    FitResult,
    QuadratureConfig,
    RootConfig,
    find_root_bracketed,
    fit_power_law,
    integrate_adaptive,
)
from .optics import MirrorModel

ALPHA_REF = 1.193
BETA_REF = 74.58


@dataclass(frozen=True)
class IdealCasimir:
    """Perfect-mirror energy per area, ``-pi**2/(720 L**3)`` (hbar = c = 1)."""

    def energy_per_area(self, L: float) -> float:
        if L <= 0:
            raise ValueError("L must be positive")
        return -math.pi**2 / (720.0 * L**3)


def ideal_energy(L: float) -> float:
    return IdealCasimir().energy_per_area(L)


@dataclass(frozen=True)
class EnergyResult:
    energy_per_area: float
    error: float


@dataclass(frozen=True)
class PlasmonicEnergy:
    energy_per_area: float
    plus_part: float
    minus_part: float
    error: float


@dataclass
class EnergyBreakdown:
    """Reduction factors at one distance.  ``failure`` is set when the point failed."""

    L_over_lambda_p: float
    eta_total: float
    eta_pl: float
    eta_pl_plus: float
    eta_pl_minus: float
    eta_ph: float
    err_total: float
    err_pl: float
    failure: str | None = field(default=None, compare=False)

    @classmethod
    def failed(cls, x: float, reason: str) -> "EnergyBreakdown":
        nan = math.nan
        return cls(x, nan, nan, nan, nan, nan, nan, nan, failure=reason)

    @property
    def ok(self) -> bool:
        return self.failure is None


def _k_breakpoints(model: MirrorModel, L: float, extra=()):
    pts = {model.omega_p, 1.0 / L, 4.0 / L, *extra}
    return sorted(p for p in pts if p > 0 and math.isfinite(p))


# ---------------------------------------------------------------------------
# total energy


def lifshitz_integrand_k(model: MirrorModel, L: float, k: float, cfg: QuadratureConfig | None = None) -> float:
    """``e(k) = (1/2pi) int_0^inf dxi sum_pol log(1 - r**2 exp(-2 kappa L))`` at fixed k."""
    cfg = cfg or QuadratureConfig()
    wp = model.omega_p

    def f(xi):
        return kernels.lifshitz_log(xi, np.hypot(k, xi), L, wp)

    res = integrate_adaptive(f, 0.0, math.inf, cfg, breakpoints=_k_breakpoints(model, L), scale=1.0 / L)
    return res.value / (2.0 * math.pi)


def lifshitz_total(model: MirrorModel, L: float, cfg: QuadratureConfig | None = None) -> EnergyResult:
    """Total energy per area from the imaginary-frequency Lifshitz formula.

    ``E/A = (1/4pi^2) int_0^inf kappa dkappa int_0^kappa dxi F(xi, kappa)``.
    The inner integrals are done to a tenth of the outer tolerance; their
    errors enter as a contribution-weighted relative error (the integrand is
    sign definite, so the weighting is meaningful).
    """
    cfg = cfg or QuadratureConfig()
    if not (L > 0 and math.isfinite(L)):
        raise ValueError("L must be positive and finite")
    wp = model.omega_p
    inner_cfg = QuadratureConfig(
        rel_tol=0.1 * cfg.rel_tol,
        abs_tol=1e-300,
        max_subdivisions=cfg.max_subdivisions,
        tail_cutoff_decades=cfg.tail_cutoff_decades,
    )
    acc = [0.0, 0.0]  # contribution-weighted inner error and magnitude

    def inner(kappa):
        def g(xi):
            return kernels.lifshitz_log(xi, np.full(xi.shape, kappa), L, wp)

        r = integrate_adaptive(g, 0.0, kappa, inner_cfg)
        acc[0] += kappa * r.error
        acc[1] += kappa * abs(r.value)
        return r.value

    # integrate in units of the ideal energy so abs_tol is a reduction-factor tolerance
    unit = abs(ideal_energy(L))
    c = 1.0 / (4.0 * math.pi**2 * unit)

    def outer(kappas):
        return np.array([c * kap * inner(kap) for kap in kappas])

    res = integrate_adaptive(outer, 0.0, math.inf, cfg, breakpoints=_k_breakpoints(model, L), scale=1.0 / L)
    inner_rel = acc[0] / acc[1] if acc[1] > 0 else 0.0
    value = unit * res.value
    error = unit * float(res.error + inner_rel * abs(res.value))
    return EnergyResult(value, error)


# ---------------------------------------------------------------------------
# plasmonic energy


def _plasmon_terms(model, L, ks, split):
    wplus, wminus, _ = kernels.plasmon_batch(ks, L, model.omega_p)
    bad = ~(np.isfinite(wplus) & np.isfinite(wminus))
    if np.any(bad):
        where = ", ".join(f"k={k:.6g}" for k in ks[bad][:5])
        raise BranchLostError(f"plasmon root lost at L={L!r}: {where}", L, math.nan)
    wsp = kernels.omega_sp_np(ks, model.omega_p)
    if split:
        wplus = np.minimum(wplus, ks)
    return wplus - wsp, wminus - wsp


def plasmonic_energy(
    model: MirrorModel,
    L: float,
    cfg: QuadratureConfig | None = None,
    *,
    split_at_light_line: bool = False,
) -> PlasmonicEnergy:
    """Zero-point energy of both plasmon branches minus its large-distance value.

    With ``split_at_light_line`` only the evanescent stretch of the upper
    branch counts as plasmonic: its frequency is capped at ``c k``, the part
    above the light line being left to the photonic share.
    """
    cfg = cfg or QuadratureConfig()
    if not (L > 0 and math.isfinite(L)):
        raise ValueError("L must be positive and finite")
    kc = light_line_crossing(model, L)
    bps = _k_breakpoints(model, L, extra=(kc, math.sqrt(model.omega_p / L)))
    unit = abs(ideal_energy(L))
    c = 1.0 / (4.0 * math.pi * unit)

    def part(idx):
        def f(ks):
            ks = np.asarray(ks, dtype=float)
            out = np.zeros(ks.shape)
            pos = ks > 0
            out[pos] = c * ks[pos] * _plasmon_terms(model, L, ks[pos], split_at_light_line)[idx]
            return out

        return integrate_adaptive(f, 0.0, math.inf, cfg, breakpoints=bps, scale=1.0 / L)

    plus = part(0)
    minus = part(1)
    return PlasmonicEnergy(
        unit * (plus.value + minus.value),
        unit * plus.value,
        unit * minus.value,
        unit * float(plus.error + minus.error),
    )


def photonic_energy(
    model: MirrorModel,
    L: float,
    cfg: QuadratureConfig | None = None,
    *,
    split_at_light_line: bool = False,
) -> EnergyResult:
    """Photonic energy as total minus plasmonic, errors added in quadrature."""
    tot = lifshitz_total(model, L, cfg)
    pl = plasmonic_energy(model, L, cfg, split_at_light_line=split_at_light_line)
    return EnergyResult(tot.energy_per_area - pl.energy_per_area, math.hypot(tot.error, pl.error))


# ---------------------------------------------------------------------------
# real-frequency photonic cross-check


def _theta(pol_te: bool, q, k, L, wp):
    """Round-trip phase ``q L + delta`` below the transparency edge (vectorized)."""
    q = np.asarray(q, dtype=float)
    kapm = np.sqrt(np.maximum(wp * wp - q * q, 0.0))
    if pol_te:
        delta = 2.0 * np.arctan2(q, kapm)
    else:
        eps = 1.0 - wp * wp / (k * k + q * q)
        delta = 2.0 * np.arctan2(kapm, -eps * q)
    return q * L + delta


def _arg_loop_above(pol_te: bool, p, k, L, wp):
    """Principal arg of ``1 - r**2 exp(2i q L)`` above the transparency edge, ``p = sqrt(q^2 - wp^2)``."""
    q = np.sqrt(p * p + wp * wp)
    if pol_te:
        r = (q - p) / (q + p)
    else:
        eps = 1.0 - wp * wp / (k * k + q * q)
        r = (eps * q - p) / (eps * q + p)
    return np.angle(1.0 - r * r * np.exp(2j * q * L))


def photonic_direct_k(model: MirrorModel, L: float, k: float, cfg: QuadratureConfig | None = None,
                      *, split_at_light_line: bool = False) -> float:
    """Photonic part of ``e(k)`` from ``(1/2pi) int_k^inf arg(1 - r^2 e^{2i kz L}) d omega``.

    Below the transparency edge the loop function is ``1 - exp(2i theta)``
    whose argument is ``(theta mod pi) - pi/2``; its jumps sit at the modes,
    which are used as breakpoints.  Above the edge the principal argument is
    continuous (``|r| < 1``) and is integrated to infinity.  Unless the upper
    plasmon is split at the light line, its propagating stretch is removed.
    """
    cfg = cfg or QuadratureConfig(rel_tol=1e-8)
    wp = model.omega_p
    total = 0.0
    for pol_te, codes in ((True, (kernels.HP_PROP, kernels.HM_PROP)), (False, (kernels.GP_PROP, kernels.GM_PROP))):
        roots = np.concatenate([kernels.photonic_roots(c, k, L, wp) for c in codes])
        roots = np.sort(roots[(roots > 0) & (roots < wp)])
        phis = np.arcsin(roots / wp)

        def below(phi, pol_te=pol_te):
            q = wp * np.sin(phi)
            w = np.hypot(k, q)
            th = _theta(pol_te, q, k, L, wp)
            return (np.mod(th, math.pi) - 0.5 * math.pi) * q / w * wp * np.cos(phi)

        r1 = integrate_adaptive(below, 0.0, 0.5 * math.pi, cfg, breakpoints=phis)

        def above(p, pol_te=pol_te):
            w = np.sqrt(k * k + wp * wp + p * p)
            return _arg_loop_above(pol_te, p, k, L, wp) * p / w

        # one oscillation of exp(2iqL) per pi/L: resolve panels on that scale
        r2 = integrate_adaptive(above, 0.0, math.inf, cfg, scale=max(math.pi / L, wp))
        total += r1.value + r2.value
    e = total / (2.0 * math.pi)
    if not split_at_light_line:
        wplus, _, prop = kernels.plasmon_batch(np.array([k]), L, wp)
        if prop[0]:
            e -= 0.5 * (wplus[0] - k)
    return e


def photonic_energy_direct(
    model: MirrorModel,
    L: float,
    cfg: QuadratureConfig | None = None,
    *,
    split_at_light_line: bool = False,
) -> EnergyResult:
    """Photonic energy per area from real-frequency mode phases, ``(1/2pi) int k dk e_ph(k)``."""
    cfg = cfg or QuadratureConfig(rel_tol=1e-6)
    inner = QuadratureConfig(rel_tol=0.1 * cfg.rel_tol, abs_tol=cfg.abs_tol * 1e-3)
    kc = light_line_crossing(model, L)

    def f(ks):
        return np.array([k * photonic_direct_k(model, L, k, inner, split_at_light_line=split_at_light_line)
                         for k in ks])

    # e_ph(k) decays like exp(-2kL) but the real-axis pieces cancel to leave
    # it, so its absolute noise floor would stall a semi-infinite tail: stop
    # where the decay factor is far below the tolerance
    bps = _k_breakpoints(model, L, extra=(kc,))
    k_max = bps[-1] + (math.log(1.0 / cfg.rel_tol) + 10.0) / L
    unit = abs(ideal_energy(L))
    c = 1.0 / (2.0 * math.pi * unit)
    res = integrate_adaptive(lambda ks: c * f(ks), 0.0, k_max, cfg, breakpoints=bps)
    return EnergyResult(unit * res.value, unit * float(res.error + 0.1 * cfg.rel_tol * abs(res.value)))


# ---------------------------------------------------------------------------
# breakdowns, sweeps, crossover, fits


def energy_breakdown(
    model: MirrorModel,
    L_over_lambda_p: float,
    cfg: QuadratureConfig | None = None,
    *,
    split_at_light_line: bool = False,
) -> EnergyBreakdown:
    """All reduction factors at ``L = L_over_lambda_p * lambda_p``.

    ``eta_pl`` is the float sum of its two parts and ``eta_ph`` is
    ``eta_total - eta_pl``, so ``(eta_total - eta_pl) - eta_ph == 0`` exactly.
    """
    cfg = cfg or QuadratureConfig()
    L = L_over_lambda_p * model.lambda_p
    e_cas = ideal_energy(L)
    tot = lifshitz_total(model, L, cfg)
    pl = plasmonic_energy(model, L, cfg, split_at_light_line=split_at_light_line)
    eta = tot.energy_per_area / e_cas
    plus = pl.plus_part / e_cas
    minus = pl.minus_part / e_cas
    eta_pl = plus + minus
    return EnergyBreakdown(
        L_over_lambda_p=float(L_over_lambda_p),
        eta_total=eta,
        eta_pl=eta_pl,
        eta_pl_plus=plus,
        eta_pl_minus=minus,
        eta_ph=eta - eta_pl,
        err_total=tot.error / abs(e_cas),
        err_pl=pl.error / abs(e_cas),
    )


def _breakdown_job(args):
    omega_p, x, cfg, split = args
    try:
        return energy_breakdown(MirrorModel(omega_p), x, cfg, split_at_light_line=split)
    except (CasmodesError, ValueError, ArithmeticError) as exc:
        return EnergyBreakdown.failed(x, f"{type(exc).__name__}: {exc}")


def default_schedule(points: int = 60, lo: float = 1e-3, hi: float = 3e2) -> np.ndarray:
    return np.geomspace(lo, hi, points)


def sweep_breakdown(
    model: MirrorModel,
    schedule=None,
    cfg: QuadratureConfig | None = None,
    *,
    split_at_light_line: bool = False,
    threads: int = 1,
) -> list[EnergyBreakdown]:
    """Breakdowns over a monotone schedule of ``L/lambda_p``, in schedule order.

    Failures become rows with ``failure`` set; the sweep carries on.  With
    ``threads != 1`` points are farmed out to worker processes (0 means one
    per CPU); each point is computed independently so the result does not
    depend on the worker count.
    """
    xs = default_schedule() if schedule is None else np.asarray(schedule, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("schedule must be positive")
    if xs.size > 1:
        d = np.diff(xs)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("schedule must be strictly monotone")
    cfg = cfg or QuadratureConfig()
    jobs = [(model.omega_p, float(x), cfg, split_at_light_line) for x in xs]
    workers = (os.cpu_count() or 1) if threads == 0 else threads
    if workers <= 1 or len(jobs) == 1:
        return [_breakdown_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_breakdown_job, jobs))


@dataclass(frozen=True)
class Crossover:
    L_over_lambda_p: float
    uncertainty: float


def find_plasmonic_crossover(
    model: MirrorModel,
    cfg: QuadratureConfig | None = None,
    *,
    split_at_light_line: bool = False,
    window: tuple[float, float] = (0.01, 0.5),
    xtol: float = 1e-6,
) -> Crossover:
    """Distance (in units of lambda_p) where the plasmonic share changes sign.

    The uncertainty combines the root tolerance with the quadrature error of
    ``eta_pl`` divided by its local slope.
    """
    cfg = cfg or QuadratureConfig()
    cache: dict[float, EnergyBreakdown] = {}

    def eta_pl(x):
        if x not in cache:
            L = x * model.lambda_p
            pl = plasmonic_energy(model, L, cfg, split_at_light_line=split_at_light_line)
            e_cas = ideal_energy(L)
            cache[x] = (pl.energy_per_area / e_cas, pl.error / abs(e_cas))
        return cache[x][0]

    lo, hi = window
    if (eta_pl(lo) > 0) == (eta_pl(hi) > 0):
        raise NoBracketError(
            f"plasmonic share does not change sign on [{lo}, {hi}] lambda_p "
            f"(eta_pl = {eta_pl(lo):.6g}, {eta_pl(hi):.6g})"
        )
    x = find_root_bracketed(eta_pl, lo, hi, RootConfig(abs_tol=xtol))
    h = max(1e-4 * x, 10 * xtol)
    slope = (eta_pl(x + h) - eta_pl(x - h)) / (2 * h)
    err = cache[x][1] if x in cache else 0.0
    unc = xtol + (err / abs(slope) if slope != 0 else math.inf)
    return Crossover(x, unc)


@dataclass(frozen=True)
class AsymptoticFits:
    alpha: float
    alpha_fit: FitResult
    beta_ph: float
    beta_ph_fit: FitResult
    beta_pl: float
    beta_pl_fit: FitResult
    beta_ph_offset: FitResult
    beta_pl_offset: FitResult
    short: list[EnergyBreakdown]
    long: list[EnergyBreakdown]


def fit_asymptotic_constants(
    model: MirrorModel,
    cfg: QuadratureConfig | None = None,
    *,
    short_window: tuple[float, float] = (1e-3, 1e-2),
    long_window: tuple[float, float] = (30.0, 300.0),
    points: int = 8,
    threads: int = 1,
) -> AsymptoticFits:
    """Recover the short- and long-distance constants from computed breakdowns.

    Short distances: ``eta = a x`` with ``a = 3 alpha / 2``.  Long distances:
    ``eta_ph - 1`` and ``-eta_pl`` against ``b sqrt(x)``.  The next order of
    the expansion is a constant that is not small across the window, so the
    ``b sqrt(x) + c`` fits are returned alongside as a diagnostic.
    """
    for lo, hi in (short_window, long_window):
        if not (0 < lo < hi):
            raise ValueError(f"degenerate fit window [{lo}, {hi}]")
    if points < 4:
        raise ValueError("a fit needs at least 4 points")
    xs_s = np.geomspace(*short_window, points)
    xs_l = np.geomspace(*long_window, points)
    rows = sweep_breakdown(model, np.concatenate([xs_s, xs_l]), cfg, threads=threads)
    bad = [r for r in rows if not r.ok]
    if bad:
        raise CasmodesError(f"breakdown failed at L/lambda_p={bad[0].L_over_lambda_p}: {bad[0].failure}")
    short, long = rows[:points], rows[points:]
    x_s = np.array([r.L_over_lambda_p for r in short])
    x_l = np.array([r.L_over_lambda_p for r in long])
    eta = np.array([r.eta_total for r in short])
    ph = np.array([r.eta_ph - 1.0 for r in long])
    pl = np.array([-r.eta_pl for r in long])

    a_fit = fit_power_law(x_s, eta, exponent=1.0)
    ph_fit = fit_power_law(x_l, ph, exponent=0.5)
    pl_fit = fit_power_law(x_l, pl, exponent=0.5)
    return AsymptoticFits(
        alpha=2.0 * a_fit.prefactor / 3.0,
        alpha_fit=a_fit,
        beta_ph=ph_fit.prefactor,
        beta_ph_fit=ph_fit,
        beta_pl=pl_fit.prefactor,
        beta_pl_fit=pl_fit,
        beta_ph_offset=fit_power_law(x_l, ph, exponent=0.5, fit_offset=True),
        beta_pl_offset=fit_power_law(x_l, pl, exponent=0.5, fit_offset=True),
        short=short,
        long=long,
    )
