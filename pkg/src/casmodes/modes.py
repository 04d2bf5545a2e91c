"""Cavity modes between two plasma mirrors: photonic orders and coupled plasmons.

Mode order is counted by the total round-trip phase ``theta = kz*L + delta``
(``theta = m*pi`` on a mode).  With the phase conventions of
:mod:`casmodes.optics` the TM family has ``theta(kz -> 0) = pi``, so the
coupled plasmons occupy the lowest TM slots: ``omega_minus`` continues the
``m = 0`` mode ``omega = c k`` of perfect mirrors and ``omega_plus`` the
``m = 1`` mode.  Photonic TM modes therefore start at ``m = 2``; TE modes at
``m = 1``.  In the perfect-mirror limit every order sits at ``kz = m*pi/L``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BranchLostError, DomainError, NoModeError
from .numerics import RootConfig, RootProblem, continue_branch
from .optics import (
    FrequencySector,
    MirrorModel,
    Polarization,
    classify_sector,
    phase_shift,
    reflection,
)


class BranchKind(enum.Enum):
    PHOTONIC = "photonic"
    PLASMON_PLUS = "plasmon+"
    PLASMON_MINUS = "plasmon-"


@dataclass(frozen=True)
class ModeBranch:
    kind: BranchKind
    m: int | None = None

    def __post_init__(self):
        if self.kind is BranchKind.PHOTONIC:
            if self.m is None or self.m < 1:
                raise DomainError("photonic branch needs an order m >= 1")
        elif self.m is not None:
            raise DomainError("plasmon branches carry no order")

    @classmethod
    def photonic(cls, m: int) -> "ModeBranch":
        return cls(BranchKind.PHOTONIC, int(m))

    @property
    def is_plasmon(self) -> bool:
        return self.kind is not BranchKind.PHOTONIC

    def __str__(self):
        if self.kind is BranchKind.PHOTONIC:
            return f"photonic{self.m}"
        return self.kind.value


PLASMON_PLUS = ModeBranch(BranchKind.PLASMON_PLUS)
PLASMON_MINUS = ModeBranch(BranchKind.PLASMON_MINUS)


@dataclass(frozen=True)
class ModePoint:
    pol: Polarization
    branch: ModeBranch
    k: float
    L: float
    omega: float
    sector: FrequencySector

    @property
    def kz(self) -> float | None:
        """Longitudinal wavevector; ``None`` below the light line."""
        if self.sector is FrequencySector.EVANESCENT:
            return None
        return math.sqrt(max((self.omega - self.k) * (self.omega + self.k), 0.0))


class Termination(enum.Enum):
    COMPLETED = "completed"
    BRANCH_LOST = "branch_lost"


@dataclass
class DispersionCurve:
    """Samples ``(k*L/pi, omega)`` of one branch at fixed ``k``."""

    branch: ModeBranch
    pol: Polarization
    fixed_k: float
    points: list[tuple[float, float]] = field(default_factory=list)
    termination: Termination = Termination.COMPLETED
    lost_at: float | None = None

    @property
    def kl_over_pi(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def omega(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


@dataclass(frozen=True)
class PlasmonPair:
    minus: ModePoint
    plus: ModePoint


def _check_geometry(k, L):
    if not (k >= 0 and math.isfinite(k)):
        raise DomainError(f"k must be finite and non-negative, got {k!r}")
    if not (L > 0 and math.isfinite(L)):
        raise DomainError(f"L must be finite and positive, got {L!r}")


def round_trip_phase(model: MirrorModel, pol: Polarization, omega: float, k: float, L: float) -> float:
    """``theta = kz*L + delta``; modes sit at integer multiples of pi."""
    q = math.sqrt((omega - k) * (omega + k))
    return q * L + phase_shift(model, pol, omega, k)


def mode_function(
    model: MirrorModel,
    pol: Polarization,
    omega: float,
    k: float,
    L: float,
    branch: ModeBranch | None = None,
) -> float:
    """Real function whose zeros are the cavity modes at ``(k, L)``.

    Propagating sector: ``sin(theta)`` below the transparency edge
    ``kz < omega_p``; above it the mirrors are partially transparent, there
    are no modes and ``|1 - r**2 exp(2i kz L)| / 2 > 0`` is returned.
    Evanescent sector (TM only): ``r*exp(-kappa*L) + 1`` for the upper
    plasmon, ``r*exp(-kappa*L) - 1`` for the lower one and
    ``(r*exp(-kappa*L))**2 - 1`` when no branch is given.
    """
    if omega <= 0:
        raise DomainError("omega must be positive")
    _check_geometry(k, L)
    sector = classify_sector(omega, k)
    if sector is FrequencySector.PROPAGATING:
        q = math.sqrt((omega - k) * (omega + k))
        if q < model.omega_p:
            return math.sin(q * L + phase_shift(model, pol, omega, k))
        r = reflection(model, pol, omega, k, sector)
        return 0.5 * abs(1.0 - r * r * cmath.exp(2j * q * L))
    if pol is Polarization.TE:
        raise NoModeError("TE polarization has no modes below the light line")
    kappa = math.sqrt((k - omega) * (k + omega))
    re = reflection(model, pol, omega, k, sector).real * math.exp(-kappa * L)
    if branch is None:
        return re * re - 1.0
    if branch.kind is BranchKind.PLASMON_PLUS:
        return re + 1.0
    if branch.kind is BranchKind.PLASMON_MINUS:
        return re - 1.0
    raise NoModeError("photonic modes live in the propagating sector")


def _family_code(pol: Polarization, m: int) -> int:
    if pol is Polarization.TE:
        return kernels.HM_PROP if m % 2 else kernels.HP_PROP
    return kernels.GP_PROP if m % 2 else kernels.GM_PROP


def photonic_order(model: MirrorModel, pol: Polarization, q: float, k: float, L: float) -> int:
    omega = math.hypot(k, q)
    return int(round(round_trip_phase(model, pol, omega, k, L) / math.pi))


def solve_photonic(
    model: MirrorModel,
    pol: Polarization,
    k: float,
    L: float,
    m_max: int,
    *,
    perfect: bool = False,
) -> list[ModePoint]:
    """All photonic modes of order ``m <= m_max`` with ``kz < omega_p``, sorted by m.

    ``perfect=True`` returns the perfect-mirror reference ``kz = m*pi/L``
    (no transparency bound).
    """
    _check_geometry(k, L)
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    wp = model.omega_p
    first = 1 if pol is Polarization.TE else 2
    if perfect:
        return [
            ModePoint(pol, ModeBranch.photonic(m), k, L, math.hypot(k, m * math.pi / L), FrequencySector.PROPAGATING)
            for m in range(first, m_max + 1)
        ]
    if pol is Polarization.TE:
        codes = (kernels.HM_PROP, kernels.HP_PROP)
    else:
        codes = (kernels.GP_PROP, kernels.GM_PROP)
    found: dict[int, float] = {}
    for code in codes:
        for q in kernels.photonic_roots(code, k, L, wp):
            if not 0.0 < q < wp:
                continue
            m = photonic_order(model, pol, q, k, L)
            if m >= first and m <= m_max:
                found[m] = q
    return [
        ModePoint(pol, ModeBranch.photonic(m), k, L, math.hypot(k, found[m]), FrequencySector.PROPAGATING)
        for m in sorted(found)
    ]


# ---------------------------------------------------------------------------
# plasmons


def omega_sp(model: MirrorModel, k):
    """Single-interface surface plasmon ``omega(k)`` (the large-distance limit of both branches)."""
    k_arr = np.asarray(k, dtype=float)
    out = kernels.omega_sp_np(k_arr, model.omega_p)
    return float(out) if out.ndim == 0 else out


def light_line_crossing(model: MirrorModel, L: float) -> float:
    """Wavevector below which the upper plasmon is propagating."""
    wp = model.omega_p
    return wp / math.sqrt(1.0 + 0.5 * wp * L)


def solve_plasmonic(model: MirrorModel, k: float, L: float, *, track: bool = False) -> PlasmonPair:
    """Both coupled plasmon modes at ``(k, L)``.

    The lower plasmon is the single zero of the antisymmetric mode function
    below the light line.  The upper plasmon is the lowest zero of the
    symmetric one, searched on both sides of the light line.  With
    ``track=True`` the upper branch is instead followed by continuation in L
    from a large-distance seed.
    """
    _check_geometry(k, L)
    if k == 0:
        raise DomainError("plasmon modes need k > 0")
    wplus, wminus, _ = kernels.plasmon_batch(np.array([k]), L, model.omega_p)
    wp_, wm_ = float(wplus[0]), float(wminus[0])
    if track:
        wp_ = _track_plus(model, k, L)
    if not (math.isfinite(wp_) and math.isfinite(wm_)):
        raise BranchLostError(f"plasmon root not found at k={k!r}, L={L!r}", L, wp_)
    return PlasmonPair(
        minus=ModePoint(Polarization.TM, PLASMON_MINUS, k, L, wm_, FrequencySector.EVANESCENT),
        plus=ModePoint(Polarization.TM, PLASMON_PLUS, k, L, wp_, classify_sector(wp_, k)),
    )


def _track_plus(model, k, L):
    L_seed = max(L, 40.0 / k, 40.0 / model.omega_p)
    curve = dispersion_sweep(model, PLASMON_PLUS, Polarization.TM, k, np.geomspace(L_seed, L, 64))
    if curve.termination is not Termination.COMPLETED:
        raise BranchLostError("upper plasmon lost during continuation", curve.lost_at, curve.points[-1][1])
    return curve.points[-1][1]


def _signed_u_problem(model: MirrorModel, branch: ModeBranch, k: float, cfg: RootConfig) -> RootProblem:
    """Root problem in ``u = kz`` (u >= 0) or ``u = -kappa`` (u < 0), parameter L.

    The pole-free mode functions are continuous through ``u = 0`` so one
    bracketing solver follows the upper plasmon across the light line.
    """
    wp = model.omega_p
    if branch.kind is BranchKind.PLASMON_PLUS:
        evan, prop = kernels.GP_EVAN, kernels.GP_PROP
    else:
        evan, prop = kernels.GM_EVAN, None

    def f(u, L):
        if u >= 0.0:
            return kernels.mode_value(prop, u, k, L, wp)
        return kernels.mode_value(evan, math.sqrt((k + u) * (k - u)), k, L, wp)

    def domain(L):
        lo = -k * (1.0 - 1e-12)
        if prop is None:
            return lo, 0.0
        return lo, min(math.pi / L, wp)

    return RootProblem(f, domain, cfg)


def _u_to_omega(u, k):
    return math.sqrt(k * k + u * u) if u >= 0 else math.sqrt((k + u) * (k - u))


def _omega_to_u(omega, k):
    if omega >= k:
        return math.sqrt((omega - k) * (omega + k))
    return -math.sqrt((k - omega) * (k + omega))


def dispersion_sweep(
    model: MirrorModel,
    branch: ModeBranch,
    pol: Polarization,
    k: float,
    L_schedule,
    cfg: RootConfig | None = None,
) -> DispersionCurve:
    """Follow one branch over a monotone schedule of distances by continuation.

    The first scheduled point is solved directly and seeds the continuation.
    A branch that leaves its domain (a photonic mode dying at the
    transparency edge, say) ends the curve with ``BRANCH_LOST``.
    """
    cfg = cfg or RootConfig()
    Ls = np.asarray(L_schedule, dtype=float)
    if Ls.ndim != 1 or Ls.size == 0:
        raise DomainError("L_schedule must be a non-empty 1-D sequence")
    d = np.diff(Ls)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise DomainError("L_schedule must be strictly monotone")
    if branch.is_plasmon and pol is not Polarization.TM:
        raise NoModeError("plasmon branches are TM only")
    wp = model.omega_p
    curve = DispersionCurve(branch, pol, k)

    if branch.is_plasmon:
        problem = _signed_u_problem(model, branch, k, cfg)
        pair = solve_plasmonic(model, k, float(Ls[0]))
        w0 = pair.plus.omega if branch.kind is BranchKind.PLASMON_PLUS else pair.minus.omega
        start = 0
        x0 = _omega_to_u(w0, k)
        to_omega = lambda u: _u_to_omega(u, k)  # noqa: E731
    else:
        code = _family_code(pol, branch.m)
        problem = RootProblem(
            lambda q, L: kernels.mode_value(code, q, k, L, wp),
            lambda L: (1e-14 * wp, wp),
            cfg,
        )
        start, x0 = None, None
        for i, L in enumerate(Ls):
            modes = solve_photonic(model, pol, k, float(L), branch.m)
            if modes and modes[-1].branch == branch:
                start, x0 = i, modes[-1].kz
                break
        if start is None:
            curve.termination = Termination.BRANCH_LOST
            curve.lost_at = float(Ls[0])
            return curve
        to_omega = lambda q: math.hypot(k, q)  # noqa: E731

    res = continue_branch(problem, float(Ls[start]), x0, Ls[start:])
    for L, x in zip(res.params, res.roots):
        curve.points.append((k * L / math.pi, to_omega(x)))
    if not res.completed:
        curve.termination = Termination.BRANCH_LOST
        curve.lost_at = res.lost_at
    return curve


def electrostatic_plasmons(model: MirrorModel, k: float, L: float) -> tuple[float, float]:
    """Non-retarded coupled plasmons ``omega**2 = (wp**2/2)(1 +- exp(-kL))``."""
    e = math.exp(-k * L)
    s = 0.5 * model.omega_p**2
    return math.sqrt(s * (1.0 + e)), math.sqrt(s * (1.0 - e))

