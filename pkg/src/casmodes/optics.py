"""Plasma-model optics of a single vacuum/metal interface.

Units: c = hbar = 1, frequencies and wavevectors in units of the plasma
frequency when ``MirrorModel.omega_p == 1``.

Reflection sign convention (used everywhere in the package)::

    r_TE = (kz - kzm) / (kz + kzm)
    r_TM = (eps*kz - kzm) / (eps*kz + kzm)

with ``kzm = sqrt(eps*omega**2 - k**2)`` taken with ``Im(kzm) >= 0``.  With
this choice a perfect mirror has ``r_TE = -1`` and ``r_TM = +1``; the two
coupled surface plasmons then satisfy ``r_TM * exp(-kappa*L) = -1`` (upper,
symmetric branch) and ``= +1`` (lower, antisymmetric branch).
"""
from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


class DegradedPrecisionWarning(UserWarning):
    """Evaluation sits on the metal branch cut ``eps*omega**2 == k**2``."""


@dataclass(frozen=True)
class MirrorModel:
    """Two identical plasma-model mirrors."""

    omega_p: float = 1.0

    def __post_init__(self):
        if not (self.omega_p > 0 and math.isfinite(self.omega_p)):
            raise DomainError(f"omega_p must be positive and finite, got {self.omega_p!r}")

    @property
    def lambda_p(self) -> float:
        return 2.0 * math.pi / self.omega_p

    def scaled(self, factor: float) -> "MirrorModel":
        return MirrorModel(self.omega_p * factor)


class Polarization(enum.Enum):
    TE = "TE"
    TM = "TM"


class FrequencySector(enum.Enum):
    PROPAGATING = "propagating"
    EVANESCENT = "evanescent"
    IMAGINARY_AXIS = "imaginary"


def classify_sector(omega: float, k: float) -> FrequencySector:
    """Sector of a real frequency.  The light line itself counts as propagating."""
    return FrequencySector.PROPAGATING if omega >= k else FrequencySector.EVANESCENT


def dielectric(model: MirrorModel, omega):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega == 0):
        raise DomainError("plasma dielectric function has a pole at omega = 0")
    out = 1.0 - model.omega_p**2 / omega**2
    return float(out) if out.ndim == 0 else out


def dielectric_imag_axis(model: MirrorModel, xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi == 0):
        raise DomainError("plasma dielectric function has a pole at xi = 0")
    out = 1.0 + model.omega_p**2 / xi**2
    return float(out) if out.ndim == 0 else out


def reflection_imag_axis(model: MirrorModel, pol: Polarization, xi: float, k: float) -> float:
    """Real reflection amplitude at imaginary frequency ``i*xi``."""
    if xi <= 0:
        raise DomainError("xi must be positive")
    wp2 = model.omega_p**2
    kappa = math.hypot(k, xi)
    kappa_m = math.sqrt(kappa * kappa + wp2)
    if pol is Polarization.TE:
        return -wp2 / (kappa + kappa_m) ** 2
    # eps*kappa - kappa_m with eps = 1 + wp2/xi**2, multiplied through by xi**2
    num = wp2 * (kappa - xi * xi / (kappa + kappa_m))
    den = (xi * xi + wp2) * kappa + xi * xi * kappa_m
    return num / den


def reflection(
    model: MirrorModel,
    pol: Polarization,
    omega: float,
    k: float,
    sector: FrequencySector | None = None,
    grazing_tol: float = 1e-12,
) -> complex:
    """Single-interface reflection amplitude.

    For ``sector=IMAGINARY_AXIS`` the ``omega`` argument is the imaginary
    frequency ``xi`` and the (real) amplitude is returned as a complex number.
    A ``DegradedPrecisionWarning`` is emitted on the metal branch cut.
    """
    if k < 0:
        raise DomainError("k must be non-negative")
    if sector is None:
        sector = classify_sector(omega, k)
    if sector is FrequencySector.IMAGINARY_AXIS:
        return complex(reflection_imag_axis(model, pol, omega, k))
    if omega <= 0:
        raise DomainError("omega must be positive")
    if sector is FrequencySector.PROPAGATING:
        if omega < k:
            raise DomainError("propagating sector requires omega >= k")
        kz = complex(math.sqrt((omega - k) * (omega + k)))
    else:
        if omega >= k:
            raise DomainError("evanescent sector requires omega < k")
        kz = 1j * math.sqrt((k - omega) * (k + omega))

    eps = dielectric(model, omega)
    arg = eps * omega * omega - k * k
    if abs(arg) < grazing_tol:
        warnings.warn(
            f"reflection evaluated on the metal branch cut (|eps w^2 - k^2| = {abs(arg):.3g})",
            DegradedPrecisionWarning,
            stacklevel=2,
        )
    kzm = 1j * math.sqrt(-arg) if arg < 0 else complex(math.sqrt(arg))

    if pol is Polarization.TE:
        num, den = kz - kzm, kz + kzm
    else:
        num, den = eps * kz - kzm, eps * kz + kzm
    if den == 0:
        return complex(math.inf, 0.0)
    return num / den


def phase_shift(model: MirrorModel, pol: Polarization, omega: float, k: float) -> float:
    """Reflection phase shift delta with ``kz*L = m*pi - delta`` at the cavity modes.

    ``delta = arg(-r_TE)`` for TE and ``arg(r_TM)`` for TM, chosen so that
    delta vanishes for perfect mirrors.  Closed forms below the transparency
    edge ``omega**2 = k**2 + omega_p**2`` are continuous in omega; above it the
    amplitude is real and TE sits at pi while TM switches between 2*pi and pi
    at its Brewster zero.
    """
    if omega < k:
        raise DomainError("phase shift is defined in the propagating sector only")
    q = math.sqrt((omega - k) * (omega + k))
    km2 = k * k + model.omega_p**2 - omega * omega
    if pol is Polarization.TE:
        if km2 >= 0:
            return 2.0 * math.atan2(q, math.sqrt(km2))
        return math.pi
    eps = dielectric(model, omega)
    if km2 >= 0:
        return 2.0 * math.atan2(math.sqrt(km2), -eps * q)
    p = math.sqrt(-km2)
    r = (eps * q - p) / (eps * q + p)
    return 2.0 * math.pi if r > 0 else math.pi


def unwrap_scan(fn, grid, max_halvings: int = 40):
    """Continuous branch of a principal-valued phase ``fn`` along ``grid``.

    Wherever two consecutive samples differ by more than pi/2 the step is
    halved (recursively) so that a genuine 2*pi wrap is told apart from a steep
    but continuous variation.
    """
    grid = np.asarray(grid, dtype=float)
    out = np.empty(grid.shape)
    prev_x = grid[0]
    prev = fn(prev_x)
    out[0] = prev
    for i in range(1, grid.size):
        x = grid[i]
        prev = _unwrap_step(fn, prev_x, prev, x, max_halvings)
        out[i] = prev
        prev_x = x
    return out


def _unwrap_step(fn, x0, v0, x1, depth):
    v1 = fn(x1)
    v1 += 2.0 * math.pi * round((v0 - v1) / (2.0 * math.pi))
    if abs(v1 - v0) <= 0.5 * math.pi or depth == 0:
        return v1
    xm = 0.5 * (x0 + x1)
    vm = _unwrap_step(fn, x0, v0, xm, depth - 1)
    return _unwrap_step(fn, xm, vm, x1, depth - 1)


def phase_scan(model: MirrorModel, pol: Polarization, k: float, omegas) -> np.ndarray:
    """Phase shift along a frequency scan from principal arguments of r."""

    def principal(w):
        r = reflection(model, pol, w, k, FrequencySector.PROPAGATING)
        return cmath.phase(-r) if pol is Polarization.TE else cmath.phase(r)

    out = unwrap_scan(principal, omegas)
    # pin the branch to the closed form at the first sample
    shift = phase_shift(model, pol, float(omegas[0]), k) - out[0]
    return out + 2.0 * math.pi * round(shift / (2.0 * math.pi))
