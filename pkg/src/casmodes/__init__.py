"""Casimir energy between plasma-model mirrors by explicit mode decomposition."""
from ._backend import backend_name
from .energy import (
    EnergyBreakdown,
    IdealCasimir,
    energy_breakdown,
    find_plasmonic_crossover,
    fit_asymptotic_constants,
    ideal_energy,
    lifshitz_total,
    photonic_energy,
    photonic_energy_direct,
    plasmonic_energy,
    sweep_breakdown,
)
from .modes import (
    PLASMON_MINUS,
    PLASMON_PLUS,
    DispersionCurve,
    ModeBranch,
    ModePoint,
    dispersion_sweep,
    mode_function,
    solve_photonic,
    solve_plasmonic,
)
from .numerics import QuadratureConfig, RootConfig
from .optics import FrequencySector, MirrorModel, Polarization, dielectric, phase_shift, reflection

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "DispersionCurve",
    "EnergyBreakdown",
    "FrequencySector",
    "IdealCasimir",
    "MirrorModel",
    "ModeBranch",
    "ModePoint",
    "PLASMON_MINUS",
    "PLASMON_PLUS",
    "Polarization",
    "QuadratureConfig",
    "RootConfig",
    "dielectric",
    "dispersion_sweep",
    "energy_breakdown",
    "find_plasmonic_crossover",
    "fit_asymptotic_constants",
    "ideal_energy",
    "lifshitz_total",
    "mode_function",
    "phase_shift",
    "photonic_energy",
    "photonic_energy_direct",
    "plasmonic_energy",
    "reflection",
    "solve_photonic",
    "solve_plasmonic",
    "sweep_breakdown",
]
