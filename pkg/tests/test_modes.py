import math

import numpy as np
import pytest

from casmodes import kernels
from casmodes.errors import DomainError, NoModeError
from casmodes.modes import (
    PLASMON_MINUS,
    PLASMON_PLUS,
    BranchKind,
    ModeBranch,
    Termination,
    dispersion_sweep,
    electrostatic_plasmons,
    light_line_crossing,
    mode_function,
    omega_sp,
    round_trip_phase,
    solve_photonic,
    solve_plasmonic,
)
from casmodes.optics import FrequencySector, MirrorModel, Polarization, phase_shift

TE, TM = Polarization.TE, Polarization.TM


def test_branch_validation():
    with pytest.raises(DomainError):
        ModeBranch.photonic(0)
    with pytest.raises(DomainError):
        ModeBranch(BranchKind.PLASMON_PLUS, 3)
    assert str(ModeBranch.photonic(4)) == "photonic4"


def test_te_has_no_evanescent_modes(model):
    with pytest.raises(NoModeError):
        mode_function(model, TE, 0.3, 0.5, 1.0)


def test_surface_plasmon_reference_values(model):
    # omega^2 = (1 + 2 k^2 - sqrt(1 + 4 k^4)) / 2; at k = 1 this is (3 - sqrt 5)/2
    assert omega_sp(model, 1.0) == pytest.approx(math.sqrt((3 - math.sqrt(5)) / 2), rel=1e-15)
    assert omega_sp(model, 1e6) == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    ks = np.geomspace(1e-4, 1e4, 200)
    w = omega_sp(model, ks)
    assert np.all(w < ks) and np.all(np.diff(w) > 0)
    assert np.all(w < 1 / math.sqrt(2))


@pytest.mark.parametrize("k", [0.3, 1.0, 3.0])
def test_plasmons_reach_single_interface_limit(model, k):
    pair = solve_plasmonic(model, k, 1e3 * model.lambda_p)
    w = omega_sp(model, k)
    assert pair.plus.omega == pytest.approx(w, rel=1e-6)
    assert pair.minus.omega == pytest.approx(w, rel=1e-6)


@pytest.mark.parametrize("kL", [0.5, 1.0, 2.0])
def test_electrostatic_limit(model, kL):
    k = 50.0
    pair = solve_plasmonic(model, k, kL / k)
    wp_, wm_ = electrostatic_plasmons(model, k, kL / k)
    assert pair.plus.omega == pytest.approx(wp_, rel=1e-4)
    assert pair.minus.omega == pytest.approx(wm_, rel=1e-4)


def test_short_distance_shifts(model):
    k = 0.5
    pair = solve_plasmonic(model, k, 0.2)
    w = omega_sp(model, k)
    assert pair.plus.omega > w > pair.minus.omega
    assert pair.minus.sector is FrequencySector.EVANESCENT
    assert pair.plus.sector is FrequencySector.PROPAGATING
    assert 0.2 < light_line_crossing(model, 0.2) * 10


@pytest.mark.parametrize("L", [0.05, 0.5, 2.0, 6.0, 40.0])
@pytest.mark.parametrize("k", [0.1, 0.5, 2.0])
def test_plasmon_residuals_and_ordering(model, k, L):
    pair = solve_plasmonic(model, k, L)
    assert 0 < pair.minus.omega <= pair.plus.omega
    if k * L < 30:  # beyond that the splitting exp(-kL) is below double precision
        assert pair.minus.omega < pair.plus.omega
    assert pair.minus.omega < k
    assert abs(kernels.mode_value(kernels.GM_EVAN, pair.minus.omega, k, L, 1.0)) < 1e-10
    if k * L >= 30:
        return  # the r-form sits on the pole of r there; the pole-free form above is the check
    assert abs(mode_function(model, TM, pair.minus.omega, k, L, PLASMON_MINUS)) < 1e-10
    if pair.plus.sector is FrequencySector.EVANESCENT:
        assert abs(mode_function(model, TM, pair.plus.omega, k, L, PLASMON_PLUS)) < 1e-10
    else:
        assert abs(math.sin(round_trip_phase(model, TM, pair.plus.omega, k, L))) < 1e-10


def test_plasmon_monotone_in_distance(model):
    k = 0.7
    Ls = np.geomspace(0.01, 100, 60)
    plus = np.array([solve_plasmonic(model, k, L).plus.omega for L in Ls])
    minus = np.array([solve_plasmonic(model, k, L).minus.omega for L in Ls])
    assert np.all(np.diff(minus) >= 0)
    assert np.all(np.diff(plus) <= 0)


def test_upper_plasmon_is_first_tm_order(model):
    # it continues the m = 1 TM mode: theta = pi whenever it propagates
    for L in (0.2, 1.0, 3.0):
        pair = solve_plasmonic(model, 0.5, L)
        assert pair.plus.sector is FrequencySector.PROPAGATING
        assert round_trip_phase(model, TM, pair.plus.omega, 0.5, L) == pytest.approx(math.pi, abs=1e-9)


def test_tracking_matches_direct_solution(model):
    for L in (0.3, 2.0):
        a = solve_plasmonic(model, 0.5, L)
        b = solve_plasmonic(model, 0.5, L, track=True)
        assert b.plus.omega == pytest.approx(a.plus.omega, abs=1e-11)


def test_plasmon_bad_input(model):
    with pytest.raises(DomainError):
        solve_plasmonic(model, 0.0, 1.0)
    with pytest.raises(DomainError):
        solve_plasmonic(model, 1.0, -1.0)


@pytest.mark.parametrize("pol", [TE, TM])
def test_photonic_modes_perfect_limit(pol):
    m = MirrorModel(1e4)
    L, k = 20.0, 0.5
    modes = solve_photonic(m, pol, k, L, 6)
    first = 1 if pol is TE else 2
    assert [p.branch.m for p in modes] == list(range(first, 7))
    for p in modes:
        assert p.kz == pytest.approx(p.branch.m * math.pi / L, rel=2e-3)


def test_perfect_reference_rows(model):
    modes = solve_photonic(model, TE, 0.5, 2.0, 3, perfect=True)
    assert [p.kz for p in modes] == pytest.approx([math.pi / 2 * m for m in (1, 2, 3)])


@pytest.mark.parametrize("pol", [TE, TM])
@pytest.mark.parametrize("L", [1.0, 7.0, 30.0])
def test_photonic_mode_properties(model, pol, L):
    k = 0.5
    modes = solve_photonic(model, pol, k, L, 50)
    ms = [p.branch.m for p in modes]
    assert ms == sorted(ms) and len(set(ms)) == len(ms)
    for p in modes:
        assert p.sector is FrequencySector.PROPAGATING
        assert 0 < p.kz < model.omega_p
        assert abs(mode_function(model, pol, p.omega, k, L)) < 1e-10
        assert round_trip_phase(model, pol, p.omega, k, L) == pytest.approx(p.branch.m * math.pi, abs=1e-9)
        # displaced below the perfect-mirror position
        assert p.kz < p.branch.m * math.pi / L


def test_te_mode_count(model):
    k = 0.5
    counts = []
    for L in np.linspace(0.5, 40, 400):
        n = len(solve_photonic(model, TE, k, L, 1000))
        theta_max = model.omega_p * L + phase_shift(model, TE, math.hypot(k, model.omega_p), k)
        assert abs(n - math.floor(theta_max / math.pi)) <= 1
        counts.append(n)
    steps = np.diff(counts)
    assert np.all((steps == 0) | (steps == 1))


def test_large_distance_limit_of_fixed_order(model):
    k = 0.5
    for L in (1e3, 1e4):
        p = solve_photonic(model, TE, k, L, 1)[0]
        assert p.omega == pytest.approx(math.hypot(k, math.pi / L), rel=1e-3)
        assert phase_shift(model, TE, p.omega, k) < 10 / L


def test_fig1_shape(model):
    k = 0.5
    xs = np.linspace(0.05, 8, 120)
    curves = {m: [] for m in range(1, 9)}
    for x in xs:
        L = x * math.pi / k
        for p in solve_photonic(model, TE, k, L, 8):
            curves[p.branch.m].append(p.kz)
    for m, kz in curves.items():
        assert len(kz) > 0, m
        assert max(kz) < model.omega_p
    # each order is born at kz ~ omega_p and relaxes down as L grows
    assert curves[1][0] > curves[1][-1]


def test_dispersion_minus_stays_evanescent(model):
    k = 0.5
    xs = np.linspace(3, 0.05, 80)
    c = dispersion_sweep(model, PLASMON_MINUS, TM, k, xs * math.pi / k)
    assert c.termination is Termination.COMPLETED
    w = c.omega
    assert np.all(w < k)
    assert np.all(np.diff(w) < 0)  # decreasing as L decreases


def test_dispersion_plus_crosses_light_line(model):
    k = 0.5
    xs = np.linspace(3, 0.05, 120)
    c = dispersion_sweep(model, PLASMON_PLUS, TM, k, xs * math.pi / k)
    assert c.termination is Termination.COMPLETED
    w = c.omega
    assert w[0] < k < w[-1]
    assert np.all(np.diff(w) > 0)
    # continuity through omega = ck
    assert np.max(np.abs(np.diff(w))) < 0.05
    direct = [solve_plasmonic(model, k, x * math.pi / k).plus.omega for x in xs]
    assert np.allclose(w, direct, atol=1e-10)


def test_dispersion_photonic_matches_solver(model):
    k = 0.5
    xs = np.linspace(1.0, 8.0, 50)
    c = dispersion_sweep(model, ModeBranch.photonic(1), TE, k, xs * math.pi / k)
    assert c.termination is Termination.COMPLETED
    for x, w in c.points:
        p = solve_photonic(model, TE, k, x * math.pi / k, 1)[0]
        assert w == pytest.approx(p.omega, abs=1e-10)


def test_dispersion_photonic_death(model):
    k = 0.5
    xs = np.linspace(8, 0.1, 80)
    c = dispersion_sweep(model, ModeBranch.photonic(3), TE, k, xs * math.pi / k)
    assert c.termination is Termination.BRANCH_LOST
    assert c.points and c.lost_at is not None


def test_dispersion_schedule_validation(model):
    with pytest.raises(DomainError):
        dispersion_sweep(model, PLASMON_PLUS, TM, 0.5, [1.0, 2.0, 1.5])
    with pytest.raises(NoModeError):
        dispersion_sweep(model, PLASMON_PLUS, TE, 0.5, [1.0, 2.0])
