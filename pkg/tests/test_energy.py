import math

import numpy as np
import pytest

from casmodes import energy as en
from casmodes import kernels
from casmodes.energy import (
    EnergyBreakdown,
    IdealCasimir,
    energy_breakdown,
    find_plasmonic_crossover,
    fit_asymptotic_constants,
    ideal_energy,
    lifshitz_integrand_k,
    lifshitz_total,
    photonic_direct_k,
    photonic_energy,
    photonic_energy_direct,
    plasmonic_energy,
    sweep_breakdown,
)
from casmodes.errors import NoBracketError
from casmodes.numerics import QuadratureConfig
from casmodes.optics import MirrorModel


def test_ideal_energy():
    assert ideal_energy(1.0) == pytest.approx(-math.pi**2 / 720)
    assert IdealCasimir().energy_per_area(2.0) == pytest.approx(-math.pi**2 / 720 / 8)
    with pytest.raises(ValueError):
        ideal_energy(0.0)


def test_perfect_mirror_recovery():
    r = lifshitz_total(MirrorModel(1e3), 1.0)
    assert r.energy_per_area / ideal_energy(1.0) == pytest.approx(1.0, rel=5e-3)


@pytest.mark.parametrize("x", [1e-3, 0.05, 1.0, 20.0])
def test_total_is_negative_and_reduced(model, x):
    L = x * model.lambda_p
    r = lifshitz_total(model, L)
    assert r.energy_per_area < 0
    assert 0 < r.energy_per_area / ideal_energy(L) < 1
    assert r.error >= 0


@pytest.mark.parametrize("L", [0.3, 3.0])
@pytest.mark.parametrize("k", [0.05, 0.4, 1.3])
def test_mode_decomposition_per_wavevector(model, L, k):
    """Lifshitz integrand at fixed k == photonic (real axis) + plasmonic (mode frequencies)."""
    cfg = QuadratureConfig(rel_tol=1e-11)
    total = lifshitz_integrand_k(model, L, k, cfg)
    wplus, wminus, _ = kernels.plasmon_batch(np.array([k]), L)
    plasmonic = 0.5 * (wplus[0] + wminus[0] - 2 * kernels.omega_sp(k, 1.0))
    photonic = photonic_direct_k(model, L, k, QuadratureConfig(rel_tol=1e-10))
    assert photonic + plasmonic == pytest.approx(total, rel=1e-7, abs=1e-13)


def test_split_moves_the_upper_branch_to_photonic(model):
    L, k = 0.5, 0.3  # upper plasmon propagating here
    a = photonic_direct_k(model, L, k)
    b = photonic_direct_k(model, L, k, split_at_light_line=True)
    wplus, _, prop = kernels.plasmon_batch(np.array([k]), L)
    assert prop[0]
    assert b - a == pytest.approx(0.5 * (wplus[0] - k), rel=1e-9)


@pytest.mark.parametrize("x", [0.01, 0.3, 3.0])
def test_plasmonic_sign_structure(model, x):
    pl = plasmonic_energy(model, x * model.lambda_p)
    assert pl.plus_part > 0  # repulsive
    assert pl.minus_part < 0  # attractive
    assert pl.energy_per_area == pytest.approx(pl.plus_part + pl.minus_part)


def test_photonic_is_difference(model):
    L = 0.7 * model.lambda_p
    ph = photonic_energy(model, L)
    tot = lifshitz_total(model, L)
    pl = plasmonic_energy(model, L)
    assert ph.energy_per_area == tot.energy_per_area - pl.energy_per_area
    assert ph.error == pytest.approx(math.hypot(tot.error, pl.error))
    assert ph.energy_per_area < 0  # attractive: positive reduction factor


def test_breakdown_identities(model):
    for x in (0.003, 0.08, 2.0):
        b = energy_breakdown(model, x)
        assert (b.eta_total - b.eta_pl) - b.eta_ph == 0.0
        assert b.eta_pl == b.eta_pl_plus + b.eta_pl_minus
        assert b.err_total >= 0 and b.err_pl >= 0
        assert b.ok


def test_breakdown_scale_invariance():
    a = energy_breakdown(MirrorModel(1.0), 0.3)
    b = energy_breakdown(MirrorModel(2.0), 0.3)
    for f in ("eta_total", "eta_pl", "eta_ph"):
        assert getattr(b, f) == pytest.approx(getattr(a, f), rel=1e-8)


def test_error_estimates_cover_tolerance_halving(model):
    loose = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-12)
    a = energy_breakdown(model, 0.6, loose)
    b = energy_breakdown(model, 0.6, loose.tightened())
    assert abs(a.eta_total - b.eta_total) <= 2 * a.err_total + 1e-15
    assert abs(a.eta_pl - b.eta_pl) <= 2 * a.err_pl + 1e-15


def test_backends_agree(model, monkeypatch):
    ref = energy_breakdown(model, 0.2)
    monkeypatch.setattr(kernels, "USE_NUMBA", not kernels.USE_NUMBA)
    other = energy_breakdown(model, 0.2)
    assert other.eta_total == pytest.approx(ref.eta_total, rel=1e-10)
    assert other.eta_pl == pytest.approx(ref.eta_pl, rel=1e-10)


def test_direct_photonic_consistency_at_half_lambda(model):
    L = 0.5 * model.lambda_p
    d = photonic_energy_direct(model, L)
    p = photonic_energy(model, L)
    assert d.energy_per_area == pytest.approx(p.energy_per_area, rel=0.05)
    assert abs(d.energy_per_area - p.energy_per_area) <= 10 * (d.error + p.error)


def test_direct_photonic_with_split(model):
    L = 0.5 * model.lambda_p
    d = photonic_energy_direct(model, L, split_at_light_line=True)
    p = photonic_energy(model, L, split_at_light_line=True)
    assert d.energy_per_area == pytest.approx(p.energy_per_area, rel=1e-4)


def test_direct_photonic_towards_perfect_mirrors():
    # better mirrors: the photonic route still reproduces total minus plasmonic
    m = MirrorModel(8.0)
    L = 1.0
    d = photonic_energy_direct(m, L)
    p = photonic_energy(m, L)
    assert d.energy_per_area == pytest.approx(p.energy_per_area, rel=1e-4)


def test_ratio_to_total_at_plasma_wavelength(model):
    # both separate contributions are about 36 times the total energy
    b = energy_breakdown(model, 1.0)
    assert abs(b.eta_pl) / b.eta_total == pytest.approx(36, rel=0.15)
    assert b.eta_ph / b.eta_total == pytest.approx(36, rel=0.15)
    assert b.eta_ph > abs(b.eta_pl)


def test_sweep_collects_failures(model, monkeypatch):
    real = en.energy_breakdown

    def flaky(model, x, cfg=None, **kw):
        if x == pytest.approx(0.1):
            raise en.BranchLostError("synthetic", x, 0.0)
        return real(model, x, cfg, **kw)

    monkeypatch.setattr(en, "energy_breakdown", flaky)
    rows = sweep_breakdown(model, [0.01, 0.1, 1.0])
    assert [r.ok for r in rows] == [True, False, True]
    assert "synthetic" in rows[1].failure
    assert math.isnan(rows[1].eta_total)


def test_sweep_validation(model):
    with pytest.raises(ValueError):
        sweep_breakdown(model, [0.1, 0.05, 0.2])
    with pytest.raises(ValueError):
        sweep_breakdown(model, [-1.0, 0.2])


def test_sweep_parallel_matches_serial(model):
    xs = [0.02, 0.2, 2.0]
    a = sweep_breakdown(model, xs, threads=1)
    b = sweep_breakdown(model, xs, threads=2)
    assert a == b


def test_sweep_shape(model):
    rows = sweep_breakdown(model, np.geomspace(1e-3, 3e2, 20))
    eta = np.array([r.eta_total for r in rows])
    pl = np.array([r.eta_pl for r in rows])
    ph = np.array([r.eta_ph for r in rows])
    assert np.all(np.diff(eta) > 0) and np.all((eta > 0) & (eta < 1))
    assert pl[0] > 0 and pl[-1] < 0
    assert np.all(ph > 0) and np.all(np.diff(ph) > 0)
    assert all(r.eta_pl_plus < 0 < r.eta_pl_minus for r in rows)


def test_crossover_properties(model):
    c = find_plasmonic_crossover(model)
    x = c.L_over_lambda_p
    below = energy_breakdown(model, 0.9 * x)
    above = energy_breakdown(model, 1.1 * x)
    assert below.eta_pl > 0 > above.eta_pl
    assert c.uncertainty > 0
    c2 = find_plasmonic_crossover(MirrorModel(2.0))
    assert c2.L_over_lambda_p == pytest.approx(x, abs=1e-5)


def test_crossover_no_bracket(model):
    with pytest.raises(NoBracketError):
        find_plasmonic_crossover(model, window=(0.2, 0.5))


def test_failed_breakdown_record():
    b = EnergyBreakdown.failed(0.5, "boom")
    assert not b.ok and math.isnan(b.eta_ph)


def test_asymptotic_fits(model):
    f = fit_asymptotic_constants(model, QuadratureConfig(rel_tol=1e-7), points=5)
    assert f.alpha == pytest.approx(1.1876, abs=2e-3)
    assert f.beta_ph_fit.exponent == 0.5 and f.beta_ph_fit.offset == 0.0
    # eta = 1 + eta_pl + eta_ph tends to 1, so both long-distance series share a prefactor
    assert f.beta_pl == pytest.approx(f.beta_ph, rel=1e-3)
    assert f.beta_ph_offset.prefactor == pytest.approx(74.64, rel=2e-3)
    assert f.beta_ph_offset.residual < f.beta_ph_fit.residual
    with pytest.raises(ValueError):
        fit_asymptotic_constants(model, long_window=(30.0, 30.0))
