import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casmodes.errors import DomainError
from casmodes.modes import omega_sp
from casmodes.optics import (
    DegradedPrecisionWarning,
    FrequencySector,
    MirrorModel,
    Polarization,
    classify_sector,
    dielectric,
    dielectric_imag_axis,
    phase_scan,
    phase_shift,
    reflection,
    reflection_imag_axis,
)

TE, TM = Polarization.TE, Polarization.TM
pos = st.floats(min_value=1e-3, max_value=1e2, allow_nan=False)


def test_model_invariants():
    m = MirrorModel(2.5)
    assert m.lambda_p * m.omega_p == pytest.approx(2 * math.pi, rel=0, abs=1e-15)
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(DomainError):
            MirrorModel(bad)


def test_enums():
    assert len(Polarization) == 2
    assert len(FrequencySector) == 3
    assert classify_sector(0.5, 0.5) is FrequencySector.PROPAGATING
    assert classify_sector(0.4, 0.5) is FrequencySector.EVANESCENT


def test_dielectric_examples(model):
    assert dielectric(model, 1.0) == 0.0
    assert dielectric(model, 0.5) == pytest.approx(-3.0)
    assert dielectric(model, 1e8) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        dielectric(model, 0.0)


def test_dielectric_imag_examples(model):
    assert dielectric_imag_axis(model, 1.0) == pytest.approx(2.0)
    assert dielectric_imag_axis(model, 0.5) == pytest.approx(5.0)
    assert dielectric_imag_axis(model, 1e8) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        dielectric_imag_axis(model, 0.0)
    xi = np.geomspace(1e-3, 1e3, 50)
    assert np.all(np.diff(dielectric_imag_axis(model, xi)) < 0)


def test_perfect_reflector_limit(model):
    for pol in (TE, TM):
        r = reflection(model, pol, 1e-4, 5e-5)
        assert abs(r) == pytest.approx(1.0, abs=1e-12)


def test_perfect_mirror_signs():
    m = MirrorModel(1e6)
    assert reflection(m, TE, 1.0, 0.3) == pytest.approx(-1.0, abs=1e-5)
    assert reflection(m, TM, 1.0, 0.3) == pytest.approx(1.0, abs=1e-5)


def test_transparency_imag_axis(model):
    for pol in (TE, TM):
        assert abs(reflection(model, pol, 1e6, 1.0, FrequencySector.IMAGINARY_AXIS)) < 1e-11


def test_imag_axis_stable_forms_match_fresnel(model):
    # compare with the textbook Fresnel expressions at imaginary frequency
    for xi, k in [(0.1, 0.2), (1.0, 3.0), (5.0, 0.01)]:
        eps = 1 + 1 / xi**2
        kap = math.hypot(k, xi)
        kapm = math.sqrt(k * k + eps * xi * xi)
        assert reflection_imag_axis(model, TE, xi, k) == pytest.approx((kap - kapm) / (kap + kapm), rel=1e-12)
        assert reflection_imag_axis(model, TM, xi, k) == pytest.approx(
            (eps * kap - kapm) / (eps * kap + kapm), rel=1e-12)


def test_large_distance_plasmon_is_pole_of_r(model):
    # the single-interface plasmon frequency is a pole of r_TM: 1/r vanishes
    for k in (0.3, 1.0, 3.0):
        w = omega_sp(model, k)
        r = reflection(model, TM, w, k)
        assert abs(1 / r) < 1e-8


def test_normal_incidence_equal_moduli(model):
    for w in (0.3, 0.9, 1.5, 4.0):
        assert abs(reflection(model, TE, w, 0.0)) == pytest.approx(abs(reflection(model, TM, w, 0.0)), rel=1e-14)


def test_branch_cut_warning(model):
    k = math.sqrt(1.44 - 1.0)  # eps w^2 = k^2 at w = 1.2
    with pytest.warns(DegradedPrecisionWarning):
        reflection(model, TE, 1.2, k)


def test_sector_consistency_checked(model):
    with pytest.raises(DomainError):
        reflection(model, TE, 0.5, 1.0, FrequencySector.PROPAGATING)
    with pytest.raises(DomainError):
        reflection(model, TE, 1.5, 1.0, FrequencySector.EVANESCENT)


@settings(max_examples=200, deadline=None)
@given(w=pos, k=pos)
def test_passivity_real_axis(w, k):
    m = MirrorModel()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegradedPrecisionWarning)
        if w < k:
            return
        for pol in (TE, TM):
            assert abs(reflection(m, pol, w, k)) <= 1 + 1e-12


@settings(max_examples=200, deadline=None)
@given(xi=pos, k=st.floats(min_value=0.0, max_value=1e2))
def test_passivity_imag_axis(xi, k):
    m = MirrorModel()
    for pol in (TE, TM):
        assert abs(reflection_imag_axis(m, pol, xi, k)) < 1
    assert dielectric_imag_axis(m, xi) >= 1


@settings(max_examples=100, deadline=None)
@given(w=pos)
def test_dielectric_below_one(w):
    assert dielectric(MirrorModel(), w) < 1


def test_phase_shift_closed_form_matches_reflection(model):
    for w, k in [(0.6, 0.5), (0.9, 0.2), (1.05, 0.5)]:
        rte = reflection(model, TE, w, k)
        rtm = reflection(model, TM, w, k)
        d_te = phase_shift(model, TE, w, k)
        d_tm = phase_shift(model, TM, w, k)
        assert cmath.exp(1j * d_te) == pytest.approx(-rte, abs=1e-12)
        assert cmath.exp(1j * d_tm) == pytest.approx(rtm, abs=1e-12)


def test_phase_shift_te_example(model):
    d = phase_shift(model, TE, 0.5 + 1e-6, 0.5)
    assert 0 < d < math.pi


def test_phase_shift_vanishes_for_perfect_mirrors():
    for wp in (1e3, 1e5):
        m = MirrorModel(wp)
        assert phase_shift(m, TE, 1.0, 0.5) < 3 / wp
        assert phase_shift(m, TM, 1.0, 0.5) < 3 / wp


def test_phase_shift_evanescent_rejected(model):
    with pytest.raises(DomainError):
        phase_shift(model, TE, 0.4, 0.5)


@pytest.mark.parametrize("pol", [TE, TM])
def test_phase_scan_is_continuous_and_matches(model, pol):
    k = 0.5
    ws = np.linspace(k + 1e-6, math.sqrt(k * k + 1) - 1e-6, 400)
    scan = phase_scan(model, pol, k, ws)
    assert np.max(np.abs(np.diff(scan))) < math.pi
    closed = np.array([phase_shift(model, pol, w, k) for w in ws])
    assert np.max(np.abs(scan - closed)) < 1e-10
