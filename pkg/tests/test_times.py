import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tunneltime import times as tt
from tunneltime.scattering import PiecewisePotential, SquareBarrierParams
from tunneltime.units import ELECTRON, HBAR_EVS, k_of_E
from tunneltime.wavepacket import SpectralPacket

V0 = 10.0
EPS = k_of_E(V0)
K5 = k_of_E(5.0)  # E = V0/2, the reference operating point


def kappa(k):
    return math.sqrt(EPS * EPS - k * k)


# ---------------------------------------------------------------------------
# equal-time references


def test_tau_equivalent_is_free_flight():
    p = SquareBarrierParams(V0, 5.0)
    assert tt.tau_equivalent(p, K5) == pytest.approx(5.0 / ELECTRON.v_of_k(K5), rel=1e-14)


def test_tau_semiclassical_uses_kappa_velocity():
    p = SquareBarrierParams(V0, 5.0)
    want = ELECTRON.m_over_hbar * 5.0 / kappa(K5)
    assert tt.tau_semiclassical(p, K5) == pytest.approx(want, rel=1e-14)


# ---------------------------------------------------------------------------
# phase times


def test_hartman_saturation_value():
    # saturated phase delay 2m/(hbar k kappa) at E = V0/2
    sat = 2.0 * ELECTRON.m_over_hbar / (K5 * kappa(K5))
    assert sat == pytest.approx(1.3164239135e-16, rel=1e-9)
    dT, dR = tt.extrapolated_phase_times(SquareBarrierParams(V0, 14.0), K5)
    assert dT == pytest.approx(sat, rel=1e-2)
    assert dR == pytest.approx(dT, rel=1e-14)  # symmetric barrier: equal delays


def test_hartman_bracket_thick_limit():
    assert tt.hartman_bracket(SquareBarrierParams(V0, 25.0 / EPS * 5), K5) == pytest.approx(
        2.0, abs=1e-12)


def test_phase_time_zero_width():
    assert tt.extrapolated_phase_times(SquareBarrierParams(V0, 0.0), K5) == (0.0, 0.0)


@pytest.mark.parametrize("krel", [0.25, 0.6, 0.95, 1.3, 2.2])
def test_phase_times_closed_vs_fd(krel):
    # closed derivative against an independent transfer-matrix difference
    p = SquareBarrierParams(V0, 5.0)
    k = krel * EPS
    dT_c, dR_c = tt.extrapolated_phase_times(p, k)
    dT_f, dR_f = tt.phase_times_fd(p, k)
    assert dT_f == pytest.approx(dT_c, rel=1e-6)
    assert dR_f == pytest.approx(dR_c, rel=1e-6)


def test_phase_times_continuous_through_top():
    p = SquareBarrierParams(V0, 5.0)
    lo = tt.extrapolated_phase_times(p, EPS * (1 - 2e-10))[0]
    at = tt.extrapolated_phase_times(p, EPS)[0]
    hi = tt.extrapolated_phase_times(p, EPS * (1 + 2e-10))[0]
    assert lo == pytest.approx(at, rel=1e-5)
    assert hi == pytest.approx(at, rel=1e-5)


# ---------------------------------------------------------------------------
# dwell times


@pytest.mark.parametrize("krel", [0.3, 0.7, 1.5])
def test_dwell_closed_vs_integral(krel):
    k = krel * EPS
    p = SquareBarrierParams(V0, 5.0)
    closed = tt.dwell_time_closed(p, k)
    quad = tt.dwell_time(p.potential(), k, 0.0, 5.0)
    assert quad == pytest.approx(closed, rel=1e-8)


def test_dwell_asymptote():
    # hbar k/(V0 kappa) at kappa d = 15
    d = 15.0 / kappa(K5)
    want = HBAR_EVS * K5 / (V0 * kappa(K5))
    assert tt.dwell_time_closed(SquareBarrierParams(V0, d), K5) == pytest.approx(want, rel=5e-3)


def test_dwell_region_additivity():
    k = 0.55 * EPS
    pot = PiecewisePotential.square(V0, 5.0)
    whole = tt.dwell_time(pot, k, -2.0, 7.0)
    parts = (tt.dwell_time(pot, k, -2.0, 2.0) + tt.dwell_time(pot, k, 2.0, 7.0))
    assert parts == pytest.approx(whole, rel=1e-10)


# ---------------------------------------------------------------------------
# spin-rotation times


@pytest.mark.parametrize("krel", [0.3, 0.7, 1.4, 2.0])
def test_larmor_closed_vs_derivative_route(krel):
    p = SquareBarrierParams(V0, 5.0)
    k = krel * EPS
    ty_c, tz_c, tx_c = tt.larmor_times(p, k)
    ty_d, tz_d, tx_d = tt.larmor_times_kappa_derivative(p, k)
    assert ty_d == pytest.approx(ty_c, rel=1e-6)
    assert tz_d == pytest.approx(tz_c, rel=1e-6)
    assert tx_c == pytest.approx(math.hypot(ty_c, tz_c), rel=1e-14)


def test_larmor_equals_dwell():
    p = SquareBarrierParams(V0, 5.0)
    for k in (0.3 * EPS, 0.8 * EPS):
        ty, _, _ = tt.larmor_times(p, k)
        assert ty == pytest.approx(tt.dwell_time_closed(p, k), rel=1e-10)


def test_larmor_thick_limits():
    kap = kappa(K5)
    d = 15.0 / kap
    p = SquareBarrierParams(V0, d)
    ty, tz, _ = tt.larmor_times(p, K5)
    assert tz == pytest.approx(ELECTRON.m_over_hbar * d / kap, rel=1e-2)
    assert ty == pytest.approx(2.0 * ELECTRON.m_over_hbar * K5 / (EPS * EPS * kap), rel=1e-2)


def test_complex_time_components():
    p = SquareBarrierParams(V0, 5.0)
    ty, tz, tx = tt.larmor_times(p, K5)
    ct = tt.complex_time(p, K5)
    assert ct.real == pytest.approx(ty)
    assert ct.imag == pytest.approx(tz)
    assert abs(ct) == pytest.approx(tx, rel=1e-14)


# ---------------------------------------------------------------------------
# oscillating-barrier times


def test_bl_times_values():
    p = SquareBarrierParams(V0, 5.0)
    kap = kappa(K5)
    res = tt.buttiker_landauer(p, K5)
    assert res.tau_BL_T == pytest.approx(ELECTRON.m_over_hbar * 5.0 / kap, rel=1e-14)
    assert res.tau_BL_R == pytest.approx(HBAR_EVS * K5 / (V0 * kap), rel=1e-14)


def test_bl_zero_frequency_limit():
    p = SquareBarrierParams(V0, 5.0)
    dV = 0.5
    res0 = tt.buttiker_landauer(p, K5, omega=0.0, deltaV=dV)
    want = (dV * res0.tau_BL_T / (2.0 * HBAR_EVS)) ** 2
    assert res0.I_plus == pytest.approx(want, rel=1e-14)
    assert res0.I_minus == pytest.approx(want, rel=1e-14)
    # small omega approaches the static value from both sidebands
    res1 = tt.buttiker_landauer(p, K5, omega=1e-4 / res0.tau_BL_T, deltaV=dV)
    assert res1.I_plus == pytest.approx(want, rel=1e-3)
    assert res1.I_minus == pytest.approx(want, rel=1e-3)


def test_bl_crossover_band_ratio():
    p = SquareBarrierParams(V0, 5.0)
    res0 = tt.buttiker_landauer(p, K5)
    with pytest.warns(UserWarning):
        res = tt.buttiker_landauer(p, K5, omega=1.0 / res0.tau_BL_T, deltaV=0.1)
    assert res.band_ratio == pytest.approx(math.tanh(1.0), rel=1e-12)
    assert res.I_plus > res.I_minus  # absorption sideband favoured


def test_bl_validity_warning_on_large_modulation():
    p = SquareBarrierParams(V0, 5.0)
    with pytest.warns(UserWarning, match="deltaV"):
        tt.buttiker_landauer(p, K5, omega=0.0, deltaV=2.0)


def test_bl_rejects_barrier_top():
    with pytest.raises(ValueError):
        tt.buttiker_landauer(SquareBarrierParams(V0, 5.0), EPS)


# ---------------------------------------------------------------------------
# dwell decomposition


@pytest.mark.parametrize("x1", [0.0, -5.0, -20.0])
@pytest.mark.parametrize("krel", [0.2, 0.55, 0.9])
def test_self_interference_identity(krel, x1):
    p = SquareBarrierParams(V0, 5.0)
    res = tt.self_interference_identity(p, krel * EPS, x1=x1, x2=12.0)
    assert abs(res.residual) <= 1e-9 * max(abs(res.tau_dwell), 1e-16)


def test_self_interference_oscillates_with_probe_position():
    # the interference term carries the sin(beta - 2 k x1) signature: moving
    # the upstream probe by a quarter wavelength flips its size
    p = SquareBarrierParams(V0, 5.0)
    k = 0.5 * EPS
    r0 = tt.self_interference_identity(p, k, x1=-3.0)
    r1 = tt.self_interference_identity(p, k, x1=-3.0 - math.pi / (2.0 * k))
    assert r0.tau_self_interference == pytest.approx(-r1.tau_self_interference, rel=1e-6)


def test_self_interference_rejects_bad_probes():
    p = SquareBarrierParams(V0, 5.0)
    with pytest.raises(ValueError):
        tt.self_interference_identity(p, 0.5 * EPS, x1=1.0)
    with pytest.raises(ValueError):
        tt.self_interference_identity(p, 0.5 * EPS, x1=0.0, x2=2.0)


def test_step_barrier_relations():
    k = 0.7 * EPS
    res = tt.step_barrier_times(V0, k)
    E = float(ELECTRON.E_of_k(k))
    assert res.tau_dwell == pytest.approx((E / V0) * res.dtau_phase_R, rel=1e-12)
    assert res.delta_tau_dwell == pytest.approx(((E - V0) / V0) * res.dtau_phase_R, rel=1e-12)
    # independent route: integral of the standing density over the decay region
    assert tt.step_dwell_numeric(V0, k) == pytest.approx(res.tau_dwell, rel=1e-9)


# ---------------------------------------------------------------------------
# spectral filtering


def test_reshaping_thin_barrier_no_violation():
    res = tt.reshaping_check(SquareBarrierParams(V0, 0.05), 0.7 * EPS, 0.07 * EPS)
    assert abs(res.peak_shift) < 0.07 * EPS
    assert res.violation_interval is None


def test_reshaping_zero_width():
    res = tt.reshaping_check(SquareBarrierParams(V0, 0.0), 0.7 * EPS, 0.1 * EPS)
    assert res.peak_shift == pytest.approx(0.0, abs=1e-4)
    assert res.weight_above_eps < 0.05


def test_reshaping_thick_barrier_pushes_weight_up():
    # the e^{-2 kappa d} filter moves the transmitted peak above k0
    res = tt.reshaping_check(SquareBarrierParams(V0, 20.0 / EPS), 0.7 * EPS, 0.07 * EPS)
    assert res.peak_shift > 0.0
    assert res.violation_interval is not None


def test_reshaping_rejects_bad_dk():
    with pytest.raises(ValueError):
        tt.reshaping_check(SquareBarrierParams(V0, 5.0), 0.7 * EPS, 0.0)


# ---------------------------------------------------------------------------
# centroid times


def make_summary(dk, d):
    pkt = SpectralPacket.gaussian(K5, dk)
    return tt.spectrum_summary(pkt, SquareBarrierParams(V0, d))


def test_spectrum_summary_symmetric_input():
    s = make_summary(0.02, 5.0)
    assert s.mean_k_in == pytest.approx(K5, rel=1e-10)
    assert s.mean_k_T > K5  # filter favours the fast components
    assert s.x0 == 0.0


def test_centroid_zero_width_barrier():
    s = make_summary(0.02, 0.0)
    tau_T, _ = tt.centroid_times(s, SquareBarrierParams(V0, 0.0))
    assert tau_T == pytest.approx(0.0, abs=1e-22)


def test_centroid_approaches_phase_time():
    p = SquareBarrierParams(V0, 5.0)
    dT, _ = tt.extrapolated_phase_times(p, K5)
    errs = []
    for dk in (0.02, 0.005):
        tau_T, _ = tt.centroid_times(make_summary(dk, 5.0), p)
        errs.append(abs(tau_T - dT))
    assert errs[1] < errs[0]  # converges toward the monochromatic limit
    assert errs[1] < 0.05 * dT


# ---------------------------------------------------------------------------
# assembled report


def test_time_report_fields_finite():
    rep = tt.time_report(SquareBarrierParams(V0, 5.0), K5)
    for name in ("tau_eq", "dtau_phase_T", "dtau_phase_R", "tau_dwell",
                 "tau_larmor_y", "tau_larmor_z", "tau_larmor_x",
                 "tau_BL_T", "tau_BL_R", "tau_semiclassical"):
        assert math.isfinite(getattr(rep, name)), name
    assert rep.k == K5
    assert rep.tau_dwell == pytest.approx(rep.tau_larmor_y, rel=1e-10)


def test_time_report_finite_at_barrier_top():
    rep = tt.time_report(SquareBarrierParams(V0, 5.0), EPS)
    assert math.isfinite(rep.dtau_phase_T)
    assert math.isfinite(rep.tau_dwell)
    assert math.isfinite(rep.tau_BL_T)


@settings(max_examples=30, deadline=None)
@given(krel=st.floats(0.1, 0.95), deps=st.floats(2.0, 20.0))
def test_phase_dwell_selfinterference_consistency(krel, deps):
    # tau_dwell <= phase-time scale sanity across the sub-barrier grid:
    # identity residual stays at solver precision everywhere
    p = SquareBarrierParams(V0, deps / EPS)
    res = tt.self_interference_identity(p, krel * EPS, x1=-2.0)
    assert abs(res.residual) <= 1e-9 * max(abs(res.tau_dwell), 1e-16)
