"""Smoke tests for the python bindings."""

import math

import pytest

import omcsim


def reflection_cavity():
    cfg = omcsim.CavityConfig()
    cfg.length = 0.01
    cfg.t_in = 250e-6
    cfg.t_end = 50e-6
    cfg.loss_rt = 200e-6
    cfg.detuning = 0.55
    cfg.wavelength = 1.064e-6
    cfg.p_in = 50e-6
    cfg.injection_side = omcsim.InjectionSide.THROUGH_MICRORESONATOR
    return cfg


def micromirror():
    mode = omcsim.MechanicalMode()
    mode.mass = 50e-12
    mode.f_m = 876.0
    mode.q = 16000.0
    mode.temperature = 295.0
    mode.damping = omcsim.DampingModel.STRUCTURAL
    return mode


def test_statics():
    st = omcsim.finesse_and_linewidth(reflection_cavity())
    assert st.finesse == pytest.approx(12566.37, rel=1e-4)
    assert st.hwhm_hz == pytest.approx(596.4e3, rel=1e-3)
    assert omcsim.circulating_power(reflection_cavity()) == pytest.approx(0.1536, rel=1e-3)
    spring = omcsim.optical_spring_constant(reflection_cavity(), micromirror())
    assert spring.f_os_hz == pytest.approx(142e3, rel=0.10)


def test_validation_maps_to_value_error():
    cfg = reflection_cavity()
    cfg.t_in = 0.0
    with pytest.raises(ValueError):
        omcsim.finesse_and_linewidth(cfg)


def test_io_model_and_sweep():
    grid = omcsim.FrequencyGrid([20e3])
    model = omcsim.build_io_model(reflection_cavity(), micromirror(), grid)
    trans = model.quantum_noise_psd(omcsim.Port.TRANSMITTED_D, 0.0)
    refl = model.quantum_noise_psd(omcsim.Port.REFLECTED_B, 0.0)
    assert abs(trans[0] - 1.0) < 0.02  # back action cancelled
    assert refl[0] > 1.0  # back action present

    sx = omcsim.thermal_displacement_psd(reflection_cavity(), [micromirror()], grid)
    sweep = model.sweep_readout_angle(omcsim.Port.REFLECTED_B, 20e3, sx.values[0])
    roots = [math.degrees(r) for r in sweep.unity_roots_rad]
    assert len(roots) == 2
    assert abs(roots[0] + 90.0) < 3.0
    assert abs(math.degrees(sweep.thermal_dip_rad) + 60.0) < 5.0


def test_budget_quadrature_sum():
    grid = omcsim.FrequencyGrid.make(1e3, 50e3, 20, omcsim.GridSpacing.LOG)
    model = omcsim.build_io_model(reflection_cavity(), micromirror(), grid)
    budget = omcsim.assemble_budget(model, [micromirror()], [], omcsim.Port.REFLECTED_B, 0.0)
    for i in range(len(budget.total.values)):
        sq = sum(s.asd.values[i] ** 2 for s in budget.sources)
        assert budget.total.values[i] ** 2 == pytest.approx(sq, rel=1e-12)


def test_cross_correlation_roundtrip():
    m = omcsim.SplitDetectionModel()
    m.f_hz = [1.0, 6e4]
    m.alpha = [1.0 + 0.0j, 1.0 + 0.0j]
    m.s_th = [0.8, 0.8]
    loop = omcsim.LoopModel()
    loop.dc_gain = 0.0
    loop.corner_hz = 1e9
    m.loop = loop
    m.p_circ_w = 0.155

    ana = omcsim.analytic_csd(m)
    assert ana.open_loop[0] == pytest.approx(0.8)

    pair = omcsim.synthesize_timeseries(m, 2.0, 131072.0, 7)
    again = omcsim.synthesize_timeseries(m, 2.0, 131072.0, 7)
    assert pair.ch1 == again.ch1

    w = omcsim.welch_csd(pair, 4096, 0.5)
    band = [abs(c) for f, c in zip(w.f_hz, w.csd) if 1e3 <= f <= 50e3]
    mean = sum(band) / len(band)
    assert mean == pytest.approx(0.8, rel=0.05)


def test_calibration():
    meas = omcsim.SpringMeasurement()
    meas.f_os_hz = 142e3
    meas.p_in_w = 50e-6
    meas.detuning = 0.55
    meas.detuning_sigma = 0.05
    meas.injection_side = omcsim.InjectionSide.THROUGH_MICRORESONATOR
    known = omcsim.KnownCavity()
    known.t_in = 250e-6
    known.t_end = 50e-6
    known.length_m = 0.01
    known.wavelength_m = 1.064e-6
    known.mass_kg = 50e-12
    result = omcsim.infer_power_and_loss(meas, known)
    assert result.p_circ_w == pytest.approx(0.155, abs=0.010)
    assert result.loss_rt == pytest.approx(200e-6, abs=10e-6)

    opt = omcsim.optimal_detuning(reflection_cavity(), micromirror())
    assert opt.delta_star == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-3)
