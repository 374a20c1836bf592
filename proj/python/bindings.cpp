// Python bindings for the cavity model: statics, input-output quantum noise,
// budgets, cross-correlation Monte Carlo, and calibration.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "omcsim/calibration.hpp"
#include "omcsim/cross_correlation.hpp"
#include "omcsim/noise_budget.hpp"
#include "omcsim/quantum_noise.hpp"

namespace py = pybind11;
using namespace omcsim;

PYBIND11_MODULE(_omcsim, m) {
    m.doc() = "frequency-domain model of a detuned optomechanical Fabry-Perot cavity";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<InjectionSide>(m, "InjectionSide")
        .value("THROUGH_MACRO_MIRROR", InjectionSide::ThroughMacroMirror)
        .value("THROUGH_MICRORESONATOR", InjectionSide::ThroughMicroresonator);

    py::enum_<DampingModel>(m, "DampingModel")
        .value("STRUCTURAL", DampingModel::Structural)
        .value("VISCOUS", DampingModel::Viscous);

    py::enum_<Port>(m, "Port")
        .value("INPUT_A", Port::InputA)
        .value("REFLECTED_B", Port::ReflectedB)
        .value("END_VACUUM_C", Port::EndVacuumC)
        .value("TRANSMITTED_D", Port::TransmittedD)
        .value("LOSS", Port::Loss);

    py::enum_<GridSpacing>(m, "GridSpacing")
        .value("LOG", GridSpacing::Log)
        .value("LINEAR", GridSpacing::Linear);

    py::class_<CavityConfig>(m, "CavityConfig")
        .def(py::init<>())
        .def_readwrite("length", &CavityConfig::length)
        .def_readwrite("t_in", &CavityConfig::t_in)
        .def_readwrite("t_end", &CavityConfig::t_end)
        .def_readwrite("loss_rt", &CavityConfig::loss_rt)
        .def_readwrite("detuning", &CavityConfig::detuning)
        .def_readwrite("wavelength", &CavityConfig::wavelength)
        .def_readwrite("p_in", &CavityConfig::p_in)
        .def_readwrite("injection_side", &CavityConfig::injection_side)
        .def("validate", &CavityConfig::validate);

    py::class_<MechanicalMode>(m, "MechanicalMode")
        .def(py::init<>())
        .def_readwrite("mass", &MechanicalMode::mass)
        .def_readwrite("f_m", &MechanicalMode::f_m)
        .def_readwrite("q", &MechanicalMode::q)
        .def_readwrite("temperature", &MechanicalMode::temperature)
        .def_readwrite("damping", &MechanicalMode::damping)
        .def("validate", &MechanicalMode::validate);

    py::class_<FrequencyGrid>(m, "FrequencyGrid")
        .def(py::init<std::vector<double>>())
        .def_static("make", &FrequencyGrid::make, py::arg("f_min_hz"), py::arg("f_max_hz"),
                    py::arg("points"), py::arg("spacing") = GridSpacing::Log)
        .def_property_readonly("f_hz", &FrequencyGrid::f_hz)
        .def("__len__", &FrequencyGrid::size);

    py::class_<CavityStatics>(m, "CavityStatics")
        .def_readonly("finesse", &CavityStatics::finesse)
        .def_readonly("fsr_hz", &CavityStatics::fsr_hz)
        .def_readonly("hwhm_hz", &CavityStatics::hwhm_hz);

    py::class_<OpticalSpring>(m, "OpticalSpring")
        .def_readonly("k_os", &OpticalSpring::k_os)
        .def_readonly("f_os_hz", &OpticalSpring::f_os_hz);

    m.def("finesse_and_linewidth", &finesse_and_linewidth, py::arg("cfg"));
    m.def("circulating_power", &circulating_power, py::arg("cfg"));
    m.def("optical_spring_constant", &optical_spring_constant, py::arg("cfg"), py::arg("mode"));

    py::class_<IoModelOptions>(m, "IoModelOptions")
        .def(py::init<>())
        .def_readwrite("freeze_mechanics", &IoModelOptions::freeze_mechanics)
        .def_readwrite("condition_limit", &IoModelOptions::condition_limit);

    py::class_<AngleSweep>(m, "AngleSweep")
        .def_readonly("freq_hz", &AngleSweep::freq_hz)
        .def_readonly("zeta_rad", &AngleSweep::zeta_rad)
        .def_readonly("quantum", &AngleSweep::quantum)
        .def_readonly("thermal", &AngleSweep::thermal)
        .def_readonly("total", &AngleSweep::total)
        .def_readonly("unity_roots_rad", &AngleSweep::unity_roots_rad)
        .def_readonly("thermal_dip_rad", &AngleSweep::thermal_dip_rad)
        .def_property_readonly("degenerate_all_shot", [](const AngleSweep& s) {
            return s.root_status == RootStatus::DegenerateAllShot;
        });

    py::class_<IoModel>(m, "IoModel")
        .def_property_readonly("f_hz", [](const IoModel& m_) { return m_.grid.f_hz(); })
        .def_property_readonly("chi_eff", [](const IoModel& m_) { return m_.chi_eff; })
        .def_property_readonly("spring", [](const IoModel& m_) { return m_.spring; })
        .def("quantum_noise_psd",
             [](const IoModel& m_, Port p, double zeta) { return quantum_noise_psd(m_, p, zeta); },
             py::arg("port"), py::arg("zeta_rad"))
        .def("signal_transfer",
             [](const IoModel& m_, Port p, double zeta) { return signal_transfer(m_, p, zeta); },
             py::arg("port"), py::arg("zeta_rad"))
        .def("sweep_readout_angle",
             [](const IoModel& m_, Port p, double f, double sx) {
                 return sweep_readout_angle(m_, p, f, sx);
             },
             py::arg("port"), py::arg("freq_hz"), py::arg("thermal_sx_m2_hz"));

    m.def("build_io_model", &build_io_model, py::arg("cfg"), py::arg("mode"), py::arg("grid"),
          py::arg("options") = IoModelOptions{});

    py::class_<NoiseSpectrum>(m, "NoiseSpectrum")
        .def(py::init<>())
        .def_readwrite("f_hz", &NoiseSpectrum::f_hz)
        .def_readwrite("values", &NoiseSpectrum::values)
        .def_readwrite("units", &NoiseSpectrum::units);

    py::enum_<NoiseReference>(m, "NoiseReference")
        .value("DISPLACEMENT_REFERRED", NoiseReference::DisplacementReferred)
        .value("SHOT_NOISE_RELATIVE", NoiseReference::ShotNoiseRelative);

    py::class_<AncillaryNoise>(m, "AncillaryNoise")
        .def(py::init<>())
        .def_readwrite("label", &AncillaryNoise::label)
        .def_readwrite("spectrum", &AncillaryNoise::spectrum)
        .def_readwrite("reference", &AncillaryNoise::reference);

    m.def(
        "thermal_displacement_psd",
        [](const CavityConfig& cfg, const std::vector<MechanicalMode>& modes,
           const FrequencyGrid& grid) {
            return thermal_displacement_psd(operating_point(cfg), modes, grid);
        },
        py::arg("cfg"), py::arg("modes"), py::arg("grid"));

    py::class_<BudgetSource>(m, "BudgetSource")
        .def_readonly("label", &BudgetSource::label)
        .def_readonly("asd", &BudgetSource::asd);

    py::class_<Budget>(m, "Budget")
        .def_readonly("sources", &Budget::sources)
        .def_readonly("total", &Budget::total);

    m.def("assemble_budget", &assemble_budget, py::arg("model"), py::arg("modes"),
          py::arg("ancillary"), py::arg("port"), py::arg("zeta_rad"));

    py::class_<OrientationComparison>(m, "OrientationComparison")
        .def_readonly("amplitude_ratio", &OrientationComparison::amplitude_ratio)
        .def_readonly("max_ratio", &OrientationComparison::max_ratio)
        .def_readonly("max_ratio_f_hz", &OrientationComparison::max_ratio_f_hz)
        .def_readonly("min_ratio", &OrientationComparison::min_ratio)
        .def_readonly("min_ratio_f_hz", &OrientationComparison::min_ratio_f_hz);

    m.def("compare_orientations", &compare_orientations, py::arg("transmission"),
          py::arg("reflection"));

    py::class_<LoopModel>(m, "LoopModel")
        .def(py::init<>())
        .def_readwrite("dc_gain", &LoopModel::dc_gain)
        .def_readwrite("corner_hz", &LoopModel::corner_hz);

    py::class_<SplitDetectionModel>(m, "SplitDetectionModel")
        .def(py::init<>())
        .def_readwrite("f_hz", &SplitDetectionModel::f_hz)
        .def_readwrite("alpha", &SplitDetectionModel::alpha)
        .def_readwrite("s_th", &SplitDetectionModel::s_th)
        .def_readwrite("loop", &SplitDetectionModel::loop)
        .def_readwrite("p_circ_w", &SplitDetectionModel::p_circ_w);

    py::class_<AnalyticCsd>(m, "AnalyticCsd")
        .def_readonly("f_hz", &AnalyticCsd::f_hz)
        .def_readonly("open_loop", &AnalyticCsd::open_loop)
        .def_readonly("closed_loop", &AnalyticCsd::closed_loop)
        .def_readonly("closed_loop_alt", &AnalyticCsd::closed_loop_alt)
        .def_readonly("psd1_closed", &AnalyticCsd::psd1_closed);

    m.def("analytic_csd", &analytic_csd, py::arg("model"));

    py::class_<TimeSeriesPair>(m, "TimeSeriesPair")
        .def_readonly("sample_rate_hz", &TimeSeriesPair::sample_rate_hz)
        .def_readonly("ch1", &TimeSeriesPair::ch1)
        .def_readonly("ch2", &TimeSeriesPair::ch2)
        .def_readonly("seed", &TimeSeriesPair::seed);

    m.def("synthesize_timeseries", &synthesize_timeseries, py::arg("model"),
          py::arg("duration_s"), py::arg("sample_rate_hz"), py::arg("seed"));

    py::class_<WelchResult>(m, "WelchResult")
        .def_readonly("f_hz", &WelchResult::f_hz)
        .def_readonly("csd", &WelchResult::csd)
        .def_readonly("psd1", &WelchResult::psd1)
        .def_readonly("psd2", &WelchResult::psd2)
        .def_readonly("n_segments", &WelchResult::n_segments);

    py::enum_<Window>(m, "Window").value("HANN", Window::Hann);
    m.def("welch_csd", &welch_csd, py::arg("pair"), py::arg("segment_length"),
          py::arg("overlap_fraction"), py::arg("window") = Window::Hann);
    m.def("coherence", &coherence, py::arg("welch"));

    py::class_<PowerSweepRow>(m, "PowerSweepRow")
        .def_readonly("p_circ_w", &PowerSweepRow::p_circ_w)
        .def_readonly("band_avg_sx", &PowerSweepRow::band_avg_sx)
        .def_readonly("sigma", &PowerSweepRow::sigma);

    py::class_<PowerSweepResult>(m, "PowerSweepResult")
        .def_readonly("rows", &PowerSweepResult::rows)
        .def_readonly("offset", &PowerSweepResult::offset)
        .def_readonly("sqrt_p_coeff", &PowerSweepResult::sqrt_p_coeff)
        .def_readonly("sqrt_p_sigma", &PowerSweepResult::sqrt_p_sigma);

    py::class_<PowerSweepOptions>(m, "PowerSweepOptions")
        .def(py::init<>())
        .def_readwrite("band_lo_hz", &PowerSweepOptions::band_lo_hz)
        .def_readwrite("band_hi_hz", &PowerSweepOptions::band_hi_hz)
        .def_readwrite("segment_length", &PowerSweepOptions::segment_length)
        .def_readwrite("overlap_fraction", &PowerSweepOptions::overlap_fraction);

    m.def("power_sweep", &power_sweep, py::arg("models"), py::arg("duration_s"),
          py::arg("sample_rate_hz"), py::arg("seed"),
          py::arg("options") = PowerSweepOptions{});

    py::class_<SpringMeasurement>(m, "SpringMeasurement")
        .def(py::init<>())
        .def_readwrite("f_os_hz", &SpringMeasurement::f_os_hz)
        .def_readwrite("p_in_w", &SpringMeasurement::p_in_w)
        .def_readwrite("detuning", &SpringMeasurement::detuning)
        .def_readwrite("detuning_sigma", &SpringMeasurement::detuning_sigma)
        .def_readwrite("injection_side", &SpringMeasurement::injection_side);

    py::class_<KnownCavity>(m, "KnownCavity")
        .def(py::init<>())
        .def_readwrite("t_in", &KnownCavity::t_in)
        .def_readwrite("t_end", &KnownCavity::t_end)
        .def_readwrite("length_m", &KnownCavity::length_m)
        .def_readwrite("wavelength_m", &KnownCavity::wavelength_m)
        .def_readwrite("mass_kg", &KnownCavity::mass_kg);

    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("p_circ_w", &CalibrationResult::p_circ_w)
        .def_readonly("p_circ_sigma_w", &CalibrationResult::p_circ_sigma_w)
        .def_readonly("loss_rt", &CalibrationResult::loss_rt)
        .def_readonly("loss_rt_sigma", &CalibrationResult::loss_rt_sigma)
        .def_readonly("residual", &CalibrationResult::residual);

    py::class_<CalibrationOptions>(m, "CalibrationOptions")
        .def(py::init<>())
        .def_readwrite("full_cavity_response", &CalibrationOptions::full_cavity_response);

    m.def("infer_power_and_loss", &infer_power_and_loss, py::arg("measurement"),
          py::arg("known"), py::arg("options") = CalibrationOptions{});
    m.def("full_spring_resonance_hz",
          [](const CavityConfig& cfg, double mass_kg) {
              return full_spring_resonance_hz(operating_point(cfg), mass_kg);
          },
          py::arg("cfg"), py::arg("mass_kg"));

    py::class_<DetuningOptimum>(m, "DetuningOptimum")
        .def_readonly("delta_star", &DetuningOptimum::delta_star)
        .def_readonly("f_os_max_hz", &DetuningOptimum::f_os_max_hz);

    m.def("optimal_detuning", &optimal_detuning, py::arg("cfg"), py::arg("mode"));
}
