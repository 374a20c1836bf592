#include <cmath>

#include "doctest.h"
#include "omcsim/noise_budget.hpp"
#include "test_setups.hpp"

using namespace omcsim;

TEST_CASE("thermal displacement noise at 20 kHz matches the direct formula") {
    const MechanicalMode mode = fundamental_mode();
    const FrequencyGrid grid({20e3});
    // independent oracle: structural-damping force PSD through a pinned-spring
    // susceptibility with the measured 142 kHz resonance
    const double omega = grid.omega(0);
    const double omega_os = two_pi * 142e3;
    const double s_f = 4.0 * constants.k_B * mode.temperature * mode.mass *
                       mode.omega_m() * mode.omega_m() / (mode.q * omega);
    const double chi2 =
        1.0 / std::pow(mode.mass * (omega_os * omega_os - omega * omega), 2);
    const double oracle_asd = std::sqrt(s_f * chi2);  // ~2.8e-18 m/rtHz
    CHECK(oracle_asd == doctest::Approx(2.8e-18).epsilon(0.03));

    const std::vector<std::vector<cplx>> chi = {
        {cplx(1.0 / (mode.mass * (omega_os * omega_os - omega * omega)), 0.0)}};
    const NoiseSpectrum sx = thermal_displacement_psd({mode}, chi, grid);
    CHECK(std::sqrt(sx.values[0]) == doctest::Approx(oracle_asd).epsilon(1e-12));

    // the full model's susceptibility lands within a few percent of the pin
    const OperatingPoint op = operating_point(reflection_cavity());
    const NoiseSpectrum full = thermal_displacement_psd(op, {mode}, grid);
    CHECK(std::sqrt(full.values[0]) == doctest::Approx(oracle_asd).epsilon(0.08));
}

TEST_CASE("viscous and structural damping coincide at the mechanical resonance") {
    MechanicalMode structural = fundamental_mode();
    MechanicalMode viscous = structural;
    viscous.damping = DampingModel::Viscous;
    const FrequencyGrid grid({structural.f_m});
    const std::vector<std::vector<cplx>> chi = {{cplx(1.0, 0.0)}};
    const double s = thermal_displacement_psd({structural}, chi, grid).values[0];
    const double v = thermal_displacement_psd({viscous}, chi, grid).values[0];
    CHECK(s == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("thermal noise scales linearly with temperature") {
    MechanicalMode hot = fundamental_mode();
    hot.temperature *= 2.0;
    const OperatingPoint op = operating_point(reflection_cavity());
    const FrequencyGrid grid = FrequencyGrid::make(1e3, 50e3, 5, GridSpacing::Log);
    const NoiseSpectrum cold_s = thermal_displacement_psd(op, {fundamental_mode()}, grid);
    const NoiseSpectrum hot_s = thermal_displacement_psd(op, {hot}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(hot_s.values[i] / cold_s.values[i] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("thermal PSD is positive and continuous on the grid") {
    const OperatingPoint op = operating_point(transmission_cavity());
    const FrequencyGrid grid = FrequencyGrid::make(100.0, 100e3, 400, GridSpacing::Log);
    const NoiseSpectrum sx = thermal_displacement_psd(op, {fundamental_mode()}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(sx.values[i] > 0.0);
        if (i > 0) {
            const double jump = sx.values[i] / sx.values[i - 1];
            CHECK(jump < 10.0);
            CHECK(jump > 0.1);
        }
    }
}

TEST_CASE("two-source budget obeys the quadrature-sum identity") {
    const CavityConfig cfg = transmission_cavity();
    const MechanicalMode mode = fundamental_mode();
    const FrequencyGrid grid = FrequencyGrid::make(1e3, 50e3, 50, GridSpacing::Log);
    const IoModel model = build_io_model(cfg, mode, grid);
    const Budget budget = assemble_budget(model, {mode}, {}, Port::TransmittedD, 0.0);
    REQUIRE(budget.sources.size() == 2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double sq = 0.0;
        for (const auto& s : budget.sources) sq += s.asd.values[i] * s.asd.values[i];
        CHECK(budget.total.values[i] * budget.total.values[i] ==
              doctest::Approx(sq).epsilon(1e-12));
    }
}

TEST_CASE("budget total never decreases when a source is added") {
    const CavityConfig cfg = transmission_cavity();
    const MechanicalMode mode = fundamental_mode();
    const FrequencyGrid grid = FrequencyGrid::make(1e3, 50e3, 20, GridSpacing::Log);
    const IoModel model = build_io_model(cfg, mode, grid);
    const Budget bare = assemble_budget(model, {mode}, {}, Port::TransmittedD, 0.0);

    AncillaryNoise extra;
    extra.label = "dark";
    extra.reference = NoiseReference::DisplacementReferred;
    extra.spectrum = NoiseSpectrum{{100.0, 100e3}, {1e-36, 1e-36}, "m^2/Hz"};
    const Budget more = assemble_budget(model, {mode}, {extra}, Port::TransmittedD, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(more.total.values[i] >= bare.total.values[i]);
}

TEST_CASE("displacement referral round trip is the identity") {
    const CavityConfig cfg = reflection_cavity();
    const MechanicalMode mode = fundamental_mode();
    const FrequencyGrid grid = FrequencyGrid::make(1e3, 50e3, 25, GridSpacing::Log);
    const IoModel model = build_io_model(cfg, mode, grid);
    const auto quantum = quantum_noise_psd(model, Port::ReflectedB, 0.0);
    const auto transfer = signal_transfer(model, Port::ReflectedB, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double referred = quantum[i] / (transfer[i] * transfer[i]);
        const double back = referred * transfer[i] * transfer[i];
        CHECK(back == doctest::Approx(quantum[i]).epsilon(1e-12));
    }
}

TEST_CASE("orientation comparison reproduces the ~2 dB reduction at 20 kHz") {
    const MechanicalMode mode = fundamental_mode();
    const FrequencyGrid grid = FrequencyGrid::make(200.0, 50e3, 240, GridSpacing::Log);
    const IoModel trans_model = build_io_model(transmission_cavity(), mode, grid);
    const IoModel refl_model = build_io_model(reflection_cavity(), mode, grid);
    const Budget trans = assemble_budget(trans_model, {mode}, {}, Port::TransmittedD, 0.0);
    const Budget refl = assemble_budget(refl_model, {mode}, {}, Port::ReflectedB, 0.0);
    const OrientationComparison cmp = compare_orientations(trans, refl);

    SUBCASE("identical budgets give unit ratio") {
        const OrientationComparison self = compare_orientations(trans, trans);
        for (double r : self.amplitude_ratio.values) CHECK(r == 1.0);
    }
    SUBCASE("reflection noisier than transmission through the audio band") {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] >= 2e3 && grid[i] <= 50e3) CHECK(cmp.amplitude_ratio.values[i] > 1.0);
        }
    }
    SUBCASE("about 2 dB at 20 kHz") {
        std::size_t i20 = 0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (std::abs(grid[i] - 20e3) < std::abs(grid[i20] - 20e3)) i20 = i;
        const double db = 20.0 * std::log10(cmp.amplitude_ratio.values[i20]);
        CHECK(db == doctest::Approx(2.0).epsilon(0.5));  // within +/- 1 dB
    }
    SUBCASE("budgets converge at low frequency") {
        CHECK(cmp.amplitude_ratio.values.front() < 1.05);
    }
}

TEST_CASE("grid mismatch is rejected") {
    const MechanicalMode mode = fundamental_mode();
    const FrequencyGrid g1 = FrequencyGrid::make(1e3, 50e3, 10, GridSpacing::Log);
    const FrequencyGrid g2 = FrequencyGrid::make(1e3, 50e3, 11, GridSpacing::Log);
    const Budget a =
        assemble_budget(build_io_model(transmission_cavity(), mode, g1), {mode}, {},
                        Port::TransmittedD, 0.0);
    const Budget b =
        assemble_budget(build_io_model(reflection_cavity(), mode, g2), {mode}, {},
                        Port::ReflectedB, 0.0);
    CHECK_THROWS_AS(compare_orientations(a, b), ValidationError);
}

TEST_CASE("shot-referred ancillary noise cannot be referred at a blind angle") {
    const CavityConfig cfg = reflection_cavity();
    const MechanicalMode mode = fundamental_mode();
    const FrequencyGrid grid({20e3});
    const IoModel model = build_io_model(cfg, mode, grid);
    const AngleSweep sweep = sweep_readout_angle(model, Port::ReflectedB, 20e3, 0.0);
    AncillaryNoise rel;
    rel.label = "iss";
    rel.reference = NoiseReference::ShotNoiseRelative;
    rel.spectrum = NoiseSpectrum{{100.0, 100e3}, {0.5, 0.5}, "rel_shot"};
    // referable at a generic angle
    CHECK_NOTHROW(assemble_budget(model, {mode}, {rel}, Port::ReflectedB, 0.0));
    // interpolation range violations are named
    AncillaryNoise narrow = rel;
    narrow.spectrum = NoiseSpectrum{{30e3, 40e3}, {0.5, 0.5}, "rel_shot"};
    CHECK_THROWS_AS(assemble_budget(model, {mode}, {narrow}, Port::ReflectedB, 0.0),
                    ValidationError);
    (void)sweep;
}

TEST_CASE("log-log interpolation follows power laws exactly") {
    NoiseSpectrum spec;
    spec.units = "m^2/Hz";
    for (double f = 10.0; f <= 1e5 + 1.0; f *= 10.0) {
        spec.f_hz.push_back(f);
        spec.values.push_back(3.0 / (f * f));  // 1/f^2 power law
    }
    const FrequencyGrid grid = FrequencyGrid::make(20.0, 9e4, 40, GridSpacing::Log);
    const auto vals = interpolate_loglog(spec, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(vals[i] == doctest::Approx(3.0 / (grid[i] * grid[i])).epsilon(1e-12));
}
