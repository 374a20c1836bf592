#pragma once

#include "omcsim/core.hpp"

namespace omcsim {

/// A measured optical-spring frequency together with the operating conditions
/// it was taken at.
struct SpringMeasurement {
    double f_os_hz = 0.0;         // measured spring resonance [Hz]
    double p_in_w = 0.0;          // input power [W]
    double detuning = 0.0;        // [HWHM linewidths]
    double detuning_sigma = 0.0;  // 1-sigma detuning uncertainty
    InjectionSide injection_side = InjectionSide::ThroughMicroresonator;
};

/// Fixed, datasheet-known cavity properties.
struct KnownCavity {
    double t_in = 0.0;
    double t_end = 0.0;
    double length_m = 0.0;
    double wavelength_m = 0.0;
    double mass_kg = 0.0;
};

struct CalibrationResult {
    double p_circ_w = 0.0;
    double p_circ_sigma_w = 0.0;
    double loss_rt = 0.0;
    double loss_rt_sigma = 0.0;
    double residual = 0.0;  // relative spring-frequency mismatch at the solution
};

struct CalibrationOptions {
    // Quasi-static spring formula by default (measurement far below the cavity
    // pole). The refinement instead matches the resonance of the full
    // frequency-dependent spring, m Omega^2 = Re K_os(Omega), which sits a few
    // percent below the quasi-static value at spring frequencies approaching
    // the linewidth.
    bool full_cavity_response = false;
};

/// Invert a spring measurement into circulating power and round-trip loss.
/// Eliminating the power through the spring relation leaves a monotone scalar
/// problem in loss_rt, solved by bracketed root finding; the detuning error
/// bar is propagated by symmetric finite differences.
CalibrationResult infer_power_and_loss(const SpringMeasurement& meas, const KnownCavity& known,
                                       const CalibrationOptions& options = {});

/// Resonance frequency [Hz] of the full frequency-dependent optical spring at
/// an operating point (mechanical resonance neglected against the spring).
double full_spring_resonance_hz(const OperatingPoint& op, double mass_kg);

struct DetuningOptimum {
    double delta_star = 0.0;   // argmax of f_os over detuning [HWHM linewidths]
    double f_os_max_hz = 0.0;
};

/// Locate the detuning that maximizes the spring frequency at fixed input
/// power (golden-section search, 1e-4 absolute in detuning).
DetuningOptimum optimal_detuning(const CavityConfig& cfg, const MechanicalMode& mode);

}  // namespace omcsim
