#pragma once

#include <complex>

#include "omcsim/constants.hpp"
#include "omcsim/errors.hpp"

namespace omcsim {

using cplx = std::complex<double>;

enum class InjectionSide {
    ThroughMacroMirror,    // light enters via the fixed macroscopic mirror
    ThroughMicroresonator  // light enters via the movable micromirror
};

/// Detuned Fabry-Perot cavity at its operating point. All formulas assume the
/// high-finesse regime (linear buildup, Lorentzian detuning response), so the
/// total round-trip power loss t_in + t_end + loss_rt must stay well below 1.
///
/// Sign convention: positive `detuning` (in HWHM linewidths) gives a positive,
/// restoring optical spring. Published plots of the same operating point
/// sometimes quote the detuning with the opposite sign; only the sign of the
/// spring is observable here.
struct CavityConfig {
    double length = 0.0;      // mirror spacing [m]
    double t_in = 0.0;        // power transmission, injection-side mirror
    double t_end = 0.0;       // power transmission, far mirror
    double loss_rt = 0.0;     // excess round-trip power loss
    double detuning = 0.0;    // carrier offset from resonance [HWHM linewidths]
    double wavelength = 0.0;  // carrier wavelength [m]
    double p_in = 0.0;        // input power [W]
    InjectionSide injection_side = InjectionSide::ThroughMacroMirror;

    void validate() const;
    double round_trip_loss_total() const { return t_in + t_end + loss_rt; }
};

enum class DampingModel { Structural, Viscous };

/// One mechanical mode of the movable mirror.
struct MechanicalMode {
    double mass = 0.0;         // effective mass [kg]
    double f_m = 0.0;          // natural frequency [Hz]
    double q = 0.0;            // quality factor
    double temperature = 0.0;  // bath temperature [K]
    DampingModel damping = DampingModel::Structural;

    void validate() const;
    double omega_m() const { return two_pi * f_m; }
};

struct CavityStatics {
    double finesse;  // 2*pi / total round-trip loss
    double fsr_hz;   // free spectral range
    double hwhm_hz;  // half linewidth
};

CavityStatics finesse_and_linewidth(const CavityConfig& cfg);

/// One-way circulating power [W] at the configured detuning.
double circulating_power(const CavityConfig& cfg);

struct OpticalSpring {
    double k_os;     // quasi-static spring constant [N/m], positive = restoring
    double f_os_hz;  // spring resonance sqrt(k_os/m)/2pi
};

/// Quasi-static optical spring (valid for signal frequencies well below the
/// cavity linewidth).
OpticalSpring optical_spring_constant(const CavityConfig& cfg, const MechanicalMode& mode);

/// Cavity quantities expressed as single-pole equation-of-motion coefficients,
/// shared by the response and input-output solvers. Field amplitudes are in
/// photon-number units; quadrature operators are normalized so vacuum has
/// one-sided PSD 1. Time convention is exp(-i*Omega*t).
struct OperatingPoint {
    double length_m;    // mirror spacing [m]
    double kappa_in;    // energy decay rate through injection mirror [1/s]
    double kappa_end;   // through far mirror [1/s]
    double kappa_loss;  // through the lumped intracavity loss port [1/s]
    double kappa;       // total = sum of the above [1/s]
    double delta_rad;   // detuning [rad/s], = detuning * kappa/2
    double omega_laser; // carrier angular frequency [rad/s]

    double photon_number;  // intracavity photons at the operating point
    double field_amp;      // sqrt(photon_number), carrier taken real positive
    double freq_pull;      // d(omega_cavity)/dx = -omega_laser/length [rad/s/m]
    double quad_coupling;  // s = sqrt(2) * freq_pull * field_amp

    double p_circ_w;  // circulating power at the operating detuning [W]
    double p_res_w;   // circulating power at zero detuning, same input [W]
    double k_os;      // quasi-static spring constant [N/m]

    // det(Omega) = (kappa/2 - i Omega)^2 + delta_rad^2 of the quadrature
    // propagator; the denominator of every per-frequency response.
    cplx propagator_det(double omega) const;

    // Photons per second -> one-way watts conversion rate c/(2 L).
    double round_trip_rate() const { return constants.c / (2.0 * length_m); }
};

OperatingPoint operating_point(const CavityConfig& cfg);

}  // namespace omcsim
