#pragma once

#include <vector>

#include "omcsim/core.hpp"
#include "omcsim/grid.hpp"

namespace omcsim {

/// Radiation-pressure operating-point derivatives of the circulating power:
/// dP_da1 at fixed mirror position (response to an injected vacuum
/// amplitude-quadrature fluctuation of unit PSD), dP_dx at fixed input field.
/// Construction asserts (2/c) dP_dx == mass * Omega_os^2.
struct RadiationPressureCoupling {
    double dP_da1_w;       // [W per unit vacuum amplitude]
    double dP_dx_w_per_m;  // [W/m]

    static RadiationPressureCoupling at_operating_point(const OperatingPoint& op,
                                                        const MechanicalMode& mode);
};

/// chi_m(Omega) = 1 / (m (Omega_m^2 (1 -/+ i damping) - Omega^2)) [m/N],
/// exp(-i Omega t) convention so Im(chi_m) > 0 (dissipative).
cplx mechanical_susceptibility(const MechanicalMode& mode, double omega);

/// Frequency-dependent optical spring stiffness K_os(Omega) [N/m];
/// K_os(0) equals the quasi-static op.k_os. The positive imaginary part at
/// positive detuning is the spring anti-damping; the servo that stabilizes it
/// in practice is not modeled (measurement band is far below the spring).
cplx spring_stiffness(const OperatingPoint& op, double omega);

/// chi_eff = 1 / (chi_m^{-1} + K_os(Omega)) [m/N].
cplx effective_susceptibility(const OperatingPoint& op, const MechanicalMode& mode,
                              double omega);

/// Idealized free-mass responses with a fixed spring resonance: the mechanical
/// resonance and damping are dropped, so these are exact rational functions of
/// Omega and Omega_os. Signs follow the equation-of-motion convention in which
/// the radiation-pressure force is -(2/c) deltaP.
struct IdealDynamics {
    double mass;          // [kg]
    double omega_os;      // spring resonance [rad/s]
    double dP_da1_w;      // fixed-x power response [W per unit vacuum amplitude]

    double x_per_a1(double omega) const;      // [m per unit vacuum amplitude]
    double x_per_fext(double omega) const;    // [m/N]
    double dP_from_a1(double omega) const;    // [W per unit vacuum amplitude]
    double dP_from_fext(double omega) const;  // [W/N]

private:
    double pole(double omega) const;  // Omega^2 - Omega_os^2, throws when zero
};

/// Full-susceptibility displacement response on a grid.
struct DisplacementResponse {
    std::vector<cplx> x_per_a1;    // [m per unit vacuum amplitude at injection]
    std::vector<cplx> x_per_fext;  // [m/N] == chi_eff
};

DisplacementResponse displacement_response(const OperatingPoint& op, const MechanicalMode& mode,
                                           const FrequencyGrid& grid);

/// Full-susceptibility intracavity power-fluctuation response on a grid.
struct PowerFluctuationResponse {
    std::vector<cplx> dP_from_a1_w;        // [W per unit vacuum amplitude]
    std::vector<cplx> dP_from_fext_w_per_n; // [W/N]
};

PowerFluctuationResponse power_fluctuation_response(const OperatingPoint& op,
                                                    const MechanicalMode& mode,
                                                    const FrequencyGrid& grid);

}  // namespace omcsim
