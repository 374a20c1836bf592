#include "omcsim/dynamics.hpp"

#include <cmath>

namespace omcsim {

namespace {

// Fixed-mirror intracavity power response to a unit vacuum amplitude-quadrature
// fluctuation entering the injection port [W].
cplx dP_da1_fixed_x(const OperatingPoint& op, double omega) {
    const cplx g11 = cplx(op.kappa / 2.0, -omega) / op.propagator_det(omega);
    return constants.h_bar * op.omega_laser * op.round_trip_rate() * std::sqrt(2.0) *
           op.field_amp * std::sqrt(op.kappa_in) * g11;
}

cplx chi_m_inverse(const MechanicalMode& mode, double omega) {
    const double wm2 = mode.omega_m() * mode.omega_m();
    if (mode.damping == DampingModel::Structural)
        return mode.mass * (wm2 * cplx(1.0, -1.0 / mode.q) - omega * omega);
    return mode.mass * cplx(wm2 - omega * omega, -omega * mode.omega_m() / mode.q);
}

}  // namespace

RadiationPressureCoupling RadiationPressureCoupling::at_operating_point(
    const OperatingPoint& op, const MechanicalMode& mode) {
    mode.validate();
    RadiationPressureCoupling out{};
    out.dP_da1_w = std::abs(dP_da1_fixed_x(op, 0.0));

    // dP/dx from the Lorentzian buildup: dn/dx = -2 n delta G_x / det(0).
    const double det0 = (op.kappa / 2.0) * (op.kappa / 2.0) + op.delta_rad * op.delta_rad;
    out.dP_dx_w_per_m = -constants.h_bar * op.omega_laser * op.round_trip_rate() * 2.0 *
                        op.photon_number * op.delta_rad * op.freq_pull / det0;

    const double omega_os_sq = op.k_os / mode.mass;
    const double lhs = (2.0 / constants.c) * out.dP_dx_w_per_m;
    const double rhs = mode.mass * omega_os_sq;
    if (std::abs(lhs - rhs) > 1e-9 * std::max(std::abs(lhs), std::abs(rhs)))
        throw NumericalError("radiation-pressure coupling inconsistent with the optical spring");
    return out;
}

cplx mechanical_susceptibility(const MechanicalMode& mode, double omega) {
    return 1.0 / chi_m_inverse(mode, omega);
}

cplx spring_stiffness(const OperatingPoint& op, double omega) {
    return constants.h_bar * op.quad_coupling * op.quad_coupling * op.delta_rad /
           op.propagator_det(omega);
}

cplx effective_susceptibility(const OperatingPoint& op, const MechanicalMode& mode,
                              double omega) {
    const cplx denom = chi_m_inverse(mode, omega) + spring_stiffness(op, omega);
    if (std::abs(denom) == 0.0)
        throw NumericalError("degenerate mechanical resonance: effective stiffness vanishes");
    return 1.0 / denom;
}

double IdealDynamics::pole(double omega) const {
    const double p = omega * omega - omega_os * omega_os;
    if (p == 0.0)
        throw NumericalError("degenerate resonance: undamped response evaluated at the "
                             "optical spring frequency");
    return p;
}

double IdealDynamics::x_per_a1(double omega) const {
    return (2.0 / constants.c) * dP_da1_w / (mass * pole(omega));
}

double IdealDynamics::x_per_fext(double omega) const { return -1.0 / (mass * pole(omega)); }

double IdealDynamics::dP_from_a1(double omega) const {
    return omega * omega / pole(omega) * dP_da1_w;
}

double IdealDynamics::dP_from_fext(double omega) const {
    return -(constants.c / 2.0) * omega_os * omega_os / pole(omega);
}

DisplacementResponse displacement_response(const OperatingPoint& op, const MechanicalMode& mode,
                                           const FrequencyGrid& grid) {
    mode.validate();
    DisplacementResponse out;
    out.x_per_a1.reserve(grid.size());
    out.x_per_fext.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid.omega(i);
        const cplx chi = effective_susceptibility(op, mode, w);
        out.x_per_fext.push_back(chi);
        out.x_per_a1.push_back(-chi * (2.0 / constants.c) * dP_da1_fixed_x(op, w));
    }
    return out;
}

PowerFluctuationResponse power_fluctuation_response(const OperatingPoint& op,
                                                    const MechanicalMode& mode,
                                                    const FrequencyGrid& grid) {
    mode.validate();
    PowerFluctuationResponse out;
    out.dP_from_a1_w.reserve(grid.size());
    out.dP_from_fext_w_per_n.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid.omega(i);
        const cplx chi_inv_m = chi_m_inverse(mode, w);
        const cplx denom = chi_inv_m + spring_stiffness(op, w);
        if (std::abs(denom) == 0.0)
            throw NumericalError("degenerate mechanical resonance in power response");
        const cplx suppression = chi_inv_m / denom;  // chi_eff / chi_m
        out.dP_from_a1_w.push_back(suppression * dP_da1_fixed_x(op, w));
        out.dP_from_fext_w_per_n.push_back((constants.c / 2.0) * (1.0 - suppression));
    }
    return out;
}

}  // namespace omcsim
