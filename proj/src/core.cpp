#include "omcsim/core.hpp"

#include <cmath>
#include <string>

namespace omcsim {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError("invalid parameter: " + what);
}

}  // namespace

void CavityConfig::validate() const {
    require(length > 0.0, "length must be > 0");
    require(wavelength > 0.0, "wavelength must be > 0");
    require(p_in >= 0.0, "p_in must be >= 0");
    require(t_in > 0.0 && t_in < 1.0, "t_in must be in (0, 1)");
    require(t_end > 0.0 && t_end < 1.0, "t_end must be in (0, 1)");
    require(loss_rt >= 0.0 && loss_rt < 1.0, "loss_rt must be in [0, 1)");
    require(round_trip_loss_total() < 1.0,
            "t_in + t_end + loss_rt must stay below 1 (high-finesse regime)");
    require(std::isfinite(detuning), "detuning must be finite");
}

void MechanicalMode::validate() const {
    require(mass > 0.0, "mass must be > 0");
    require(f_m > 0.0, "f_m must be > 0");
    require(q > 0.0, "q must be > 0");
    require(temperature > 0.0, "temperature must be > 0");
}

CavityStatics finesse_and_linewidth(const CavityConfig& cfg) {
    cfg.validate();
    const double total = cfg.round_trip_loss_total();
    CavityStatics out{};
    out.finesse = two_pi / total;
    out.fsr_hz = constants.c / (2.0 * cfg.length);
    out.hwhm_hz = out.fsr_hz / (2.0 * out.finesse);
    return out;
}

double circulating_power(const CavityConfig& cfg) {
    cfg.validate();
    const double total = cfg.round_trip_loss_total();
    const double buildup = 4.0 * cfg.t_in / (total * total);
    return cfg.p_in * buildup / (1.0 + cfg.detuning * cfg.detuning);
}

OpticalSpring optical_spring_constant(const CavityConfig& cfg, const MechanicalMode& mode) {
    cfg.validate();
    mode.validate();
    const double total = cfg.round_trip_loss_total();
    const double finesse = two_pi / total;
    const double p_res = cfg.p_in * 4.0 * cfg.t_in / (total * total);
    const double d = cfg.detuning;
    const double lorentz = 1.0 + d * d;
    OpticalSpring out{};
    out.k_os = (2.0 * p_res / constants.c) * (8.0 * finesse * d / cfg.wavelength) /
               (lorentz * lorentz);
    // k_os < 0 (anti-restoring detuning) has no real resonance frequency.
    out.f_os_hz = out.k_os >= 0.0 ? std::sqrt(out.k_os / mode.mass) / two_pi
                                  : -std::sqrt(-out.k_os / mode.mass) / two_pi;
    return out;
}

cplx OperatingPoint::propagator_det(double omega) const {
    const cplx pole(kappa / 2.0, -omega);
    return pole * pole + delta_rad * delta_rad;
}

OperatingPoint operating_point(const CavityConfig& cfg) {
    cfg.validate();
    OperatingPoint op{};
    op.length_m = cfg.length;
    const double rate = constants.c / (2.0 * cfg.length);  // per round-trip-time
    op.kappa_in = rate * cfg.t_in;
    op.kappa_end = rate * cfg.t_end;
    op.kappa_loss = rate * cfg.loss_rt;
    op.kappa = op.kappa_in + op.kappa_end + op.kappa_loss;
    op.delta_rad = cfg.detuning * op.kappa / 2.0;
    op.omega_laser = two_pi * constants.c / cfg.wavelength;

    const double half_kappa_sq = (op.kappa / 2.0) * (op.kappa / 2.0);
    const double flux_in = cfg.p_in / (constants.h_bar * op.omega_laser);  // photons/s
    op.photon_number = op.kappa_in * flux_in / (half_kappa_sq + op.delta_rad * op.delta_rad);
    op.field_amp = std::sqrt(op.photon_number);
    op.freq_pull = -op.omega_laser / cfg.length;
    op.quad_coupling = std::sqrt(2.0) * op.freq_pull * op.field_amp;

    const double energy = constants.h_bar * op.omega_laser * op.photon_number;
    op.p_circ_w = energy * rate;
    op.p_res_w = op.p_circ_w * (1.0 + cfg.detuning * cfg.detuning);

    // Quasi-static spring hbar*s^2*Delta/det(0); algebraically identical to the
    // 2 P_res/c * 8 F delta/lambda / (1+delta^2)^2 form returned by
    // optical_spring_constant.
    const double det0 = half_kappa_sq + op.delta_rad * op.delta_rad;
    op.k_os = constants.h_bar * op.quad_coupling * op.quad_coupling * op.delta_rad / det0;
    return op;
}

}  // namespace omcsim
