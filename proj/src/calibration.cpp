#include "omcsim/calibration.hpp"

#include <cmath>
#include <functional>

#include "omcsim/dynamics.hpp"

namespace omcsim {

namespace {

CavityConfig config_for(const SpringMeasurement& meas, const KnownCavity& known, double loss,
                        double detuning) {
    CavityConfig cfg;
    cfg.length = known.length_m;
    cfg.t_in = known.t_in;
    cfg.t_end = known.t_end;
    cfg.loss_rt = loss;
    cfg.detuning = detuning;
    cfg.wavelength = known.wavelength_m;
    cfg.p_in = meas.p_in_w;
    cfg.injection_side = meas.injection_side;
    return cfg;
}

// Forward model: spring frequency [Hz] for a given round-trip loss.
double f_os_of_loss(const SpringMeasurement& meas, const KnownCavity& known, double loss,
                    double detuning, bool full_response) {
    const CavityConfig cfg = config_for(meas, known, loss, detuning);
    if (full_response) return full_spring_resonance_hz(operating_point(cfg), known.mass_kg);
    MechanicalMode mode;
    mode.mass = known.mass_kg;
    mode.f_m = 1.0;
    mode.q = 1.0;
    mode.temperature = 1.0;  // placeholders; the quasi-static spring needs only the mass
    return optical_spring_constant(cfg, mode).f_os_hz;
}

double p_circ_of_loss(const SpringMeasurement& meas, const KnownCavity& known, double loss,
                      double detuning) {
    CavityConfig cfg;
    cfg.length = known.length_m;
    cfg.t_in = known.t_in;
    cfg.t_end = known.t_end;
    cfg.loss_rt = loss;
    cfg.detuning = detuning;
    cfg.wavelength = known.wavelength_m;
    cfg.p_in = meas.p_in_w;
    cfg.injection_side = meas.injection_side;
    return circulating_power(cfg);
}

// Bracketed root finder: bisection interleaved with secant steps, so the
// bracket is guaranteed to halve every other iteration even when the secant
// stalls against one endpoint.
double find_root(const std::function<double(double)>& fn, double lo, double hi, double tol) {
    double flo = fn(lo), fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw NumericalError("root is not bracketed");
    for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (iter % 2 == 1) {
            const double sec = lo - flo * (hi - lo) / (fhi - flo);
            if (sec > lo + 0.01 * (hi - lo) && sec < hi - 0.01 * (hi - lo)) mid = sec;
        }
        const double fmid = fn(mid);
        if (fmid == 0.0) return mid;
        if (flo * fmid < 0.0) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

struct PointSolution {
    double loss;
    double p_circ;
};

PointSolution solve_at_detuning(const SpringMeasurement& meas, const KnownCavity& known,
                                double detuning, bool full_response) {
    const double loss_max = 1.0 - known.t_in - known.t_end - 1e-9;
    if (!(loss_max > 0.0)) throw ValidationError("mirror transmissions leave no loss budget");

    auto mismatch = [&](double loss) {
        return f_os_of_loss(meas, known, loss, detuning, full_response) - meas.f_os_hz;
    };

    const double at_zero = mismatch(0.0);
    const double at_max = mismatch(loss_max);
    // f_os decreases strictly with loss: more loss, less buildup, softer spring.
    if (!(at_zero > at_max))
        throw NumericalError("spring frequency is not monotone in loss; cannot bracket");
    if (at_zero < 0.0)
        throw ValidationError(
            "non-physical calibration: measured spring frequency needs negative loss");
    if (at_max > 0.0)
        throw NumericalError(
            "no solution: measured spring frequency unreachable for any admissible loss");

    PointSolution out{};
    out.loss = at_zero == 0.0 ? 0.0 : find_root(mismatch, 0.0, loss_max, 1e-16);
    out.p_circ = p_circ_of_loss(meas, known, out.loss, detuning);
    return out;
}

}  // namespace

double full_spring_resonance_hz(const OperatingPoint& op, double mass_kg) {
    if (!(mass_kg > 0.0)) throw ValidationError("mass must be > 0");
    if (!(op.k_os > 0.0))
        throw NumericalError("full-response spring resonance needs a restoring spring");
    auto excess = [&](double w) {
        return mass_kg * w * w - spring_stiffness(op, w).real();
    };
    const double w_qs = std::sqrt(op.k_os / mass_kg);
    double hi = w_qs;
    while (excess(hi) < 0.0) hi *= 2.0;  // Re K is bounded, so this terminates
    return find_root(excess, 0.5 * w_qs * 1e-6, hi, 1e-9 * w_qs) / two_pi;
}

CalibrationResult infer_power_and_loss(const SpringMeasurement& meas, const KnownCavity& known,
                                       const CalibrationOptions& options) {
    if (!(meas.f_os_hz > 0.0)) throw ValidationError("measured f_os must be > 0");
    if (!(meas.p_in_w > 0.0)) throw ValidationError("input power must be > 0");
    if (!(meas.detuning_sigma >= 0.0)) throw ValidationError("detuning sigma must be >= 0");
    if (!(known.mass_kg > 0.0 && known.length_m > 0.0 && known.wavelength_m > 0.0))
        throw ValidationError("known cavity parameters must be positive");
    if (!(known.t_in > 0.0 && known.t_in < 1.0 && known.t_end > 0.0 && known.t_end < 1.0))
        throw ValidationError("mirror transmissions must be in (0, 1)");

    const bool full = options.full_cavity_response;
    const PointSolution center = solve_at_detuning(meas, known, meas.detuning, full);

    CalibrationResult result;
    result.loss_rt = center.loss;
    result.p_circ_w = center.p_circ;
    result.residual =
        std::abs(f_os_of_loss(meas, known, center.loss, meas.detuning, full) - meas.f_os_hz) /
        meas.f_os_hz;

    if (meas.detuning_sigma > 0.0) {
        const PointSolution up =
            solve_at_detuning(meas, known, meas.detuning + meas.detuning_sigma, full);
        const PointSolution dn =
            solve_at_detuning(meas, known, meas.detuning - meas.detuning_sigma, full);
        result.p_circ_sigma_w = 0.5 * std::abs(up.p_circ - dn.p_circ);
        result.loss_rt_sigma = 0.5 * std::abs(up.loss - dn.loss);
    }
    return result;
}

DetuningOptimum optimal_detuning(const CavityConfig& cfg, const MechanicalMode& mode) {
    cfg.validate();
    mode.validate();
    auto f_os = [&](double delta) {
        CavityConfig c = cfg;
        c.detuning = delta;
        return optical_spring_constant(c, mode).f_os_hz;
    };

    double lo = 1e-6, hi = 4.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f_os(x1), f2 = f_os(x2);
    while (hi - lo > 1e-5) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f_os(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f_os(x2);
        }
    }
    DetuningOptimum out;
    out.delta_star = 0.5 * (lo + hi);
    out.f_os_max_hz = f_os(out.delta_star);
    return out;
}

}  // namespace omcsim
