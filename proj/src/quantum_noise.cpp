#include "omcsim/quantum_noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace omcsim {

namespace {

struct Inputs {
    double kappa;  // coupling rate of this vacuum port
    int self_port; // index 0=injection, 1=end, 2=loss
};

// One output port's blocks for a single frequency.
struct RowSolution {
    Mat2 from[3];
    Vec2 signal;
};

struct FrequencySolution {
    RowSolution out[3];  // reflected, transmitted, loss
    cplx x_per_fext;
    cplx chi_eff_solver;
};

double cond2x2(const cplx& a11, const cplx& a12, const cplx& a21, const cplx& a22) {
    const double fro2 = std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22);
    const double det = std::abs(a11 * a22 - a12 * a21);
    if (det == 0.0) return std::numeric_limits<double>::infinity();
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
    const double smax2 = 0.5 * (fro2 + disc);
    const double smin2 = 0.5 * (fro2 - disc);
    if (smin2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(smax2 / smin2);
}

FrequencySolution solve_at(const OperatingPoint& op, const MechanicalMode& mode, bool frozen,
                           double omega, double cond_limit) {
    const double half_kappa = op.kappa / 2.0;
    const double s = op.quad_coupling;
    const cplx m11(half_kappa, -omega);
    const cplx m12(op.delta_rad, 0.0);
    const cplx m21(-op.delta_rad, 0.0);
    const cplx m22 = m11;

    const cplx chi_m = frozen ? cplx(0.0) : mechanical_susceptibility(mode, omega);
    const cplx loop = constants.h_bar * s * s * chi_m;  // spring feedback into q1

    // Mirror motion eliminated: it enters the q2 equation through s*x with
    // x = chi_m (hbar s a1 + F_ext).
    const cplx e11 = m11, e12 = m12, e21 = m21 - loop, e22 = m22;
    const double cond = cond2x2(e11, e12, e21, e22);
    if (!(cond < cond_limit))
        throw NumericalError("per-frequency quadrature solve is ill-conditioned at " +
                             std::to_string(omega / two_pi) + " Hz (cond ~ " +
                             std::to_string(cond) + ")");
    const cplx det_eff = e11 * e22 - e12 * e21;
    const cplx i11 = e22 / det_eff, i12 = -e12 / det_eff;
    const cplx i21 = -e21 / det_eff, i22 = e11 / det_eff;

    const Inputs in[3] = {{op.kappa_in, 0}, {op.kappa_end, 1}, {op.kappa_loss, 2}};
    const double kout[3] = {op.kappa_in, op.kappa_end, op.kappa_loss};

    // Bare-cavity propagator for the open-loop displacement signal.
    const cplx det_bare = m11 * m22 - m12 * m21;
    const Vec2 sig_intra{(-m12 / det_bare) * s, (m11 / det_bare) * s};

    FrequencySolution sol{};
    for (int p = 0; p < 3; ++p) {
        const double root_out = std::sqrt(kout[p]);
        for (int j = 0; j < 3; ++j) {
            const double g = root_out * std::sqrt(in[j].kappa);
            Mat2 t{g * i11, g * i12, g * i21, g * i22};
            if (p == j) {  // promptly reflected vacuum of the port itself
                t.a11 -= 1.0;
                t.a22 -= 1.0;
            }
            sol.out[p].from[j] = t;
        }
        sol.out[p].signal = Vec2{root_out * sig_intra.q1, root_out * sig_intra.q2};
    }

    if (!frozen) {
        // Response to a unit external force.
        const cplx rhs = s * chi_m;
        const cplx a1_f = i12 * rhs;
        sol.x_per_fext = chi_m * (constants.h_bar * s * a1_f + 1.0);
    } else {
        sol.x_per_fext = 0.0;
    }
    sol.chi_eff_solver = sol.x_per_fext;
    return sol;
}

int thread_count() {
    if (const char* env = std::getenv("OMCSIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 1) return n;
    }
    return 1;
}

double wrap_half_pi(double angle) {
    // canonical representative in (-pi/2, pi/2]
    double a = std::fmod(angle, pi);
    if (a <= -pi / 2.0) a += pi;
    if (a > pi / 2.0) a -= pi;
    return a;
}

}  // namespace

const PortField& IoModel::port(Port p) const {
    switch (p) {
        case Port::ReflectedB: return reflected;
        case Port::TransmittedD: return transmitted;
        case Port::Loss: return loss_out;
        default:
            throw ValidationError("requested port is an input, not an output");
    }
}

IoModel build_io_model(const CavityConfig& cfg, const MechanicalMode& mode,
                       const FrequencyGrid& grid, const IoModelOptions& options) {
    cfg.validate();
    mode.validate();

    IoModel model{grid, operating_point(cfg), mode, options.freeze_mechanics,
                  PortField{}, PortField{}, PortField{}, {}, {}};
    const std::size_t n = grid.size();

    auto init_port = [&](PortField& pf, Port p, double basis) {
        pf.port = p;
        pf.basis_angle_rad = basis;
        pf.from_injection.resize(n);
        pf.from_end.resize(n);
        pf.from_loss.resize(n);
        pf.signal_per_m.resize(n);
    };
    const double refl_basis =
        std::atan2(model.op.delta_rad, model.op.kappa_in - model.op.kappa / 2.0);
    init_port(model.reflected, Port::ReflectedB, refl_basis);
    init_port(model.transmitted, Port::TransmittedD, 0.0);
    init_port(model.loss_out, Port::Loss, 0.0);
    model.chi_eff.resize(n);
    model.spring.resize(n);

    auto fill = [&](std::size_t lo, std::size_t hi) {
        PortField* ports[3] = {&model.reflected, &model.transmitted, &model.loss_out};
        for (std::size_t i = lo; i < hi; ++i) {
            const double w = grid.omega(i);
            const FrequencySolution sol =
                solve_at(model.op, mode, options.freeze_mechanics, w, options.condition_limit);
            for (int p = 0; p < 3; ++p) {
                ports[p]->from_injection[i] = sol.out[p].from[0];
                ports[p]->from_end[i] = sol.out[p].from[1];
                ports[p]->from_loss[i] = sol.out[p].from[2];
                ports[p]->signal_per_m[i] = sol.out[p].signal;
            }
            model.chi_eff[i] = sol.x_per_fext;
            model.spring[i] = spring_stiffness(model.op, w);
        }
    };

    const int nthreads = std::min<int>(thread_count(), int(n));
    if (nthreads <= 1) {
        fill(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const std::size_t lo = std::size_t(t) * chunk;
            if (lo >= n) break;
            pool.emplace_back(fill, lo, std::min(n, lo + chunk));
        }
        for (auto& th : pool) th.join();
    }
    return model;
}

namespace {

double quantum_at(const PortField& pf, std::size_t i, double c, double s) {
    double acc = 0.0;
    for (const auto* block : {&pf.from_injection, &pf.from_end, &pf.from_loss}) {
        const Mat2& t = (*block)[i];
        acc += std::norm(c * t.a11 + s * t.a21) + std::norm(c * t.a12 + s * t.a22);
    }
    return acc;
}

cplx signal_at(const PortField& pf, std::size_t i, double c, double s) {
    return c * pf.signal_per_m[i].q1 + s * pf.signal_per_m[i].q2;
}

}  // namespace

std::vector<double> quantum_noise_psd(const IoModel& model, Port port, double zeta_rad) {
    const PortField& pf = model.port(port);
    const double theta = zeta_rad + pf.basis_angle_rad;
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<double> psd(model.grid.size());
    for (std::size_t i = 0; i < psd.size(); ++i) psd[i] = quantum_at(pf, i, c, s);
    return psd;
}

std::vector<double> signal_transfer(const IoModel& model, Port port, double zeta_rad) {
    const PortField& pf = model.port(port);
    const double theta = zeta_rad + pf.basis_angle_rad;
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<double> mag(model.grid.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(signal_at(pf, i, c, s));
    return mag;
}

AngleSweep sweep_readout_angle(const IoModel& model, Port port, double freq_hz,
                               double thermal_sx_m2_hz, const AngleSweepOptions& options) {
    if (!(freq_hz > 0.0)) throw ValidationError("sweep frequency must be > 0");
    if (!(options.step_rad > 0.0) || !(options.zeta_max_rad > options.zeta_min_rad))
        throw ValidationError("invalid angle sweep range");
    if (thermal_sx_m2_hz < 0.0) throw ValidationError("thermal PSD must be >= 0");

    const FrequencySolution sol =
        solve_at(model.op, model.mode, model.mechanics_frozen, two_pi * freq_hz, 1e12);
    const int pidx = port == Port::ReflectedB ? 0 : (port == Port::TransmittedD ? 1 : 2);
    if (port != Port::ReflectedB && port != Port::TransmittedD && port != Port::Loss)
        throw ValidationError("sweep port must be an output port");
    const RowSolution& row = sol.out[pidx];
    const double basis = model.port(port).basis_angle_rad;

    PortField single;
    single.port = port;
    single.basis_angle_rad = basis;
    single.from_injection = {row.from[0]};
    single.from_end = {row.from[1]};
    single.from_loss = {row.from[2]};
    single.signal_per_m = {row.signal};

    auto quantum_of = [&](double zeta) {
        const double theta = zeta + basis;
        return quantum_at(single, 0, std::cos(theta), std::sin(theta));
    };
    auto signal2_of = [&](double zeta) {
        const double theta = zeta + basis;
        return std::norm(signal_at(single, 0, std::cos(theta), std::sin(theta)));
    };

    AngleSweep sweep;
    sweep.freq_hz = freq_hz;
    const std::size_t count =
        std::size_t((options.zeta_max_rad - options.zeta_min_rad) / options.step_rad + 1.5);
    sweep.zeta_rad.resize(count);
    sweep.quantum.resize(count);
    sweep.thermal.resize(count);
    sweep.total.resize(count);
    double max_dev = 0.0;
    double max_sig2 = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double z =
            std::min(options.zeta_min_rad + double(k) * options.step_rad, options.zeta_max_rad);
        sweep.zeta_rad[k] = z;
        sweep.quantum[k] = quantum_of(z);
        const double sig2 = signal2_of(z);
        sweep.thermal[k] = sig2 * thermal_sx_m2_hz;
        sweep.total[k] = sweep.quantum[k] + sweep.thermal[k];
        max_dev = std::max(max_dev, std::abs(sweep.quantum[k] - 1.0));
        max_sig2 = std::max(max_sig2, sig2);
    }

    // Thermal dip: coarse argmin then golden-section refinement.
    std::size_t kmin = 0;
    for (std::size_t k = 1; k < count; ++k)
        if (signal2_of(sweep.zeta_rad[k]) < signal2_of(sweep.zeta_rad[kmin])) kmin = k;
    {
        double lo = sweep.zeta_rad[kmin] - options.step_rad;
        double hi = sweep.zeta_rad[kmin] + options.step_rad;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = signal2_of(x1), f2 = signal2_of(x2);
        while (hi - lo > options.refine_rad) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = signal2_of(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = signal2_of(x2);
            }
        }
        sweep.thermal_dip_rad = wrap_half_pi(0.5 * (lo + hi));
        sweep.dip_to_peak_signal =
            max_sig2 > 0.0 ? std::sqrt(signal2_of(sweep.thermal_dip_rad) / max_sig2) : 0.0;
    }

    if (max_dev < 1e-9) {
        // Quantum noise is shot noise at every angle; every point is a root.
        sweep.root_status = RootStatus::DegenerateAllShot;
        return sweep;
    }

    for (std::size_t k = 0; k + 1 < count; ++k) {
        double lo = sweep.zeta_rad[k], hi = sweep.zeta_rad[k + 1];
        double flo = sweep.quantum[k] - 1.0, fhi = sweep.quantum[k + 1] - 1.0;
        if (flo == 0.0) {
            sweep.unity_roots_rad.push_back(wrap_half_pi(lo));
            continue;
        }
        if (flo * fhi > 0.0) continue;
        while (hi - lo > options.refine_rad) {
            const double mid = 0.5 * (lo + hi);
            const double fmid = quantum_of(mid) - 1.0;
            if (flo * fmid <= 0.0) {
                hi = mid;
            } else {
                lo = mid;
                flo = fmid;
            }
        }
        sweep.unity_roots_rad.push_back(wrap_half_pi(0.5 * (lo + hi)));
    }
    std::sort(sweep.unity_roots_rad.begin(), sweep.unity_roots_rad.end());
    // merge duplicates from the periodic boundary
    const double tol = 2.0 * options.refine_rad;
    auto last = std::unique(sweep.unity_roots_rad.begin(), sweep.unity_roots_rad.end(),
                            [tol](double a, double b) { return std::abs(a - b) < tol; });
    sweep.unity_roots_rad.erase(last, sweep.unity_roots_rad.end());
    if (sweep.unity_roots_rad.size() >= 2 &&
        std::abs(sweep.unity_roots_rad.back() - pi - sweep.unity_roots_rad.front()) < tol)
        sweep.unity_roots_rad.pop_back();

    sweep.root_status =
        sweep.unity_roots_rad.empty() ? RootStatus::NoneBracketed : RootStatus::Found;
    return sweep;
}

}  // namespace omcsim
