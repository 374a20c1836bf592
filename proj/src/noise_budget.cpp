#include "omcsim/noise_budget.hpp"

#include <algorithm>
#include <cmath>

namespace omcsim {

namespace {

double force_psd(const MechanicalMode& mode, double omega) {
    const double wm = mode.omega_m();
    const double base = 4.0 * constants.k_B * mode.temperature * mode.mass;
    if (mode.damping == DampingModel::Structural) return base * wm * wm / (mode.q * omega);
    return base * wm / mode.q;
}

}  // namespace

NoiseSpectrum thermal_displacement_psd(const std::vector<MechanicalMode>& modes,
                                       const std::vector<std::vector<cplx>>& chi_eff_per_mode,
                                       const FrequencyGrid& grid) {
    if (modes.empty()) throw ValidationError("thermal budget needs at least one mode");
    if (chi_eff_per_mode.size() != modes.size())
        throw ValidationError("one susceptibility trace per mode required");
    for (const auto& chi : chi_eff_per_mode)
        if (chi.size() != grid.size())
            throw ValidationError("susceptibility traces must match the grid");
    for (const auto& m : modes) m.validate();

    NoiseSpectrum out{grid.f_hz(), std::vector<double>(grid.size(), 0.0), "m^2/Hz"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double omega = grid.omega(i);
        if (omega <= 0.0) throw ValidationError("thermal PSD undefined at DC");
        double acc = 0.0;
        for (std::size_t k = 0; k < modes.size(); ++k)
            acc += force_psd(modes[k], omega) * std::norm(chi_eff_per_mode[k][i]);
        out.values[i] = acc;
    }
    return out;
}

NoiseSpectrum thermal_displacement_psd(const OperatingPoint& op,
                                       const std::vector<MechanicalMode>& modes,
                                       const FrequencyGrid& grid) {
    std::vector<std::vector<cplx>> chi(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) {
        chi[k].resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            chi[k][i] = effective_susceptibility(op, modes[k], grid.omega(i));
    }
    return thermal_displacement_psd(modes, chi, grid);
}

std::vector<double> interpolate_loglog(const NoiseSpectrum& spectrum, const FrequencyGrid& grid) {
    const auto& fs = spectrum.f_hz;
    const auto& vals = spectrum.values;
    if (fs.size() != vals.size() || fs.size() < 2)
        throw ValidationError("spectrum needs at least two (frequency, value) samples");
    for (std::size_t i = 0; i + 1 < fs.size(); ++i)
        if (!(fs[i] > 0.0 && fs[i + 1] > fs[i]))
            throw ValidationError("spectrum frequencies must be positive and strictly increasing");
    for (double v : vals)
        if (v < 0.0) throw ValidationError("spectrum values must be >= 0");
    if (grid.f_hz().front() < fs.front() || grid.f_hz().back() > fs.back())
        throw ValidationError("grid extends beyond the sampled spectrum range");

    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double f = grid[i];
        auto hi = std::lower_bound(fs.begin(), fs.end(), f);
        if (hi == fs.begin()) {
            out[i] = vals.front();
            continue;
        }
        const std::size_t k = std::size_t(hi - fs.begin());
        if (k == fs.size()) {
            out[i] = vals.back();
            continue;
        }
        const double f0 = fs[k - 1], f1 = fs[k];
        const double v0 = vals[k - 1], v1 = vals[k];
        const double t = std::log(f / f0) / std::log(f1 / f0);
        // zero samples fall back to linear interpolation
        if (v0 <= 0.0 || v1 <= 0.0) {
            out[i] = v0 + t * (v1 - v0);
        } else {
            out[i] = std::exp(std::log(v0) + t * (std::log(v1) - std::log(v0)));
        }
    }
    return out;
}

Budget assemble_budget(const IoModel& model, const std::vector<MechanicalMode>& modes,
                       const std::vector<AncillaryNoise>& ancillary, Port port,
                       double zeta_rad) {
    const FrequencyGrid& grid = model.grid;
    const std::vector<double> transfer = signal_transfer(model, port, zeta_rad);
    const std::vector<double> quantum = quantum_noise_psd(model, port, zeta_rad);

    Budget budget;

    {
        BudgetSource q{"quantum", NoiseSpectrum{grid.f_hz(), {}, "m/rtHz"}};
        q.asd.values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(transfer[i] > 0.0))
                throw ValidationError(
                    "readout angle is signal-blind; quantum noise cannot be referred to "
                    "displacement");
            q.asd.values[i] = std::sqrt(quantum[i]) / transfer[i];
        }
        budget.sources.push_back(std::move(q));
    }

    {
        const NoiseSpectrum thermal = thermal_displacement_psd(model.op, modes, grid);
        BudgetSource t{"thermal", NoiseSpectrum{grid.f_hz(), {}, "m/rtHz"}};
        t.asd.values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            t.asd.values[i] = std::sqrt(thermal.values[i]);
        budget.sources.push_back(std::move(t));
    }

    for (const AncillaryNoise& an : ancillary) {
        const std::vector<double> on_grid = interpolate_loglog(an.spectrum, grid);
        BudgetSource s{an.label, NoiseSpectrum{grid.f_hz(), {}, "m/rtHz"}};
        s.asd.values.resize(grid.size());
        const bool amplitude_units = an.spectrum.units == "m/rtHz";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double psd = amplitude_units ? on_grid[i] * on_grid[i] : on_grid[i];
            if (an.reference == NoiseReference::ShotNoiseRelative) {
                if (!(transfer[i] > 0.0))
                    throw ValidationError("ancillary spectrum '" + an.label +
                                          "' cannot be referred to displacement: the readout "
                                          "angle is signal-blind");
                psd /= transfer[i] * transfer[i];
            }
            s.asd.values[i] = std::sqrt(psd);
        }
        budget.sources.push_back(std::move(s));
    }

    budget.total = NoiseSpectrum{grid.f_hz(), std::vector<double>(grid.size(), 0.0), "m/rtHz"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double sq = 0.0;
        for (const auto& s : budget.sources) sq += s.asd.values[i] * s.asd.values[i];
        budget.total.values[i] = std::sqrt(sq);
    }
    return budget;
}

OrientationComparison compare_orientations(const Budget& transmission, const Budget& reflection) {
    const auto& ft = transmission.total.f_hz;
    const auto& fr = reflection.total.f_hz;
    if (ft.size() != fr.size())
        throw ValidationError("budget grids differ in size; cannot compare orientations");
    for (std::size_t i = 0; i < ft.size(); ++i)
        if (ft[i] != fr[i])
            throw ValidationError("budget grids differ; cannot compare orientations");

    OrientationComparison cmp;
    cmp.amplitude_ratio = NoiseSpectrum{ft, std::vector<double>(ft.size()), "ratio"};
    for (std::size_t i = 0; i < ft.size(); ++i) {
        const double denom = transmission.total.values[i];
        if (!(denom > 0.0)) throw ValidationError("transmission budget total vanishes");
        cmp.amplitude_ratio.values[i] = reflection.total.values[i] / denom;
    }
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 1; i < ft.size(); ++i) {
        if (cmp.amplitude_ratio.values[i] > cmp.amplitude_ratio.values[imax]) imax = i;
        if (cmp.amplitude_ratio.values[i] < cmp.amplitude_ratio.values[imin]) imin = i;
    }
    cmp.max_ratio = cmp.amplitude_ratio.values[imax];
    cmp.max_ratio_f_hz = ft[imax];
    cmp.min_ratio = cmp.amplitude_ratio.values[imin];
    cmp.min_ratio_f_hz = ft[imin];
    return cmp;
}

}  // namespace omcsim
