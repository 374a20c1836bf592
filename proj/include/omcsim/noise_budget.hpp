#pragma once

#include <string>
#include <vector>

#include "omcsim/quantum_noise.hpp"

namespace omcsim {

/// Frequency grid plus one-sided spectrum values with a units tag. `units` is
/// one of "m^2/Hz" (displacement PSD), "m/rtHz" (displacement ASD),
/// "rel_shot" (PSD relative to shot noise) or "ratio" (dimensionless
/// amplitude ratio).
struct NoiseSpectrum {
    std::vector<double> f_hz;
    std::vector<double> values;
    std::string units;
};

enum class NoiseReference { DisplacementReferred, ShotNoiseRelative };

/// A measured spectrum ingested from file (dark noise, classical laser noise,
/// ...). Samples are interpolated onto the analysis grid linearly in log-log
/// space.
struct AncillaryNoise {
    std::string label;
    NoiseSpectrum spectrum;
    NoiseReference reference = NoiseReference::DisplacementReferred;
};

/// Displacement-referred thermal noise PSD [m^2/Hz], one-sided. One
/// susceptibility trace per mode, modes summed in power. Structural damping
/// uses S_F = 4 kB T m Omega_m^2 / (Q Omega); viscous uses
/// S_F = 4 kB T m Omega_m / Q.
NoiseSpectrum thermal_displacement_psd(const std::vector<MechanicalMode>& modes,
                                       const std::vector<std::vector<cplx>>& chi_eff_per_mode,
                                       const FrequencyGrid& grid);

/// Convenience: builds the per-mode effective susceptibilities from the
/// operating point and forwards.
NoiseSpectrum thermal_displacement_psd(const OperatingPoint& op,
                                       const std::vector<MechanicalMode>& modes,
                                       const FrequencyGrid& grid);

/// One displacement-referred source of a budget, stored as amplitude spectral
/// density [m/rtHz] so the quadrature-sum identity total^2 = sum(source^2)
/// holds pointwise.
struct BudgetSource {
    std::string label;
    NoiseSpectrum asd;
};

struct Budget {
    std::vector<BudgetSource> sources;
    NoiseSpectrum total;
};

/// Assemble a displacement-referred budget for one readout: modeled quantum
/// noise (shot + back action as they appear at this port and angle), thermal
/// noise of all modes, plus any measured ancillary spectra.
Budget assemble_budget(const IoModel& model, const std::vector<MechanicalMode>& modes,
                       const std::vector<AncillaryNoise>& ancillary, Port port,
                       double zeta_rad);

struct OrientationComparison {
    NoiseSpectrum amplitude_ratio;  // reflection total / transmission total
    double max_ratio = 0.0;
    double max_ratio_f_hz = 0.0;
    double min_ratio = 0.0;
    double min_ratio_f_hz = 0.0;
};

/// Per-frequency amplitude ratio of two budget totals on a common grid.
OrientationComparison compare_orientations(const Budget& transmission, const Budget& reflection);

/// Log-log linear interpolation of a sampled spectrum onto a grid; rejects
/// grids extending beyond the sampled range.
std::vector<double> interpolate_loglog(const NoiseSpectrum& spectrum,
                                       const FrequencyGrid& grid);

}  // namespace omcsim
