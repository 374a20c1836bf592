#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "omcsim/core.hpp"
#include "omcsim/cross_correlation.hpp"
#include "omcsim/grid.hpp"
#include "omcsim/noise_budget.hpp"

namespace omcsim {

struct GridSpec {
    double f_min_hz = 100.0;
    double f_max_hz = 100e3;
    std::size_t points = 1000;
    GridSpacing spacing = GridSpacing::Log;
};

struct AncillarySpec {
    std::string label;
    std::string path;  // resolved against the config file location
    NoiseReference reference = NoiseReference::DisplacementReferred;
};

struct McParams {
    double duration_s = 4.02;
    double sample_rate_hz = 262144.0;  // clears twice the default grid maximum
    std::size_t segment_length = 4096;
    double overlap = 0.5;
};

struct CalibrationSpec {
    double f_os_hz = 0.0;  // 0 means "not provided"
    double detuning_sigma = 0.05;
};

/// Parsed run configuration. `cavity` drives every command; `cavity_b`, when
/// present, is the second (reflection-readout) orientation used by `compare`.
struct RunConfig {
    CavityConfig cavity;
    std::optional<CavityConfig> cavity_b;
    std::vector<MechanicalMode> mechanics;
    GridSpec grid;
    std::vector<AncillarySpec> ancillary;
    LoopModel loop;
    McParams mc;
    CalibrationSpec calibration;
    std::uint64_t seed = 1;
};

/// Strict line-oriented "[section]" / "key = value" parser: unknown sections
/// and keys are errors (with a nearest-key suggestion), numbers accept a
/// "ppm" suffix on the mirror transmission and loss keys, ancillary file
/// references must exist at load time.
RunConfig parse_config(const std::string& path);

/// Canonical text form: stable ordering, 17-significant-digit numbers.
/// Re-parsing the canonical text reproduces the same configuration.
std::string canonical_text(const RunConfig& config);

FrequencyGrid make_grid(const GridSpec& spec);

/// Load the ancillary spectra named by the config from disk.
std::vector<AncillaryNoise> load_ancillary(const RunConfig& config);

}  // namespace omcsim
