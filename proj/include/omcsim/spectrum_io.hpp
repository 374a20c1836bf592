#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "omcsim/errors.hpp"
#include "omcsim/noise_budget.hpp"

namespace omcsim {

/// Plot-friendly CSV spectrum: '#'-prefixed "key = value" header lines
/// followed by "frequency_hz,value" rows printed with 17 significant digits,
/// so a parse-emit round trip is lossless.
struct SpectrumFile {
    std::map<std::string, std::string> meta;
    std::vector<std::pair<double, double>> rows;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t value);

std::string format_spectrum_file(const SpectrumFile& file);
void write_spectrum_file(const std::string& path, const SpectrumFile& file);
SpectrumFile read_spectrum_file(const std::string& path);

SpectrumFile to_spectrum_file(const NoiseSpectrum& spectrum, const std::string& label,
                              const std::string& params_hash);
NoiseSpectrum to_noise_spectrum(const SpectrumFile& file);

}  // namespace omcsim
