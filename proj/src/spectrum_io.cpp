#include "omcsim/spectrum_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace omcsim {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string format_spectrum_file(const SpectrumFile& file) {
    std::ostringstream out;
    for (const auto& [key, value] : file.meta) out << "# " << key << " = " << value << "\n";
    for (const auto& [f, v] : file.rows) out << format_double(f) << ',' << format_double(v) << "\n";
    return out.str();
}

void write_spectrum_file(const std::string& path, const SpectrumFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << format_spectrum_file(file);
    if (!out) throw ValidationError("write failed: " + path);
}

SpectrumFile read_spectrum_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open spectrum file: " + path);
    SpectrumFile file;
    std::string line;
    long lineno = 0;
    double prev_f = -1.0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                auto trim = [](std::string s) {
                    const auto a = s.find_first_not_of(" \t#");
                    const auto b = s.find_last_not_of(" \t");
                    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
                };
                file.meta[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("expected 'frequency,value' in " + path, lineno);
        char* end = nullptr;
        const double f = std::strtod(line.c_str(), &end);
        const double v = std::strtod(line.c_str() + comma + 1, nullptr);
        if (end == line.c_str()) throw ParseError("bad number in " + path, lineno);
        if (!(f > prev_f))
            throw ParseError("frequencies must be strictly increasing in " + path, lineno);
        prev_f = f;
        file.rows.emplace_back(f, v);
    }
    return file;
}

SpectrumFile to_spectrum_file(const NoiseSpectrum& spectrum, const std::string& label,
                              const std::string& params_hash) {
    SpectrumFile file;
    file.meta["format"] = "omcsim-spectrum-v1";
    file.meta["label"] = label;
    file.meta["units"] = spectrum.units;
    file.meta["params"] = params_hash;
    file.rows.reserve(spectrum.f_hz.size());
    for (std::size_t i = 0; i < spectrum.f_hz.size(); ++i)
        file.rows.emplace_back(spectrum.f_hz[i], spectrum.values[i]);
    return file;
}

NoiseSpectrum to_noise_spectrum(const SpectrumFile& file) {
    NoiseSpectrum out;
    const auto it = file.meta.find("units");
    out.units = it == file.meta.end() ? "" : it->second;
    out.f_hz.reserve(file.rows.size());
    out.values.reserve(file.rows.size());
    for (const auto& [f, v] : file.rows) {
        out.f_hz.push_back(f);
        out.values.push_back(v);
    }
    return out;
}

}  // namespace omcsim
