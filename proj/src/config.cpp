#include "omcsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "omcsim/spectrum_io.hpp"

namespace omcsim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t prev = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t cur = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                               prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
            prev = cur;
        }
    }
    return row[b.size()];
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& known) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& k : known) {
        const std::size_t d = edit_distance(key, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

const std::vector<std::string>& keys_for(const std::string& section) {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"cavity",
         {"length", "t_in", "t_end", "loss_rt", "detuning", "detuning_units", "wavelength",
          "p_in", "injection_side"}},
        {"cavity_b",
         {"length", "t_in", "t_end", "loss_rt", "detuning", "detuning_units", "wavelength",
          "p_in", "injection_side"}},
        {"mode", {"mass", "f_m", "q", "temperature", "damping"}},
        {"grid", {"f_min", "f_max", "points", "spacing"}},
        {"loop", {"dc_gain", "corner_hz"}},
        {"mc", {"duration_s", "sample_rate_hz", "segment_length", "overlap"}},
        {"ancillary", {"label", "file", "reference"}},
        {"run", {"seed"}},
        {"calibration", {"f_os_hz", "detuning_sigma"}},
    };
    const auto it = table.find(section);
    if (it == table.end()) throw ValidationError("unknown section [" + section + "]");
    return it->second;
}

bool ppm_allowed(const std::string& key) {
    return key == "t_in" || key == "t_end" || key == "loss_rt";
}

double parse_number(const std::string& value, const std::string& key, long line) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    std::string rest = trim(v.substr(std::size_t(end - v.c_str())));
    if (end == v.c_str()) throw ParseError("expected a number for '" + key + "'", line);
    if (rest == "ppm") {
        if (!ppm_allowed(key))
            throw ParseError("'ppm' suffix is only valid for t_in, t_end, loss_rt", line);
        return x * 1e-6;
    }
    if (!rest.empty()) throw ParseError("trailing characters after number for '" + key + "'", line);
    return x;
}

struct RawEntry {
    std::string value;
    long line;
};

using Section = std::map<std::string, RawEntry>;

CavityConfig cavity_from(const Section& sec, const std::string& name) {
    CavityConfig cfg;
    auto get = [&](const std::string& key) -> const RawEntry& {
        const auto it = sec.find(key);
        if (it == sec.end())
            throw ValidationError("section [" + name + "] is missing key '" + key + "'");
        return it->second;
    };
    cfg.length = parse_number(get("length").value, "length", get("length").line);
    cfg.t_in = parse_number(get("t_in").value, "t_in", get("t_in").line);
    cfg.t_end = parse_number(get("t_end").value, "t_end", get("t_end").line);
    cfg.loss_rt = parse_number(get("loss_rt").value, "loss_rt", get("loss_rt").line);
    cfg.detuning = parse_number(get("detuning").value, "detuning", get("detuning").line);
    cfg.wavelength = parse_number(get("wavelength").value, "wavelength", get("wavelength").line);
    cfg.p_in = parse_number(get("p_in").value, "p_in", get("p_in").line);

    if (const auto it = sec.find("detuning_units"); it != sec.end()) {
        const std::string u = trim(it->second.value);
        if (u != "linewidths" && u != "hwhm")
            throw ParseError("detuning_units must be 'linewidths' (HWHM units)", it->second.line);
    }
    const auto side = get("injection_side");
    const std::string s = trim(side.value);
    if (s == "macro_mirror") {
        cfg.injection_side = InjectionSide::ThroughMacroMirror;
    } else if (s == "microresonator") {
        cfg.injection_side = InjectionSide::ThroughMicroresonator;
    } else {
        throw ParseError("injection_side must be 'macro_mirror' or 'microresonator'", side.line);
    }
    cfg.validate();
    return cfg;
}

MechanicalMode mode_from(const Section& sec) {
    MechanicalMode mode;
    auto get = [&](const std::string& key) -> const RawEntry& {
        const auto it = sec.find(key);
        if (it == sec.end()) throw ValidationError("section [mode] is missing key '" + key + "'");
        return it->second;
    };
    mode.mass = parse_number(get("mass").value, "mass", get("mass").line);
    mode.f_m = parse_number(get("f_m").value, "f_m", get("f_m").line);
    mode.q = parse_number(get("q").value, "q", get("q").line);
    mode.temperature =
        parse_number(get("temperature").value, "temperature", get("temperature").line);
    if (const auto it = sec.find("damping"); it != sec.end()) {
        const std::string d = trim(it->second.value);
        if (d == "structural") {
            mode.damping = DampingModel::Structural;
        } else if (d == "viscous") {
            mode.damping = DampingModel::Viscous;
        } else {
            throw ParseError("damping must be 'structural' or 'viscous'", it->second.line);
        }
    }
    mode.validate();
    return mode;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_cavity(std::ostringstream& out, const std::string& name, const CavityConfig& cfg) {
    out << "[" << name << "]\n";
    out << "length = " << format_double(cfg.length) << "\n";
    out << "t_in = " << format_double(cfg.t_in) << "\n";
    out << "t_end = " << format_double(cfg.t_end) << "\n";
    out << "loss_rt = " << format_double(cfg.loss_rt) << "\n";
    out << "detuning = " << format_double(cfg.detuning) << "\n";
    out << "detuning_units = linewidths\n";
    out << "wavelength = " << format_double(cfg.wavelength) << "\n";
    out << "p_in = " << format_double(cfg.p_in) << "\n";
    out << "injection_side = "
        << (cfg.injection_side == InjectionSide::ThroughMacroMirror ? "macro_mirror"
                                                                    : "microresonator")
        << "\n";
}

}  // namespace

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);

    RunConfig config;
    std::vector<std::pair<std::string, Section>> sections;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("unterminated section header", lineno);
            const std::string name = trim(t.substr(1, t.size() - 2));
            keys_for(name);  // rejects unknown sections
            sections.emplace_back(name, Section{});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        if (sections.empty()) throw ParseError("key outside any [section]", lineno);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const auto& known = keys_for(sections.back().first);
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ParseError("unknown key '" + key + "' in [" + sections.back().first +
                                 "]; nearest valid key is '" + nearest_key(key, known) + "'",
                             lineno);
        if (!sections.back().second.emplace(key, RawEntry{value, lineno}).second)
            throw ParseError("duplicate key '" + key + "'", lineno);
    }

    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    bool have_cavity = false;
    for (const auto& [name, sec] : sections) {
        auto num = [&sec](const std::string& key, double fallback) {
            const auto it = sec.find(key);
            return it == sec.end() ? fallback : parse_number(it->second.value, key, it->second.line);
        };
        if (name == "cavity") {
            config.cavity = cavity_from(sec, name);
            have_cavity = true;
        } else if (name == "cavity_b") {
            config.cavity_b = cavity_from(sec, name);
        } else if (name == "mode") {
            config.mechanics.push_back(mode_from(sec));
        } else if (name == "grid") {
            config.grid.f_min_hz = num("f_min", config.grid.f_min_hz);
            config.grid.f_max_hz = num("f_max", config.grid.f_max_hz);
            config.grid.points = std::size_t(num("points", double(config.grid.points)));
            if (const auto it = sec.find("spacing"); it != sec.end()) {
                const std::string s = trim(it->second.value);
                if (s == "log") {
                    config.grid.spacing = GridSpacing::Log;
                } else if (s == "linear") {
                    config.grid.spacing = GridSpacing::Linear;
                } else {
                    throw ParseError("spacing must be 'log' or 'linear'", it->second.line);
                }
            }
        } else if (name == "loop") {
            config.loop.dc_gain = num("dc_gain", config.loop.dc_gain);
            config.loop.corner_hz = num("corner_hz", config.loop.corner_hz);
        } else if (name == "mc") {
            config.mc.duration_s = num("duration_s", config.mc.duration_s);
            config.mc.sample_rate_hz = num("sample_rate_hz", config.mc.sample_rate_hz);
            config.mc.segment_length = std::size_t(num("segment_length",
                                                       double(config.mc.segment_length)));
            config.mc.overlap = num("overlap", config.mc.overlap);
        } else if (name == "ancillary") {
            AncillarySpec spec;
            const auto label = sec.find("label");
            const auto file = sec.find("file");
            if (label == sec.end() || file == sec.end())
                throw ValidationError("[ancillary] sections need 'label' and 'file'");
            spec.label = trim(label->second.value);
            spec.path = (base / trim(file->second.value)).string();
            if (const auto it = sec.find("reference"); it != sec.end()) {
                const std::string r = trim(it->second.value);
                if (r == "displacement") {
                    spec.reference = NoiseReference::DisplacementReferred;
                } else if (r == "shot_relative") {
                    spec.reference = NoiseReference::ShotNoiseRelative;
                } else {
                    throw ParseError("reference must be 'displacement' or 'shot_relative'",
                                     it->second.line);
                }
            }
            if (!std::filesystem::exists(spec.path))
                throw ValidationError("ancillary file does not exist: " + spec.path);
            config.ancillary.push_back(std::move(spec));
        } else if (name == "run") {
            if (const auto it = sec.find("seed"); it != sec.end()) {
                const std::string v = trim(it->second.value);
                char* end = nullptr;
                config.seed = std::strtoull(v.c_str(), &end, 10);
                if (end != v.c_str() + v.size())
                    throw ParseError("seed must be a non-negative integer", it->second.line);
            }
        } else if (name == "calibration") {
            config.calibration.f_os_hz = num("f_os_hz", config.calibration.f_os_hz);
            config.calibration.detuning_sigma =
                num("detuning_sigma", config.calibration.detuning_sigma);
        }
    }

    if (!have_cavity) throw ValidationError("config is missing the [cavity] section");
    if (config.mechanics.empty())
        throw ValidationError("config needs at least one [mode] section");
    make_grid(config.grid);  // validates the grid spec
    if (!(config.mc.overlap >= 0.0 && config.mc.overlap < 1.0))
        throw ValidationError("mc overlap must be in [0, 1)");
    return config;
}

FrequencyGrid make_grid(const GridSpec& spec) {
    return FrequencyGrid::make(spec.f_min_hz, spec.f_max_hz, spec.points, spec.spacing);
}

std::string canonical_text(const RunConfig& config) {
    std::ostringstream out;
    emit_cavity(out, "cavity", config.cavity);
    if (config.cavity_b) {
        out << "\n";
        emit_cavity(out, "cavity_b", *config.cavity_b);
    }
    for (const auto& mode : config.mechanics) {
        out << "\n[mode]\n";
        out << "mass = " << format_double(mode.mass) << "\n";
        out << "f_m = " << format_double(mode.f_m) << "\n";
        out << "q = " << format_double(mode.q) << "\n";
        out << "temperature = " << format_double(mode.temperature) << "\n";
        out << "damping = "
            << (mode.damping == DampingModel::Structural ? "structural" : "viscous") << "\n";
    }
    out << "\n[grid]\n";
    out << "f_min = " << format_double(config.grid.f_min_hz) << "\n";
    out << "f_max = " << format_double(config.grid.f_max_hz) << "\n";
    out << "points = " << config.grid.points << "\n";
    out << "spacing = " << (config.grid.spacing == GridSpacing::Log ? "log" : "linear") << "\n";
    out << "\n[loop]\n";
    out << "dc_gain = " << format_double(config.loop.dc_gain) << "\n";
    out << "corner_hz = " << format_double(config.loop.corner_hz) << "\n";
    out << "\n[mc]\n";
    out << "duration_s = " << format_double(config.mc.duration_s) << "\n";
    out << "sample_rate_hz = " << format_double(config.mc.sample_rate_hz) << "\n";
    out << "segment_length = " << config.mc.segment_length << "\n";
    out << "overlap = " << format_double(config.mc.overlap) << "\n";
    for (const auto& a : config.ancillary) {
        out << "\n[ancillary]\n";
        out << "label = " << a.label << "\n";
        out << "file = " << a.path << "\n";
        out << "reference = "
            << (a.reference == NoiseReference::DisplacementReferred ? "displacement"
                                                                    : "shot_relative")
            << "\n";
    }
    if (config.calibration.f_os_hz > 0.0) {
        out << "\n[calibration]\n";
        out << "f_os_hz = " << format_double(config.calibration.f_os_hz) << "\n";
        out << "detuning_sigma = " << format_double(config.calibration.detuning_sigma) << "\n";
    }
    out << "\n[run]\n";
    out << "seed = " << config.seed << "\n";
    return out.str();
}

std::vector<AncillaryNoise> load_ancillary(const RunConfig& config) {
    std::vector<AncillaryNoise> out;
    for (const auto& spec : config.ancillary) {
        AncillaryNoise noise;
        noise.label = spec.label;
        noise.reference = spec.reference;
        noise.spectrum = to_noise_spectrum(read_spectrum_file(spec.path));
        if (noise.spectrum.units.empty())
            noise.spectrum.units = spec.reference == NoiseReference::ShotNoiseRelative
                                       ? "rel_shot"
                                       : "m^2/Hz";
        out.push_back(std::move(noise));
    }
    return out;
}

}  // namespace omcsim
