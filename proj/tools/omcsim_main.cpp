// Command-line front end: statics, noise budgets, readout-angle sweeps,
// optical-spring calibration, Monte Carlo cross-correlation, and
// orientation comparison, all driven by one config file.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "omcsim/calibration.hpp"
#include "omcsim/config.hpp"
#include "omcsim/cross_correlation.hpp"
#include "omcsim/noise_budget.hpp"
#include "omcsim/quantum_noise.hpp"
#include "omcsim/spectrum_io.hpp"

namespace {

using namespace omcsim;

constexpr double kDeg = pi / 180.0;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string port = "transmission";
    double angle_deg = 0.0;
    double freq_hz = 20e3;
};

Port port_from(const std::string& name) {
    if (name == "transmission") return Port::TransmittedD;
    if (name == "reflection") return Port::ReflectedB;
    throw ValidationError("--port must be 'transmission' or 'reflection'");
}

struct Context {
    RunConfig config;
    std::string params_hash;
    std::filesystem::path out;
};

Context load(const CommonArgs& args, bool need_out) {
    Context ctx;
    ctx.config = parse_config(args.config_path);
    if (args.seed) ctx.config.seed = *args.seed;
    // the hash covers the effective run: canonical config plus CLI overrides
    const std::string effective = canonical_text(ctx.config) + "\nport = " + args.port +
                                  "\nangle_deg = " + std::to_string(args.angle_deg) + "\n";
    ctx.params_hash = to_hex(fnv1a64(effective));
    if (need_out) {
        if (args.out_dir.empty()) throw ValidationError("--out <dir> is required");
        ctx.out = args.out_dir;
        std::filesystem::create_directories(ctx.out);
    }
    return ctx;
}

void emit(const Context& ctx, const std::string& name, const NoiseSpectrum& spectrum,
          const std::string& label) {
    write_spectrum_file((ctx.out / name).string(),
                        to_spectrum_file(spectrum, label, ctx.params_hash));
}

std::string sanitize(const std::string& label) {
    std::string out;
    for (char c : label) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

// ---------------------------------------------------------------- commands

int cmd_show_config(const CommonArgs& args) {
    const Context ctx = load(args, false);
    std::cout << canonical_text(ctx.config);
    return 0;
}

void print_statics_for(const char* title, const CavityConfig& cfg, const MechanicalMode& mode) {
    const CavityStatics st = finesse_and_linewidth(cfg);
    const double p_circ = circulating_power(cfg);
    const OpticalSpring spring = optical_spring_constant(cfg, mode);
    std::printf("%s\n", title);
    std::printf("  finesse          %12.1f\n", st.finesse);
    std::printf("  fsr              %12.4f GHz\n", st.fsr_hz / 1e9);
    std::printf("  hwhm             %12.2f kHz\n", st.hwhm_hz / 1e3);
    std::printf("  p_circ           %12.2f mW\n", p_circ * 1e3);
    std::printf("  k_os             %12.3f N/m\n", spring.k_os);
    std::printf("  f_os             %12.2f kHz\n", spring.f_os_hz / 1e3);
}

int cmd_statics(const CommonArgs& args) {
    const Context ctx = load(args, !args.out_dir.empty());
    const MechanicalMode& mode = ctx.config.mechanics.front();
    print_statics_for("[cavity]", ctx.config.cavity, mode);
    if (ctx.config.cavity_b) print_statics_for("[cavity_b]", *ctx.config.cavity_b, mode);
    if (!args.out_dir.empty()) {
        std::ofstream out(ctx.out / "statics.txt", std::ios::binary);
        const CavityStatics st = finesse_and_linewidth(ctx.config.cavity);
        const OpticalSpring spring = optical_spring_constant(ctx.config.cavity, mode);
        out << "# params = " << ctx.params_hash << "\n";
        char buf[320];
        std::snprintf(buf, sizeof buf,
                      "finesse,%.17g\nfsr_hz,%.17g\nhwhm_hz,%.17g\np_circ_w,%.17g\n"
                      "k_os_n_per_m,%.17g\nf_os_hz,%.17g\n",
                      st.finesse, st.fsr_hz, st.hwhm_hz, circulating_power(ctx.config.cavity),
                      spring.k_os, spring.f_os_hz);
        out << buf;
    }
    return 0;
}

int cmd_budget(const CommonArgs& args) {
    const Context ctx = load(args, true);
    const FrequencyGrid grid = make_grid(ctx.config.grid);
    const IoModel model = build_io_model(ctx.config.cavity, ctx.config.mechanics.front(), grid);
    const Budget budget =
        assemble_budget(model, ctx.config.mechanics, load_ancillary(ctx.config),
                        port_from(args.port), args.angle_deg * kDeg);
    for (const auto& source : budget.sources)
        emit(ctx, "budget_" + sanitize(source.label) + ".csv", source.asd, source.label);
    emit(ctx, "budget_total.csv", budget.total, "total");
    std::printf("budget: %zu sources + total written to %s (port %s, angle %.2f deg)\n",
                budget.sources.size(), ctx.out.string().c_str(), args.port.c_str(),
                args.angle_deg);
    return 0;
}

int cmd_sweep_angle(const CommonArgs& args) {
    const Context ctx = load(args, true);
    const MechanicalMode& mode = ctx.config.mechanics.front();
    const Port port = port_from(args.port);
    const IoModel model =
        build_io_model(ctx.config.cavity, mode, FrequencyGrid({args.freq_hz}));
    const double sx =
        thermal_displacement_psd(model.op, ctx.config.mechanics, FrequencyGrid({args.freq_hz}))
            .values[0];
    const AngleSweep sweep = sweep_readout_angle(model, port, args.freq_hz, sx);

    std::ofstream out(ctx.out / "sweep_angle.csv", std::ios::binary);
    out << "# format = omcsim-angle-sweep-v1\n";
    out << "# params = " << ctx.params_hash << "\n";
    char buf[320];
    std::snprintf(buf, sizeof buf, "# freq_hz = %.17g\n", sweep.freq_hz);
    out << buf;
    if (sweep.root_status == RootStatus::DegenerateAllShot) {
        out << "# unity_roots = all (quantum noise equals shot noise at every angle)\n";
    } else {
        out << "# unity_roots_deg =";
        for (double r : sweep.unity_roots_rad) {
            std::snprintf(buf, sizeof buf, " %.4f", r / kDeg);
            out << buf;
        }
        out << "\n";
    }
    std::snprintf(buf, sizeof buf, "# thermal_dip_deg = %.4f\n", sweep.thermal_dip_rad / kDeg);
    out << buf;
    out << "# columns = angle_deg,quantum,thermal,total\n";
    for (std::size_t i = 0; i < sweep.zeta_rad.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", sweep.zeta_rad[i] / kDeg,
                      sweep.quantum[i], sweep.thermal[i], sweep.total[i]);
        out << buf;
    }

    if (sweep.root_status == RootStatus::DegenerateAllShot) {
        std::printf(
            "sweep-angle: quantum noise equals shot noise at every angle (mechanics "
            "decoupled)\n");
    } else if (sweep.root_status == RootStatus::NoneBracketed) {
        std::printf("sweep-angle: no shot-noise crossing bracketed on the angle grid\n");
    } else {
        std::printf("sweep-angle at %.1f kHz: quantum = shot noise at", sweep.freq_hz / 1e3);
        for (double r : sweep.unity_roots_rad) std::printf(" %.2f deg", r / kDeg);
        std::printf("; thermal dip at %.2f deg\n", sweep.thermal_dip_rad / kDeg);
    }
    const double marker = -model.port(port).basis_angle_rad / kDeg;
    std::printf("  intracavity amplitude quadrature sits at %.2f deg in this basis\n", marker);
    return 0;
}

int cmd_calibrate(const CommonArgs& args) {
    const Context ctx = load(args, !args.out_dir.empty());
    if (!(ctx.config.calibration.f_os_hz > 0.0))
        throw ValidationError("calibrate needs [calibration] f_os_hz in the config");
    const CavityConfig& cavity = ctx.config.cavity;
    SpringMeasurement meas;
    meas.f_os_hz = ctx.config.calibration.f_os_hz;
    meas.p_in_w = cavity.p_in;
    meas.detuning = cavity.detuning;
    meas.detuning_sigma = ctx.config.calibration.detuning_sigma;
    meas.injection_side = cavity.injection_side;
    const KnownCavity known{cavity.t_in, cavity.t_end, cavity.length, cavity.wavelength,
                            ctx.config.mechanics.front().mass};
    const CalibrationResult result = infer_power_and_loss(meas, known);
    const CalibrationResult refined =
        infer_power_and_loss(meas, known, CalibrationOptions{true});
    const DetuningOptimum opt = optimal_detuning(cavity, ctx.config.mechanics.front());

    std::printf("calibration from f_os = %.3f kHz at detuning %.3f +/- %.3f\n",
                meas.f_os_hz / 1e3, meas.detuning, meas.detuning_sigma);
    std::printf("  p_circ   %10.2f +/- %.2f mW\n", result.p_circ_w * 1e3,
                result.p_circ_sigma_w * 1e3);
    std::printf("  loss_rt  %10.2f +/- %.2f ppm\n", result.loss_rt * 1e6,
                result.loss_rt_sigma * 1e6);
    std::printf("  residual %10.2e\n", result.residual);
    std::printf("  full-response refinement: p_circ %.2f mW, loss_rt %.2f ppm\n",
                refined.p_circ_w * 1e3, refined.loss_rt * 1e6);
    std::printf("  spring-maximizing detuning %.4f (f_os max %.2f kHz)\n", opt.delta_star,
                opt.f_os_max_hz / 1e3);
    if (std::abs(opt.delta_star - cavity.detuning) > 0.08)
        std::printf("  note: configured detuning %.3f sits %.3f away from the optimum\n",
                    cavity.detuning, std::abs(opt.delta_star - cavity.detuning));

    if (!args.out_dir.empty()) {
        std::ofstream out(ctx.out / "calibration.txt", std::ios::binary);
        out << "# params = " << ctx.params_hash << "\n";
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "p_circ_w,%.17g\np_circ_sigma_w,%.17g\nloss_rt,%.17g\n"
                      "loss_rt_sigma,%.17g\nresidual,%.17g\ndelta_star,%.17g\nf_os_max_hz,%.17g\n",
                      result.p_circ_w, result.p_circ_sigma_w, result.loss_rt,
                      result.loss_rt_sigma, result.residual, opt.delta_star, opt.f_os_max_hz);
        out << buf;
    }
    return 0;
}

int cmd_mc_csd(const CommonArgs& args) {
    const Context ctx = load(args, true);
    const FrequencyGrid grid = make_grid(ctx.config.grid);
    const MechanicalMode& mode = ctx.config.mechanics.front();
    const IoModel model = build_io_model(ctx.config.cavity, mode, grid);

    SplitDetectionModel split;
    split.f_hz = grid.f_hz();
    split.s_th = thermal_displacement_psd(model.op, ctx.config.mechanics, grid).values;
    split.alpha.resize(grid.size());
    const auto transfer = signal_transfer(model, port_from(args.port), args.angle_deg * kDeg);
    for (std::size_t i = 0; i < grid.size(); ++i)
        split.alpha[i] = transfer[i] / std::sqrt(2.0);  // split onto two detectors
    split.loop = ctx.config.loop;
    split.p_circ_w = circulating_power(ctx.config.cavity);

    const AnalyticCsd ana = analytic_csd(split);
    const TimeSeriesPair pair = synthesize_timeseries(
        split, ctx.config.mc.duration_s, ctx.config.mc.sample_rate_hz, ctx.config.seed);
    const WelchResult w = welch_csd(pair, ctx.config.mc.segment_length, ctx.config.mc.overlap);

    auto spectrum = [&w](auto&& value_of, const char* units) {
        NoiseSpectrum s;
        s.units = units;
        for (std::size_t i = 1; i < w.f_hz.size(); ++i) {  // skip the DC bin
            s.f_hz.push_back(w.f_hz[i]);
            s.values.push_back(value_of(i));
        }
        return s;
    };
    emit(ctx, "mc_psd1.csv", spectrum([&](std::size_t i) { return w.psd1[i]; }, "rel_shot"),
         "psd channel 1");
    emit(ctx, "mc_psd2.csv", spectrum([&](std::size_t i) { return w.psd2[i]; }, "rel_shot"),
         "psd channel 2");
    emit(ctx, "mc_csd_abs.csv",
         spectrum([&](std::size_t i) { return std::abs(w.csd[i]); }, "rel_shot"),
         "csd magnitude");
    emit(ctx, "mc_csd_real.csv",
         spectrum([&](std::size_t i) { return w.csd[i].real(); }, "rel_shot"), "csd real part");
    emit(ctx, "mc_csd_imag.csv",
         spectrum([&](std::size_t i) { return w.csd[i].imag(); }, "rel_shot"), "csd imag part");
    const auto coh = coherence(w);
    emit(ctx, "mc_coherence.csv", spectrum([&](std::size_t i) { return coh[i]; }, "ratio"),
         "magnitude-squared coherence");

    emit(ctx, "analytic_open_loop.csv", NoiseSpectrum{grid.f_hz(), ana.open_loop, "rel_shot"},
         "analytic open-loop csd");
    NoiseSpectrum closed{grid.f_hz(), {}, "rel_shot"};
    for (const cplx& v : ana.closed_loop) closed.values.push_back(std::abs(v));
    emit(ctx, "analytic_closed_loop.csv", closed, "analytic closed-loop csd (field expansion)");
    emit(ctx, "analytic_closed_loop_alt.csv",
         NoiseSpectrum{grid.f_hz(), ana.closed_loop_alt, "rel_shot"},
         "first-order closed-loop form, comparison only");

    std::printf("mc-csd: %zu segments of %zu samples at %.0f Hz (seed %llu)\n", w.n_segments,
                ctx.config.mc.segment_length, pair.sample_rate_hz,
                static_cast<unsigned long long>(pair.seed));
    std::printf("  spectra written to %s\n", ctx.out.string().c_str());
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    const Context ctx = load(args, true);
    if (!ctx.config.cavity_b)
        throw ValidationError(
            "compare needs a [cavity_b] section (the reflection-readout orientation)");
    const FrequencyGrid grid = make_grid(ctx.config.grid);
    const auto ancillary = load_ancillary(ctx.config);
    const Budget trans =
        assemble_budget(build_io_model(ctx.config.cavity, ctx.config.mechanics.front(), grid),
                        ctx.config.mechanics, ancillary, Port::TransmittedD, 0.0);
    const Budget refl = assemble_budget(
        build_io_model(*ctx.config.cavity_b, ctx.config.mechanics.front(), grid),
        ctx.config.mechanics, ancillary, Port::ReflectedB, 0.0);
    const OrientationComparison cmp = compare_orientations(trans, refl);

    emit(ctx, "compare_transmission_total.csv", trans.total, "transmission total");
    emit(ctx, "compare_reflection_total.csv", refl.total, "reflection total");
    emit(ctx, "compare_ratio.csv", cmp.amplitude_ratio, "reflection/transmission amplitude");

    std::printf("compare: reflection/transmission amplitude ratio\n");
    std::printf("  max %.4f (%.2f dB) at %.1f kHz\n", cmp.max_ratio,
                20.0 * std::log10(cmp.max_ratio), cmp.max_ratio_f_hz / 1e3);
    std::printf("  min %.4f (%.2f dB) at %.1f kHz\n", cmp.min_ratio,
                20.0 * std::log10(cmp.min_ratio), cmp.min_ratio_f_hz / 1e3);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"detuned optomechanical cavity quantum-noise modeling toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* cmd, bool with_port) {
        cmd->add_option("--config", args.config_path, "run configuration file")->required();
        cmd->add_option("--out", args.out_dir, "output directory for emitted files");
        cmd->add_option("--seed", args.seed, "override the config seed");
        if (with_port) {
            cmd->add_option("--port", args.port, "readout port: transmission|reflection");
            cmd->add_option("--angle-deg", args.angle_deg,
                            "homodyne angle from the port carrier [deg]");
        }
        return cmd;
    };

    auto* statics = add_common(app.add_subcommand("statics", "cavity numbers table"), false);
    auto* budget =
        add_common(app.add_subcommand("budget", "displacement-referred noise budget"), true);
    auto* sweep = add_common(
        app.add_subcommand("sweep-angle", "noise vs readout angle at one frequency"), true);
    sweep->add_option("--freq-hz", args.freq_hz, "sweep frequency [Hz]");
    auto* calibrate = add_common(
        app.add_subcommand("calibrate", "invert a measured optical-spring frequency"), false);
    auto* mc = add_common(
        app.add_subcommand("mc-csd", "Monte Carlo split-detector cross spectrum"), true);
    auto* compare = add_common(
        app.add_subcommand("compare", "reflection vs transmission budget ratio"), false);
    auto* show = add_common(app.add_subcommand("show-config", "echo the parsed config"), false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (statics->parsed()) return cmd_statics(args);
        if (budget->parsed()) return cmd_budget(args);
        if (sweep->parsed()) return cmd_sweep_angle(args);
        if (calibrate->parsed()) return cmd_calibrate(args);
        if (mc->parsed()) return cmd_mc_csd(args);
        if (compare->parsed()) return cmd_compare(args);
        if (show->parsed()) return cmd_show_config(args);
    } catch (const omcsim::ValidationError& err) {
        std::cerr << "error: validation: " << err.what() << "\n";
        return 2;
    } catch (const omcsim::NumericalError& err) {
        std::cerr << "error: numerical: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
