#include "omcsim/cross_correlation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace omcsim {

namespace {

// Deterministic Gaussian stream: Box-Muller over mt19937_64, independent of
// library distribution internals.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

    double next(double sigma) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_ * sigma;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2) * sigma;
    }

private:
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::vector<cplx> rfft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n / 2 + 1);
    std::vector<double> in(x);
    fftw_plan plan = fftw_plan_dft_r2c_1d(int(n), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

std::vector<double> irfft(std::vector<cplx> spec, std::size_t n) {
    std::vector<double> out(n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(int(n), reinterpret_cast<fftw_complex*>(spec.data()),
                                          out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double scale = 1.0 / double(n);
    for (double& v : out) v *= scale;
    return out;
}

// Piecewise-linear sample of tabulated values at frequency f, clamped at the
// table edges.
template <typename T>
T sample_table(const std::vector<double>& fs, const std::vector<T>& vals, double f) {
    if (f <= fs.front()) return vals.front();
    if (f >= fs.back()) return vals.back();
    const auto hi = std::lower_bound(fs.begin(), fs.end(), f);
    const std::size_t k = std::size_t(hi - fs.begin());
    const double t = (f - fs[k - 1]) / (fs[k] - fs[k - 1]);
    return vals[k - 1] + t * (vals[k] - vals[k - 1]);
}

}  // namespace

cplx LoopModel::gain(double omega) const {
    return dc_gain / cplx(1.0, omega / (two_pi * corner_hz));
}

void SplitDetectionModel::validate() const {
    if (f_hz.size() < 2) throw ValidationError("split-detection model needs a grid");
    for (std::size_t i = 0; i + 1 < f_hz.size(); ++i)
        if (!(f_hz[i] > 0.0 && f_hz[i + 1] > f_hz[i]))
            throw ValidationError("model grid must be positive and strictly increasing");
    if (alpha.size() != f_hz.size() || s_th.size() != f_hz.size())
        throw ValidationError("alpha and s_th must match the model grid");
    for (double v : s_th)
        if (!(v >= 0.0)) throw ValidationError("thermal PSD must be >= 0");
    if (!(loop.corner_hz > 0.0)) throw ValidationError("loop corner frequency must be > 0");
}

AnalyticCsd analytic_csd(const SplitDetectionModel& model) {
    model.validate();
    AnalyticCsd out;
    const std::size_t n = model.f_hz.size();
    out.f_hz = model.f_hz;
    out.open_loop.resize(n);
    out.closed_loop.resize(n);
    out.closed_loop_alt.resize(n);
    out.psd1_closed.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sig = std::norm(model.alpha[i]) * model.s_th[i];
        const cplx g = model.loop.gain(two_pi * model.f_hz[i]);
        const cplx one_plus = 1.0 + g;
        const double mag2 = std::norm(one_plus);
        out.open_loop[i] = sig;
        out.closed_loop[i] = (sig - g) / mag2;
        out.closed_loop_alt[i] = std::abs(sig / one_plus + g / (one_plus * one_plus));
        out.psd1_closed[i] = (1.0 + sig) / mag2;
    }
    return out;
}

TimeSeriesPair synthesize_timeseries(const SplitDetectionModel& model, double duration_s,
                                     double sample_rate_hz, std::uint64_t seed) {
    model.validate();
    if (!model.loop.stable())
        throw NumericalError("lock loop is unstable: 1 + G has a right-half-plane zero");
    if (!(sample_rate_hz > 2.0 * model.f_hz.back()))
        throw ValidationError("sample rate must exceed twice the highest model frequency");
    const std::size_t n = std::size_t(std::llround(duration_s * sample_rate_hz));
    if (n < (1u << 16))
        throw ValidationError("record too short: need at least 2^16 samples");
    const std::size_t nr = n - n % 2;  // even length keeps the Nyquist bin explicit

    GaussianRng rng(seed);
    const double sigma = std::sqrt(sample_rate_hz / 2.0);  // unit one-sided PSD
    std::vector<double> v1(nr), v2(nr), w(nr);
    for (double& x : v1) x = rng.next(sigma);
    for (double& x : v2) x = rng.next(sigma);
    for (double& x : w) x = rng.next(sigma);

    std::vector<cplx> sv1 = rfft(v1), sv2 = rfft(v2), sw = rfft(w);
    const std::size_t bins = sv1.size();
    std::vector<cplx> sa(bins), sb(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const double f = double(k) * sample_rate_hz / double(nr);
        cplx a = sample_table(model.f_hz, model.alpha, f);
        cplx g = model.loop.gain(two_pi * f);
        if (k == 0 || k == bins - 1) {
            a = a.real();
            g = g.real();
        }
        const double sth = std::max(0.0, sample_table(model.f_hz, model.s_th, f));
        const cplx x_th = std::sqrt(sth) * sw[k];
        const cplx one_plus = 1.0 + g;
        sa[k] = (sv1[k] + a * x_th) / one_plus;
        sb[k] = sv2[k] + a * x_th / one_plus - g * sv1[k] / one_plus;
    }
    sa[0] = sa[0].real();
    sb[0] = sb[0].real();
    sa[bins - 1] = sa[bins - 1].real();
    sb[bins - 1] = sb[bins - 1].real();

    TimeSeriesPair pair;
    pair.sample_rate_hz = sample_rate_hz;
    pair.seed = seed;
    pair.ch1 = irfft(std::move(sa), nr);
    pair.ch2 = irfft(std::move(sb), nr);
    return pair;
}

WelchResult welch_csd(const TimeSeriesPair& pair, std::size_t segment_length,
                      double overlap_fraction, Window window) {
    (void)window;  // Hann is the only window
    if (pair.ch1.size() != pair.ch2.size())
        throw ValidationError("channels must have equal length");
    if (segment_length < 2 || (segment_length & (segment_length - 1)) != 0)
        throw ValidationError("segment length must be a power of two");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
        throw ValidationError("overlap fraction must be in [0, 1)");
    const std::size_t n = pair.ch1.size();
    if (n < segment_length) throw ValidationError("record shorter than one segment");

    const std::size_t hop =
        std::max<std::size_t>(1, std::size_t(std::lround(double(segment_length) *
                                                         (1.0 - overlap_fraction))));
    const std::size_t k_segments = (n - segment_length) / hop + 1;
    if (k_segments < 8)
        throw ValidationError("insufficient data: fewer than 8 averaging segments");

    std::vector<double> win(segment_length);
    double win_power = 0.0;
    for (std::size_t i = 0; i < segment_length; ++i) {
        win[i] = 0.5 * (1.0 - std::cos(two_pi * double(i) / double(segment_length)));
        win_power += win[i] * win[i];
    }

    const std::size_t bins = segment_length / 2 + 1;
    std::vector<cplx> csd(bins, 0.0);
    std::vector<double> psd1(bins, 0.0), psd2(bins, 0.0);
    std::vector<double> buf1(segment_length), buf2(segment_length);
    std::vector<cplx> s1(bins), s2(bins);

    fftw_plan plan1 = fftw_plan_dft_r2c_1d(int(segment_length), buf1.data(),
                                           reinterpret_cast<fftw_complex*>(s1.data()),
                                           FFTW_ESTIMATE);
    fftw_plan plan2 = fftw_plan_dft_r2c_1d(int(segment_length), buf2.data(),
                                           reinterpret_cast<fftw_complex*>(s2.data()),
                                           FFTW_ESTIMATE);
    for (std::size_t seg = 0; seg < k_segments; ++seg) {
        const std::size_t off = seg * hop;
        for (std::size_t i = 0; i < segment_length; ++i) {
            buf1[i] = pair.ch1[off + i] * win[i];
            buf2[i] = pair.ch2[off + i] * win[i];
        }
        fftw_execute(plan1);
        fftw_execute(plan2);
        for (std::size_t b = 0; b < bins; ++b) {
            csd[b] += std::conj(s1[b]) * s2[b];
            psd1[b] += std::norm(s1[b]);
            psd2[b] += std::norm(s2[b]);
        }
    }
    fftw_destroy_plan(plan1);
    fftw_destroy_plan(plan2);

    WelchResult out;
    out.n_segments = k_segments;
    out.f_hz.resize(bins);
    out.csd.resize(bins);
    out.psd1.resize(bins);
    out.psd2.resize(bins);
    const double base = 1.0 / (pair.sample_rate_hz * win_power * double(k_segments));
    for (std::size_t b = 0; b < bins; ++b) {
        const double one_sided = (b == 0 || b == bins - 1) ? 1.0 : 2.0;
        out.f_hz[b] = double(b) * pair.sample_rate_hz / double(segment_length);
        out.csd[b] = csd[b] * (one_sided * base);
        out.psd1[b] = psd1[b] * (one_sided * base);
        out.psd2[b] = psd2[b] * (one_sided * base);
    }
    return out;
}

std::vector<double> coherence(const WelchResult& w) {
    std::vector<double> out(w.csd.size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double denom = w.psd1[i] * w.psd2[i];
        if (denom > 0.0) out[i] = std::norm(w.csd[i]) / denom;
    }
    return out;
}

PowerSweepResult power_sweep(const std::vector<SplitDetectionModel>& models, double duration_s,
                             double sample_rate_hz, std::uint64_t seed,
                             const PowerSweepOptions& options) {
    if (models.size() < 2) throw ValidationError("power sweep needs at least two power levels");
    for (const auto& m : models) m.validate();
    for (std::size_t i = 1; i < models.size(); ++i) {
        if (models[i].f_hz != models.front().f_hz || models[i].s_th != models.front().s_th)
            throw ValidationError("power sweep models must share one thermal spectrum");
    }

    PowerSweepResult result;
    result.band_lo_hz = options.band_lo_hz;
    result.band_hi_hz = options.band_hi_hz;

    for (std::size_t i = 0; i < models.size(); ++i) {
        const std::uint64_t run_seed = seed + 0x9E3779B97F4A7C15ull * (i + 1);
        const TimeSeriesPair pair =
            synthesize_timeseries(models[i], duration_s, sample_rate_hz, run_seed);
        const WelchResult w =
            welch_csd(pair, options.segment_length, options.overlap_fraction);

        double acc = 0.0, var = 0.0;
        std::size_t count = 0;
        for (std::size_t b = 0; b < w.f_hz.size(); ++b) {
            const double f = w.f_hz[b];
            if (f < options.band_lo_hz || f > options.band_hi_hz) continue;
            const cplx a = sample_table(models[i].f_hz, models[i].alpha, f);
            const double a2 = std::norm(a);
            if (!(a2 > 0.0))
                throw ValidationError("power sweep: alpha vanishes inside the analysis band");
            acc += std::abs(w.csd[b]) / a2;
            var += w.psd1[b] * w.psd2[b] / double(w.n_segments) / (a2 * a2);
            ++count;
        }
        if (count == 0) throw ValidationError("power sweep band contains no spectral bins");
        PowerSweepRow row;
        row.p_circ_w = models[i].p_circ_w;
        row.band_avg_sx = acc / double(count);
        // overlapping segments and windowed bins correlate; inflate the
        // independent-bin estimate accordingly
        row.sigma = std::sqrt(2.0 * var) / double(count);
        result.rows.push_back(row);
    }

    // weighted least squares of band_avg = offset + coeff * sqrt(P/P0)
    const double p0 = result.rows.front().p_circ_w;
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (const auto& row : result.rows) {
        const double x = std::sqrt(row.p_circ_w / p0);
        const double wgt = 1.0 / (row.sigma * row.sigma);
        sw += wgt;
        swx += wgt * x;
        swy += wgt * row.band_avg_sx;
        swxx += wgt * x * x;
        swxy += wgt * x * row.band_avg_sx;
    }
    const double det = sw * swxx - swx * swx;
    if (!(std::abs(det) > 0.0)) throw NumericalError("power sweep fit is degenerate");
    result.offset = (swxx * swy - swx * swxy) / det;
    result.sqrt_p_coeff = (sw * swxy - swx * swy) / det;
    result.sqrt_p_sigma = std::sqrt(sw / det);
    return result;
}

}  // namespace omcsim
