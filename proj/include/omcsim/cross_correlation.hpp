#pragma once

#include <cstdint>
#include <vector>

#include "omcsim/core.hpp"
#include "omcsim/grid.hpp"

namespace omcsim {

/// Single-pole low-pass servo: G(Omega) = dc_gain / (1 + i Omega / (2 pi corner_hz)).
struct LoopModel {
    double dc_gain = 0.0;
    double corner_hz = 1.0;

    cplx gain(double omega) const;
    /// 1 + G has a right-half-plane zero (closed loop unstable) iff dc_gain < -1.
    bool stable() const { return dc_gain > -1.0; }
};

/// Split-detection model of the two photocurrents behind the output
/// beamsplitter: each detector sees unit shot noise plus the common thermal
/// signal alpha * x_th; detector 1 is in the lock loop with open-loop gain G.
struct SplitDetectionModel {
    std::vector<double> f_hz;   // strictly increasing grid
    std::vector<cplx> alpha;    // thermal-motion coupling [quadrature units per m]
    std::vector<double> s_th;   // thermal displacement PSD [m^2/Hz], >= 0
    LoopModel loop;
    double p_circ_w = 0.0;      // bookkeeping for power sweeps

    void validate() const;
};

struct AnalyticCsd {
    std::vector<double> f_hz;
    std::vector<double> open_loop;        // |alpha|^2 S_th, vacuum terms cancel
    std::vector<cplx> closed_loop;        // (|alpha|^2 S_th - G) / |1+G|^2
    std::vector<double> closed_loop_alt;  // |alpha|^2 S_th/(1+G) + G/(1+G)^2, see note
    std::vector<double> psd1_closed;      // (1 + |alpha|^2 S_th) / |1+G|^2
};

/// Cross spectral density between the two photocurrents, open and closed loop.
/// `closed_loop` is the direct expansion of the in-loop field relations and is
/// the expression validated against the Monte Carlo engine. `closed_loop_alt`
/// is an alternative first-order form sometimes quoted for this setup; it
/// disagrees with the expansion at |G| ~ 1 and is reported for comparison
/// only.
AnalyticCsd analytic_csd(const SplitDetectionModel& model);

struct TimeSeriesPair {
    double sample_rate_hz = 0.0;
    std::vector<double> ch1, ch2;  // shot-noise-normalized photocurrents
    std::uint64_t seed = 0;
};

/// Monte Carlo realization of the split-detection photocurrents:
/// v1, v2 unit-PSD white vacua, x_th white force noise shaped to S_th, loop
/// applied in the frequency domain. Deterministic for a given seed.
TimeSeriesPair synthesize_timeseries(const SplitDetectionModel& model, double duration_s,
                                     double sample_rate_hz, std::uint64_t seed);

enum class Window { Hann };

struct WelchResult {
    std::vector<double> f_hz;
    std::vector<cplx> csd;       // conj(ch1) * ch2 convention
    std::vector<double> psd1, psd2;
    std::size_t n_segments = 0;
};

/// Welch cross/auto spectra, one-sided, window-power normalized so unit-PSD
/// white noise reads 1.
WelchResult welch_csd(const TimeSeriesPair& pair, std::size_t segment_length,
                      double overlap_fraction, Window window = Window::Hann);

/// Magnitude-squared coherence |S12|^2/(S1 S2) per bin.
std::vector<double> coherence(const WelchResult& w);

struct PowerSweepRow {
    double p_circ_w = 0.0;
    double band_avg_sx = 0.0;  // recovered |CSD| / |alpha|^2, band-averaged [m^2/Hz]
    double sigma = 0.0;        // statistical error of the band average
};

struct PowerSweepResult {
    std::vector<PowerSweepRow> rows;
    double band_lo_hz = 0.0, band_hi_hz = 0.0;
    // weighted fit of band_avg = a + b sqrt(P/P0); a back-action-free sweep
    // has b consistent with zero
    double offset = 0.0;
    double sqrt_p_coeff = 0.0;
    double sqrt_p_sigma = 0.0;
};

struct PowerSweepOptions {
    double band_lo_hz = 2e3;
    double band_hi_hz = 20e3;
    std::size_t segment_length = 4096;
    double overlap_fraction = 0.5;
};

/// Run the cross-correlation measurement at several circulating powers and
/// recover the displacement-referred thermal spectrum from each. All models
/// must share the same thermal spectrum.
PowerSweepResult power_sweep(const std::vector<SplitDetectionModel>& models, double duration_s,
                             double sample_rate_hz, std::uint64_t seed,
                             const PowerSweepOptions& options = {});

}  // namespace omcsim
