#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "omcsim/core.hpp"
#include "omcsim/dynamics.hpp"
#include "omcsim/grid.hpp"

namespace omcsim {

enum class Port { InputA, ReflectedB, EndVacuumC, TransmittedD, Loss };

struct Mat2 {
    cplx a11, a12, a21, a22;
};

struct Vec2 {
    cplx q1, q2;
};

/// Quadrature transfer into one output port, per grid frequency, expressed in
/// the intracavity quadrature frame (q1 along the intracavity carrier).
/// `basis_angle_rad` is the direction of this port's outgoing carrier in that
/// frame; homodyne angle zeta is measured from it, so zeta = 0 reads the
/// port's own amplitude quadrature.
struct PortField {
    Port port = Port::ReflectedB;
    double basis_angle_rad = 0.0;
    std::vector<Mat2> from_injection;  // vacuum entering the injection mirror
    std::vector<Mat2> from_end;        // vacuum entering the far mirror
    std::vector<Mat2> from_loss;       // vacuum entering the loss port
    std::vector<Vec2> signal_per_m;    // open-loop mirror displacement -> quadratures [1/m]
};

struct IoModelOptions {
    bool freeze_mechanics = false;   // clamp the mirror (infinite-mass limit)
    double condition_limit = 1e12;   // per-frequency solve conditioning guard
};

/// Per-frequency solution of the detuned-cavity quadrature input-output system
/// with one movable mirror: three vacuum inputs propagate to the reflected,
/// transmitted, and loss outputs; mirror motion feeds amplitude fluctuations
/// back through the detuning. Immutable once built.
struct IoModel {
    FrequencyGrid grid;
    OperatingPoint op;
    MechanicalMode mode;
    bool mechanics_frozen = false;

    PortField reflected;
    PortField transmitted;
    PortField loss_out;

    std::vector<cplx> chi_eff;      // closed-loop x per external force [m/N]
    std::vector<cplx> spring;       // K_os(Omega) [N/m]

    const PortField& port(Port p) const;
};

IoModel build_io_model(const CavityConfig& cfg, const MechanicalMode& mode,
                       const FrequencyGrid& grid, const IoModelOptions& options = {});

/// One-sided quantum-noise PSD of the homodyne readout at angle zeta,
/// normalized so pure vacuum reads 1. Shot noise and back action enter
/// coherently through the port transfer.
std::vector<double> quantum_noise_psd(const IoModel& model, Port port, double zeta_rad);

/// |displacement -> readout quadrature| magnitude at angle zeta [1/m].
std::vector<double> signal_transfer(const IoModel& model, Port port, double zeta_rad);

enum class RootStatus { Found, NoneBracketed, DegenerateAllShot };

struct AngleSweep {
    double freq_hz = 0.0;
    std::vector<double> zeta_rad;
    std::vector<double> quantum;  // relative to shot noise
    std::vector<double> thermal;
    std::vector<double> total;

    RootStatus root_status = RootStatus::NoneBracketed;
    std::vector<double> unity_roots_rad;  // quantum(zeta) == 1, in (-pi/2, pi/2]
    double thermal_dip_rad = 0.0;         // argmin of the thermal curve
    double dip_to_peak_signal = 0.0;      // |g(dip)| / max |g| over the sweep
};

struct AngleSweepOptions {
    double zeta_min_rad = -pi / 2.0;
    double zeta_max_rad = pi / 2.0;
    double step_rad = 0.5 * pi / 180.0;
    double refine_rad = 0.01 * pi / 180.0;
};

/// Noise-vs-readout-angle table at a single frequency. `thermal_sx_m2_hz` is
/// the displacement-referred thermal PSD at that frequency (supplied by the
/// budget layer).
AngleSweep sweep_readout_angle(const IoModel& model, Port port, double freq_hz,
                               double thermal_sx_m2_hz, const AngleSweepOptions& options = {});

}  // namespace omcsim
