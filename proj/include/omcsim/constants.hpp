#pragma once

namespace omcsim {

// CODATA/SI exact values.
struct PhysicalConstants {
    double c;      // speed of light [m/s]
    double k_B;    // Boltzmann constant [J/K]
    double h_bar;  // reduced Planck constant [J s]
};

inline constexpr PhysicalConstants constants{299792458.0, 1.380649e-23, 1.054571817e-34};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace omcsim
