#pragma once

#include <numbers>

namespace qfric {

inline constexpr double pi = std::numbers::pi;

/// CODATA 2018 values, SI units.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;   // J s
    static constexpr double k_B = 1.380649e-23;       // J/K
    static constexpr double c = 299792458.0;          // m/s
    static constexpr double eps_0 = 8.8541878128e-12; // F/m
    static constexpr double mu_0 = 1.0 / (eps_0 * c * c);
};

} // namespace qfric
