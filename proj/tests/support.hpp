#pragma once

#include <cstdint>
#include <random>

#include "qfric/materials.hpp"

namespace qfric::prop {

// Seeded draws for the property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    double log_uniform(double lo, double hi)
    {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    // A valid single-oscillator model with a resolvable resonance.
    LorentzOscillatorModel model()
    {
        const double wt = log_uniform(1e12, 1e15);
        const double wl = wt * uniform(1.05, 1.6);
        const double gamma = wt * log_uniform(1e-4, 2e-2);
        return LorentzOscillatorModel(uniform(1.0, 12.0), wl, wt, gamma);
    }

private:
    std::mt19937_64 rng_;
};

inline constexpr int property_cases = 200;

} // namespace qfric::prop
