#pragma once

// Imaginary parts of the dyadic Green tensor at the particle position.
//
// Normalization: (curl curl - w^2/c^2) G = delta I, so a dipole p radiates
// E = mu_0 w^2 G p. All returned traces are in 1/m.
//
// Two routes to the near-field half-space term are provided and must agree:
//   * closed form from the quasi-static image construction,
//     Im[G_xx + G_yy] = Im r * c^2 / (16 pi w^2 z0^3),  r = (eps-1)/(eps+1);
//   * a brute-force volume sum over polarization sources in the bulk,
//     (w^2/c^2) Im chi |t|^2 sum_cells dV (|G0_xi|^2 + |G0_yi|^2),
//     with G0 the near-field free dyad and t = 2/(eps+1) the interface
//     transmission of a source buried in the dielectric.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qfric/constants.hpp"
#include "qfric/error.hpp"
#include "qfric/materials.hpp"
#include "qfric/reduce.hpp"

namespace qfric {

class HalfSpaceGeometry {
public:
    HalfSpaceGeometry(double z0, LorentzOscillatorModel surface) : z0_(z0), surface_(surface)
    {
        if (!(z0 > 0.0) || !std::isfinite(z0))
            throw DomainError("separation z0 must be positive and finite");
    }

    double z0() const noexcept { return z0_; }
    const LorentzOscillatorModel& surface() const noexcept { return surface_; }

private:
    double z0_;
    LorentzOscillatorModel surface_;
};

enum class GreenEvaluation { free_space, quasi_static, volume_oracle };

struct GreenTensorSample {
    complex xx;
    complex yy;
    complex zz;
    double frequency = 0.0;
    GreenEvaluation mode = GreenEvaluation::free_space;
};

/// Im[G_xx + G_yy] of the vacuum dyad at coincident points: w / (3 pi c).
inline double freespace_im_green_xxyy(double omega)
{
    if (!(omega >= 0.0) || !std::isfinite(omega))
        throw DomainError("freespace_im_green_xxyy: omega must be >= 0");
    return omega / (3.0 * pi * PhysicalConstants::c);
}

/// Only the imaginary (radiative) part is finite at coincident points; the
/// divergent real self-field is dropped.
inline GreenTensorSample freespace_green_sample(double omega)
{
    const complex g(0.0, 0.5 * freespace_im_green_xxyy(omega));
    return {g, g, g, omega, GreenEvaluation::free_space};
}

/// Quasi-static treatment is trusted for z0 < 0.01 c / omega.
inline bool quasi_static_valid(const HalfSpaceGeometry& geometry, double omega)
{
    return geometry.z0() < 0.01 * PhysicalConstants::c / omega;
}

inline double halfspace_prefactor(double z0, double omega)
{
    const double c = PhysicalConstants::c;
    return c * c / (16.0 * pi * omega * omega * z0 * z0 * z0);
}

/// Im[G^R_xx + G^R_yy] of the reflected tensor at the particle, non-retarded limit.
inline double halfspace_scattered_im_trace_xy(const HalfSpaceGeometry& geometry, double omega)
{
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("halfspace_scattered_im_trace_xy: omega must be > 0");
    return surface_response(geometry.surface(), omega).imag() *
           halfspace_prefactor(geometry.z0(), omega);
}

/// Full reflected tensor from the image dipole: xx = yy = r K/2, zz = r K,
/// with K = c^2 / (16 pi w^2 z0^3).
inline GreenTensorSample halfspace_scattered_sample(const HalfSpaceGeometry& geometry, double omega)
{
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("halfspace_scattered_sample: omega must be > 0");
    const complex r = surface_response(geometry.surface(), omega);
    const double k = halfspace_prefactor(geometry.z0(), omega);
    return {0.5 * k * r, 0.5 * k * r, k * r, omega, GreenEvaluation::quasi_static};
}

struct VolumeOracleOptions {
    double truncation = 0.0; ///< box half-width and depth in m; 0 selects 20 z0
    double resolution = 0.0; ///< cell edge next to the particle in m; 0 selects z0/16
    unsigned threads = default_thread_count();
};

struct VolumeOracleResult {
    double value = 0.0;             ///< Im[G_xx + G_yy], 1/m
    double value_doubled_box = 0.0; ///< same with the truncation doubled
    bool converged = false;         ///< box doubling moved the value by <= 5%
    std::size_t cells = 0;
    GreenTensorSample sample;
};

/// Tabulates the frequency-independent geometric sums of the volume route
/// once, so it can be evaluated at many frequencies.
class VolumeKernel {
public:
    VolumeKernel(const HalfSpaceGeometry& geometry, VolumeOracleOptions options = {})
        : geometry_(geometry)
    {
        const double z0 = geometry.z0();
        truncation_ = options.truncation > 0.0 ? options.truncation : 20.0 * z0;
        resolution_ = options.resolution > 0.0 ? options.resolution : z0 / 16.0;
        if (truncation_ < 10.0 * z0 * (1.0 - 1e-12))
            throw DomainError("volume oracle: truncation must be >= 10 z0");
        if (resolution_ > 0.25 * z0 * (1.0 + 1e-12))
            throw DomainError("volume oracle: grid must resolve z0/4");
        box_ = integrate_box(truncation_, options.threads);
        doubled_ = integrate_box(2.0 * truncation_, options.threads);
    }

    const HalfSpaceGeometry& geometry() const noexcept { return geometry_; }
    double truncation() const noexcept { return truncation_; }
    double resolution() const noexcept { return resolution_; }
    std::size_t cells() const noexcept { return box_.cells; }

    /// Relative change of the geometric sum when the box is doubled.
    double truncation_change() const noexcept
    {
        return std::abs(doubled_.xy - box_.xy) / std::abs(doubled_.xy);
    }
    bool converged() const noexcept { return truncation_change() <= 0.05; }

    double im_trace_xy(double omega) const { return scale(omega) * box_.xy; }

    VolumeOracleResult evaluate(double omega) const
    {
        const double s = scale(omega);
        VolumeOracleResult out;
        out.value = s * box_.xy;
        out.value_doubled_box = s * doubled_.xy;
        out.converged = converged();
        out.cells = box_.cells;
        // The xx and yy sums are equal by symmetry.
        out.sample = {complex(0.0, 0.5 * s * box_.xy), complex(0.0, 0.5 * s * box_.xy),
                      complex(0.0, s * box_.z), omega, GreenEvaluation::volume_oracle};
        return out;
    }

private:
    struct Sums {
        double xy = 0.0; // sum dV (3 (nx^2 + ny^2) + 2) / R^6
        double z = 0.0;  // sum dV (3 nz^2 + 1) / R^6
        std::size_t cells = 0;
    };

    // (w^2/c^2) Im chi |2/(eps+1)|^2 (c^2 / (4 pi w^2))^2
    double scale(double omega) const
    {
        if (!(omega > 0.0) || !std::isfinite(omega))
            throw DomainError("volume oracle: omega must be > 0");
        const complex eps = permittivity(geometry_.surface(), omega);
        const double t2 = std::norm(2.0 / (eps + 1.0));
        const double c = PhysicalConstants::c;
        return eps.imag() * t2 * c * c / (16.0 * pi * pi * omega * omega);
    }

    // Cell edges on [start, start + length]: uniform steps of `res` up to
    // `flat`, then growing proportionally to the distance.
    static std::vector<double> graded_edges(double start, double length, double res, double flat)
    {
        std::vector<double> e{start};
        const double end = start + length;
        const double growth = res / flat;
        while (e.back() < end) {
            const double x = e.back();
            const double step = x < flat ? res : x * growth;
            e.push_back(x + step >= end * (1.0 - 1e-12) ? end : x + step);
        }
        return e;
    }

    Sums integrate_box(double box, unsigned threads) const
    {
        const double z0 = geometry_.z0();
        const std::vector<double> depth = graded_edges(z0, box, resolution_, z0);
        const std::vector<double> half = graded_edges(0.0, box, resolution_, z0);
        std::vector<double> lateral;
        for (std::size_t i = half.size(); i-- > 1;)
            lateral.push_back(-half[i]);
        lateral.insert(lateral.end(), half.begin(), half.end());

        const std::size_t layers = depth.size() - 1;
        std::vector<double> layer_xy(layers), layer_z(layers);
        parallel_for(
            layers,
            [&](std::size_t k) {
                const double h = 0.5 * (depth[k] + depth[k + 1]);
                const double dh = depth[k + 1] - depth[k];
                std::vector<double> row_xy, row_z;
                row_xy.reserve(lateral.size());
                row_z.reserve(lateral.size());
                for (std::size_t i = 0; i + 1 < lateral.size(); ++i) {
                    const double x = 0.5 * (lateral[i] + lateral[i + 1]);
                    const double dx = lateral[i + 1] - lateral[i];
                    double sxy = 0.0, sz = 0.0;
                    for (std::size_t j = 0; j + 1 < lateral.size(); ++j) {
                        const double y = 0.5 * (lateral[j] + lateral[j + 1]);
                        const double dy = lateral[j + 1] - lateral[j];
                        const double r2 = x * x + y * y + h * h;
                        const double w = dx * dy * dh / (r2 * r2 * r2);
                        sxy += w * (3.0 * (x * x + y * y) / r2 + 2.0);
                        sz += w * (3.0 * h * h / r2 + 1.0);
                    }
                    row_xy.push_back(sxy);
                    row_z.push_back(sz);
                }
                layer_xy[k] = pairwise_sum(row_xy);
                layer_z[k] = pairwise_sum(row_z);
            },
            threads);
        const std::size_t n = lateral.size() - 1;
        return {pairwise_sum(layer_xy), pairwise_sum(layer_z), layers * n * n};
    }

    HalfSpaceGeometry geometry_;
    double truncation_ = 0.0;
    double resolution_ = 0.0;
    Sums box_;
    Sums doubled_;
};

/// Brute-force volume route for Im[G_xx + G_yy] at one frequency.
inline VolumeOracleResult volume_kernel_oracle(const HalfSpaceGeometry& geometry, double omega,
                                               VolumeOracleOptions options = {})
{
    return VolumeKernel(geometry, options).evaluate(omega);
}

} // namespace qfric
