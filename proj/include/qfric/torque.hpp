#pragma once

// Friction torques on a particle spinning at w0 about z.
//
// Both contributions share the fluctuation bracket
//   B(w) = Im a(w+)[a_T(w+) - a_F(w)] - Im a(w-)[a_T(w-) - a_F(w)],  w+- = w +- w0,
// where a_T is the particle's thermal factor and a_F that of the field:
//   M_s = hbar/(2 pi c^2) int w^2 Im[G0_xx + G0_yy](w) B(w; T, T0) dw     (vacuum)
//   M_B = hbar/(2 pi c^2) int w^2 Im[GR_xx + GR_yy](w) B(w; T, T) dw      (surface)
// GR is the reflected tensor of the half-space, whose field fluctuations
// are set by the bulk temperature T. The field-noise half of M_B,
// -a_T(w) Im[a(w+) - a(w-)] GR, is the bulk-noise term; the remaining half
// is the particle's own fluctuating dipole. With both, B(w) <= 0 at every
// w for w0 > 0 and T = T0, so the torque always brakes the rotation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qfric/constants.hpp"
#include "qfric/error.hpp"
#include "qfric/greens.hpp"
#include "qfric/materials.hpp"
#include "qfric/quadrature.hpp"
#include "qfric/thermal.hpp"

namespace qfric {

enum class GreenPath { quasi_static, volume_oracle };
enum class TorqueMode { self, surface, total };

inline const char* to_string(TorqueMode m)
{
    switch (m) {
    case TorqueMode::self:
        return "self";
    case TorqueMode::surface:
        return "surface";
    default:
        return "total";
    }
}

struct TorqueOptions {
    Polarizability polarizability = Polarizability::clausius_mossotti;
    FdtConvention fdt = FdtConvention::paper;
    GreenPath green_path = GreenPath::quasi_static;
    VolumeOracleOptions oracle{};
    std::size_t spectrum_samples = 0; ///< attach a sampled integrand when > 0
};

struct SpectrumSample {
    double omega;   ///< rad/s
    double density; ///< dM/domega, N m s
};

struct TorqueResult {
    double value = 0.0;          ///< N m along z, signed
    double error_estimate = 0.0; ///< N m
    TorqueMode mode = TorqueMode::total;
    int evaluations = 0;
    std::vector<SpectrumSample> spectrum;

    /// The sign is not resolved by the quadrature.
    bool indeterminate_sign() const noexcept { return !(std::abs(value) > error_estimate); }
};

/// Im[a(w + w0) - a(w - w0)]; odd under w0 -> -w0. Formed from
/// eps(a) - eps(b) = K (a - b)(a + b + i gamma) / (D(a) D(b)), with
/// D(w) = w_T^2 - w^2 - i gamma w and K = eps_inf (w_L^2 - w_T^2), so small
/// shifts do not cancel. Valid for either sign of w +- w0.
inline double shift_bracket(const ParticleSpec& particle, double omega, double omega0,
                            Polarizability form = Polarizability::clausius_mossotti)
{
    if (!std::isfinite(omega) || !std::isfinite(omega0))
        throw DomainError("shift_bracket: frequencies must be finite");
    const LorentzOscillatorModel& m = particle.material();
    const double a = omega + omega0;
    const double b = omega - omega0;
    const double wt2 = m.omega_T() * m.omega_T();
    const double k = m.eps_inf() * (m.omega_L() * m.omega_L() - wt2);
    const complex da(wt2 - a * a, -m.gamma() * a);
    const complex db(wt2 - b * b, -m.gamma() * b);
    const complex diff = k * (2.0 * omega0) * complex(2.0 * omega, m.gamma()) / (da * db);
    if (form == Polarizability::volume)
        return particle.volume() * diff.imag();
    const complex ea = m.eps_inf() + k / da;
    const complex eb = m.eps_inf() + k / db;
    return 9.0 * particle.volume() * (diff / ((ea + 2.0) * (eb + 2.0))).imag();
}

namespace detail {

// Im alpha(w) * a_T(w), finite through w = 0.
inline double alpha_times_coth(const ParticleSpec& particle, double omega, double T,
                               const TorqueOptions& opt)
{
    if (omega != 0.0)
        return im_polarizability(particle, omega, opt.polarizability) *
               coth_factor(omega, T, opt.fdt);
    if (T < zero_temperature_clamp)
        return 0.0;
    const double delta = 1e-9 * particle.material().omega_T();
    const double slope = im_polarizability(particle, delta, opt.polarizability) / delta;
    return slope / thermal_argument(1.0, T, opt.fdt);
}

inline std::vector<double> hints_for(const ParticleSpec& particle, const HalfSpaceGeometry* surface,
                                     double omega0, double T, const TorqueOptions& opt)
{
    std::vector<double> extra;
    if (opt.polarizability == Polarizability::clausius_mossotti) {
        try {
            extra.push_back(find_sphere_mode(particle.material()));
        } catch (const NoSurfaceModeError&) {
        }
    }
    auto h = breakpoint_hints(omega0, particle.material(), T, extra);
    if (surface) {
        const auto s = breakpoint_hints(omega0, surface->surface(), T);
        h.insert(h.end(), s.begin(), s.end());
        std::sort(h.begin(), h.end());
        h.erase(std::unique(h.begin(), h.end()), h.end());
    }
    return h;
}

} // namespace detail

/// The bracket B(w) with particle temperature T_particle and field temperature T_field.
/// Rearranged as dIm a (a_T(w+) - a_F(w)) + Im a(w-) (a_T(w+) - a_T(w-)) so that
/// both differences are formed without cancellation.
inline double fluctuation_bracket(const ParticleSpec& particle, double omega, double omega0,
                                  double T_particle, double T_field, const TorqueOptions& opt = {})
{
    const double plus = omega + omega0;
    const double minus = omega - omega0;
    if (plus == 0.0 || minus == 0.0) {
        const double a_field = coth_factor(omega, T_field, opt.fdt);
        const double term_plus = detail::alpha_times_coth(particle, plus, T_particle, opt) -
                                 im_polarizability(particle, plus, opt.polarizability) * a_field;
        const double term_minus = detail::alpha_times_coth(particle, minus, T_particle, opt) -
                                  im_polarizability(particle, minus, opt.polarizability) * a_field;
        return term_plus - term_minus;
    }
    const double d_alpha = shift_bracket(particle, omega, omega0, opt.polarizability);
    return d_alpha * coth_difference(plus, T_particle, omega, T_field, opt.fdt) +
           im_polarizability(particle, minus, opt.polarizability) *
               coth_shift(omega, omega0, T_particle, opt.fdt);
}

inline double torque_prefactor()
{
    const double c = PhysicalConstants::c;
    return PhysicalConstants::hbar / (2.0 * pi * c * c);
}

/// dM_s/dw at one frequency.
inline double self_friction_integrand(const ParticleSpec& particle, const ThermalEnvironment& env,
                                      double omega0, double omega, const TorqueOptions& opt = {})
{
    return torque_prefactor() * omega * omega * freespace_im_green_xxyy(omega) *
           fluctuation_bracket(particle, omega, omega0, env.T, env.T0, opt);
}

/// dM_B/dw at one frequency, for a given reflected-kernel value Im[GR_xx + GR_yy].
inline double surface_friction_integrand(const ParticleSpec& particle, double kernel,
                                         const ThermalEnvironment& env, double omega0,
                                         double omega, const TorqueOptions& opt = {})
{
    return torque_prefactor() * omega * omega * kernel *
           fluctuation_bracket(particle, omega, omega0, env.T, env.T, opt);
}

namespace detail {

// Log-spaced samples over the band plus dense linear windows of +-10 gamma
// around every breakpoint, where the integrands carry their structure.
inline std::vector<double> spectrum_grid(double omega_max, const std::vector<double>& hints,
                                         double gamma, std::size_t n)
{
    if (n < 2)
        throw DomainError("torque_spectrum: need at least 2 samples");
    std::vector<double> w;
    const std::size_t n_log = std::max<std::size_t>(2, n / 2);
    const double lo = omega_max * 1e-6;
    for (std::size_t i = 0; i < n_log; ++i)
        w.push_back(lo * std::pow(omega_max / lo, static_cast<double>(i) / (n_log - 1)));
    const std::size_t rest = n > n_log ? n - n_log : 0;
    if (!hints.empty() && rest > 0) {
        const std::size_t per = std::max<std::size_t>(1, rest / hints.size());
        for (double h : hints) {
            w.push_back(h);
            for (std::size_t i = 0; i + 1 < per; ++i) {
                const double x = h - 10.0 * gamma + 20.0 * gamma * (i + 0.5) / (per - 1);
                if (x > 0.0 && x < omega_max)
                    w.push_back(x);
            }
        }
    }
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return w;
}

template <class Integrand>
TorqueResult assemble(Integrand&& f, TorqueMode mode, const QuadratureSpec& spec,
                      const std::vector<double>& hints, double gamma, const TorqueOptions& opt)
{
    const QuadratureResult q = integrate_spectrum(f, spec, hints);
    TorqueResult r;
    r.value = q.value;
    r.error_estimate = q.error_estimate;
    r.mode = mode;
    r.evaluations = q.evaluations;
    if (opt.spectrum_samples > 0)
        for (double w : spectrum_grid(spec.omega_max, hints, gamma, opt.spectrum_samples))
            r.spectrum.push_back({w, f(w)});
    return r;
}

} // namespace detail

/// Vacuum ("self") friction torque of a particle spinning at omega0.
inline TorqueResult self_friction_torque(const ParticleSpec& particle, const ThermalEnvironment& env,
                                         double omega0, QuadratureSpec spec = {},
                                         const TorqueOptions& opt = {})
{
    if (!std::isfinite(omega0))
        throw DomainError("omega0 must be finite");
    spec = resolve_spec(spec, particle.material(), omega0, std::max(env.T, env.T0));
    const auto hints = detail::hints_for(particle, nullptr, omega0, std::max(env.T, env.T0), opt);
    auto f = [&](double w) { return self_friction_integrand(particle, env, omega0, w, opt); };
    return detail::assemble(f, TorqueMode::self, spec, hints, particle.material().gamma(), opt);
}

/// Friction torque from the dielectric half-space at distance z0.
inline TorqueResult surface_friction_torque(const ParticleSpec& particle,
                                            const HalfSpaceGeometry& geometry,
                                            const ThermalEnvironment& env, double omega0,
                                            QuadratureSpec spec = {},
                                            const TorqueOptions& opt = {})
{
    if (!std::isfinite(omega0))
        throw DomainError("omega0 must be finite");
    spec = resolve_spec(spec, particle.material(), omega0, env.T);
    const auto hints = detail::hints_for(particle, &geometry, omega0, env.T, opt);
    const double gamma = particle.material().gamma();

    if (opt.green_path == GreenPath::volume_oracle) {
        const VolumeKernel kernel(geometry, opt.oracle);
        if (!kernel.converged())
            throw NonConvergenceError("volume oracle: truncation box not converged", 0.0, 0.0);
        auto f = [&](double w) {
            return surface_friction_integrand(particle, kernel.im_trace_xy(w), env, omega0, w, opt);
        };
        return detail::assemble(f, TorqueMode::surface, spec, hints, gamma, opt);
    }
    auto f = [&](double w) {
        return surface_friction_integrand(particle, halfspace_scattered_im_trace_xy(geometry, w),
                                          env, omega0, w, opt);
    };
    return detail::assemble(f, TorqueMode::surface, spec, hints, gamma, opt);
}

/// M_s + M_B with errors added in quadrature.
inline TorqueResult total_torque(const ParticleSpec& particle, const HalfSpaceGeometry& geometry,
                                 const ThermalEnvironment& env, double omega0,
                                 QuadratureSpec spec = {}, const TorqueOptions& opt = {})
{
    TorqueOptions quiet = opt;
    quiet.spectrum_samples = 0;
    const TorqueResult s = self_friction_torque(particle, env, omega0, spec, quiet);
    const TorqueResult b = surface_friction_torque(particle, geometry, env, omega0, spec, quiet);
    TorqueResult r;
    r.value = s.value + b.value;
    r.error_estimate = std::hypot(s.error_estimate, b.error_estimate);
    r.mode = TorqueMode::total;
    r.evaluations = s.evaluations + b.evaluations;
    return r;
}

/// Sampled integrand of the selected torque (self, surface or their sum).
inline std::vector<SpectrumSample> torque_spectrum(const ParticleSpec& particle,
                                                   const HalfSpaceGeometry& geometry,
                                                   const ThermalEnvironment& env, double omega0,
                                                   TorqueMode mode, std::size_t n_samples,
                                                   QuadratureSpec spec = {},
                                                   const TorqueOptions& opt = {})
{
    const double T = std::max(env.T, env.T0);
    spec = resolve_spec(spec, particle.material(), omega0, T);
    const auto hints = detail::hints_for(particle, &geometry, omega0, T, opt);
    std::optional<VolumeKernel> kernel;
    if (opt.green_path == GreenPath::volume_oracle)
        kernel.emplace(geometry, opt.oracle);
    auto surface_kernel = [&](double w) {
        return kernel ? kernel->im_trace_xy(w) : halfspace_scattered_im_trace_xy(geometry, w);
    };
    std::vector<SpectrumSample> out;
    for (double w : detail::spectrum_grid(spec.omega_max, hints, particle.material().gamma(),
                                          n_samples)) {
        double d = 0.0;
        if (mode != TorqueMode::surface)
            d += self_friction_integrand(particle, env, omega0, w, opt);
        if (mode != TorqueMode::self)
            d += surface_friction_integrand(particle, surface_kernel(w), env, omega0, w, opt);
        out.push_back({w, d});
    }
    return out;
}

} // namespace qfric
