#pragma once

// Single-oscillator dielectric models, particle polarizability and the
// quasi-static surface response of a half-space.

#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qfric/constants.hpp"
#include "qfric/error.hpp"

namespace qfric {

using complex = std::complex<double>;

/// eps(w) = eps_inf * (1 + (w_L^2 - w_T^2) / (w_T^2 - w^2 - i*gamma*w))
class LorentzOscillatorModel {
public:
    LorentzOscillatorModel(double eps_inf, double omega_L, double omega_T, double gamma)
        : eps_inf_(eps_inf), omega_L_(omega_L), omega_T_(omega_T), gamma_(gamma)
    {
        if (!(std::isfinite(eps_inf) && std::isfinite(omega_L) && std::isfinite(omega_T) &&
              std::isfinite(gamma)))
            throw DomainError("oscillator parameters must be finite");
        if (!(eps_inf >= 1.0))
            throw DomainError("eps_inf must be >= 1");
        if (!(omega_T > 0.0 && omega_L > omega_T))
            throw DomainError("oscillator requires omega_L > omega_T > 0");
        if (!(gamma > 0.0))
            throw DomainError("damping gamma must be > 0");
    }

    double eps_inf() const noexcept { return eps_inf_; }
    double omega_L() const noexcept { return omega_L_; }
    double omega_T() const noexcept { return omega_T_; }
    double gamma() const noexcept { return gamma_; }

    /// Static limit eps_inf * w_L^2 / w_T^2 (Lyddane-Sachs-Teller).
    double static_permittivity() const noexcept
    {
        return eps_inf_ * (omega_L_ * omega_L_) / (omega_T_ * omega_T_);
    }

    friend bool operator==(const LorentzOscillatorModel&, const LorentzOscillatorModel&) = default;

private:
    double eps_inf_;
    double omega_L_;
    double omega_T_;
    double gamma_;
};

/// Silicon carbide phonon-polariton parameters.
inline LorentzOscillatorModel sic()
{
    return LorentzOscillatorModel(6.7, 1.823e14, 1.492e14, 8.954e11);
}

inline std::map<std::string, LorentzOscillatorModel> material_presets()
{
    return {{"sic", sic()}};
}

inline complex permittivity(const LorentzOscillatorModel& m, double omega)
{
    if (!std::isfinite(omega))
        throw DomainError("permittivity: omega must be finite");
    if (omega < 0.0)
        throw DomainError("permittivity: omega must be >= 0 (use the odd extension for w < 0)");
    const double wl2 = m.omega_L() * m.omega_L();
    const double wt2 = m.omega_T() * m.omega_T();
    const complex denom(wt2 - omega * omega, -m.gamma() * omega);
    return m.eps_inf() * (1.0 + (wl2 - wt2) / denom);
}

inline complex susceptibility(const LorentzOscillatorModel& m, double omega)
{
    return permittivity(m, omega) - 1.0;
}

/// Quasi-static reflection strength (eps - 1) / (eps + 1).
inline complex surface_response(const LorentzOscillatorModel& m, double omega)
{
    const complex eps = permittivity(m, omega);
    return (eps - 1.0) / (eps + 1.0);
}

enum class Polarizability {
    clausius_mossotti, ///< alpha = 3V (eps - 1) / (eps + 2), dipolar sphere
    volume,            ///< Im alpha = V Im chi
};

inline const char* to_string(Polarizability p)
{
    return p == Polarizability::volume ? "volume" : "clausius-mossotti";
}

class ParticleSpec {
public:
    ParticleSpec(double radius, LorentzOscillatorModel material)
        : radius_(radius), volume_(4.0 / 3.0 * pi * radius * radius * radius),
          material_(material)
    {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw DomainError("particle radius must be positive and finite");
    }

    double radius() const noexcept { return radius_; }
    double volume() const noexcept { return volume_; }
    const LorentzOscillatorModel& material() const noexcept { return material_; }

    /// Moment of inertia of a homogeneous sphere of the given mass density.
    double inertia(double density) const noexcept
    {
        return 0.4 * density * volume_ * radius_ * radius_;
    }

private:
    double radius_;
    double volume_;
    LorentzOscillatorModel material_;
};

/// Im alpha(omega) in m^3 (p = eps_0 alpha E). With odd_extension the
/// result is sign(omega) * Im alpha(|omega|), which keeps the shifted
/// frequencies w - w0 < 0 meaningful in the torque integrands.
inline double im_polarizability(const ParticleSpec& particle, double omega,
                                Polarizability form = Polarizability::clausius_mossotti,
                                bool odd_extension = true)
{
    if (omega == 0.0)
        return 0.0;
    const double w = std::abs(omega);
    const complex eps = permittivity(particle.material(), w);
    double im = 0.0;
    switch (form) {
    case Polarizability::volume:
        im = particle.volume() * (eps - 1.0).imag();
        break;
    case Polarizability::clausius_mossotti:
        im = 3.0 * particle.volume() * ((eps - 1.0) / (eps + 2.0)).imag();
        break;
    }
    return (odd_extension && omega < 0.0) ? -im : im;
}

namespace detail {

// Bisection for Re eps(w) = target on (w_min, w_L], where w_min is the
// frequency of the deepest dip of Re eps just above w_T.
inline double find_re_eps_crossing(const LorentzOscillatorModel& m, double target)
{
    const double g = m.gamma();
    const double wt = m.omega_T();
    double lo = 0.5 * (g + std::sqrt(g * g + 4.0 * wt * wt));
    double hi = m.omega_L();
    auto f = [&](double w) { return permittivity(m, w).real() - target; };
    double flo = f(lo);
    const double fhi = f(hi);
    if (!(flo < 0.0 && fhi > 0.0))
        throw NoSurfaceModeError("no surface mode: Re eps does not cross " +
                                 std::to_string(target) + " between omega_T and omega_L");
    for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Surface phonon-polariton frequency, Re eps = -1.
inline double find_surface_mode(const LorentzOscillatorModel& m)
{
    return detail::find_re_eps_crossing(m, -1.0);
}

/// Dipolar (Frohlich) sphere resonance, Re eps = -2.
inline double find_sphere_mode(const LorentzOscillatorModel& m)
{
    return detail::find_re_eps_crossing(m, -2.0);
}

/// Frequency where Im alpha of the given form peaks: w_T for the volume
/// relation, the Frohlich mode for Clausius-Mossotti.
inline double particle_resonance(const LorentzOscillatorModel& m, Polarizability form)
{
    return form == Polarizability::volume ? m.omega_T() : find_sphere_mode(m);
}

/// Dipole approximation holds while radius < lambda/10 at omega.
inline bool dipole_regime_ok(const ParticleSpec& particle, double omega)
{
    const double lambda = 2.0 * pi * PhysicalConstants::c / omega;
    return particle.radius() < 0.1 * lambda;
}

/// Reads `key = value` lines (eps_inf, omega_L, omega_T, gamma). Blank
/// lines and `#` comments are skipped; unknown or missing keys are errors.
inline LorentzOscillatorModel parse_material(std::istream& in)
{
    std::map<std::string, double> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        if (trim(line).empty())
            continue;
        if (eq == std::string::npos)
            throw ConfigError("material line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key != "eps_inf" && key != "omega_L" && key != "omega_T" && key != "gamma")
            throw ConfigError("material line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(val, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != val.size())
            throw ConfigError("material line " + std::to_string(lineno) + ": bad number '" + val + "'");
        values[key] = v;
    }
    for (const char* k : {"eps_inf", "omega_L", "omega_T", "gamma"})
        if (!values.count(k))
            throw ConfigError(std::string("material file is missing key '") + k + "'");
    return LorentzOscillatorModel(values["eps_inf"], values["omega_L"], values["omega_T"],
                                  values["gamma"]);
}

inline LorentzOscillatorModel load_material_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open material file '" + path + "'");
    return parse_material(in);
}

/// Preset name, or else a path to a material file.
inline LorentzOscillatorModel resolve_material(const std::string& name_or_path)
{
    const auto presets = material_presets();
    if (auto it = presets.find(name_or_path); it != presets.end())
        return it->second;
    if (std::ifstream probe(name_or_path); probe)
        return parse_material(probe);
    std::string names;
    for (const auto& [name, model] : presets)
        names += (names.empty() ? "" : ", ") + name;
    throw ConfigError("unknown material '" + name_or_path + "' (presets: " + names + ")");
}

} // namespace qfric
