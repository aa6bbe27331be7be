#pragma once

// Run configuration and the sweep / spin / material-info commands. The
// command-line front end in tools/ only parses arguments and calls these.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qfric/dynamics.hpp"
#include "qfric/error.hpp"
#include "qfric/materials.hpp"
#include "qfric/torque.hpp"

namespace qfric {

inline constexpr const char* version = "0.1.0";

struct RunConfig {
    std::string material = "sic";
    std::string surface_material = "sic";
    double radius = 50e-9;
    double z0 = 10e-9;
    double T = 300.0;
    double T0 = 300.0;
    double omega0 = 1e12;
    double omega0_min = 1e10;
    double omega0_max = 1e14;
    int omega0_points = 60;
    bool log = true;
    double z0_min = 5e-9;
    double z0_max = 1e-6;
    int z0_points = 30;
    double rel_tol = 1e-8;
    std::string out;
    bool oracle = false;
    bool standard_fdt = false;
    bool clausius_mossotti = false;
    bool volume_polarizability = false;
    // spin
    std::string mode = "single";
    double omega_init = 1e12;
    double delta = 1e10;
    double t_max = 0.0; // 0: fifty predicted decay times
    double lock_rtol = 1e-2;
    double density = sic_density;
    double inertia_ratio = 1e6;
    bool self = true;
    unsigned threads = default_thread_count();
};

using Setting = std::pair<std::string, std::string>;

namespace detail {

inline std::string normalize_key(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

inline double parse_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(x))
        throw ConfigError("setting '" + key + "': expected a number, got '" + v + "'");
    return x;
}

inline int parse_int(const std::string& key, const std::string& v)
{
    const double x = parse_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9)
        throw ConfigError("setting '" + key + "': expected an integer, got '" + v + "'");
    return static_cast<int>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on" || v.empty())
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError("setting '" + key + "': expected true/false, got '" + v + "'");
}

inline std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

inline std::string fmt_short(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// Sets one key (flag name without leading dashes; '_' and '-' are equivalent).
inline void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& v)
{
    using namespace detail;
    const std::string key = normalize_key(raw_key);
    if (key == "material") c.material = v;
    else if (key == "surface-material") c.surface_material = v;
    else if (key == "radius") c.radius = parse_double(key, v);
    else if (key == "z0") c.z0 = parse_double(key, v);
    else if (key == "T") c.T = parse_double(key, v);
    else if (key == "T0") c.T0 = parse_double(key, v);
    else if (key == "omega0") c.omega0 = parse_double(key, v);
    else if (key == "omega0-min") c.omega0_min = parse_double(key, v);
    else if (key == "omega0-max") c.omega0_max = parse_double(key, v);
    else if (key == "omega0-points") c.omega0_points = parse_int(key, v);
    else if (key == "log") c.log = parse_bool(key, v);
    else if (key == "z0-min") c.z0_min = parse_double(key, v);
    else if (key == "z0-max") c.z0_max = parse_double(key, v);
    else if (key == "z0-points") c.z0_points = parse_int(key, v);
    else if (key == "rel-tol") c.rel_tol = parse_double(key, v);
    else if (key == "out") c.out = v;
    else if (key == "oracle") c.oracle = parse_bool(key, v);
    else if (key == "standard-fdt") c.standard_fdt = parse_bool(key, v);
    else if (key == "clausius-mossotti") c.clausius_mossotti = parse_bool(key, v);
    else if (key == "volume-polarizability") c.volume_polarizability = parse_bool(key, v);
    else if (key == "mode") c.mode = v;
    else if (key == "omega-init") c.omega_init = parse_double(key, v);
    else if (key == "delta") c.delta = parse_double(key, v);
    else if (key == "t-max") c.t_max = parse_double(key, v);
    else if (key == "lock-rtol") c.lock_rtol = parse_double(key, v);
    else if (key == "density") c.density = parse_double(key, v);
    else if (key == "inertia-ratio") c.inertia_ratio = parse_double(key, v);
    else if (key == "self") c.self = parse_bool(key, v);
    else if (key == "threads") c.threads = static_cast<unsigned>(std::max(1, parse_int(key, v)));
    else throw ConfigError("unknown setting '" + raw_key + "'");
}

/// Resolved settings as (key, value) text, in a fixed order.
inline std::vector<Setting> describe(const RunConfig& c)
{
    using detail::fmt_short;
    auto b = [](bool x) { return std::string(x ? "true" : "false"); };
    return {{"material", c.material},
            {"surface-material", c.surface_material},
            {"radius", fmt_short(c.radius)},
            {"z0", fmt_short(c.z0)},
            {"T", fmt_short(c.T)},
            {"T0", fmt_short(c.T0)},
            {"omega0", fmt_short(c.omega0)},
            {"omega0-min", fmt_short(c.omega0_min)},
            {"omega0-max", fmt_short(c.omega0_max)},
            {"omega0-points", std::to_string(c.omega0_points)},
            {"log", b(c.log)},
            {"z0-min", fmt_short(c.z0_min)},
            {"z0-max", fmt_short(c.z0_max)},
            {"z0-points", std::to_string(c.z0_points)},
            {"rel-tol", fmt_short(c.rel_tol)},
            {"oracle", b(c.oracle)},
            {"standard-fdt", b(c.standard_fdt)},
            {"polarizability", c.volume_polarizability ? "volume" : "clausius-mossotti"},
            {"mode", c.mode},
            {"omega-init", fmt_short(c.omega_init)},
            {"delta", fmt_short(c.delta)},
            {"t-max", fmt_short(c.t_max)},
            {"lock-rtol", fmt_short(c.lock_rtol)},
            {"density", fmt_short(c.density)},
            {"inertia-ratio", fmt_short(c.inertia_ratio)},
            {"self", b(c.self)}};
}

/// `key = value` lines; blank lines and `#` comments ignored.
inline std::vector<Setting> parse_config(std::istream& in)
{
    std::vector<Setting> out;
    std::string line;
    int lineno = 0;
    auto trim = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

inline void validate(const RunConfig& c)
{
    if (c.clausius_mossotti && c.volume_polarizability)
        throw ConfigError("--clausius-mossotti and --volume-polarizability are exclusive");
    if (!(c.radius > 0 && c.z0 > 0 && c.T > 0 && c.T0 > 0))
        throw ConfigError("radius, z0, T and T0 must be positive");
    if (!(c.omega0_min > 0 && c.omega0_max >= c.omega0_min))
        throw ConfigError("omega0 range must satisfy 0 < min <= max");
    if (!(c.z0_min > 0 && c.z0_max >= c.z0_min))
        throw ConfigError("z0 range must satisfy 0 < min <= max");
    if (c.omega0_points < 2 || c.z0_points < 2)
        throw ConfigError("sweeps need at least 2 points");
    if (!(c.rel_tol > 0 && c.rel_tol <= 1e-2))
        throw ConfigError("rel-tol must lie in (0, 1e-2]");
    if (c.mode != "single" && c.mode != "pair")
        throw ConfigError("mode must be 'single' or 'pair'");
    if (!(c.lock_rtol > 0 && c.lock_rtol < 1))
        throw ConfigError("lock-rtol must lie in (0, 1)");
    if (!(c.density > 0 && c.inertia_ratio > 0 && c.t_max >= 0))
        throw ConfigError("density and inertia-ratio must be positive, t-max >= 0");
}

/// Built-in defaults, then the config file, then command-line flags.
inline RunConfig resolve_config(const std::vector<Setting>& file_settings,
                                const std::vector<Setting>& cli_settings)
{
    RunConfig c;
    for (const auto& [k, v] : file_settings)
        apply_setting(c, k, v);
    for (const auto& [k, v] : cli_settings)
        apply_setting(c, k, v);
    validate(c);
    return c;
}

inline Scene make_scene(const RunConfig& c)
{
    Scene s{ParticleSpec(c.radius, resolve_material(c.material)),
            HalfSpaceGeometry(c.z0, resolve_material(c.surface_material))};
    s.quadrature.rel_tol = c.rel_tol;
    s.options.polarizability =
        c.volume_polarizability ? Polarizability::volume : Polarizability::clausius_mossotti;
    s.options.fdt = c.standard_fdt ? FdtConvention::standard : FdtConvention::paper;
    s.options.green_path = c.oracle ? GreenPath::volume_oracle : GreenPath::quasi_static;
    s.options.oracle.threads = 1;
    return s;
}

inline std::vector<double> sweep_grid(double lo, double hi, int points, bool log)
{
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        g[i] = log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    g.back() = hi;
    return g;
}

namespace detail {

inline void write_header(std::ostream& out, const std::string& command, const RunConfig& c)
{
    out << "# qfric " << version << '\n' << "# command = " << command << '\n';
    for (const auto& [k, v] : describe(c))
        out << "# " << k << " = " << v << '\n';
}

struct Evaluated {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

template <class Fn>
Evaluated guarded(Fn&& fn)
{
    try {
        const TorqueResult r = fn();
        return {r.value, r.error_estimate, true};
    } catch (const NonConvergenceError& e) {
        return {e.partial_value(), e.error_estimate(), false};
    }
}

} // namespace detail

struct SweepSummary {
    std::size_t rows = 0;
    std::size_t nonconverged = 0;
    std::optional<double> slope; ///< distance sweep only
};

/// Torque vs rotation rate: self and surface terms on the omega0 grid.
inline SweepSummary cmd_sweep_omega(const RunConfig& c, std::ostream& out)
{
    const Scene scene = make_scene(c);
    const ThermalEnvironment env(c.T, c.T0);
    const auto grid = sweep_grid(c.omega0_min, c.omega0_max, c.omega0_points, c.log);
    std::vector<detail::Evaluated> self(grid.size()), surf(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            self[i] = detail::guarded([&] {
                return self_friction_torque(scene.particle, env, grid[i], scene.quadrature,
                                            scene.options);
            });
            surf[i] = detail::guarded([&] {
                return surface_friction_torque(scene.particle, scene.geometry, env, grid[i],
                                               scene.quadrature, scene.options);
            });
        },
        c.threads);

    detail::write_header(out, "sweep-omega", c);
    out << "omega0_rad_s,torque_self_Nm,torque_surface_Nm,err_self,err_surface,status\n";
    SweepSummary summary;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool ok = self[i].converged && surf[i].converged;
        summary.nonconverged += ok ? 0 : 1;
        out << detail::fmt(grid[i]) << ',' << detail::fmt(self[i].value) << ','
            << detail::fmt(surf[i].value) << ',' << detail::fmt(self[i].error) << ','
            << detail::fmt(surf[i].error) << ',' << (ok ? "ok" : "nonconverged") << '\n';
    }
    summary.rows = grid.size();
    return summary;
}

/// Least-squares slope of log|M| vs log z0 over rows with z0 in [lo, hi].
inline std::optional<double> loglog_slope(const std::vector<double>& z, const std::vector<double>& m,
                                          double lo = 10e-9, double hi = 100e-9)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] >= lo * (1 - 1e-9) && z[i] <= hi * (1 + 1e-9) && m[i] != 0.0) {
            x.push_back(std::log(z[i]));
            y.push_back(std::log(std::abs(m[i])));
        }
    if (x.size() < 2)
        return std::nullopt;
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        return std::nullopt;
    return sxy / sxx;
}

/// Surface torque vs separation at fixed omega0.
inline SweepSummary cmd_sweep_distance(const RunConfig& c, std::ostream& out)
{
    const Scene scene = make_scene(c);
    const ThermalEnvironment env(c.T, c.T0);
    const auto grid = sweep_grid(c.z0_min, c.z0_max, c.z0_points, c.log);
    std::vector<detail::Evaluated> surf(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            const HalfSpaceGeometry g(grid[i], scene.geometry.surface());
            surf[i] = detail::guarded([&] {
                return surface_friction_torque(scene.particle, g, env, c.omega0, scene.quadrature,
                                               scene.options);
            });
        },
        c.threads);
    const auto self = detail::guarded([&] {
        return self_friction_torque(scene.particle, env, c.omega0, scene.quadrature, scene.options);
    });

    detail::write_header(out, "sweep-distance", c);
    out << "# torque_self_Nm = " << detail::fmt(self.value) << '\n';
    out << "z0_m,torque_surface_Nm,err,status\n";
    SweepSummary summary;
    std::vector<double> values;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        summary.nonconverged += surf[i].converged ? 0 : 1;
        values.push_back(surf[i].value);
        out << detail::fmt(grid[i]) << ',' << detail::fmt(surf[i].value) << ','
            << detail::fmt(surf[i].error) << ',' << (surf[i].converged ? "ok" : "nonconverged")
            << '\n';
    }
    summary.nonconverged += self.converged ? 0 : 1;
    summary.rows = grid.size();
    summary.slope = loglog_slope(grid, values);
    out << "# slope_10_100nm =";
    if (summary.slope) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " %.6f", *summary.slope);
        out << buf;
    }
    out << '\n';
    return summary;
}

struct SpinSummary {
    SpinTrajectory trajectory;
    double t_max = 0.0;
};

/// Spin-down of a single particle, or frequency locking to a surface body
/// (mode = pair, particle starts at omega-init + delta, surface at omega-init).
inline SpinSummary cmd_spin(const RunConfig& c, std::ostream& out)
{
    Scene scene = make_scene(c);
    const ThermalEnvironment env(c.T, c.T0);
    DynamicsOptions opt;
    opt.threads = c.threads;
    const double ia = scene.particle.inertia(c.density);
    SpinSummary s;
    s.t_max = c.t_max;

    if (c.mode == "single") {
        const RotorState rotor(ia, c.omega_init);
        if (s.t_max == 0.0) {
            const double kappa = c.omega_init == 0.0 ? 0.0 : friction_coefficient(scene, env, 1e9);
            s.t_max = kappa > 0.0 ? 50.0 * ia / kappa : 1.0;
        }
        s.trajectory = spin_down(rotor, scene, env, s.t_max, c.lock_rtol, opt);
    } else {
        scene.include_self = c.self;
        const RotorState surface(ia * c.inertia_ratio, c.omega_init);
        const RotorState particle(ia, c.omega_init + c.delta);
        if (s.t_max == 0.0) {
            Scene surface_only = scene;
            surface_only.include_self = false;
            const double kappa =
                c.delta == 0.0 ? 0.0 : friction_coefficient(surface_only, env, 1e9);
            s.t_max = kappa > 0.0 ? 50.0 / (kappa * (1.0 / ia + 1.0 / surface.inertia)) : 1.0;
        }
        s.trajectory = synchronize_pair(particle, surface, scene, env, s.t_max, c.lock_rtol, opt);
    }

    detail::write_header(out, "spin", c);
    out << "# inertia_kg_m2 = " << detail::fmt_short(ia) << '\n';
    out << "# t_max_s = " << detail::fmt_short(s.t_max) << '\n';
    write_trajectory_csv(out, s.trajectory);
    out << "# terminal = " << to_string(s.trajectory.terminal) << '\n';
    out << "# t_lock_s =";
    if (s.trajectory.t_lock)
        out << ' ' << detail::fmt(*s.trajectory.t_lock);
    out << '\n';
    return s;
}

/// Oscillator parameters plus eps(0) and the surface/sphere mode frequencies.
inline void cmd_material_info(const std::string& name, std::ostream& out)
{
    const LorentzOscillatorModel m = resolve_material(name);
    auto line = [&](const char* k, double v, const char* unit) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-13s = %.10g%s\n", k, v, unit);
        out << buf;
    };
    out << "material      = " << name << '\n';
    line("eps_inf", m.eps_inf(), "");
    line("omega_L", m.omega_L(), " rad/s");
    line("omega_T", m.omega_T(), " rad/s");
    line("gamma", m.gamma(), " rad/s");
    line("eps(0)", permittivity(m, 0.0).real(), "");
    try {
        line("surface_mode", find_surface_mode(m), " rad/s");
    } catch (const NoSurfaceModeError&) {
        out << "surface_mode  = none\n";
    }
    try {
        line("sphere_mode", find_sphere_mode(m), " rad/s");
    } catch (const NoSurfaceModeError&) {
        out << "sphere_mode   = none\n";
    }
}

} // namespace qfric
