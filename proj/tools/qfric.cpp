#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qfric/cli.hpp"

namespace {

// Option values are captured as text and applied after the config file, so
// command-line values win regardless of order.
struct Collected {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::vector<std::string> order;

    void option(CLI::App* app, const std::string& key, const std::string& help)
    {
        order.push_back(key);
        options[key] = app->add_option("--" + key, values[key], help);
    }

    void flag(CLI::App* app, const std::string& key, const std::string& help)
    {
        order.push_back(key);
        options[key] = app->add_option("--" + key, values[key], help)
                           ->expected(0, 1)
                           ->default_str("true");
    }

    std::vector<qfric::Setting> given() const
    {
        std::vector<qfric::Setting> out;
        for (const auto& key : order) {
            const CLI::Option* opt = options.at(key);
            if (opt->count() == 0)
                continue;
            const std::string& v = values.at(key);
            out.emplace_back(key, v.empty() && opt->get_expected_min() == 0 ? "true" : v);
        }
        return out;
    }
};

void add_common(CLI::App* app, Collected& c, std::string& config)
{
    app->add_option("--config", config, "key = value settings file (command line wins)");
    c.option(app, "material", "particle material: preset name or material file");
    c.option(app, "surface-material", "half-space material: preset name or material file");
    c.option(app, "radius", "particle radius, m");
    c.option(app, "z0", "particle-surface separation, m");
    c.option(app, "T", "particle and half-space temperature, K");
    c.option(app, "T0", "far-field (vacuum) temperature, K");
    c.option(app, "rel-tol", "relative quadrature tolerance");
    c.option(app, "out", "output file (default stdout)");
    c.option(app, "threads", "worker threads");
    c.flag(app, "oracle", "use the volume-sum route for the half-space kernel");
    c.flag(app, "standard-fdt", "thermal factor coth(hbar w / 2 k_B T)");
    c.flag(app, "clausius-mossotti", "sphere polarizability 3V(eps-1)/(eps+2) (default)");
    c.flag(app, "volume-polarizability", "polarizability V(eps-1)");
}

std::vector<qfric::Setting> read_config_file(const std::string& path)
{
    if (path.empty())
        return {};
    std::ifstream in(path);
    if (!in)
        throw qfric::ConfigError("cannot read config file '" + path + "'");
    return qfric::parse_config(in);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rotational quantum friction of a nanoparticle above a dielectric surface"};
    app.set_version_flag("--version", std::string("qfric ") + qfric::version);
    app.require_subcommand(1);

    std::string config;
    Collected c_omega, c_dist, c_spin, c_info;

    auto* omega = app.add_subcommand("sweep-omega", "torques vs rotation rate (CSV)");
    add_common(omega, c_omega, config);
    c_omega.option(omega, "omega0-min", "lowest rotation rate, rad/s");
    c_omega.option(omega, "omega0-max", "highest rotation rate, rad/s");
    c_omega.option(omega, "omega0-points", "number of rates");
    c_omega.flag(omega, "log", "logarithmic spacing (default true)");

    auto* dist = app.add_subcommand("sweep-distance", "surface torque vs separation (CSV)");
    add_common(dist, c_dist, config);
    c_dist.option(dist, "omega0", "rotation rate, rad/s");
    c_dist.option(dist, "z0-min", "smallest separation, m");
    c_dist.option(dist, "z0-max", "largest separation, m");
    c_dist.option(dist, "z0-points", "number of separations");
    c_dist.flag(dist, "log", "logarithmic spacing (default true)");

    auto* spin = app.add_subcommand("spin", "spin-down or frequency locking trajectory (CSV)");
    add_common(spin, c_spin, config);
    c_spin.option(spin, "mode", "single | pair");
    c_spin.option(spin, "omega-init", "initial rate (surface body rate in pair mode), rad/s");
    c_spin.option(spin, "delta", "initial particle-surface rate difference in pair mode, rad/s");
    c_spin.option(spin, "t-max", "integration horizon, s (0: fifty decay times)");
    c_spin.option(spin, "lock-rtol", "stop when |omega| (or |delta|) falls below this fraction");
    c_spin.option(spin, "density", "particle density, kg/m^3");
    c_spin.option(spin, "inertia-ratio", "surface body inertia over particle inertia");
    c_spin.flag(spin, "self", "include the vacuum torque in pair mode (default true)");

    auto* info = app.add_subcommand("material-info", "oscillator parameters and mode frequencies");
    std::string material = "sic";
    info->add_option("material", material, "preset name or material file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (info->parsed()) {
            qfric::cmd_material_info(material, std::cout);
            return 0;
        }
        Collected& col = omega->parsed() ? c_omega : dist->parsed() ? c_dist : c_spin;
        const qfric::RunConfig cfg = qfric::resolve_config(read_config_file(config), col.given());

        std::ofstream file;
        if (!cfg.out.empty()) {
            file.open(cfg.out);
            if (!file) {
                std::cerr << "error: cannot write '" << cfg.out << "'\n";
                return 2;
            }
        }
        std::ostream& out = cfg.out.empty() ? std::cout : file;

        int status = 0;
        if (omega->parsed()) {
            const auto s = qfric::cmd_sweep_omega(cfg, out);
            status = s.nonconverged > 0 ? 1 : 0;
        } else if (dist->parsed()) {
            const auto s = qfric::cmd_sweep_distance(cfg, out);
            status = s.nonconverged > 0 ? 1 : 0;
        } else {
            qfric::cmd_spin(cfg, out);
        }
        out.flush();
        if (!out) {
            std::cerr << "error: write failed\n";
            return 2;
        }
        if (status != 0)
            std::cerr << "warning: some rows did not converge (status column)\n";
        return status;
    } catch (const qfric::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const qfric::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const qfric::NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const qfric::StepFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
