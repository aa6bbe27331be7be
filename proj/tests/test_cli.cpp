#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "qfric/cli.hpp"

using namespace qfric;

namespace {

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

// Data rows (everything after the column header), split on commas.
std::vector<std::vector<std::string>> rows(const std::string& text)
{
    std::vector<std::vector<std::string>> out;
    bool header_seen = false;
    for (const auto& l : lines(text)) {
        if (l.empty() || l[0] == '#')
            continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream in(l);
        for (std::string c; std::getline(in, c, ',');)
            cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

std::string comment_value(const std::string& text, const std::string& key)
{
    const std::string prefix = "# " + key + " =";
    for (const auto& l : lines(text))
        if (l.rfind(prefix, 0) == 0)
            return l.size() > prefix.size() ? l.substr(prefix.size() + 1) : std::string{};
    return "<absent>";
}

RunConfig small_sweep()
{
    RunConfig c;
    c.omega0_points = 7;
    c.z0_points = 7;
    return c;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(QFRIC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Config, PrecedenceCliOverFileOverDefault)
{
    std::istringstream file("z0 = 20e-9\nT = 250\n# comment\nrel_tol = 1e-7\n");
    const auto cfg = resolve_config(parse_config(file), {{"T", "310"}});
    EXPECT_EQ(cfg.z0, 20e-9);
    EXPECT_EQ(cfg.T, 310.0);
    EXPECT_EQ(cfg.rel_tol, 1e-7);
    EXPECT_EQ(cfg.radius, RunConfig{}.radius);
}

TEST(Config, RejectsUnknownKeysAndBadValues)
{
    RunConfig c;
    EXPECT_THROW(apply_setting(c, "colour", "red"), ConfigError);
    EXPECT_THROW(apply_setting(c, "z0", "ten"), ConfigError);
    EXPECT_THROW(apply_setting(c, "omega0-points", "2.5"), ConfigError);
    EXPECT_THROW(apply_setting(c, "log", "maybe"), ConfigError);
    std::istringstream noeq("z0 10e-9\n");
    EXPECT_THROW(parse_config(noeq), ConfigError);
}

TEST(Config, ValidatesRanges)
{
    EXPECT_THROW(resolve_config({}, {{"omega0-points", "1"}}), ConfigError);
    EXPECT_THROW(resolve_config({}, {{"omega0-min", "1e12"}, {"omega0-max", "1e11"}}), ConfigError);
    EXPECT_THROW(resolve_config({}, {{"radius", "-1"}}), ConfigError);
    EXPECT_THROW(resolve_config({}, {{"rel-tol", "0.5"}}), ConfigError);
    EXPECT_THROW(resolve_config({}, {{"mode", "triple"}}), ConfigError);
    EXPECT_THROW(resolve_config({}, {{"clausius-mossotti", "true"}, {"volume-polarizability", "true"}}),
                 ConfigError);
    EXPECT_NO_THROW(resolve_config({}, {{"omega0-min", "1e12"}, {"omega0-max", "1e12"}}));
}

TEST(SweepOmega, RowsRoundTripExactly)
{
    const RunConfig cfg = small_sweep();
    std::ostringstream out;
    const auto summary = cmd_sweep_omega(cfg, out);
    EXPECT_EQ(summary.rows, 7u);
    EXPECT_EQ(summary.nonconverged, 0u);
    const auto r = rows(out.str());
    ASSERT_EQ(r.size(), 7u);
    const Scene scene = make_scene(cfg);
    const ThermalEnvironment env(cfg.T, cfg.T0);
    const auto grid = sweep_grid(cfg.omega0_min, cfg.omega0_max, cfg.omega0_points, cfg.log);
    for (std::size_t i = 0; i < r.size(); ++i) {
        ASSERT_EQ(r[i].size(), 6u);
        EXPECT_EQ(std::stod(r[i][0]), grid[i]);
        const auto s = self_friction_torque(scene.particle, env, grid[i], scene.quadrature, scene.options);
        const auto b = surface_friction_torque(scene.particle, scene.geometry, env, grid[i], scene.quadrature,
                                               scene.options);
        EXPECT_EQ(std::stod(r[i][1]), s.value);
        EXPECT_EQ(std::stod(r[i][2]), b.value);
        EXPECT_EQ(std::stod(r[i][3]), s.error_estimate);
        EXPECT_EQ(std::stod(r[i][4]), b.error_estimate);
        EXPECT_EQ(r[i][5], "ok");
    }
    EXPECT_EQ(comment_value(out.str(), "T"), "300");
    EXPECT_EQ(comment_value(out.str(), "command"), "sweep-omega");
    EXPECT_NE(out.str().find("omega0_rad_s,torque_self_Nm,torque_surface_Nm,err_self,err_surface,status"),
              std::string::npos);
}

TEST(SweepOmega, ByteIdenticalReruns)
{
    RunConfig a = small_sweep();
    RunConfig b = small_sweep();
    b.threads = 1;
    std::ostringstream x, y;
    cmd_sweep_omega(a, x);
    cmd_sweep_omega(b, y);
    EXPECT_EQ(x.str(), y.str());
}

TEST(SweepOmega, DegenerateRangeGivesIdenticalRows)
{
    auto cfg = resolve_config({}, {{"omega0-min", "1e12"}, {"omega0-max", "1e12"}, {"omega0-points", "2"}});
    std::ostringstream out;
    cmd_sweep_omega(cfg, out);
    const auto r = rows(out.str());
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0], r[1]);
}

TEST(SweepOmega, LinearSpacing)
{
    const auto g = sweep_grid(1.0, 3.0, 3, false);
    EXPECT_EQ(g, (std::vector<double>{1.0, 2.0, 3.0}));
    const auto l = sweep_grid(1.0, 100.0, 3, true);
    EXPECT_NEAR(l[1], 10.0, 1e-12);
    EXPECT_EQ(l[2], 100.0);
}

TEST(SweepDistance, ReportsInverseCubeSlope)
{
    RunConfig cfg;
    std::ostringstream out;
    const auto summary = cmd_sweep_distance(cfg, out);
    ASSERT_TRUE(summary.slope.has_value());
    EXPECT_NEAR(*summary.slope, -3.0, 0.1);
    const std::string reported = comment_value(out.str(), "slope_10_100nm");
    EXPECT_NEAR(std::stod(reported), -3.0, 0.1);
    const auto r = rows(out.str());
    ASSERT_EQ(r.size(), static_cast<std::size_t>(cfg.z0_points));
    EXPECT_EQ(r.front().size(), 4u);
}

TEST(SweepDistance, SinglePointRangeLeavesSlopeEmpty)
{
    auto cfg = resolve_config({}, {{"z0-min", "20e-9"}, {"z0-max", "20e-9"}, {"z0-points", "2"}});
    std::ostringstream out;
    const auto summary = cmd_sweep_distance(cfg, out);
    EXPECT_FALSE(summary.slope.has_value());
    EXPECT_EQ(comment_value(out.str(), "slope_10_100nm"), "");
}

TEST(SweepDistance, MicronRangeFallsToVacuumFloor)
{
    auto cfg = resolve_config({}, {{"z0-min", "1e-6"}, {"z0-max", "1e-5"}, {"z0-points", "5"}});
    std::ostringstream out;
    cmd_sweep_distance(cfg, out);
    const double self = std::abs(std::stod(comment_value(out.str(), "torque_self_Nm")));
    const auto r = rows(out.str());
    const double first = std::abs(std::stod(r.front()[1]));
    const double last = std::abs(std::stod(r.back()[1]));
    EXPECT_GT(first, 0.1 * self);
    EXPECT_LT(last, 1e-2 * self);
}

TEST(Spin, PairModeLocks)
{
    auto cfg = resolve_config({}, {{"mode", "pair"}, {"delta", "1e10"}, {"self", "false"}});
    std::ostringstream out;
    const auto s = cmd_spin(cfg, out);
    EXPECT_EQ(s.trajectory.terminal, Terminal::converged);
    const double gap = std::abs(s.trajectory.omegas[0].back() - s.trajectory.omegas[1].back());
    EXPECT_LT(gap, 0.01 * 1e10);
    EXPECT_EQ(comment_value(out.str(), "terminal"), "converged");
    EXPECT_NE(comment_value(out.str(), "t_lock_s"), "");
}

TEST(Spin, SingleModeFromRest)
{
    auto cfg = resolve_config({}, {{"omega-init", "0"}});
    std::ostringstream out;
    const auto s = cmd_spin(cfg, out);
    EXPECT_EQ(s.trajectory.times.size(), 1u);
    EXPECT_EQ(rows(out.str()).size(), 1u);
}

TEST(Spin, ShortHorizonReportsMaxTime)
{
    auto cfg = resolve_config({}, {{"t-max", "1"}});
    std::ostringstream out;
    const auto s = cmd_spin(cfg, out);
    EXPECT_EQ(s.trajectory.terminal, Terminal::max_time);
    EXPECT_EQ(comment_value(out.str(), "terminal"), "max-time");
    EXPECT_EQ(comment_value(out.str(), "t_lock_s"), "");
}

TEST(MaterialInfo, ReportsPresetParameters)
{
    std::ostringstream out;
    cmd_material_info("sic", out);
    const std::string text = out.str();
    for (const char* needle : {"6.7", "1.823e+14", "1.492e+14", "8.954e+11", "10.0025", "1.78341"})
        EXPECT_NE(text.find(needle), std::string::npos) << needle;
    EXPECT_THROW(cmd_material_info("adamantium", out), ConfigError);
}

TEST(Binary, ExitCodes)
{
    EXPECT_EQ(run_cli("material-info sic"), 0);
    EXPECT_EQ(run_cli("material-info adamantium"), 2);
    EXPECT_EQ(run_cli("sweep-omega --no-such-flag"), 2);
    EXPECT_EQ(run_cli("sweep-omega --omega0-points 1"), 2);
    EXPECT_EQ(run_cli("sweep-omega --out /nonexistent-dir/x.csv"), 2);
    EXPECT_EQ(run_cli("sweep-omega --config /nonexistent-dir/x.conf"), 2);
    EXPECT_EQ(run_cli(""), 2);
}

TEST(Binary, ConfigFileAndFlagPrecedence)
{
    const std::string path = ::testing::TempDir() + "qfric_sweep.csv";
    const std::string args = std::string("sweep-omega --config ") + QFRIC_CONFIG_DIR +
                             "/sweep_omega_250K.conf --omega0-points 3 --T0 260 --out " + path;
    ASSERT_EQ(run_cli(args), 0);
    const std::string text = slurp(path);
    EXPECT_EQ(comment_value(text, "T"), "250");
    EXPECT_EQ(comment_value(text, "T0"), "260");
    EXPECT_EQ(comment_value(text, "omega0-points"), "3");
    EXPECT_EQ(comment_value(text, "radius"), "4.9999999999999998e-08");
    EXPECT_EQ(rows(text).size(), 3u);

    ASSERT_EQ(run_cli(args), 0);
    EXPECT_EQ(slurp(path), text);
    std::remove(path.c_str());
}

TEST(Binary, FlagsWithoutValues)
{
    const std::string path = ::testing::TempDir() + "qfric_flags.csv";
    ASSERT_EQ(run_cli("sweep-omega --omega0-points 2 --standard-fdt --log=false --out " + path), 0);
    const std::string text = slurp(path);
    EXPECT_EQ(comment_value(text, "standard-fdt"), "true");
    EXPECT_EQ(comment_value(text, "log"), "false");
    std::remove(path.c_str());
}

TEST(Binary, MaterialFileAccepted)
{
    EXPECT_EQ(run_cli(std::string("material-info ") + QFRIC_CONFIG_DIR + "/sic.material"), 0);
}
