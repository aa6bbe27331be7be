#pragma once

// Rotational dynamics under the friction torques: single-rotor spin-down and
// frequency locking of a particle above a co-rotating surface body.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qfric/error.hpp"
#include "qfric/greens.hpp"
#include "qfric/reduce.hpp"
#include "qfric/torque.hpp"

namespace qfric {

struct RotorState {
    double inertia; ///< kg m^2
    double omega;   ///< rad/s

    RotorState(double i, double w) : inertia(i), omega(w)
    {
        if (!(inertia > 0.0) || !std::isfinite(inertia) || !std::isfinite(omega))
            throw DomainError("rotor needs a positive inertia and a finite omega");
    }
};

/// Everything a torque evaluation needs besides the rotation rate.
struct Scene {
    ParticleSpec particle;
    HalfSpaceGeometry geometry;
    QuadratureSpec quadrature{};
    TorqueOptions options{};
    bool include_self = true;
    bool include_surface = true;
};

/// Default scene: 50 nm SiC sphere, 10 nm above a SiC half-space.
inline Scene default_scene()
{
    return {ParticleSpec(50e-9, sic()), HalfSpaceGeometry(10e-9, sic())};
}

inline constexpr double sic_density = 3210.0; // kg/m^3

enum class Terminal { converged, max_time };

inline const char* to_string(Terminal t)
{
    return t == Terminal::converged ? "converged" : "max-time";
}

struct SpinTrajectory {
    std::vector<double> times;               ///< s
    std::vector<std::vector<double>> omegas; ///< one series per rotor, rad/s
    std::vector<double> torques;             ///< torque on the first rotor, N m
    Terminal terminal = Terminal::max_time;
    std::optional<double> t_lock;            ///< time the lock/stop threshold was crossed
};

/// Thrown when the stepper cannot make progress; keeps what was integrated.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, SpinTrajectory partial)
        : std::runtime_error(what), partial_(std::move(partial))
    {
    }
    const SpinTrajectory& partial() const noexcept { return partial_; }

private:
    SpinTrajectory partial_;
};

enum class TorqueEvaluation { interpolated, direct };

struct DynamicsOptions {
    double step_tolerance = 1e-8; ///< relative local error per step
    TorqueEvaluation evaluation = TorqueEvaluation::interpolated;
    std::size_t table_points = 97; ///< log-grid size of the torque table
    std::size_t max_steps = 1000000;
    unsigned threads = default_thread_count();
};

/// Torque as an odd function of the rotation rate, interpolated from values
/// tabulated on a log grid of |omega|. Stores g = M/omega and interpolates it
/// with monotone piecewise-cubic Hermite (Fritsch-Carlson) in log|omega|;
/// below the grid, g is held constant (linear response).
class TorqueTable {
public:
    TorqueTable(std::function<double(double)> torque, double omega_lo, double omega_hi,
                std::size_t points, unsigned threads = default_thread_count())
    {
        if (!(omega_lo > 0.0 && omega_hi > omega_lo) || points < 2)
            throw DomainError("torque table needs 0 < lo < hi and >= 2 points");
        x_.resize(points);
        g_.resize(points);
        for (std::size_t i = 0; i < points; ++i)
            x_[i] = std::log(omega_lo) + (std::log(omega_hi) - std::log(omega_lo)) * i / (points - 1);
        parallel_for(
            points,
            [&](std::size_t i) {
                const double w = std::exp(x_[i]);
                g_[i] = torque(w) / w;
            },
            threads);
        slopes_ = pchip_slopes(x_, g_);
    }

    double omega_lo() const noexcept { return std::exp(x_.front()); }
    double omega_hi() const noexcept { return std::exp(x_.back()); }

    double operator()(double omega) const
    {
        if (omega == 0.0)
            return 0.0;
        const double a = std::abs(omega);
        if (a > omega_hi() * (1.0 + 1e-12))
            throw DomainError("torque table: |omega| above tabulated range");
        const double x = std::log(a);
        double g;
        if (x <= x_.front()) {
            g = g_.front();
        } else {
            const auto it = std::upper_bound(x_.begin(), x_.end(), x);
            const std::size_t k = std::min<std::size_t>(it - x_.begin(), x_.size() - 1) - 1;
            const double h = x_[k + 1] - x_[k];
            const double t = (x - x_[k]) / h;
            const double t2 = t * t, t3 = t2 * t;
            g = (2 * t3 - 3 * t2 + 1) * g_[k] + (t3 - 2 * t2 + t) * h * slopes_[k] +
                (-2 * t3 + 3 * t2) * g_[k + 1] + (t3 - t2) * h * slopes_[k + 1];
        }
        return omega * g;
    }

private:
    static std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y)
    {
        const std::size_t n = x.size();
        std::vector<double> d(n, 0.0), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if (n == 2) {
            d[0] = d[1] = delta[0];
            return d;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0)
                continue;
            const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
        auto end_slope = [](double h0, double h1, double d0, double d1) {
            double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if (s * d0 <= 0.0)
                s = 0.0;
            else if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3 * d0))
                s = 3 * d0;
            return s;
        };
        d[0] = end_slope(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
        d[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], delta[n - 2], delta[n - 3]);
        return d;
    }

    std::vector<double> x_, g_, slopes_;
};

namespace detail {

using State = std::array<double, 2>;

inline std::function<double(double)> self_torque_fn(const Scene& scene, const ThermalEnvironment& env)
{
    return [scene, env](double w) {
        return self_friction_torque(scene.particle, env, w, scene.quadrature, scene.options).value;
    };
}

inline std::function<double(double)> surface_torque_fn(const Scene& scene, const ThermalEnvironment& env)
{
    return [scene, env](double w) {
        return surface_friction_torque(scene.particle, scene.geometry, env, w, scene.quadrature,
                                       scene.options)
            .value;
    };
}

inline std::function<double(double)> maybe_tabulate(std::function<double(double)> fn, double max_abs,
                                                     const DynamicsOptions& opt)
{
    if (opt.evaluation == TorqueEvaluation::direct || max_abs == 0.0)
        return fn;
    auto table = std::make_shared<TorqueTable>(fn, max_abs * 1e-4, max_abs * 1.25,
                                               opt.table_points, opt.threads);
    return [table](double w) { return (*table)(w); };
}

// Dormand-Prince 5(4) with error control on every component and a step cap
// |h lambda| <= 2 from a finite-difference estimate of the local decay rate,
// which keeps the explicit stages inside their stability region.
struct Stepper {
    std::function<State(const State&)> rhs;
    std::size_t dim;
    double rtol;
    State scale; // absolute scales for the error norm

    double error_norm(const State& y, const State& err) const
    {
        double e = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double sc = rtol * std::max(std::abs(y[i]), scale[i]);
            e = std::max(e, std::abs(err[i]) / sc);
        }
        return e;
    }

    double stiffness(const State& y, const State& f) const
    {
        double lam = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            State yp = y;
            const double dy = 1e-6 * std::max(std::abs(y[i]), scale[i]);
            yp[i] += dy;
            const State fp = rhs(yp);
            for (std::size_t j = 0; j < dim; ++j)
                lam = std::max(lam, std::abs((fp[j] - f[j]) / dy));
        }
        return lam;
    }

    // One attempted step; returns the proposal and its scaled error.
    std::pair<State, double> attempt(const State& y, const State& k1, double h) const
    {
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                         a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                         b6 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                         e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        auto combo = [&](std::initializer_list<std::pair<double, const State*>> terms) {
            State s = y;
            for (std::size_t i = 0; i < dim; ++i)
                for (const auto& [c, k] : terms)
                    s[i] += h * c * (*k)[i];
            return s;
        };
        const State k2 = rhs(combo({{a21, &k1}}));
        const State k3 = rhs(combo({{a31, &k1}, {a32, &k2}}));
        const State k4 = rhs(combo({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = rhs(combo({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = rhs(combo({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State y5 = combo({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = rhs(y5);
        State err{};
        for (std::size_t i = 0; i < dim; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        return {y5, error_norm(y5, err)};
    }
};

// Integrates until `done(y)` or t_max. `record` appends a sample.
template <class Done, class Record>
Terminal run(Stepper& st, State& y, double t_max, std::size_t max_steps, Done&& done,
             Record&& record, SpinTrajectory& traj)
{
    double t = 0.0;
    State f = st.rhs(y);
    double lam = st.stiffness(y, f);
    double h = lam > 0.0 ? 0.05 / lam : t_max * 1e-3;
    h = std::min(h, t_max);
    for (std::size_t step = 0; step < max_steps; ++step) {
        if (t >= t_max)
            return Terminal::max_time;
        if (lam > 0.0)
            h = std::min(h, 2.0 / lam);
        h = std::min(h, t_max - t);
        if (!(h > 1e-15 * std::max(t, 1e-300)))
            throw StepFailure("step size underflow at t = " + std::to_string(t), traj);
        const auto [y_new, err] = st.attempt(y, f, h);
        bool finite = true;
        for (std::size_t i = 0; i < st.dim; ++i)
            finite = finite && std::isfinite(y_new[i]);
        if (!finite || err > 1.0) {
            h *= finite ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            continue;
        }
        const State y_old = y;
        const double t_old = t;
        t += h;
        y = y_new;
        f = st.rhs(y);
        lam = st.stiffness(y, f);
        record(t, y, f);
        if (done(t_old, y_old, t, y))
            return Terminal::converged;
        h *= err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
    }
    throw StepFailure("max_steps exhausted", traj);
}

// Log-linear interpolation of the threshold crossing time inside a step.
inline double crossing_time(double t0, double a0, double t1, double a1, double threshold)
{
    if (!(a0 > threshold) || !(a1 > 0.0))
        return t1;
    const double s = std::log(a0 / threshold) / std::log(a0 / a1);
    return t0 + std::clamp(s, 0.0, 1.0) * (t1 - t0);
}

} // namespace detail

/// Integrates I dw/dt = M(w) until |w| < rtol |w(0)| or t_max.
inline SpinTrajectory spin_down(const RotorState& rotor, const Scene& scene,
                                const ThermalEnvironment& env, double t_max, double rtol,
                                const DynamicsOptions& opt = {})
{
    if (!(t_max > 0.0) || !(rtol > 0.0 && rtol < 1.0))
        throw DomainError("spin_down: need t_max > 0 and rtol in (0, 1)");
    SpinTrajectory traj;
    traj.omegas.resize(1);
    const double w0 = rotor.omega;

    std::function<double(double)> self = [](double) { return 0.0; };
    std::function<double(double)> surf = [](double) { return 0.0; };
    if (scene.include_self)
        self = detail::maybe_tabulate(detail::self_torque_fn(scene, env), std::abs(w0), opt);
    if (scene.include_surface)
        surf = detail::maybe_tabulate(detail::surface_torque_fn(scene, env), std::abs(w0), opt);
    auto torque = [&](double w) { return w == 0.0 ? 0.0 : self(w) + surf(w); };

    auto record = [&](double t, const detail::State& y, const detail::State&) {
        traj.times.push_back(t);
        traj.omegas[0].push_back(y[0]);
        traj.torques.push_back(torque(y[0]));
    };
    record(0.0, {w0, 0.0}, {});
    if (w0 == 0.0) {
        traj.terminal = Terminal::converged;
        traj.t_lock = 0.0;
        return traj;
    }

    detail::Stepper st{[&](const detail::State& y) { return detail::State{torque(y[0]) / rotor.inertia, 0.0}; },
                       1, opt.step_tolerance, {std::abs(w0) * rtol, 0.0}};
    detail::State y{w0, 0.0};
    const double threshold = rtol * std::abs(w0);
    auto done = [&](double t0, const detail::State& y0, double t1, const detail::State& y1) {
        if (std::abs(y1[0]) >= threshold)
            return false;
        traj.t_lock = detail::crossing_time(t0, std::abs(y0[0]), t1, std::abs(y1[0]), threshold);
        return true;
    };
    traj.terminal = detail::run(st, y, t_max, opt.max_steps, done, record, traj);
    return traj;
}

/// Particle (a) above a rotating surface body (s). The surface torque acts
/// on the relative rate D = w_a - W and the surface body receives the
/// reaction:  I_a dw_a/dt = M_B(D) + M_s(w_a),  I_s dW/dt = -M_B(D).
/// scene.include_self switches the vacuum term on the particle.
/// Stops when |D| < rtol |D(0)| or at t_max.
inline SpinTrajectory synchronize_pair(const RotorState& rotor_a, const RotorState& surface_rotor,
                                       const Scene& scene, const ThermalEnvironment& env,
                                       double t_max, double rtol, const DynamicsOptions& opt = {})
{
    if (!(t_max > 0.0) || !(rtol > 0.0 && rtol < 1.0))
        throw DomainError("synchronize_pair: need t_max > 0 and rtol in (0, 1)");
    SpinTrajectory traj;
    traj.omegas.resize(2);
    const double delta0 = rotor_a.omega - surface_rotor.omega;
    const double ia = rotor_a.inertia, is = surface_rotor.inertia;

    std::function<double(double)> self = [](double) { return 0.0; };
    std::function<double(double)> surf = [](double) { return 0.0; };
    const double wmax = std::max(std::abs(rotor_a.omega), std::abs(surface_rotor.omega));
    if (scene.include_self)
        self = detail::maybe_tabulate(detail::self_torque_fn(scene, env), wmax, opt);
    // The vacuum term can pull an initially locked pair apart, so the table
    // must cover some slip even when D(0) = 0.
    const double slip = std::max(std::abs(delta0), scene.include_self ? 1e-2 * wmax : 0.0);
    if (scene.include_surface && slip > 0.0)
        surf = detail::maybe_tabulate(detail::surface_torque_fn(scene, env), slip, opt);
    auto mb = [&](double d) { return d == 0.0 ? 0.0 : surf(d); };
    auto ms = [&](double w) { return w == 0.0 ? 0.0 : self(w); };

    auto record = [&](double t, const detail::State& y, const detail::State&) {
        traj.times.push_back(t);
        traj.omegas[0].push_back(y[0]);
        traj.omegas[1].push_back(y[1]);
        traj.torques.push_back(mb(y[0] - y[1]) + ms(y[0]));
    };
    record(0.0, {rotor_a.omega, surface_rotor.omega}, {});
    if (delta0 == 0.0 && !scene.include_self) {
        traj.terminal = Terminal::converged;
        traj.t_lock = 0.0;
        return traj;
    }

    // Error control is on (w_a, W); their absolute scale is set by the
    // lock threshold on D so the difference stays resolved.
    const double dscale = std::max(std::abs(delta0) * rtol, 1e-300);
    detail::Stepper st{[&](const detail::State& y) {
                           const double m = mb(y[0] - y[1]);
                           return detail::State{(m + ms(y[0])) / ia, -m / is};
                       },
                       2, opt.step_tolerance, {dscale, dscale}};
    detail::State y{rotor_a.omega, surface_rotor.omega};
    const double threshold = rtol * std::abs(delta0);
    auto done = [&](double t0, const detail::State& y0, double t1, const detail::State& y1) {
        const double d1 = std::abs(y1[0] - y1[1]);
        if (delta0 == 0.0 || d1 >= threshold)
            return false;
        traj.t_lock = detail::crossing_time(t0, std::abs(y0[0] - y0[1]), t1, d1, threshold);
        return true;
    };
    traj.terminal = detail::run(st, y, t_max, opt.max_steps, done, record, traj);
    return traj;
}

/// kappa = -dM_total/dw at w = 0 by central difference at +-omega_ref.
inline double friction_coefficient(const Scene& scene, const ThermalEnvironment& env,
                                   double omega_ref)
{
    if (!(omega_ref > 0.0 && omega_ref <= 1e10))
        throw DomainError("friction_coefficient: omega_ref must lie in (0, 1e10]");
    auto eval = [&](double w) {
        TorqueResult r;
        if (scene.include_self && scene.include_surface)
            r = total_torque(scene.particle, scene.geometry, env, w, scene.quadrature, scene.options);
        else if (scene.include_surface)
            r = surface_friction_torque(scene.particle, scene.geometry, env, w, scene.quadrature,
                                        scene.options);
        else
            r = self_friction_torque(scene.particle, env, w, scene.quadrature, scene.options);
        if (r.indeterminate_sign())
            throw NonConvergenceError("friction_coefficient: torque sign not resolved", r.value,
                                      r.error_estimate);
        return r.value;
    };
    return -(eval(omega_ref) - eval(-omega_ref)) / (2.0 * omega_ref);
}

/// time,omega_a,omega_surface,torque. Single-rotor runs write omega_surface = 0.
inline void write_trajectory_csv(std::ostream& out, const SpinTrajectory& traj)
{
    out << "time_s,omega_a_rad_s,omega_surface_rad_s,torque_Nm\n";
    char buf[128];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double ws = traj.omegas.size() > 1 ? traj.omegas[1][i] : 0.0;
        std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e\n", traj.times[i],
                      traj.omegas[0][i], ws, traj.torques[i]);
        out << buf;
    }
}

} // namespace qfric
