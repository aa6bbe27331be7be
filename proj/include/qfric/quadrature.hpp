#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) integration over frequency.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qfric/constants.hpp"
#include "qfric/error.hpp"
#include "qfric/materials.hpp"
#include "qfric/reduce.hpp"

namespace qfric {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    double omega_max = 0.0; ///< upper cutoff in rad/s; 0 selects default_omega_max()
    int max_subdivisions = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
    int panels = 0;
};

/// 20 * max(w_L, k_B T / hbar, |w0|).
inline double default_omega_max(const LorentzOscillatorModel& model, double omega0, double T)
{
    const double thermal = PhysicalConstants::k_B * T / PhysicalConstants::hbar;
    return 20.0 * std::max({model.omega_L(), thermal, std::abs(omega0)});
}

/// Fills in omega_max and checks the tolerance/cutoff contract.
inline QuadratureSpec resolve_spec(QuadratureSpec spec, const LorentzOscillatorModel& model,
                                   double omega0, double T)
{
    if (!(spec.rel_tol > 0.0 && spec.rel_tol <= 1e-2))
        throw DomainError("rel_tol must lie in (0, 1e-2]");
    if (!(spec.abs_tol >= 0.0))
        throw DomainError("abs_tol must be >= 0");
    if (spec.max_subdivisions < 1)
        throw DomainError("max_subdivisions must be >= 1");
    const double floor = default_omega_max(model, omega0, T) / 2.0;
    if (spec.omega_max == 0.0)
        spec.omega_max = default_omega_max(model, omega0, T);
    else if (!(spec.omega_max > floor))
        throw DomainError("omega_max must exceed 10 max(w_L, w0, k_B T/hbar)");
    return spec;
}

namespace detail {

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

// QUADPACK qk21 nodes and weights.
inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208977793400, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class F>
Panel kronrod21(F& f, double a, double b)
{
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 21> fv;
    fv[20] = f(center);
    double resk = wgk[10] * fv[20];
    double resg = 0.0;
    double resabs = std::abs(resk);
    for (int j = 0; j < 10; ++j) {
        const double dx = half * xgk[j];
        fv[2 * j] = f(center - dx);
        fv[2 * j + 1] = f(center + dx);
        const double pair = fv[2 * j] + fv[2 * j + 1];
        resk += wgk[j] * pair;
        resabs += wgk[j] * (std::abs(fv[2 * j]) + std::abs(fv[2 * j + 1]));
        if (j % 2 == 1)
            resg += wg[j / 2] * pair;
    }
    const double mean = 0.5 * resk;
    double resasc = wgk[10] * std::abs(fv[20] - mean);
    for (int j = 0; j < 10; ++j)
        resasc += wgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));

    const double habs = std::abs(half);
    double err = std::abs((resk - resg) * half);
    resasc *= habs;
    resabs *= habs;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > uflow / (50.0 * epmach))
        err = std::max(epmach * 50.0 * resabs, err);
    return {a, b, resk * half, err};
}

} // namespace detail

/// Integrates f over [lower, upper] with initial panel boundaries at the
/// given breakpoints. Converges when the summed error estimate is below
/// max(abs_tol, rel_tol |I|). Throws NonConvergenceError (with the partial
/// sum) when max_subdivisions panels are exhausted.
template <class F>
QuadratureResult integrate(F&& f, double lower, double upper, std::span<const double> breakpoints,
                           double rel_tol, double abs_tol, int max_subdivisions)
{
    if (!(upper > lower))
        throw DomainError("integrate: need upper > lower");
    std::vector<double> edges{lower};
    for (double p : breakpoints)
        if (p > lower && p < upper)
            edges.push_back(p);
    edges.push_back(upper);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    auto by_error = [](const detail::Panel& x, const detail::Panel& y) { return x.error < y.error; };
    std::vector<detail::Panel> active;  // max-heap on error
    std::vector<detail::Panel> settled; // too narrow to split further
    int evaluations = 0;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        active.push_back(detail::kronrod21(f, edges[i], edges[i + 1]));
        evaluations += 21;
        value += active.back().value;
        error += active.back().error;
    }
    std::make_heap(active.begin(), active.end(), by_error);

    auto finish = [&] {
        std::vector<detail::Panel> all = active;
        all.insert(all.end(), settled.begin(), settled.end());
        std::sort(all.begin(), all.end(),
                  [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
        std::vector<double> vals, errs;
        for (const auto& p : all) {
            vals.push_back(p.value);
            errs.push_back(p.error);
        }
        return QuadratureResult{pairwise_sum(vals), pairwise_sum(errs), evaluations,
                                static_cast<int>(all.size())};
    };

    auto tolerance = [&] { return std::max(abs_tol, rel_tol * std::abs(value)); };
    while (error > tolerance()) {
        if (active.empty()) {
            const auto r = finish();
            throw NonConvergenceError("quadrature: roundoff limits the attainable accuracy",
                                      r.value, r.error_estimate);
        }
        if (static_cast<int>(active.size() + settled.size()) >= max_subdivisions) {
            const auto r = finish();
            throw NonConvergenceError("quadrature: max_subdivisions (" +
                                          std::to_string(max_subdivisions) + ") exhausted",
                                      r.value, r.error_estimate);
        }
        std::pop_heap(active.begin(), active.end(), by_error);
        const detail::Panel worst = active.back();
        active.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 1e-14 * std::max(std::abs(worst.a), std::abs(worst.b))) {
            settled.push_back(worst);
            continue;
        }
        const detail::Panel left = detail::kronrod21(f, worst.a, mid);
        const detail::Panel right = detail::kronrod21(f, mid, worst.b);
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        for (const auto& p : {left, right}) {
            active.push_back(p);
            std::push_heap(active.begin(), active.end(), by_error);
        }
        // Refresh the running error now and then so cancellation in the
        // incremental updates cannot stall the loop.
        if (evaluations % (42 * 64) == 0) {
            double e = 0.0;
            for (const auto& p : active)
                e += p.error;
            for (const auto& p : settled)
                e += p.error;
            error = e;
        }
    }
    return finish();
}

/// Integrates f over (omega_max * 1e-12, omega_max]. All in-scope integrands
/// vanish or stay finite as omega -> 0, so the lower cut is harmless.
template <class F>
QuadratureResult integrate_spectrum(F&& f, const QuadratureSpec& spec,
                                    std::span<const double> breakpoints = {})
{
    if (!(spec.omega_max > 0.0))
        throw DomainError("integrate_spectrum: omega_max must be set");
    return integrate(std::forward<F>(f), spec.omega_max * 1e-12, spec.omega_max, breakpoints,
                     spec.rel_tol, spec.abs_tol, spec.max_subdivisions);
}

/// Initial panel boundaries for the torque integrals: the material
/// resonances, the rotation frequency, the resonances shifted by +-w0 and
/// the thermal frequency. Extra particle resonances (e.g. the sphere mode)
/// contribute r, |r - w0| and r + w0. Sorted, positive, deduplicated.
inline std::vector<double> breakpoint_hints(double omega0, const LorentzOscillatorModel& model,
                                            double T,
                                            std::span<const double> particle_resonances = {})
{
    const double w0 = std::abs(omega0);
    std::vector<double> h{model.omega_T(), model.omega_L(), w0, std::abs(model.omega_T() - w0),
                          model.omega_T() + w0,
                          PhysicalConstants::k_B * T / PhysicalConstants::hbar};
    try {
        h.push_back(find_surface_mode(model));
    } catch (const NoSurfaceModeError&) {
    }
    for (double r : particle_resonances) {
        h.push_back(r);
        h.push_back(std::abs(r - w0));
        h.push_back(r + w0);
    }
    std::erase_if(h, [](double x) { return !(x > 0.0) || !std::isfinite(x); });
    std::sort(h.begin(), h.end());
    std::vector<double> out;
    for (double x : h)
        if (out.empty() || x > out.back() * (1.0 + 1e-12))
            out.push_back(x);
    return out;
}

} // namespace qfric
