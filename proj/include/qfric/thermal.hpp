#pragma once

#include <cmath>

#include "qfric/constants.hpp"
#include "qfric/error.hpp"

namespace qfric {

/// Matter (particle and bulk) temperature T and vacuum-field temperature T0, in K.
struct ThermalEnvironment {
    double T;
    double T0;

    ThermalEnvironment(double matter, double vacuum) : T(matter), T0(vacuum)
    {
        if (!(T > 0.0 && T0 > 0.0) || !std::isfinite(T) || !std::isfinite(T0))
            throw DomainError("temperatures must be positive and finite");
    }

    /// Matter and field at the same temperature.
    static ThermalEnvironment equilibrium(double t) { return {t, t}; }
};

/// Argument convention for the hyperbolic cotangent factor: `paper` uses
/// coth(hbar w / k_B T), `standard` the textbook coth(hbar w / 2 k_B T).
enum class FdtConvention { paper, standard };

inline const char* to_string(FdtConvention f)
{
    return f == FdtConvention::standard ? "standard" : "paper";
}

/// Below this temperature the thermal factors take their T -> 0 limits.
inline constexpr double zero_temperature_clamp = 1e-3;

inline double thermal_argument(double omega, double T, FdtConvention fdt)
{
    const double scale = fdt == FdtConvention::standard ? 2.0 : 1.0;
    return PhysicalConstants::hbar * omega / (scale * PhysicalConstants::k_B * T);
}

/// a_T(omega) = coth(hbar omega / k_B T); odd in omega.
inline double coth_factor(double omega, double T, FdtConvention fdt = FdtConvention::paper)
{
    if (!std::isfinite(omega) || !(T > 0.0))
        throw DomainError("coth_factor: need finite omega and T > 0");
    if (omega == 0.0)
        throw DomainError("coth_factor: omega = 0 is a pole");
    if (T < zero_temperature_clamp)
        return omega > 0.0 ? 1.0 : -1.0;
    return 1.0 / std::tanh(thermal_argument(omega, T, fdt));
}

/// a_T(omega + omega0) - a_T(omega - omega0), without cancellation when
/// omega0 is small against omega. Neither argument may be zero.
inline double coth_shift(double omega, double omega0, double T,
                         FdtConvention fdt = FdtConvention::paper)
{
    const double a = omega + omega0;
    const double b = omega - omega0;
    if (!std::isfinite(a) || !std::isfinite(b) || !(T > 0.0))
        throw DomainError("coth_shift: need finite arguments and T > 0");
    if (a == 0.0 || b == 0.0)
        throw DomainError("coth_shift: omega +- omega0 = 0 is a pole");
    if ((a > 0.0) != (b > 0.0))
        return coth_factor(a, T, fdt) - coth_factor(b, T, fdt);
    if (T < zero_temperature_clamp)
        return 0.0;
    // coth p - coth q = 4 sinh(q - p) e^{-(p + q)} / (expm1(-2p) expm1(-2q)) for p, q > 0
    const double sign = a > 0.0 ? 1.0 : -1.0;
    const double s = thermal_argument(1.0, T, fdt);
    const double p = s * std::abs(a);
    const double q = s * std::abs(b);
    const double q_minus_p = -2.0 * s * omega0 * sign;
    return sign * 4.0 * std::sinh(q_minus_p) * std::exp(-(p + q)) /
           (std::expm1(-2.0 * p) * std::expm1(-2.0 * q));
}

/// coth_factor(u, Tu) - coth_factor(v, Tv), formed without cancellation when
/// both factors sit near the same saturated value.
inline double coth_difference(double u, double Tu, double v, double Tv,
                              FdtConvention fdt = FdtConvention::paper)
{
    if (!std::isfinite(u) || !std::isfinite(v) || !(Tu > 0.0) || !(Tv > 0.0))
        throw DomainError("coth_difference: need finite arguments and T > 0");
    if (u == 0.0 || v == 0.0)
        throw DomainError("coth_difference: zero argument is a pole");
    if ((u > 0.0) != (v > 0.0) || Tu < zero_temperature_clamp || Tv < zero_temperature_clamp)
        return coth_factor(u, Tu, fdt) - coth_factor(v, Tv, fdt);
    const double sign = u > 0.0 ? 1.0 : -1.0;
    const double su = thermal_argument(1.0, Tu, fdt);
    const double sv = thermal_argument(1.0, Tv, fdt);
    const double p = su * std::abs(u);
    const double q = sv * std::abs(v);
    const double q_minus_p = Tu == Tv ? su * (std::abs(v) - std::abs(u)) : q - p;
    return sign * 4.0 * std::sinh(q_minus_p) * std::exp(-(p + q)) /
           (std::expm1(-2.0 * p) * std::expm1(-2.0 * q));
}

/// Bose-Einstein occupation 1 / (exp(hbar omega / k_B T) - 1).
inline double bose_occupation(double omega, double T)
{
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("bose_occupation: omega must be > 0");
    if (!(T > 0.0))
        throw DomainError("bose_occupation: T must be > 0");
    if (T < zero_temperature_clamp)
        return 0.0;
    return 1.0 / std::expm1(thermal_argument(omega, T, FdtConvention::paper));
}

} // namespace qfric
