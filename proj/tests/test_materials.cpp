#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "qfric/materials.hpp"
#include "support.hpp"

using namespace qfric;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Permittivity, StaticLimitMatchesOracle)
{
    const auto m = sic();
    const complex e0 = permittivity(m, 0.0);
    EXPECT_LT(rel(e0.real(), 10.002544536), 1e-9);
    EXPECT_EQ(e0.imag(), 0.0);
    EXPECT_LT(rel(e0.real(), m.static_permittivity()), 1e-12);
}

TEST(Permittivity, HighFrequencyLimit)
{
    const complex e = permittivity(sic(), 1e19);
    EXPECT_LT(std::abs(e - complex(6.7, 0.0)), 1e-6);
}

TEST(Permittivity, LossPeaksAtTransverseFrequency)
{
    const auto m = sic();
    const double at = permittivity(m, m.omega_T()).imag();
    for (double k : {-3.0, -1.0, 1.0, 3.0})
        EXPECT_GT(at, permittivity(m, m.omega_T() + k * m.gamma()).imag());
}

TEST(Permittivity, RejectsBadFrequency)
{
    EXPECT_THROW(permittivity(sic(), std::nan("")), DomainError);
    EXPECT_THROW(permittivity(sic(), INFINITY), DomainError);
    EXPECT_THROW(permittivity(sic(), -1.0), DomainError);
}

TEST(Permittivity, ContinuousOnScanGrid)
{
    const auto m = sic();
    for (double w = 1e10; w < 1e16; w *= 1.07) {
        const double d = 1e-9 * w;
        const double jump = std::abs(permittivity(m, w + d) - permittivity(m, w));
        EXPECT_LT(jump, 1e-5 * std::abs(permittivity(m, w)) + 1e-12) << w;
    }
}

TEST(Permittivity, PassiveForRandomModels)
{
    prop::Gen gen(11);
    for (int i = 0; i < prop::property_cases; ++i) {
        const auto m = gen.model();
        for (double w = 1e10; w <= 1e16; w *= 1.5)
            ASSERT_GT(permittivity(m, w).imag(), 0.0) << "case " << i << " w " << w;
    }
}

TEST(Oscillator, RejectsInvalidParameters)
{
    EXPECT_THROW(LorentzOscillatorModel(0.5, 2e14, 1e14, 1e12), DomainError);
    EXPECT_THROW(LorentzOscillatorModel(6.7, 1e14, 2e14, 1e12), DomainError);
    EXPECT_THROW(LorentzOscillatorModel(6.7, 2e14, 1e14, 0.0), DomainError);
    EXPECT_THROW(LorentzOscillatorModel(6.7, 2e14, -1e14, 1e12), DomainError);
    EXPECT_THROW(LorentzOscillatorModel(6.7, NAN, 1e14, 1e12), DomainError);
}

TEST(Susceptibility, Limits)
{
    const auto m = sic();
    EXPECT_NEAR(susceptibility(m, 0.0).real(), 9.002544536, 1e-8);
    EXPECT_NEAR(susceptibility(m, 1e19).real(), 5.7, 1e-6);
    for (double w = 1e11; w < 1e15; w *= 1.3)
        EXPECT_EQ(susceptibility(m, w).imag(), permittivity(m, w).imag());
}

// Re chi(0) = chi(inf) + (2/pi) int_0^inf Im chi(w) / w dw, where chi(inf) = eps_inf - 1
// is the instantaneous background; the integral is a trapezoid in ln w.
TEST(Susceptibility, KramersKronigStaticSpotCheck)
{
    const auto m = sic();
    const double lo = std::log(1e8), hi = std::log(1e18);
    const int n = 400000;
    const double h = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = std::exp(lo + i * h);
        const double v = susceptibility(m, w).imag();
        sum += (i == 0 || i == n) ? 0.5 * v : v;
    }
    const double kk = (m.eps_inf() - 1.0) + 2.0 / pi * sum * h;
    EXPECT_LT(rel(kk, susceptibility(m, 0.0).real()), 0.02);
}

TEST(Polarizability, ZeroAtZeroFrequency)
{
    const ParticleSpec p(50e-9, sic());
    EXPECT_EQ(im_polarizability(p, 0.0), 0.0);
    EXPECT_EQ(im_polarizability(p, 0.0, Polarizability::volume), 0.0);
}

TEST(Polarizability, OddExtensionExact)
{
    prop::Gen gen(5);
    const ParticleSpec p(50e-9, sic());
    for (int i = 0; i < prop::property_cases; ++i) {
        const double w = gen.log_uniform(1e9, 1e16);
        for (auto form : {Polarizability::clausius_mossotti, Polarizability::volume})
            ASSERT_EQ(im_polarizability(p, -w, form), -im_polarizability(p, w, form)) << w;
    }
}

TEST(Polarizability, ValuesAtTransverseFrequency)
{
    const ParticleSpec p(50e-9, sic());
    const double wt = sic().omega_T();
    EXPECT_LT(rel(im_polarizability(p, wt, Polarizability::volume), 2.88137005463e-19), 1e-9);
    EXPECT_LT(rel(im_polarizability(p, wt, Polarizability::volume),
                  p.volume() * susceptibility(sic(), wt).imag()),
              1e-14);
    EXPECT_LT(rel(im_polarizability(p, wt), 8.56115147539e-24), 1e-9);
}

TEST(Polarizability, WithoutOddExtensionIsEven)
{
    const ParticleSpec p(50e-9, sic());
    EXPECT_EQ(im_polarizability(p, -1e14, Polarizability::clausius_mossotti, false),
              im_polarizability(p, 1e14));
}

TEST(SurfaceResponse, HighFrequencyLimit)
{
    const complex r = surface_response(sic(), 1e19);
    EXPECT_NEAR(r.real(), 5.7 / 7.7, 1e-6);
}

TEST(SurfaceResponse, PositiveLossForRandomModels)
{
    prop::Gen gen(17);
    for (int i = 0; i < prop::property_cases; ++i) {
        const auto m = gen.model();
        const double w = gen.log_uniform(1e10, 1e16);
        ASSERT_GT(surface_response(m, w).imag(), 0.0) << i;
    }
}

TEST(SurfaceMode, SicMatchesOracle)
{
    const double ws = find_surface_mode(sic());
    EXPECT_LT(rel(ws, 1.78341243035e14), 1e-9);
    EXPECT_LT(std::abs(permittivity(sic(), ws).real() + 1.0), 1e-4);
    EXPECT_GT(ws, sic().omega_T());
    EXPECT_LT(ws, sic().omega_L());
}

TEST(SurfaceMode, LosslessLimit)
{
    const LorentzOscillatorModel m(6.7, 1.823e14, 1.492e14, 8.954e11 * 1e-6);
    EXPECT_LT(rel(find_surface_mode(m), 1.78348732879e14), 1e-8);
}

TEST(SurfaceMode, ResidualForRandomModels)
{
    prop::Gen gen(23);
    for (int i = 0; i < prop::property_cases; ++i) {
        const auto m = gen.model();
        const double ws = find_surface_mode(m);
        ASSERT_LT(std::abs(permittivity(m, ws).real() + 1.0), 1e-4) << i;
    }
}

TEST(SurfaceMode, DegenerateOscillatorHasNoMode)
{
    const LorentzOscillatorModel m(1.0, 1.492e14 * (1 + 1e-9), 1.492e14, 8.954e11);
    EXPECT_THROW(find_surface_mode(m), NoSurfaceModeError);
}

TEST(SurfaceMode, SphereModeMatchesOracle)
{
    EXPECT_LT(rel(find_sphere_mode(sic()), 1.75236774684e14), 1e-9);
    EXPECT_EQ(particle_resonance(sic(), Polarizability::volume), sic().omega_T());
}

TEST(SurfaceResponse, PeaksNearSurfaceMode)
{
    const auto m = sic();
    const double ws = find_surface_mode(m);
    EXPECT_GT(surface_response(m, ws).imag(), 10.0 * surface_response(m, m.omega_L()).imag());
}

TEST(Particle, GeometryAndInertia)
{
    const ParticleSpec p(50e-9, sic());
    EXPECT_LT(rel(p.volume(), 4.0 / 3.0 * pi * 1.25e-22), 1e-14);
    EXPECT_LT(rel(p.inertia(3210.0), 0.4 * 3210.0 * p.volume() * 2.5e-15), 1e-14);
    EXPECT_THROW(ParticleSpec(0.0, sic()), DomainError);
    EXPECT_TRUE(dipole_regime_ok(p, 1.8e14));
    EXPECT_FALSE(dipole_regime_ok(ParticleSpec(5e-6, sic()), 1.8e14));
}

TEST(MaterialFile, ParsesKeyValueLines)
{
    std::istringstream in("# SiC\neps_inf = 6.7\nomega_L=1.823e14\n\n omega_T = 1.492e14 # TO\n"
                          "gamma = 8.954e11\n");
    EXPECT_EQ(parse_material(in), sic());
}

TEST(MaterialFile, RejectsUnknownMissingAndMalformed)
{
    std::istringstream unknown("eps_inf = 6.7\nomega_L = 1\nomega_T = 0.5\ngamma = 1\ncolor = red\n");
    EXPECT_THROW(parse_material(unknown), ConfigError);
    std::istringstream missing("eps_inf = 6.7\nomega_L = 2e14\nomega_T = 1e14\n");
    EXPECT_THROW(parse_material(missing), ConfigError);
    std::istringstream bad("eps_inf = 6.7x\nomega_L = 2e14\nomega_T = 1e14\ngamma = 1e12\n");
    EXPECT_THROW(parse_material(bad), ConfigError);
    std::istringstream noeq("eps_inf 6.7\n");
    EXPECT_THROW(parse_material(noeq), ConfigError);
}

TEST(MaterialFile, ResolvesPresetsAndFiles)
{
    EXPECT_EQ(resolve_material("sic"), sic());
    const std::string path = ::testing::TempDir() + "qfric_material.txt";
    {
        std::ofstream out(path);
        out << "eps_inf = 2\nomega_L = 3e14\nomega_T = 2e14\ngamma = 1e12\n";
    }
    EXPECT_EQ(resolve_material(path), LorentzOscillatorModel(2.0, 3e14, 2e14, 1e12));
    std::remove(path.c_str());
    try {
        resolve_material("unobtainium");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("sic"), std::string::npos);
    }
}
