#include "nlcl/cli/scenarios.hpp"
#include "nlcl/diagnostics.hpp"
#include "nlcl/green.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace nlcl;
using namespace nlcl::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SpectralState unit_state(const GridSpec& g) { return SpectralState{SpectralField(g, 7), {0.0, 0.0, 1.0}, 0.0}; }

SpectralState single_mode(const GridSpec& g, int component, double amp, int mode = 1) {
  PerturbationState s = PerturbationState::zeros(g);
  RealField& f = component == kRho ? s.rho_pert : component < kDirector ? s.velocity : s.director_pert;
  const int c = component == kRho ? 0 : component < kDirector ? component - kVelocity : component - kDirector;
  for (std::size_t p = 0; p < f.point_count(); ++p) f.at(c, p) = amp * std::cos(mode * f.coordinate(p, 0));
  return to_spectral(s);
}

}  // namespace

TEST(NormReport, ZeroStateIsAllZero) {
  const NormReport r = norm_report(unit_state(grid2(8)), 3);
  for (const auto& [label, v] : r.entries) EXPECT_EQ(v, 0.0) << label;
  EXPECT_TRUE(r.find("rho_grad0_H3"));
  EXPECT_TRUE(r.find("u_grad2_H1"));
  EXPECT_TRUE(r.find("n_grad4_L2"));
  EXPECT_TRUE(r.find("u_Linf"));
  EXPECT_FALSE(r.find("low_order_flag"));
}

TEST(NormReport, LowOrderIsFlagged) {
  EXPECT_EQ(norm_report(unit_state(grid1(8)), 2).at("low_order_flag"), 1.0);
  EXPECT_THROW(norm_report(unit_state(grid1(8)), 0), InputError);
}

TEST(NormReport, SingleModeH1IsTwiceL2) {
  const NormReport r = norm_report(single_mode(grid1(16), kRho, 0.3), 1);
  const double l2 = r.at("rho_grad0_L2");
  EXPECT_NEAR(l2 * l2, 0.09 * std::numbers::pi, 1e-15);
  const double h1 = r.at("rho_grad0_H1");
  EXPECT_NEAR(h1 * h1, 2.0 * l2 * l2, 1e-15);
}

TEST(NormReport, LpNormsOfSingleMode) {
  const NormReport r = norm_report(single_mode(grid1(32), kVelocity + 1, 0.5), 3);
  EXPECT_NEAR(r.at("u_Linf"), 0.5, 1e-15);
  EXPECT_NEAR(r.at("u_L2"), 0.5 * std::sqrt(std::numbers::pi), 1e-14);
  // int cos^6 over a period = 2 pi * 5/16
  EXPECT_NEAR(r.at("u_L6"), 0.5 * std::pow(2.0 * std::numbers::pi * 5.0 / 16.0, 1.0 / 6.0), 1e-14);
}

TEST(NormReport, HeatEvolvedDirector) {
  const GridSpec g = grid1(16);
  const SpectralState s0 = single_mode(g, kDirector, 1e-3, 2);
  const double t = 0.3;
  const SpectralState s = apply_propagator(s0, FluidParams{}, t);
  const NormReport r0 = norm_report(s0, 3);
  const NormReport r = norm_report(s, 3);
  for (int l = 0; l <= 4; ++l) {
    const std::string key = "n_grad" + std::to_string(l) + "_L2";
    const double ratio = std::pow(r.at(key) / r0.at(key), 2);
    EXPECT_NEAR(ratio, std::exp(-2.0 * 4.0 * t), 1e-13) << key;
  }
}

TEST(NormReport, EntriesNonnegativeAndFinite) {
  const SpectralState s = cli::scenario_initial("mixed-small", grid2(16), 1e-2, 3);
  for (const auto& [label, v] : norm_report(s, 3).entries) {
    EXPECT_TRUE(std::isfinite(v)) << label;
    EXPECT_GE(v, 0.0) << label;
  }
}

TEST(TimeDerivativeNorms, EquilibriumIsZero) {
  const NormReport r = time_derivative_norms(unit_state(grid2(8)), FluidParams{}, 3);
  for (const auto& [label, v] : r.entries) EXPECT_EQ(v, 0.0) << label;
  EXPECT_EQ(r.entries.size(), 2u + 2u + 3u);
}

TEST(TimeDerivativeNorms, DirectorSingleModeRelaxes) {
  const SpectralState s = single_mode(grid1(16), kDirector, 1e-4);
  const NormReport r = time_derivative_norms(s, FluidParams{}, 3);
  const double n = norm_report(s, 3).at("n_grad0_L2");
  EXPECT_NEAR(r.at("n_t_grad0_L2") / n, 1.0, 1e-6);
}

TEST(TimeDerivativeNorms, LinearContinuityEquation) {
  const GridSpec g = grid2(16);
  SpectralState s{random_band_limited(g, 7, 4, 31, 0.01), {0.0, 0.0, 1.0}, 0.0};
  const NormReport r = time_derivative_norms(s, FluidParams{}, 3, false);
  const SpectralField divu = divergence(extract_components(s.fields, kVelocity, g.dim));
  EXPECT_NEAR(r.at("rho_t_grad1_H1"), std::sqrt(sobolev_norm(divu, 1) * sobolev_norm(divu, 1) +
                                                   sobolev_norm(divu, 2) * sobolev_norm(divu, 2)),
              1e-12 * r.at("rho_t_grad1_H1"));
  const double rho_t = std::sqrt(std::pow(r.at("rho_t_grad0_H2"), 2) - std::pow(r.at("rho_t_grad1_H1"), 2));
  EXPECT_NEAR(rho_t, sobolev_norm(divu, 0), 1e-9 * rho_t);
}

TEST(EnergyFunctional, NoVelocityMeansNoCrossTerm) {
  const GridSpec g = grid2(16);
  SpectralField f = random_band_limited(g, 7, 4, 32);
  for (int c = kVelocity; c < kDirector; ++c)
    for (std::size_t p = 0; p < f.point_count(); ++p) f.at(c, p) = 0.0;
  const SpectralState s{f, {0.0, 0.0, 1.0}, 0.0};
  const EnergyFunctional F = energy_functional_F(s, 3, 1, 0.125);
  EXPECT_EQ(F.cross, 0.0);
  EXPECT_EQ(F.value, F.norm_sum);
}

TEST(EnergyFunctional, SingleModeCrossTerm) {
  // u1 = a sin x, rho = b cos x: int u . grad rho = -a b int sin^2 = -a b pi
  const GridSpec g = grid1(16);
  PerturbationState s = PerturbationState::zeros(g);
  const double a = 0.3, b = 0.7;
  for (std::size_t p = 0; p < s.rho_pert.point_count(); ++p) {
    const double x = s.rho_pert.coordinate(p, 0);
    s.velocity.at(0, p) = a * std::sin(x);
    s.rho_pert.at(0, p) = b * std::cos(x);
  }
  const EnergyFunctional F = energy_functional_F(to_spectral(s), 1, 0, 0.125);
  EXPECT_NEAR(F.cross, -a * b * std::numbers::pi, 1e-14);
  // norms: (a^2 + b^2) pi (1 + 1) + 0 for n
  EXPECT_NEAR(F.norm_sum, 2.0 * (a * a + b * b) * std::numbers::pi, 1e-13);
  EXPECT_NEAR(F.value, F.norm_sum - 0.125 * a * b * std::numbers::pi, 1e-13);
}

TEST(EnergyFunctional, EquivalenceForSmallCoupling) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GridSpec g = seed % 2 ? grid2(16) : grid3(8);
    const SpectralState s{random_band_limited(g, 7, 3, 100 + seed), {0.0, 0.0, 1.0}, 0.0};
    for (int m = 1; m <= 3; ++m)
      for (int l = 0; l < m; ++l) {
        for (const EnergyFunctional& F : {energy_functional_F(s, m, l, 0.125), energy_functional_E(s, m, l, 0.125)}) {
          EXPECT_TRUE(F.equivalent);
          EXPECT_LE(std::abs(F.value - F.norm_sum), 0.5 * F.norm_sum);
        }
      }
  }
}

TEST(EnergyFunctional, IndexViolationsRejected) {
  const SpectralState s = unit_state(grid1(8));
  EXPECT_THROW(energy_functional_F(s, 2, 2, 0.1), InputError);
  EXPECT_THROW(energy_functional_F(s, 2, -1, 0.1), InputError);
  EXPECT_THROW(energy_functional_E(s, 2, 0, 0.0), InputError);
}

TEST(FourierSplit, SingleShell) {
  const SpectralField f = single_mode(grid1(16), kRho, 1.0).fields;
  const SpectralField rho = extract_components(f, kRho, 1);
  // R/(1+t) = 1/4
  const double slack = fourier_split_slack(rho, 0, 0.5, 1.0);
  EXPECT_NEAR(slack, 13.0 / 16.0 * l2_norm_squared(rho), 1e-14);
}

TEST(FourierSplit, ShellInsideTimeSphere) {
  const SpectralField rho = extract_components(single_mode(grid1(16), kRho, 1.0).fields, kRho, 1);
  for (double R : {1.0, 2.0, 8.0, 100.0}) EXPECT_GE(fourier_split_slack(rho, 1, R, 0.0), 0.0);
}

TEST(FourierSplit, RandomFieldsNonnegative) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> logu(-3.0, 3.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SpectralField f = random_band_limited(grid2(16), 1, 5, 500 + seed);
    for (int k = 0; k <= 4; ++k) {
      const double R = std::pow(10.0, logu(rng));
      const double t = std::pow(10.0, logu(rng));
      const double scale = std::pow(sobolev_norm(f, k + 2, NormOrder::inhomogeneous), 2);
      EXPECT_GE(fourier_split_slack(f, k, R, t), -1e-12 * scale);
    }
  }
}

TEST(FourierSplit, RejectsZeroField) {
  EXPECT_THROW(fourier_split_slack(SpectralField(grid1(8), 1), 0, 1.0, 0.0), InputError);
}

TEST(GagliardoNirenberg, ThetaFromBalance) {
  EXPECT_DOUBLE_EQ(gn_theta(3, 1, 2.0, 0, 2), 0.5);
  EXPECT_DOUBLE_EQ(gn_theta(3, 0, 2.0, 0, 1), 0.0);
  EXPECT_DOUBLE_EQ(gn_theta(3, 0, kInf, 1, 2), 0.5);
  EXPECT_DOUBLE_EQ(gn_theta(3, 0, 6.0, 0, 1), 1.0);
}

TEST(GagliardoNirenberg, IdentityCase) {
  const RealField f = inverse_transform(random_band_limited(grid2(16), 1, 4, 41));
  const GnRatio r = gn_ratio(f, 0, 2.0, 0, 0);
  EXPECT_EQ(r.theta_gn, 0.0);
  EXPECT_NEAR(r.ratio, 1.0, 1e-14);
}

TEST(GagliardoNirenberg, AmplitudeInvariance) {
  const RealField f = inverse_transform(random_band_limited(grid3(16), 1, 4, 42));
  const double base = gn_ratio(f, 1, 2.0, 0, 2).ratio;
  for (double c : {-3.0, 1e-4, 250.0}) {
    RealField g = f;
    for (auto& v : g.data()) v *= c;
    EXPECT_NEAR(gn_ratio(g, 1, 2.0, 0, 2).ratio, base, 1e-12 * base);
  }
}

TEST(GagliardoNirenberg, InadmissibleTupleNamesTheta) {
  const RealField f = inverse_transform(random_band_limited(grid3(8), 1, 2, 43));
  try {
    gn_ratio(f, 0, 2.0, 1, 2);
    FAIL() << "expected rejection";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos) << e.what();
  }
  EXPECT_THROW(gn_ratio(f, 3, 2.0, 0, 2), InputError);
  EXPECT_THROW(gn_ratio(RealField(grid3(8), 1), 1, 2.0, 0, 2), InputError);
}

TEST(GagliardoNirenberg, EnsembleMaximumIsStable) {
  // max over 200 fields, recorded: 0.9528 (seeds 1000..1199)
  constexpr double kRecorded = 0.952791;
  for (std::uint64_t base : {1000u, 2000u}) {
    double mx = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i)
      mx = std::max(mx, gn_ratio(inverse_transform(random_band_limited(grid3(16), 1, 4, base + i)), 1, 2.0, 0, 2).ratio);
    EXPECT_NEAR(mx, kRecorded, 0.1 * kRecorded) << base;
    EXPECT_LE(mx, 1.0 + 1e-12);  // Cauchy-Schwarz
  }
}

TEST(CompositeBound, ChainRuleLimit) {
  for (double a : {1e-2, 1e-4, 1e-6}) {
    const RealField rho = sample(grid1(32), [&](auto x) { return a * std::sin(x[0]); });
    const CompositeBoundRatios c = composite_bound_ratio(rho, 1);
    EXPECT_NEAR(c.g, 1.0, 3.0 * a);
    EXPECT_NEAR(c.h, 1.0, 3.0 * a);
  }
}

TEST(CompositeBound, ZeroOverZero) {
  const CompositeBoundRatios c = composite_bound_ratio(RealField(grid1(8), 1), 2);
  EXPECT_EQ(c.h, 0.0);
  EXPECT_EQ(c.f, 0.0);
  EXPECT_EQ(c.g, 0.0);
}

TEST(CompositeBound, HypothesisEnforced) {
  const RealField rho = sample(grid1(16), [](auto x) { return 1.5 * std::sin(x[0]); });
  EXPECT_THROW(composite_bound_ratio(rho, 1), InputError);
  EXPECT_THROW(composite_bound_ratio(RealField(grid1(8), 1), 0), InputError);
}

TEST(CompositeBound, EnsembleAtHalfAmplitude) {
  // recorded maximum over 50 fields: 3.896
  constexpr double kRecorded = 3.895954;
  double mx = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    RealField r = inverse_transform(random_band_limited(grid2(32), 1, 4, 1000 + i));
    const double s = lp_norm(r, kInf);
    for (auto& v : r.data()) v *= 0.5 / s;
    const CompositeBoundRatios c = composite_bound_ratio(r, 2);
    mx = std::max({mx, c.h, c.f, c.g});
  }
  EXPECT_NEAR(mx, kRecorded, 0.2 * kRecorded);
}

TEST(DecayFit, ExactPowerLaw) {
  std::vector<double> t, v;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(std::pow(10.0, 1.0 + 3.0 * i / 40.0));
    v.push_back(std::pow(1.0 + t.back(), -2.0));
  }
  const DecayFit f = decay_fit(t, v, 10.0, 1e4, "x");
  EXPECT_NEAR(f.exponent, -2.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.samples, 41u);
}

TEST(DecayFit, GaussianHeatIntegral) {
  std::vector<double> t, v;
  for (int i = 0; i <= 60; ++i) {
    t.push_back(std::pow(10.0, 1.0 + 3.0 * i / 60.0));
    v.push_back(std::pow(std::numbers::pi, 1.5) * std::pow(2.0 * t.back() + 1.0, -1.5));
  }
  EXPECT_NEAR(decay_fit(t, v, 10.0, 1e4).exponent, -1.5, 0.01);
}

TEST(DecayFit, ConstantSeries) {
  std::vector<double> t, v;
  for (int i = 0; i < 10; ++i) {
    t.push_back(i + 1.0);
    v.push_back(3.0);
  }
  const DecayFit f = decay_fit(t, v, 0.0, 20.0);
  EXPECT_NEAR(f.exponent, 0.0, 1e-15);
}

TEST(DecayFit, Errors) {
  std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> v(9, 1.0);
  EXPECT_THROW(decay_fit(t, v, 5.0, 5.0), InputError);
  EXPECT_THROW(decay_fit(t, v, 1.0, 5.0), InputError);
  v[3] = 0.0;
  EXPECT_THROW(decay_fit(t, v, 0.0, 10.0), InputError);
}

TEST(SourceEstimate, RecordedConstantsPerScenario) {
  const std::vector<std::pair<std::string, double>> recorded = {
      {"gaussian-linear", 0.400711}, {"small-acoustic", 0.634573}, {"director-twist", 0.899593}, {"mixed-small", 0.179015}};
  for (const auto& [name, c] : recorded)
    for (std::uint64_t seed : {7u, 8u}) {
      const double r = source_estimate_ratio(cli::scenario_initial(name, grid2(64), 1e-3, seed), FluidParams{});
      EXPECT_NEAR(r, c, 0.2 * c) << name << " seed " << seed;
    }
  EXPECT_EQ(source_estimate_ratio(unit_state(grid2(8)), FluidParams{}), 0.0);
}

TEST(Monitors, DirectorShadow) {
  // exact heat decay a(t) = e^{-2t}, b = a: excess = (e^{-2dt} - 1)/dt + 1 < 0
  std::vector<double> t, a, u;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.1 * i);
    a.push_back(std::exp(-0.2 * i));
    u.push_back(0.0);
  }
  DirectorShadow s = director_energy_shadow(t, a, a, u, 0.1);
  EXPECT_TRUE(s.holds);
  EXPECT_EQ(s.empirical_constant, 0.0);
  // growing director with no velocity violates it
  std::vector<double> grow(a.rbegin(), a.rend());
  s = director_energy_shadow(t, grow, grow, u, 0.1);
  EXPECT_FALSE(s.holds);
}

TEST(Monitors, Nonincreasing) {
  EXPECT_TRUE(check_nonincreasing({3, 2, 2, 1}, 0, 0.0).nonincreasing);
  const MonotoneCheck m = check_nonincreasing({1, 5, 4, 4.4}, 1, 0.05);
  EXPECT_FALSE(m.nonincreasing);
  EXPECT_NEAR(m.worst_relative_increase, 0.1, 1e-12);
}
