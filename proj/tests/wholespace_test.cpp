#include "nlcl/wholespace.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace nlcl;

namespace {

const double kPi32 = std::pow(std::numbers::pi, 1.5);

WholespaceData director_gaussian() {
  WholespaceData d;
  d.director = RadialProfile::gaussian();
  return d;
}

WholespaceData acoustic_gaussian() {
  WholespaceData d;
  d.density = RadialProfile::gaussian();
  d.potential = RadialProfile::gaussian(0.7);
  return d;
}

/// Midpoint sum of 4 pi r^{2k+2} |component|^2 with the 2x2 (rho, psi) generator exponentiated directly.
double acoustic_riemann(const FluidParams& p, const WholespaceData& d, bool density, int k, double t) {
  const int n = 40000;
  const double rmax = 10.0;
  const double h = rmax / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * h;
    Eigen::Matrix2d M;
    M << 0.0, r * r, -1.0, -p.longitudinal() * r * r;
    const Eigen::Matrix2d E = (M * t).exp();
    const Eigen::Vector2d v = E * Eigen::Vector2d((*d.density)(r), (*d.potential)(r));
    const double sq = density ? v(0) * v(0) : r * r * v(1) * v(1);
    sum += std::pow(r, 2 * k + 2) * sq;
  }
  return 4.0 * std::numbers::pi * sum * h;
}

}  // namespace

TEST(Profiles, Values) {
  EXPECT_DOUBLE_EQ(RadialProfile::gaussian()(0.0), 1.0);
  EXPECT_DOUBLE_EQ(RadialProfile::gaussian(2.0, 2)(2.0), 4.0 * std::exp(-0.5));
  EXPECT_DOUBLE_EQ(RadialProfile::rational(1.0, 2.0)(1.0), 0.25);
  const RadialProfile tab = RadialProfile::table({0.0, 1.0, 2.0}, {1.0, 0.5, 0.0});
  EXPECT_DOUBLE_EQ(tab(0.5), 0.75);
  EXPECT_DOUBLE_EQ(tab(3.0), 0.0);
  EXPECT_THROW(RadialProfile::table({0.5, 1.0}, {1.0, 0.0}), InputError);
  EXPECT_THROW(RadialProfile::gaussian(-1.0), InputError);
  EXPECT_THROW(RadialProfile::rational(1.0, 0.0), InputError);
}

TEST(LinearSqNorm, HeatClosedForm) {
  for (double t : {0.0, 1.0, 10.0, 100.0, 1e3}) {
    const double v = linear_sq_norm(FluidParams{}, director_gaussian(), WholespaceComponent::n, 0, t);
    EXPECT_NEAR(v, kPi32 * std::pow(2.0 * t + 1.0, -1.5), 1e-8 * v) << t;
  }
}

TEST(LinearSqNorm, HeatFirstMomentRatio) {
  for (double t : {0.0, 0.5, 10.0, 300.0}) {
    const double v0 = linear_sq_norm(FluidParams{}, director_gaussian(), WholespaceComponent::n, 0, t);
    const double v1 = linear_sq_norm(FluidParams{}, director_gaussian(), WholespaceComponent::n, 1, t);
    EXPECT_NEAR(v1 / v0, 1.5 / (2.0 * t + 1.0), 1e-9 * v1 / v0) << t;
  }
}

TEST(LinearSqNorm, SolenoidalClosedForm) {
  WholespaceData d;
  d.solenoidal = RadialProfile::gaussian();
  const FluidParams p{0.5, 0.0};
  for (double t : {0.0, 2.0, 50.0}) {
    const double v = linear_sq_norm(p, d, WholespaceComponent::u_solenoidal, 0, t);
    EXPECT_NEAR(v, kPi32 * std::pow(2.0 * p.mu * t + 1.0, -1.5), 1e-8 * v) << t;
  }
}

TEST(LinearSqNorm, IdentityAtTimeZero) {
  const WholespaceData d = acoustic_gaussian();
  const FluidParams p{1.0, 0.3};
  for (int k = 0; k <= 2; ++k) {
    // rho: 4 pi int r^{2k+2} e^{-r^2} = pi^{3/2} Gamma(k + 3/2) / Gamma(3/2)
    const double rho_expected = kPi32 * std::tgamma(k + 1.5) / std::tgamma(1.5);
    EXPECT_NEAR(linear_sq_norm(p, d, WholespaceComponent::rho, k, 0.0), rho_expected, 1e-9 * rho_expected);
    // u: 4 pi int r^{2k+4} e^{-r^2/0.49}
    const double s = 0.49;
    const double u_expected = kPi32 * std::pow(s, k + 2.5) * std::tgamma(k + 2.5) / std::tgamma(1.5);
    EXPECT_NEAR(linear_sq_norm(p, d, WholespaceComponent::u_potential, k, 0.0), u_expected, 1e-9 * u_expected);
  }
}

TEST(LinearSqNorm, AcousticMatchesRiemannOracle) {
  const WholespaceData d = acoustic_gaussian();
  for (const FluidParams& p : {FluidParams{1.0, 0.0}, FluidParams{0.2, 1.5}}) {
    for (double t : {0.5, 3.0, 20.0}) {
      for (int k : {0, 1}) {
        const double rho = linear_sq_norm(p, d, WholespaceComponent::rho, k, t);
        const double u = linear_sq_norm(p, d, WholespaceComponent::u_potential, k, t);
        EXPECT_NEAR(rho, acoustic_riemann(p, d, true, k, t), 1e-6 * rho) << t;
        EXPECT_NEAR(u, acoustic_riemann(p, d, false, k, t), 1e-6 * u) << t;
      }
    }
  }
}

TEST(LinearSqNorm, HeatBlockMonotone) {
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t < 200.0; t = 1.7 * t + 0.1) {
    const double v = linear_sq_norm(FluidParams{}, director_gaussian(), WholespaceComponent::n, 2, t);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(LinearSqNorm, ToleranceHalvingIsStable) {
  const WholespaceData d = acoustic_gaussian();
  for (auto comp : {WholespaceComponent::rho, WholespaceComponent::u_potential, WholespaceComponent::n})
    for (double t : {1.0, 100.0, 1e4}) {
      WholespaceData dd = d;
      dd.director = RadialProfile::gaussian();
      const double a = linear_sq_norm(FluidParams{}, dd, comp, 1, t, 1e-9);
      const double b = linear_sq_norm(FluidParams{}, dd, comp, 1, t, 5e-10);
      EXPECT_NEAR(a, b, 1e-8 * a);
    }
}

TEST(LinearSqNorm, EmptyDataIsZero) {
  EXPECT_EQ(linear_sq_norm(FluidParams{}, WholespaceData{}, WholespaceComponent::rho, 0, 5.0), 0.0);
}

TEST(LinearSqNorm, DivergentMomentReportsTolerance) {
  WholespaceData d;
  d.director = RadialProfile::rational(1.0, 1.0);
  // 4 pi int r^2 / (1 + r^2)^2 dr = pi^2
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(linear_sq_norm(FluidParams{}, d, WholespaceComponent::n, 0, 0.0), pi2, 1e-8 * pi2);
  try {
    linear_sq_norm(FluidParams{}, d, WholespaceComponent::n, 1, 0.0);
    FAIL();
  } catch (const QuadratureError& e) {
    EXPECT_TRUE(std::isinf(e.achieved_tolerance()));
  }
  // the heat factor makes it finite for t > 0
  EXPECT_TRUE(std::isfinite(linear_sq_norm(FluidParams{}, d, WholespaceComponent::n, 1, 1.0)));
}

TEST(LinearSqNorm, TableProfileMatchesPiecewiseIntegral) {
  WholespaceData d;
  d.director = RadialProfile::table({0.0, 1.0}, {1.0, 0.0});
  // 4 pi int_0^1 r^2 (1 - r)^2 dr = 4 pi / 30
  EXPECT_NEAR(linear_sq_norm(FluidParams{}, d, WholespaceComponent::n, 0, 0.0), 4.0 * std::numbers::pi / 30.0, 1e-12);
}

TEST(DecayStudy, HeatExponentsAndAdditivity) {
  DecayStudyConfig cfg;
  cfg.data = director_gaussian();
  cfg.data.solenoidal = RadialProfile::gaussian();
  cfg.components = {WholespaceComponent::n, WholespaceComponent::u_solenoidal};
  const auto rows = decay_study(cfg);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.fit.exponent, r.expected, 0.02) << to_string(r.component) << " k=" << r.k;
    EXPECT_GT(r.fit.r_squared, 0.999);
  }
  for (std::size_t i = 0; i + 1 < 3; ++i) EXPECT_NEAR(rows[i + 1].fit.exponent - rows[i].fit.exponent, -1.0, 0.02);
}

TEST(DecayStudy, CoupledBlockLeadingOrder) {
  DecayStudyConfig cfg;
  cfg.data = acoustic_gaussian();
  cfg.components = {WholespaceComponent::rho, WholespaceComponent::u_potential};
  cfg.ks = {0};
  for (const auto& r : decay_study(cfg)) EXPECT_NEAR(r.fit.exponent, -1.5, 0.1) << to_string(r.component);
}

TEST(DecayStudy, VanishingLowFrequenciesDecayFaster) {
  DecayStudyConfig cfg;
  cfg.data.density = RadialProfile::gaussian(1.0, 2);
  cfg.components = {WholespaceComponent::rho};
  cfg.ks = {0};
  const auto rows = decay_study(cfg);
  EXPECT_LT(rows[0].fit.exponent, -1.5 - 0.5);
}

TEST(DecayStudy, IndependentOfWorkerCount) {
  DecayStudyConfig cfg;
  cfg.data = acoustic_gaussian();
  cfg.components = {WholespaceComponent::rho};
  cfg.ks = {0};
  cfg.t_max = 1e3;
  cfg.fit_hi = 1e3;
  cfg.workers = 1;
  const auto a = decay_study(cfg);
  cfg.workers = 3;
  const auto b = decay_study(cfg);
  EXPECT_EQ(a[0].values, b[0].values);
  EXPECT_EQ(a[0].fit.exponent, b[0].fit.exponent);
}

TEST(DecayStudy, ConfigValidation) {
  DecayStudyConfig cfg;
  cfg.t_min = 0.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.points_per_decade = 10;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  EXPECT_EQ(cfg.time_grid().size(), 81u);
  EXPECT_DOUBLE_EQ(cfg.time_grid().back(), 1e4);
}

TEST(DecayStudy, WorkerCountFromEnvironment) {
  ::setenv("NLCL_WORKERS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  EXPECT_EQ(worker_count(5), 5u);
  ::setenv("NLCL_WORKERS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  ::unsetenv("NLCL_WORKERS");
}
