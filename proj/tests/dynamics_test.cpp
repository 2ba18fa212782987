#include "nlcl/dynamics.hpp"
#include "nlcl/green.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace nlcl;
using namespace nlcl::testing;

namespace {

PerturbationState state1d(int n) { return PerturbationState::zeros(grid1(n)); }

template <typename F>
void fill(RealField& f, int c, F&& fn) {
  for (std::size_t p = 0; p < f.point_count(); ++p) f.at(c, p) = fn(f.coordinate(p, 0));
}

double max_err(const RealField& f, int c, const std::function<double(double)>& expect) {
  double e = 0.0;
  for (std::size_t p = 0; p < f.point_count(); ++p) e = std::max(e, std::abs(f.at(c, p) - expect(f.coordinate(p, 0))));
  return e;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(Coefficients, PointValues) {
  EXPECT_EQ(coefficient_h(0.0), 0.0);
  EXPECT_EQ(coefficient_f(0.0, PressureLaw{}), 0.0);
  EXPECT_EQ(coefficient_g(0.0), 1.0);
  EXPECT_EQ(coefficient_h(1.0), 0.5);
  EXPECT_EQ(coefficient_g(1.0), 0.5);
  EXPECT_EQ(coefficient_f(1.0, PressureLaw{}), -0.5);
  EXPECT_EQ(coefficient_g(-0.5), 2.0);
  EXPECT_EQ(coefficient_h(-0.5), -1.0);
  // gamma-law with P'(1) = 1: f(0) = 0
  EXPECT_NEAR(coefficient_f(0.0, PressureLaw::gamma_law(1.4)), 0.0, 1e-16);
}

TEST(Coefficients, LinearPressureGivesFEqualMinusH) {
  const RealField rho = sample(grid1(32), [](auto x) { return 0.4 * std::sin(x[0]); });
  const CoefficientFields c = coefficients(rho);
  for (std::size_t p = 0; p < rho.point_count(); ++p) EXPECT_NEAR(c.f_field.at(0, p), -c.h_field.at(0, p), 4e-16);
}

TEST(Coefficients, BoundsOnSmallDensityRegime) {
  for (const PressureLaw law : {PressureLaw{}, PressureLaw::gamma_law(1.4), PressureLaw::gamma_law(3.5)}) {
    const RealField rho = sample(grid1(256), [](auto x) { return 0.5 * std::sin(x[0]); });
    const CoefficientFields c = coefficients(rho, law);
    const double sup = lp_norm(rho, kInf);
    EXPECT_LE(lp_norm(c.h_field, kInf), 2.0 * sup);
    EXPECT_LE(lp_norm(c.g_field, kInf), 2.0);
    const double cp = pressure_coefficient_bound(law);
    for (std::size_t p = 0; p < rho.point_count(); ++p)
      EXPECT_LE(std::abs(c.f_field.at(0, p)), cp * std::abs(rho.at(0, p)) + 1e-15);
  }
}

TEST(Coefficients, NonpositiveDensityNamesLocation) {
  RealField rho(grid1(8), 1);
  rho.at(0, 5) = -1.0;
  try {
    coefficients(rho);
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("grid point 5"), std::string::npos) << e.what();
  }
}

TEST(SourceS1, VanishesWithoutVelocity) {
  PerturbationState s = state1d(16);
  fill(s.rho_pert, 0, [](double x) { return 0.1 * std::cos(x); });
  EXPECT_LT(lp_norm(source_S1(s), kInf), 1e-16);
}

TEST(SourceS1, ConstantDensityTimesDivergence) {
  PerturbationState s = state1d(16);
  const double c = 0.3;
  fill(s.rho_pert, 0, [&](double) { return c; });
  fill(s.velocity, 0, [](double x) { return std::sin(x); });
  EXPECT_LT(max_err(source_S1(s), 0, [&](double x) { return -c * std::cos(x); }), 1e-14);
}

TEST(SourceS1, PureTransport) {
  PerturbationState s = state1d(16);
  fill(s.rho_pert, 0, [](double x) { return std::sin(x); });
  fill(s.velocity, 0, [](double) { return 1.0; });
  EXPECT_LT(max_err(source_S1(s), 0, [](double x) { return -std::cos(x); }), 1e-14);
}

TEST(SourceS2, EquilibriumIsZero) {
  EXPECT_EQ(lp_norm(source_S2(state1d(8), FluidParams{}), kInf), 0.0);
}

TEST(SourceS2, ViscousAndAdvectiveTerms) {
  const FluidParams p{0.7, 0.2};
  PerturbationState s = state1d(32);
  const double c = 0.25;
  fill(s.rho_pert, 0, [&](double) { return c; });
  fill(s.velocity, 0, [](double x) { return std::sin(x); });
  const RealField S2 = source_S2(s, p);
  const double hc = coefficient_h(c);
  EXPECT_LT(max_err(S2, 0, [&](double x) { return -std::sin(x) * std::cos(x) + hc * p.longitudinal() * std::sin(x); }),
            1e-13);
  EXPECT_LT(max_err(S2, 1, [](double) { return 0.0; }), 1e-15);
  EXPECT_LT(max_err(S2, 2, [](double) { return 0.0; }), 1e-15);
}

TEST(SourceS2, ElasticStress) {
  PerturbationState s = state1d(16);
  const double eps = 0.01;
  fill(s.director_pert, 0, [&](double x) { return eps * std::sin(x); });
  const RealField S2 = source_S2(s, FluidParams{});
  EXPECT_LT(max_err(S2, 0, [&](double x) { return eps * eps * std::sin(x) * std::cos(x); }), 1e-17);
}

TEST(SourceS3, ConstantDirectorGivesZero) {
  PerturbationState s = state1d(16);
  fill(s.director_pert, 1, [](double) { return 0.2; });
  fill(s.velocity, 0, [](double x) { return std::cos(x); });
  EXPECT_LT(lp_norm(source_S3(s), kInf), 1e-16);
}

TEST(SourceS3, HarmonicMapTerm) {
  PerturbationState s = state1d(16);
  const double eps = 0.05;
  fill(s.director_pert, 0, [&](double x) { return eps * std::sin(x); });
  const RealField S3 = source_S3(s);
  auto c2 = [&](double x) { return eps * eps * std::cos(x) * std::cos(x); };
  EXPECT_LT(max_err(S3, 0, [&](double x) { return c2(x) * eps * std::sin(x); }), 1e-16);
  EXPECT_LT(max_err(S3, 1, [](double) { return 0.0; }), 1e-18);
  EXPECT_LT(max_err(S3, 2, [&](double x) { return c2(x); }), 1e-16);
}

TEST(SourceS3, TransportAtFirstOrder) {
  PerturbationState s = state1d(16);
  const double eps = 1e-4;
  fill(s.velocity, 0, [](double) { return 1.0; });
  fill(s.director_pert, 0, [&](double x) { return eps * std::sin(x); });
  EXPECT_LT(max_err(source_S3(s), 0, [&](double x) { return -eps * std::cos(x); }), 2.0 * eps * eps);
}

TEST(Sources, VanishAtEquilibriumIn3D) {
  const PerturbationState s = PerturbationState::zeros(grid3(8));
  const SpectralField S = nonlinear_sources(to_spectral(s), FluidParams{});
  EXPECT_EQ(max_abs(S), 0.0);
}

TEST(Sources, S1IsQuadratic) {
  const GridSpec g = grid2(16);
  SpectralState base{random_band_limited(g, 7, 4, 17), {0.0, 0.0, 1.0}, 0.0};
  std::vector<double> ratios;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    SpectralState s = base;
    s.fields *= eps * 0.05;
    const SpectralField S = nonlinear_sources(s, FluidParams{});
    ratios.push_back(std::sqrt(l2_norm_squared(extract_components(S, kRho, 1))) / (eps * eps));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LT((*hi - *lo) / *hi, 0.1);
}

TEST(Sources, RealFieldsStayReal) {
  const GridSpec g = grid2(16);
  SpectralState s{random_band_limited(g, 7, 5, 18, 0.01), {0.0, 0.6, 0.8}, 0.0};
  EXPECT_LT(conjugate_symmetry_defect(nonlinear_sources(s, FluidParams{})), 1e-18);
}

TEST(Tendency, EquilibriumIsZero) {
  const Tendency t = full_tendency(PerturbationState::zeros(grid2(8)), FluidParams{});
  EXPECT_EQ(lp_norm(t.rho_t, kInf) + lp_norm(t.u_t, kInf) + lp_norm(t.n_t, kInf), 0.0);
}

TEST(Tendency, LinearPartIsPropagatorDerivative) {
  const GridSpec g = grid2(16);
  const FluidParams p{0.9, 0.3};
  SpectralState s{random_band_limited(g, 7, 2, 19), {0.0, 0.0, 1.0}, 0.0};
  const SpectralField lin = full_tendency(s, p, false);
  // fourth-order one-sided difference of the semigroup at t = 0
  const double h = 2.5e-4;
  const double w[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
  SpectralField fd(g, 7);
  for (int j = 0; j < 5; ++j) {
    SpectralField term = apply_propagator(s, p, j * h).fields;
    term *= w[j] / (12.0 * h);
    fd += term;
  }
  EXPECT_LT(max_abs_diff(fd, lin), 1e-8 * max_abs(lin));
}

TEST(Tendency, HeatFlowLimitForDirector) {
  PerturbationState s = state1d(16);
  const double eps = 1e-6;
  fill(s.director_pert, 1, [&](double x) { return eps * std::cos(2.0 * x); });
  const Tendency t = full_tendency(s, FluidParams{});
  EXPECT_LT(max_err(t.n_t, 1, [&](double x) { return -4.0 * eps * std::cos(2.0 * x); }), 1e-10 * eps);
}

TEST(Renormalize, UnitDirectorUnchanged) {
  PerturbationState s = PerturbationState::zeros(grid1(8));
  fill(s.director_pert, 0, [](double x) { return std::sin(0.3 * std::cos(x)); });
  fill(s.director_pert, 2, [](double x) { return std::cos(0.3 * std::cos(x)) - 1.0; });
  const RenormalizedDirector r = renormalize_director(s);
  EXPECT_LT(r.drift, 1e-15);
  EXPECT_LT(max_abs_diff(r.state.director_pert, s.director_pert), 4e-16);
}

TEST(Renormalize, ReportsSinglePointDrift) {
  PerturbationState s = PerturbationState::zeros(grid1(8));
  s.director_pert.at(2, 3) = 0.001;
  const RenormalizedDirector r = renormalize_director(s);
  EXPECT_NEAR(r.drift, 1e-3, 1e-15);
  EXPECT_NEAR(r.state.director_pert.at(2, 3), 0.0, 1e-16);
}

TEST(Renormalize, RandomFieldEndsOnSphere) {
  PerturbationState s = PerturbationState::zeros(grid2(16));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (auto& v : s.director_pert.data()) v = u(rng);
  const RenormalizedDirector r = renormalize_director(s);
  EXPECT_GT(r.drift, 0.01);
  EXPECT_LT(director_drift(r.state.director_pert, s.w0), 4e-16);
}

TEST(Renormalize, VanishingDirectorRejected) {
  PerturbationState s = PerturbationState::zeros(grid1(8));
  s.director_pert.at(2, 0) = -1.0;
  EXPECT_THROW(renormalize_director(s), InputError);
}
