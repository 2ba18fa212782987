#pragma once

// Right-hand side of the perturbation system
//
//   rho_t + div u = S1,
//   u_t - mu Delta u - (mu + nu) grad div u + grad rho = S2,
//   n_t - Delta n = S3,
//
// with
//   S1 = -rho div u - u.grad rho,
//   S2 = -u.grad u - h(rho)[mu Delta u + (mu+nu) grad div u] - f(rho) grad rho - g(rho) grad n . Delta n,
//   S3 = -u.grad n + |grad n|^2 (n + w0),
//   h = rho/(rho+1),  f = P'(rho+1)/(rho+1) - 1,  g = 1/(rho+1).
//
// (grad n . Delta n)_i = sum_j d_i n_j Delta n_j. Derivatives are spectral,
// products are formed pointwise and the result is truncated by the 2/3-rule.

#include "nlcl/params.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace nlcl {

inline double coefficient_h(double rho) { return rho / (rho + 1.0); }
inline double coefficient_g(double rho) { return 1.0 / (rho + 1.0); }
inline double coefficient_f(double rho, const PressureLaw& law) {
  return law.derivative(rho + 1.0) / (rho + 1.0) - 1.0;
}

/// Constant C_P with |f(rho)| <= C_P |rho| whenever |rho| <= 1/2 (mean-value bound).
inline double pressure_coefficient_bound(const PressureLaw& law) {
  if (law.kind == PressureLaw::Kind::linear) return 2.0;  // |f| = |rho|/(1+rho) <= 2|rho|
  // f(r) = (1+r)^{gamma-2} - 1, f'(r) = (gamma-2)(1+r)^{gamma-3}.
  const double e = law.gamma - 3.0;
  return std::abs(law.gamma - 2.0) * std::max(std::pow(0.5, e), std::pow(1.5, e));
}

struct CoefficientFields {
  RealField h_field;
  RealField f_field;
  RealField g_field;
};

namespace detail {

[[noreturn]] inline void throw_nonpositive_density(const RealField& rho, std::size_t p) {
  std::ostringstream os;
  os << "nonpositive density rho = " << rho.at(0, p) + 1.0 << " at grid point " << p << " (x = (";
  for (int d = 0; d < rho.grid().dim; ++d) os << (d ? ", " : "") << rho.coordinate(p, d);
  os << "))";
  throw InputError(os.str());
}

}  // namespace detail

inline CoefficientFields coefficients(const RealField& rho_pert, const PressureLaw& law = {}) {
  CoefficientFields out{RealField(rho_pert.grid(), 1), RealField(rho_pert.grid(), 1),
                        RealField(rho_pert.grid(), 1)};
  for (std::size_t p = 0; p < rho_pert.point_count(); ++p) {
    const double r = rho_pert.at(0, p);
    if (!(r + 1.0 > 0.0)) detail::throw_nonpositive_density(rho_pert, p);
    out.h_field.at(0, p) = coefficient_h(r);
    out.f_field.at(0, p) = coefficient_f(r, law);
    out.g_field.at(0, p) = coefficient_g(r);
  }
  return out;
}

/// Linear part L U of the tendency, mode by mode (same wavevectors as the propagator).
inline SpectralField linear_tendency(const SpectralField& u, const FluidParams& params) {
  if (u.components() != 7) throw InputError("linear_tendency: expected a 7-component state");
  const auto table = wave_table(u.grid());
  SpectralField out(u.grid(), 7);
  const complex I(0.0, 1.0);
  for (std::size_t p = 0; p < u.point_count(); ++p) {
    const auto& xi = table->derivative_xi(p);
    const double k2 = table->derivative_k2(p);
    const complex rho = u.at(kRho, p);
    complex xu{0.0, 0.0};
    for (int j = 0; j < 3; ++j) xu += xi[static_cast<std::size_t>(j)] * u.at(kVelocity + j, p);
    out.at(kRho, p) = -I * xu;
    for (int j = 0; j < 3; ++j) {
      const double x = xi[static_cast<std::size_t>(j)];
      out.at(kVelocity + j, p) =
          -I * x * rho - params.mu * k2 * u.at(kVelocity + j, p) - (params.mu + params.nu) * x * xu;
      out.at(kDirector + j, p) = -k2 * u.at(kDirector + j, p);
    }
  }
  return out;
}

/// Nonlinear sources (S1, S2, S3) as a dealiased 7-component spectral field.
inline SpectralField nonlinear_sources(const SpectralState& state, const FluidParams& params) {
  const SpectralField& U = state.fields;
  if (U.components() != 7) throw InputError("nonlinear_sources: expected a 7-component state");
  const GridSpec& g = U.grid();
  const int dim = g.dim;
  const auto table = wave_table(g);
  const std::size_t np = U.point_count();

  // Layout of the physical quantities we need.
  const int iRho = 0, iU = 1, iN = 4;
  const int iGradRho = 7;
  const int iGradU = iGradRho + dim;      // 3 x dim, (comp, axis)
  const int iGradN = iGradU + 3 * dim;    // 3 x dim
  const int iLapN = iGradN + 3 * dim;     // 3
  const int iVisc = iLapN + 3;            // 3
  const int iDivU = iVisc + 3;            // 1
  const int total = iDivU + 1;

  SpectralField work(g, total);
  const complex I(0.0, 1.0);
  for (std::size_t p = 0; p < np; ++p) {
    const auto& xi = table->derivative_xi(p);
    const double k2 = table->derivative_k2(p);
    for (int c = 0; c < 7; ++c) work.at(c, p) = U.at(c, p);
    complex xu{0.0, 0.0};
    for (int j = 0; j < 3; ++j) xu += xi[static_cast<std::size_t>(j)] * U.at(kVelocity + j, p);
    for (int a = 0; a < dim; ++a) {
      const complex ik = I * xi[static_cast<std::size_t>(a)];
      work.at(iGradRho + a, p) = ik * U.at(kRho, p);
      for (int c = 0; c < 3; ++c) {
        work.at(iGradU + c * dim + a, p) = ik * U.at(kVelocity + c, p);
        work.at(iGradN + c * dim + a, p) = ik * U.at(kDirector + c, p);
      }
    }
    for (int c = 0; c < 3; ++c) {
      work.at(iLapN + c, p) = -k2 * U.at(kDirector + c, p);
      work.at(iVisc + c, p) =
          -params.mu * k2 * U.at(kVelocity + c, p) - (params.mu + params.nu) * xi[static_cast<std::size_t>(c)] * xu;
    }
    work.at(iDivU, p) = I * xu;
  }
  const RealField f = inverse_transform(work);

  RealField src(g, 7);
  const Vec3& w0 = state.w0;
  for (std::size_t p = 0; p < np; ++p) {
    const double rho = f.at(iRho, p);
    if (!(rho + 1.0 > 0.0)) detail::throw_nonpositive_density(inverse_transform(extract_components(U, kRho, 1)), p);
    const double h = coefficient_h(rho);
    const double fc = coefficient_f(rho, params.pressure);
    const double gc = coefficient_g(rho);
    const double divu = f.at(iDivU, p);

    double u_grad_rho = 0.0;
    for (int a = 0; a < dim; ++a) u_grad_rho += f.at(iU + a, p) * f.at(iGradRho + a, p);
    src.at(0, p) = -rho * divu - u_grad_rho;

    double grad_n_sq = 0.0;
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < dim; ++a) grad_n_sq += f.at(iGradN + c * dim + a, p) * f.at(iGradN + c * dim + a, p);

    for (int i = 0; i < 3; ++i) {
      double adv_u = 0.0;
      double adv_n = 0.0;
      for (int a = 0; a < dim; ++a) {
        adv_u += f.at(iU + a, p) * f.at(iGradU + i * dim + a, p);
        adv_n += f.at(iU + a, p) * f.at(iGradN + i * dim + a, p);
      }
      double elastic = 0.0;
      double grad_rho_i = 0.0;
      if (i < dim) {
        grad_rho_i = f.at(iGradRho + i, p);
        for (int j = 0; j < 3; ++j) elastic += f.at(iGradN + j * dim + i, p) * f.at(iLapN + j, p);
      }
      src.at(1 + i, p) = -adv_u - h * f.at(iVisc + i, p) - fc * grad_rho_i - gc * elastic;
      src.at(4 + i, p) = -adv_n + grad_n_sq * (f.at(iN + i, p) + w0[static_cast<std::size_t>(i)]);
    }
  }
  return dealias(forward_transform(src));
}

/// Full tendency L U + S(U) (or L U alone when `nonlinear` is false).
inline SpectralField full_tendency(const SpectralState& state, const FluidParams& params, bool nonlinear = true) {
  SpectralField out = linear_tendency(state.fields, params);
  if (nonlinear) out += nonlinear_sources(state, params);
  return out;
}

struct Tendency {
  RealField rho_t;
  RealField u_t;
  RealField n_t;
};

inline Tendency full_tendency(const PerturbationState& state, const FluidParams& params, bool nonlinear = true) {
  const SpectralField t = full_tendency(to_spectral(state), params, nonlinear);
  return {inverse_transform(extract_components(t, kRho, 1)), inverse_transform(extract_components(t, kVelocity, 3)),
          inverse_transform(extract_components(t, kDirector, 3))};
}

inline RealField source_S1(const PerturbationState& state, const FluidParams& params = {}) {
  return inverse_transform(extract_components(nonlinear_sources(to_spectral(state), params), kRho, 1));
}

inline RealField source_S2(const PerturbationState& state, const FluidParams& params) {
  return inverse_transform(extract_components(nonlinear_sources(to_spectral(state), params), kVelocity, 3));
}

inline RealField source_S3(const PerturbationState& state, const FluidParams& params = {}) {
  return inverse_transform(extract_components(nonlinear_sources(to_spectral(state), params), kDirector, 3));
}

struct RenormalizedDirector {
  PerturbationState state;
  double drift = 0.0;  ///< max | |n + w0| - 1 | before normalization
};

/// Projects d = n + w0 back onto the unit sphere pointwise.
inline RenormalizedDirector renormalize_director(const PerturbationState& state) {
  RenormalizedDirector out{state, 0.0};
  RealField& n = out.state.director_pert;
  for (std::size_t p = 0; p < n.point_count(); ++p) {
    Vec3 d{};
    double s = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      d[c] = n.at(static_cast<int>(c), p) + state.w0[c];
      s += d[c] * d[c];
    }
    const double len = std::sqrt(s);
    if (!(len > 0.0)) {
      std::ostringstream os;
      os << "renormalize_director: vanishing director at grid point " << p;
      throw InputError(os.str());
    }
    out.drift = std::max(out.drift, std::abs(len - 1.0));
    if (len == 1.0) continue;
    for (std::size_t c = 0; c < 3; ++c) n.at(static_cast<int>(c), p) = d[c] / len - state.w0[c];
  }
  return out;
}

}  // namespace nlcl
