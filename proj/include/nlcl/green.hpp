#pragma once

// Exact Fourier multiplier of the linearized system
//
//   rho_t + div u = 0,
//   u_t - mu Delta u - (mu + nu) grad div u + grad rho = 0,
//   n_t - Delta n = 0.
//
// Per wavevector the generator splits into an acoustic 2x2 block acting on
// (rho, longitudinal u), a transverse viscous block with eigenvalue -mu|xi|^2
// and a heat block with eigenvalue -|xi|^2. Any scalar function F of the
// generator is then determined by F at the eigenvalues and by the divided
// difference F[lambda+, lambda-] (Newton form based at lambda-):
//
//   rho-rho      a = F(l-) - l- F[l+,l-]
//   rho-u, u-rho  -i xi b,  b = F[l+,l-]
//   u-u          c xi xi^T/|xi|^2 + d (I - xi xi^T/|xi|^2),
//                c = F(l-) + l+ F[l+,l-],  d = F(l0)
//   n-n          e I,  e = F(l1)
//
// With F = exp(t .) this reproduces the Green matrix entry by entry; the same
// machinery yields the exponential-integrator weights.

#include "nlcl/params.hpp"
#include "nlcl/phi_functions.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/state.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace nlcl {

struct SpectralEigen {
  complex lambda0;       ///< -mu |xi|^2 (transverse velocity)
  complex lambda1;       ///< -|xi|^2 (director)
  complex lambda_plus;   ///< acoustic root with the larger real part
  complex lambda_minus;  ///< the other acoustic root
};

/// Eigenvalues of the linear generator at |xi|^2 = k2. The acoustic pair
/// solves lambda^2 + (2mu+nu) k2 lambda + k2 = 0.
inline SpectralEigen eigenvalues(const FluidParams& params, double k2) {
  if (!(k2 >= 0.0)) throw InputError("eigenvalues: |xi|^2 must be nonnegative");
  SpectralEigen e{};
  e.lambda0 = -params.mu * k2;
  e.lambda1 = -k2;
  if (k2 == 0.0) return e;
  const double b = params.longitudinal() * k2;
  const double disc = b * b - 4.0 * k2;
  if (disc >= 0.0) {
    // Real roots; the larger-magnitude one first, the other from the product.
    const double q = -0.5 * (b + std::sqrt(disc));
    e.lambda_minus = q;
    e.lambda_plus = k2 / q;
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    e.lambda_plus = complex(-0.5 * b, im);
    e.lambda_minus = complex(-0.5 * b, -im);
  }
  return e;
}

struct PairFunctions {
  complex A;  ///< (l+ e^{l- t} - l- e^{l+ t}) / (l+ - l-)
  complex B;  ///< (e^{l+ t} - e^{l- t}) / (l+ - l-)
};

/// Acoustic-block scalars of the Green matrix, continuous across l+ = l-.
inline PairFunctions pair_functions(complex lp, complex lm, double t) {
  if (!(t >= 0.0)) throw InputError("pair_functions: t must be >= 0");
  const PhiFunction F{0, t, 0};
  const complex B = F.divided_difference(lp, lm);
  return {F.value(lm) - lm * B, B};
}

/// Scalars a..e described at the top of this header.
struct BlockCoefficients {
  double rho_rho = 1.0;
  double coupling = 0.0;
  double longitudinal = 1.0;
  double transverse = 1.0;
  double director = 1.0;
};

/// Block coefficients of F(generator). F must satisfy F(conj z) = conj F(z);
/// the coefficients are then real.
template <typename ScalarFunction>
BlockCoefficients block_coefficients(const SpectralEigen& eig, const ScalarFunction& F) {
  const complex dd = F.divided_difference(eig.lambda_plus, eig.lambda_minus);
  const complex fm = F.value(eig.lambda_minus);
  BlockCoefficients c;
  c.rho_rho = (fm - eig.lambda_minus * dd).real();
  c.coupling = dd.real();
  c.longitudinal = (fm + eig.lambda_plus * dd).real();
  c.transverse = F.value(eig.lambda0).real();
  c.director = F.value(eig.lambda1).real();
  return c;
}

/// Applies the block operator to one mode's 7-vector (rho, u1..u3, n1..n3) in place.
inline void apply_block(const BlockCoefficients& c, const std::array<double, 3>& xi, double k2,
                        std::span<complex, 7> v) {
  const complex rho = v[0];
  const complex xu = xi[0] * v[1] + xi[1] * v[2] + xi[2] * v[3];
  const complex minus_i_b(0.0, -c.coupling);
  v[0] = c.rho_rho * rho + minus_i_b * xu;
  if (k2 > 0.0) {
    const complex par = xu / k2;
    for (std::size_t j = 0; j < 3; ++j) {
      const complex u_par = xi[j] * par;
      v[1 + j] = minus_i_b * xi[j] * rho + c.longitudinal * u_par + c.transverse * (v[1 + j] - u_par);
    }
  } else {
    for (std::size_t j = 0; j < 3; ++j) v[1 + j] *= c.transverse;
  }
  for (std::size_t j = 4; j < 7; ++j) v[j] *= c.director;
}

using GreenMatrix = Eigen::Matrix<complex, 7, 7>;

/// Dense 7x7 form of a block operator.
inline GreenMatrix block_matrix(const BlockCoefficients& c, const std::array<double, 3>& xi, double k2) {
  GreenMatrix g = GreenMatrix::Zero();
  const complex minus_i_b(0.0, -c.coupling);
  g(0, 0) = c.rho_rho;
  for (int i = 0; i < 3; ++i) {
    g(0, 1 + i) = minus_i_b * xi[static_cast<std::size_t>(i)];
    g(1 + i, 0) = minus_i_b * xi[static_cast<std::size_t>(i)];
    for (int j = 0; j < 3; ++j) {
      const double proj = k2 > 0.0 ? xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(j)] / k2 : 0.0;
      const double id = (i == j) ? 1.0 : 0.0;
      g(1 + i, 1 + j) = k2 > 0.0 ? c.longitudinal * proj + c.transverse * (id - proj) : c.transverse * id;
    }
    g(4 + i, 4 + i) = c.director;
  }
  return g;
}

/// Green matrix G^(xi, t). At xi = 0 it is the identity.
inline GreenMatrix green_matrix(const FluidParams& params, const WaveVector& xi, double t) {
  if (!(t >= 0.0)) throw InputError("green_matrix: t must be >= 0");
  const double k2 = xi.xi[0] * xi.xi[0] + xi.xi[1] * xi.xi[1] + xi.xi[2] * xi.xi[2];
  return block_matrix(block_coefficients(eigenvalues(params, k2), PhiFunction{0, t, 0}), xi.xi, k2);
}

/// Generator L(xi) of the linear system in the same 7x7 layout.
inline GreenMatrix linear_generator(const FluidParams& params, const std::array<double, 3>& xi) {
  GreenMatrix g = GreenMatrix::Zero();
  const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    g(0, 1 + i) = complex(0.0, -xi[ii]);
    g(1 + i, 0) = complex(0.0, -xi[ii]);
    for (int j = 0; j < 3; ++j)
      g(1 + i, 1 + j) = -(params.mu + params.nu) * xi[ii] * xi[static_cast<std::size_t>(j)] -
                        (i == j ? params.mu * k2 : 0.0);
    g(4 + i, 4 + i) = -k2;
  }
  return g;
}

/// Per-mode coefficients of F(generator) on a torus grid, using the
/// derivative wavevectors. Rebuilt only when the function changes.
class ModeOperator {
public:
  ModeOperator() = default;

  template <typename ScalarFunction>
  ModeOperator(const GridSpec& grid, const FluidParams& params, const ScalarFunction& F)
      : table_(wave_table(grid)) {
    coeffs_.resize(table_->size());
    // Modes sharing |xi|^2 share coefficients.
    std::map<double, BlockCoefficients> memo;
    for (std::size_t p = 0; p < table_->size(); ++p) {
      const double k2 = table_->derivative_k2(p);
      auto it = memo.find(k2);
      if (it == memo.end()) it = memo.emplace(k2, block_coefficients(eigenvalues(params, k2), F)).first;
      coeffs_[p] = it->second;
    }
  }

  /// Applies the operator to a 7-component spectral field in place.
  void apply(SpectralField& f) const {
    if (f.components() != 7) throw InputError("ModeOperator: expected a 7-component state");
    require_same_grid(f.grid(), table_->grid(), "ModeOperator::apply");
    const std::size_t n = f.point_count();
    std::array<complex, 7> v;
    for (std::size_t p = 0; p < n; ++p) {
      for (int c = 0; c < 7; ++c) v[static_cast<std::size_t>(c)] = f.at(c, p);
      apply_block(coeffs_[p], table_->derivative_xi(p), table_->derivative_k2(p), v);
      for (int c = 0; c < 7; ++c) f.at(c, p) = v[static_cast<std::size_t>(c)];
    }
  }

  const BlockCoefficients& coefficients(std::size_t p) const { return coeffs_[p]; }

private:
  std::shared_ptr<const WaveTable> table_;
  std::vector<BlockCoefficients> coeffs_;
};

/// Exact linear evolution over time t of a spectral state.
inline SpectralState apply_propagator(const SpectralState& state, const FluidParams& params, double t) {
  if (!(t >= 0.0)) throw InputError("apply_propagator: t must be >= 0");
  SpectralState out = state;
  ModeOperator(state.fields.grid(), params, PhiFunction{0, t, 0}).apply(out.fields);
  out.time = state.time + t;
  return out;
}

}  // namespace nlcl
