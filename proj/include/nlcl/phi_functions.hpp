#pragma once

// Scalar phi-functions phi_k(z) = sum_{j>=0} z^j / (j+k)!  (phi_0 = exp) and
// their degenerate-safe divided differences. These feed both the exact
// Green matrix and the exponential-integrator weights.

#include <array>
#include <cmath>
#include <complex>

namespace nlcl {

/// Below this separation |z1 - z2| divided differences switch to a midpoint
/// Taylor expansion.
inline constexpr double kDegenerateThreshold = 1e-4;

namespace detail {

inline constexpr std::array<double, 12> kInverseFactorial = {
    1.0, 1.0, 1.0 / 2, 1.0 / 6, 1.0 / 24, 1.0 / 120, 1.0 / 720, 1.0 / 5040,
    1.0 / 40320, 1.0 / 362880, 1.0 / 3628800, 1.0 / 39916800};

}  // namespace detail

/// phi_k(z) for 0 <= k <= 10.
inline std::complex<double> phi(int k, std::complex<double> z) {
  if (k == 0) return std::exp(z);
  if (std::abs(z) < 1.0) {
    // Horner on the series; 30 terms reach machine precision for |z| < 1.
    std::complex<double> acc{0.0, 0.0};
    for (int j = 30; j >= 0; --j) {
      double coeff = 1.0;
      for (int i = 1; i <= j + k; ++i) coeff /= i;
      acc = acc * z + coeff;
    }
    return acc;
  }
  std::complex<double> p = std::exp(z);
  for (int j = 1; j <= k; ++j) p = (p - detail::kInverseFactorial[static_cast<std::size_t>(j - 1)]) / z;
  return p;
}

/// n-th derivative of phi_k, from phi_k' = phi_k - k phi_{k+1}:
///   phi_k^{(n)} = sum_j C(n,j) (-1)^j k(k+1)..(k+j-1) phi_{k+j}.
inline std::complex<double> phi_derivative(int k, int n, std::complex<double> z) {
  std::complex<double> acc{0.0, 0.0};
  double binom = 1.0;
  double rising = 1.0;
  for (int j = 0; j <= n; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binom * rising * phi(k + j, z);
    binom = binom * (n - j) / (j + 1);
    rising *= (k + j);
  }
  return acc;
}

/// phi_k[z1, z2] = (phi_k(z1) - phi_k(z2)) / (z1 - z2), continuous across z1 = z2.
inline std::complex<double> phi_divided_difference(int k, std::complex<double> z1, std::complex<double> z2) {
  const std::complex<double> d = z1 - z2;
  if (std::abs(d) >= kDegenerateThreshold) return (phi(k, z1) - phi(k, z2)) / d;
  const std::complex<double> mid = 0.5 * (z1 + z2);
  const std::complex<double> h2 = 0.25 * d * d;
  return phi_derivative(k, 1, mid) + phi_derivative(k, 3, mid) * h2 / 6.0 +
         phi_derivative(k, 5, mid) * h2 * h2 / 120.0;
}

/// Scalar function F(lambda) = h^power * phi_k(lambda h), the building block
/// of e^{tL} (k=0, power 0) and of the ETD weights h phi_k(hL) (power 1).
struct PhiFunction {
  int k = 0;
  double h = 0.0;
  int power = 0;

  std::complex<double> value(std::complex<double> lambda) const {
    return std::pow(h, power) * phi(k, lambda * h);
  }
  /// F[a, b].
  std::complex<double> divided_difference(std::complex<double> a, std::complex<double> b) const {
    return std::pow(h, power + 1) * phi_divided_difference(k, a * h, b * h);
  }
};

/// Crank-Nicolson rational functions of lambda:
///   propagate: (1 + h lambda/2) / (1 - h lambda/2)
///   forcing:   h / (1 - h lambda/2)
struct CrankNicolsonFunction {
  enum class Part { propagate, forcing };
  Part part = Part::propagate;
  double h = 0.0;

  std::complex<double> value(std::complex<double> lambda) const {
    const auto den = 1.0 - 0.5 * h * lambda;
    return part == Part::propagate ? (1.0 + 0.5 * h * lambda) / den : h / den;
  }
  std::complex<double> divided_difference(std::complex<double> a, std::complex<double> b) const {
    const auto den = (1.0 - 0.5 * h * a) * (1.0 - 0.5 * h * b);
    return part == Part::propagate ? h / den : 0.5 * h * h / den;
  }
};

}  // namespace nlcl
