#pragma once

// Perturbation variables (rho - 1, u, d - w0) in physical and spectral form.

#include "nlcl/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace nlcl {

using Vec3 = std::array<double, 3>;

struct PerturbationState {
  RealField rho_pert;       ///< rho - 1
  RealField velocity;       ///< u, 3 components
  RealField director_pert;  ///< n = d - w0, 3 components
  Vec3 w0{0.0, 0.0, 1.0};
  double time = 0.0;

  static PerturbationState zeros(const GridSpec& grid, Vec3 w0 = {0.0, 0.0, 1.0}) {
    return {RealField(grid, 1), RealField(grid, 3), RealField(grid, 3), w0, 0.0};
  }

  const GridSpec& grid() const { return rho_pert.grid(); }

  void validate() const {
    const GridSpec& g = rho_pert.grid();
    if (rho_pert.components() != 1 || velocity.components() != 3 || director_pert.components() != 3)
      throw InputError("perturbation state: expected 1 + 3 + 3 components");
    require_same_grid(g, velocity.grid(), "perturbation state");
    require_same_grid(g, director_pert.grid(), "perturbation state");
    const double norm = std::sqrt(w0[0] * w0[0] + w0[1] * w0[1] + w0[2] * w0[2]);
    if (std::abs(norm - 1.0) > 1e-12) throw InputError("perturbation state: w0 must be a unit vector");
  }
};

/// Spectral form used by the integrators: components (rho, u1, u2, u3, n1, n2, n3).
struct SpectralState {
  SpectralField fields;
  Vec3 w0{0.0, 0.0, 1.0};
  double time = 0.0;

  const GridSpec& grid() const { return fields.grid(); }

  friend bool operator==(const SpectralState&, const SpectralState&) = default;
};

inline constexpr int kRho = 0;
inline constexpr int kVelocity = 1;
inline constexpr int kDirector = 4;

/// Copies components [first, first + count) into a new field.
inline SpectralField extract_components(const SpectralField& f, int first, int count) {
  SpectralField out(f.grid(), count);
  for (int c = 0; c < count; ++c) {
    auto src = f.component(first + c);
    std::copy(src.begin(), src.end(), out.component(c).begin());
  }
  return out;
}

inline void insert_components(SpectralField& dst, int first, const SpectralField& src) {
  for (int c = 0; c < src.components(); ++c) {
    auto s = src.component(c);
    std::copy(s.begin(), s.end(), dst.component(first + c).begin());
  }
}

inline SpectralState to_spectral(const PerturbationState& s) {
  s.validate();
  SpectralState out{SpectralField(s.grid(), 7), s.w0, s.time};
  insert_components(out.fields, kRho, forward_transform(s.rho_pert));
  insert_components(out.fields, kVelocity, forward_transform(s.velocity));
  insert_components(out.fields, kDirector, forward_transform(s.director_pert));
  return out;
}

inline PerturbationState to_physical(const SpectralState& s) {
  return {inverse_transform(extract_components(s.fields, kRho, 1)),
          inverse_transform(extract_components(s.fields, kVelocity, 3)),
          inverse_transform(extract_components(s.fields, kDirector, 3)), s.w0, s.time};
}

/// max_x | |n + w0| - 1 |.
inline double director_drift(const RealField& director_pert, const Vec3& w0) {
  double worst = 0.0;
  for (std::size_t p = 0; p < director_pert.point_count(); ++p) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double d = director_pert.at(c, p) + w0[static_cast<std::size_t>(c)];
      s += d * d;
    }
    worst = std::max(worst, std::abs(std::sqrt(s) - 1.0));
  }
  return worst;
}

struct DensityRange {
  double min_density = 1.0;
  double max_density = 1.0;
  /// 1/2 <= rho <= 3/2 everywhere.
  bool small_data_regime = true;
};

inline DensityRange density_range(const RealField& rho_pert) {
  DensityRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), true};
  for (double v : rho_pert.component(0)) {
    r.min_density = std::min(r.min_density, v + 1.0);
    r.max_density = std::max(r.max_density, v + 1.0);
  }
  r.small_data_regime = r.min_density >= 0.5 && r.max_density <= 1.5;
  return r;
}

}  // namespace nlcl
