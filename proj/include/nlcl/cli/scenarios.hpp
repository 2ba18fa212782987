#pragma once

// Initial-data presets. All start from w0 = (0, 0, 1) and are dealiased.
//
//   zero             equilibrium
//   gaussian-linear  Gaussian bump g centred in the box, rho = g and d tilted by angle g
//   small-acoustic   rho = A cos x1
//   director-twist   d = (sin th, 0, cos th), th = A sin x1
//   mixed-small      a few low modes in every component, phases from the seed;
//                    the director is built from a unit field

#include "nlcl/error.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/state.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace nlcl::cli {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"zero", "gaussian-linear", "small-acoustic", "director-twist",
                                                 "mixed-small"};
  return names;
}

namespace detail {

/// Uniform in [0, 1) from the top 53 bits, identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Angle of x scaled to [0, 2pi).
inline double angle(const RealField& f, std::size_t p, int axis) {
  return 2.0 * std::numbers::pi * f.coordinate(p, axis) / f.grid().period;
}

struct Mode {
  std::array<int, 3> m{0, 0, 0};
  double amplitude = 0.0;
  double phase = 0.0;
};

inline std::vector<Mode> random_modes(std::mt19937_64& rng, int dim, int count) {
  std::vector<Mode> out;
  for (int i = 0; i < count; ++i) {
    Mode md;
    bool nonzero = false;
    while (!nonzero) {
      for (int a = 0; a < dim; ++a) {
        md.m[static_cast<std::size_t>(a)] = static_cast<int>(rng() % 5) - 2;
        nonzero = nonzero || md.m[static_cast<std::size_t>(a)] != 0;
      }
    }
    md.amplitude = 0.5 + 0.5 * unit_uniform(rng);
    md.phase = 2.0 * std::numbers::pi * unit_uniform(rng);
    out.push_back(md);
  }
  return out;
}

inline double eval_modes(const std::vector<Mode>& modes, const RealField& f, std::size_t p) {
  double v = 0.0;
  for (const auto& md : modes) {
    double arg = md.phase;
    for (int a = 0; a < f.grid().dim; ++a) arg += md.m[static_cast<std::size_t>(a)] * angle(f, p, a);
    v += md.amplitude * std::cos(arg);
  }
  return v / static_cast<double>(modes.size());
}

}  // namespace detail

inline PerturbationState scenario_state(const std::string& name, const GridSpec& grid, double amplitude,
                                        std::uint64_t seed) {
  grid.validate();
  PerturbationState s = PerturbationState::zeros(grid);
  const double A = amplitude;
  const std::size_t np = grid.total_points();
  if (name == "zero") return s;

  if (name == "gaussian-linear") {
    const double width = grid.period / 10.0;
    for (std::size_t p = 0; p < np; ++p) {
      double r2 = 0.0;
      for (int a = 0; a < grid.dim; ++a) {
        const double x = s.rho_pert.coordinate(p, a) - 0.5 * grid.period;
        r2 += x * x;
      }
      const double g = A * std::exp(-0.5 * r2 / (width * width));
      s.rho_pert.at(0, p) = g;
      s.director_pert.at(0, p) = std::sin(g);
      s.director_pert.at(2, p) = std::cos(g) - 1.0;
    }
    return s;
  }

  if (name == "small-acoustic") {
    for (std::size_t p = 0; p < np; ++p) s.rho_pert.at(0, p) = A * std::cos(detail::angle(s.rho_pert, p, 0));
    return s;
  }

  if (name == "director-twist") {
    for (std::size_t p = 0; p < np; ++p) {
      const double th = A * std::sin(detail::angle(s.rho_pert, p, 0));
      s.director_pert.at(0, p) = std::sin(th);
      s.director_pert.at(2, p) = std::cos(th) - 1.0;
    }
    return s;
  }

  if (name == "mixed-small") {
    std::mt19937_64 rng(seed);
    const int dim = grid.dim;
    std::array<std::vector<detail::Mode>, 7> modes;
    for (auto& m : modes) m = detail::random_modes(rng, dim, 3);
    for (std::size_t p = 0; p < np; ++p) {
      s.rho_pert.at(0, p) = A * detail::eval_modes(modes[0], s.rho_pert, p);
      for (int c = 0; c < 3; ++c)
        s.velocity.at(c, p) = A * detail::eval_modes(modes[static_cast<std::size_t>(1 + c)], s.rho_pert, p);
      Vec3 d{};
      double len = 0.0;
      for (int c = 0; c < 3; ++c) {
        d[static_cast<std::size_t>(c)] = s.w0[static_cast<std::size_t>(c)] +
                                         A * detail::eval_modes(modes[static_cast<std::size_t>(4 + c)], s.rho_pert, p);
        len += d[static_cast<std::size_t>(c)] * d[static_cast<std::size_t>(c)];
      }
      len = std::sqrt(len);
      for (int c = 0; c < 3; ++c)
        s.director_pert.at(c, p) = d[static_cast<std::size_t>(c)] / len - s.w0[static_cast<std::size_t>(c)];
    }
    return s;
  }

  std::string known;
  for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown scenario '" + name + "' (expected one of " + known + ")");
}

/// Spectral initial state with the 2/3-rule applied.
inline SpectralState scenario_initial(const std::string& name, const GridSpec& grid, double amplitude,
                                      std::uint64_t seed) {
  SpectralState s = to_spectral(scenario_state(name, grid, amplitude, seed));
  s.fields = dealias(std::move(s.fields));
  return s;
}

}  // namespace nlcl::cli
