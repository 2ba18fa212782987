#pragma once

#include "nlcl/error.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>

namespace nlcl {

/// Barotropic pressure law, normalized so that P'(1) = 1.
///   linear:    P(rho) = rho
///   gamma_law: P(rho) = rho^gamma / gamma
struct PressureLaw {
  enum class Kind { linear, gamma_law };
  Kind kind = Kind::linear;
  double gamma = 1.0;

  static PressureLaw linear() { return {}; }
  static PressureLaw gamma_law(double g) { return {Kind::gamma_law, g}; }

  /// P'(rho).
  double derivative(double rho) const {
    return kind == Kind::linear ? 1.0 : std::pow(rho, gamma - 1.0);
  }
};

/// Viscosities of the momentum equation, mu Delta u + (mu + nu) grad div u.
struct FluidParams {
  double mu = 1.0;
  double nu = 0.0;
  PressureLaw pressure{};

  /// Coefficient of the longitudinal dissipation, 2 mu + nu.
  double longitudinal() const { return 2.0 * mu + nu; }

  /// Throws ConfigError naming the violated constraint.
  void validate() const {
    if (!std::isfinite(mu) || !std::isfinite(nu)) throw ConfigError("viscosities must be finite");
    if (!(mu > 0.0)) {
      std::ostringstream os;
      os << "viscosity constraint mu > 0 violated (mu = " << mu << ")";
      throw ConfigError(os.str());
    }
    if (2.0 * mu + 3.0 * nu < 0.0) {
      std::ostringstream os;
      os << "viscosity constraint 2*mu + 3*nu >= 0 violated (2*" << mu << " + 3*" << nu
         << " = " << 2.0 * mu + 3.0 * nu << ")";
      throw ConfigError(os.str());
    }
    if (pressure.kind == PressureLaw::Kind::gamma_law && !(pressure.gamma >= 1.0))
      throw ConfigError("gamma-law pressure requires gamma >= 1");
  }

  /// FNV-1a over the raw bytes of the parameters; stamped into checkpoints.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double v) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof v);
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    };
    mix(mu);
    mix(nu);
    mix(pressure.kind == PressureLaw::Kind::linear ? 0.0 : 1.0);
    mix(pressure.gamma);
    return h;
  }
};

}  // namespace nlcl
