#pragma once

// Linear semigroup on R^3 for radially structured data. With
//
//   rho0^(xi) = R(|xi|),  u0^(xi) = i xi Psi(|xi|) + (solenoidal part, |.| = S(|xi|)),
//   n0^(xi) = D(|xi|),
//
// every block of the Green matrix acts through scalar functions of r = |xi|:
//
//   rho^(t)             = a R + b r^2 Psi
//   u^(t) (potential)   = i xi (-b R + c Psi)
//   u^(t) (solenoidal)  = e^{-mu r^2 t} (solenoidal part)
//   n^(t)               = e^{-r^2 t} D
//
// so int |xi|^{2k} |.|^2 dxi = 4 pi int_0^inf r^{2k+2} (.)^2 dr, integrated by
// adaptive Gauss-Kronrod on a sequence of doubling radial chunks.

#include "nlcl/diagnostics.hpp"
#include "nlcl/error.hpp"
#include "nlcl/green.hpp"
#include "nlcl/params.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace nlcl {

class RadialProfile {
public:
  enum class Kind { gaussian, rational, table };

  /// r^power exp(-r^2 / (2 sigma^2)).
  static RadialProfile gaussian(double sigma = 1.0, int power = 0) {
    if (!(sigma > 0.0)) throw InputError("gaussian profile: sigma must be positive");
    if (power < 0) throw InputError("gaussian profile: power must be >= 0");
    RadialProfile p;
    p.kind_ = Kind::gaussian;
    p.a_ = sigma;
    p.power_ = power;
    return p;
  }

  /// (1 + (r/a)^2)^(-b).
  static RadialProfile rational(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("rational profile: a and b must be positive");
    RadialProfile p;
    p.kind_ = Kind::rational;
    p.a_ = a;
    p.b_ = b;
    return p;
  }

  /// Piecewise linear through (r_i, v_i), zero beyond the last node.
  static RadialProfile table(std::vector<double> r, std::vector<double> v) {
    if (r.size() != v.size() || r.size() < 2) throw InputError("table profile: need >= 2 nodes of equal length");
    if (r.front() != 0.0) throw InputError("table profile: first node must be at r = 0");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(v[i])) throw InputError("table profile: non-finite value");
      if (i > 0 && !(r[i] > r[i - 1])) throw InputError("table profile: nodes must be strictly increasing");
    }
    RadialProfile p;
    p.kind_ = Kind::table;
    p.r_ = std::move(r);
    p.v_ = std::move(v);
    return p;
  }

  Kind kind() const { return kind_; }

  double operator()(double r) const {
    switch (kind_) {
      case Kind::gaussian: {
        const double x = r / a_;
        return std::pow(r, power_) * std::exp(-0.5 * x * x);
      }
      case Kind::rational: {
        const double x = r / a_;
        return std::pow(1.0 + x * x, -b_);
      }
      case Kind::table: {
        if (r >= r_.back()) return 0.0;
        const auto it = std::upper_bound(r_.begin(), r_.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - r_.begin()) - 1;
        const double w = (r - r_[i]) / (r_[i + 1] - r_[i]);
        return (1.0 - w) * v_[i] + w * v_[i + 1];
      }
    }
    return 0.0;
  }

  /// Radius beyond which the profile is essentially in its tail.
  double scale() const {
    switch (kind_) {
      case Kind::gaussian: return a_ * std::max(1.0, std::sqrt(static_cast<double>(power_)));
      case Kind::rational: return a_;
      case Kind::table: return r_.back();
    }
    return 1.0;
  }

  /// False when int r^{2k+2} profile^2 dr diverges.
  bool moment_finite(int k) const {
    if (kind_ != Kind::rational) return true;
    return 4.0 * b_ > 2.0 * k + 3.0;
  }

private:
  Kind kind_ = Kind::gaussian;
  double a_ = 1.0;
  double b_ = 0.0;
  int power_ = 0;
  std::vector<double> r_;
  std::vector<double> v_;
};

/// Radial initial data; absent roles are zero.
struct WholespaceData {
  std::optional<RadialProfile> density;     ///< R
  std::optional<RadialProfile> potential;   ///< Psi
  std::optional<RadialProfile> solenoidal;  ///< S
  std::optional<RadialProfile> director;    ///< D
};

enum class WholespaceComponent { rho, u_potential, u_solenoidal, n };

inline std::string to_string(WholespaceComponent c) {
  switch (c) {
    case WholespaceComponent::rho: return "rho";
    case WholespaceComponent::u_potential: return "u_potential";
    case WholespaceComponent::u_solenoidal: return "u_solenoidal";
    case WholespaceComponent::n: return "n";
  }
  return "?";
}

inline WholespaceComponent wholespace_component_from_string(const std::string& s) {
  if (s == "rho") return WholespaceComponent::rho;
  if (s == "u_potential") return WholespaceComponent::u_potential;
  if (s == "u_solenoidal") return WholespaceComponent::u_solenoidal;
  if (s == "n") return WholespaceComponent::n;
  throw ConfigError("unknown decay component '" + s + "' (expected rho, u_potential, u_solenoidal or n)");
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double max_radius = 0.0;
};

namespace detail {

inline double profile_or_zero(const std::optional<RadialProfile>& p, double r) { return p ? (*p)(r) : 0.0; }

/// Squared magnitude of the evolved component at |xi| = r (without r^{2k}).
inline double evolved_sq(const FluidParams& params, const WholespaceData& data, WholespaceComponent comp, double r,
                         double t) {
  const double k2 = r * r;
  if (!(k2 < 1e200)) return 0.0;
  switch (comp) {
    case WholespaceComponent::n: {
      const double v = std::exp(-k2 * t) * profile_or_zero(data.director, r);
      return v * v;
    }
    case WholespaceComponent::u_solenoidal: {
      const double v = std::exp(-params.mu * k2 * t) * profile_or_zero(data.solenoidal, r);
      return v * v;
    }
    case WholespaceComponent::rho:
    case WholespaceComponent::u_potential: {
      const double R = profile_or_zero(data.density, r);
      const double P = profile_or_zero(data.potential, r);
      if (R == 0.0 && P == 0.0) return 0.0;
      const BlockCoefficients c = block_coefficients(eigenvalues(params, k2), PhiFunction{0, t, 0});
      if (comp == WholespaceComponent::rho) {
        const double v = c.rho_rho * R + c.coupling * k2 * P;
        return v * v;
      }
      const double v = -c.coupling * R + c.longitudinal * P;
      return k2 * v * v;
    }
  }
  return 0.0;
}

inline const std::optional<RadialProfile>& relevant_profile(const WholespaceData& d, WholespaceComponent comp,
                                                            bool second) {
  switch (comp) {
    case WholespaceComponent::n: return d.director;
    case WholespaceComponent::u_solenoidal: return d.solenoidal;
    default: return second ? d.potential : d.density;
  }
}

}  // namespace detail

inline constexpr double kMaxRadius = 1e8;

/// 4 pi int_0^inf r^{2k+2} (evolved component)^2 dr with its error estimate.
inline QuadratureResult linear_sq_norm_detailed(const FluidParams& params, const WholespaceData& data,
                                                WholespaceComponent comp, int k, double t, double rel_tol = 1e-9) {
  params.validate();
  if (k < 0) throw InputError("linear_sq_norm: k must be >= 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("linear_sq_norm: t must be finite and >= 0");
  if (!(rel_tol > 0.0)) throw InputError("linear_sq_norm: tolerance must be positive");

  double scale = 0.0;
  bool any = false;
  for (bool second : {false, true}) {
    const auto& p = detail::relevant_profile(data, comp, second);
    if (!p) continue;
    any = true;
    scale = std::max(scale, p->scale());
    if (t == 0.0 && !p->moment_finite(k + (comp == WholespaceComponent::u_potential ? 1 : 0))) {
      std::ostringstream os;
      os << "linear_sq_norm: moment of order " << k << " of the " << to_string(comp) << " profile diverges";
      throw QuadratureError(os.str(), std::numeric_limits<double>::infinity());
    }
  }
  QuadratureResult res;
  if (!any) return res;

  const auto integrand = [&](double r) {
    if (r == 0.0 && 2 * k + 2 > 0) return 0.0;
    return std::pow(r, 2 * k + 2) * detail::evolved_sq(params, data, comp, r, t);
  };

  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  // First chunk resolves the diffusive (and acoustic) length 1/sqrt(1+t).
  double width = std::min(scale, 1.0 / std::sqrt(1.0 + t));
  double lo = 0.0;
  double total = 0.0;
  double error = 0.0;
  const double reach = 8.0 * scale;
  while (true) {
    const double hi = lo + width;
    double chunk_err = 0.0;
    const double chunk = Quad::integrate(integrand, lo, hi, 20, 0.1 * rel_tol, &chunk_err);
    if (!std::isfinite(chunk)) throw QuadratureError("linear_sq_norm: non-finite integrand", std::numeric_limits<double>::infinity());
    total += chunk;
    error += chunk_err;
    lo = hi;
    if (lo >= reach && std::abs(chunk) <= 1e-14 * std::abs(total)) break;
    if (lo >= reach && total == 0.0) break;
    if (lo >= 1e3 * reach) {
      // slowly decaying algebraic tail
      double tail_err = 0.0;
      double tail = 0.0;
      try {
        tail = boost::math::quadrature::exp_sinh<double>().integrate(integrand, lo, std::numeric_limits<double>::infinity(),
                                                                     0.1 * rel_tol, &tail_err);
      } catch (const std::exception&) {
        tail = std::numeric_limits<double>::quiet_NaN();
      }
      if (!std::isfinite(tail) || lo > kMaxRadius) {
        std::ostringstream os;
        os << "linear_sq_norm: radial tail beyond r = " << lo << " did not converge";
        throw QuadratureError(os.str(), total != 0.0 ? std::abs(chunk / total) : 1.0);
      }
      total += tail;
      error += tail_err;
      lo = std::numeric_limits<double>::infinity();
      break;
    }
    width *= 2.0;
  }
  const double achieved = total != 0.0 ? error / std::abs(total) : 0.0;
  if (achieved > rel_tol) {
    std::ostringstream os;
    os << "linear_sq_norm: quadrature reached relative error " << achieved << " > " << rel_tol;
    throw QuadratureError(os.str(), achieved);
  }
  res.value = 4.0 * std::numbers::pi * total;
  res.error_estimate = 4.0 * std::numbers::pi * error;
  res.max_radius = lo;
  return res;
}

inline double linear_sq_norm(const FluidParams& params, const WholespaceData& data, WholespaceComponent comp, int k,
                             double t, double rel_tol = 1e-9) {
  return linear_sq_norm_detailed(params, data, comp, k, t, rel_tol).value;
}

struct DecayStudyConfig {
  FluidParams params;
  WholespaceData data;
  std::vector<WholespaceComponent> components{WholespaceComponent::rho, WholespaceComponent::u_potential,
                                              WholespaceComponent::u_solenoidal, WholespaceComponent::n};
  std::vector<int> ks{0, 1, 2};
  double t_min = 1.0;
  double t_max = 1e4;
  int points_per_decade = 20;
  double fit_lo = 1e2;
  double fit_hi = 1e4;
  double rel_tol = 1e-9;
  unsigned workers = 0;  ///< 0 = from NLCL_WORKERS, else hardware concurrency

  void validate() const {
    params.validate();
    if (!(t_min >= 1.0)) throw ConfigError("decay study: t_min must be >= 1");
    if (!(t_max > t_min)) throw ConfigError("decay study: t_max must exceed t_min");
    if (points_per_decade < 20) throw ConfigError("decay study: need at least 20 points per decade");
    if (!(fit_lo < fit_hi)) throw ConfigError("decay study: fit window must satisfy fit_lo < fit_hi");
    if (ks.empty() || components.empty()) throw ConfigError("decay study: empty k list or component list");
    for (int k : ks)
      if (k < 0) throw ConfigError("decay study: derivative orders must be >= 0");
  }

  /// Log-spaced time grid, both ends included.
  std::vector<double> time_grid() const {
    const double decades = std::log10(t_max / t_min);
    const auto n = static_cast<std::size_t>(std::ceil(decades * points_per_decade - 1e-9));
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      t[i] = t_min * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(n));
    t.back() = t_max;
    return t;
  }
};

struct DecayStudyRow {
  WholespaceComponent component;
  int k = 0;
  DecayFit fit;
  double expected = 0.0;  ///< -(3/2 + k)
  std::vector<double> times;
  std::vector<double> values;
};

/// Worker count from NLCL_WORKERS, falling back to the hardware.
inline unsigned worker_count(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NLCL_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min<unsigned long>(v, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Fits the decay exponent of every (component, k); independent of the worker count.
inline std::vector<DecayStudyRow> decay_study(const DecayStudyConfig& cfg) {
  cfg.validate();
  const std::vector<double> times = cfg.time_grid();
  const std::size_t nt = times.size();

  std::vector<DecayStudyRow> rows;
  for (auto comp : cfg.components)
    for (int k : cfg.ks) rows.push_back({comp, k, {}, -(1.5 + k), times, std::vector<double>(nt)});

  const std::size_t jobs = rows.size() * nt;
  const unsigned nw = static_cast<unsigned>(std::min<std::size_t>(worker_count(cfg.workers), jobs));
  std::vector<std::exception_ptr> failures(nw);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t j = w; j < jobs; j += nw) {
          DecayStudyRow& row = rows[j / nt];
          row.values[j % nt] = linear_sq_norm(cfg.params, cfg.data, row.component, row.k, times[j % nt], cfg.rel_tol);
        }
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  for (auto& row : rows)
    row.fit = decay_fit(row.times, row.values, cfg.fit_lo, cfg.fit_hi, to_string(row.component));
  return rows;
}

}  // namespace nlcl
