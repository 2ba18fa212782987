#pragma once

// Measurable quantities: Sobolev and L^p norm reports, time-derivative norms,
// energy functionals with the velocity/density-gradient cross term, the
// Fourier-splitting slack, Gagliardo-Nirenberg ratios, composite-function
// ratios, decay-exponent fits and trajectory monitors.

#include "nlcl/dynamics.hpp"
#include "nlcl/params.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace nlcl {

struct NormReport {
  double time = 0.0;
  std::vector<std::pair<std::string, double>> entries;

  void add(std::string label, double value) { entries.emplace_back(std::move(label), value); }

  std::optional<double> find(const std::string& label) const {
    for (const auto& [k, v] : entries)
      if (k == label) return v;
    return std::nullopt;
  }

  double at(const std::string& label) const {
    if (auto v = find(label)) return *v;
    throw InputError("norm report has no entry '" + label + "'");
  }
};

namespace detail {

/// sum_{j = lo..hi} ||grad^j f||_{L2}^2 over components [first, first + count).
inline double sobolev_sq(const SpectralField& f, int first, int count, int lo, int hi) {
  const auto table = wave_table(f.grid());
  double sum = 0.0;
  for (std::size_t p = 0; p < f.point_count(); ++p) {
    const double k2 = (*table)[p].k2;
    double w = 0.0;
    double pw = std::pow(k2, lo);
    for (int j = lo; j <= hi; ++j) {
      w += (j == 0) ? 1.0 : pw;
      pw *= k2;
    }
    if (w == 0.0) continue;
    double amp = 0.0;
    for (int c = first; c < first + count; ++c) amp += std::norm(f.at(c, p));
    sum += w * amp;
  }
  return sum / f.grid().volume();
}

/// Pointwise tensor of all ordered order-th partial derivatives of every component.
inline RealField derivative_tensor(const SpectralField& fh, int order) {
  const GridSpec& g = fh.grid();
  const auto table = wave_table(g);
  int tuples = 1;
  for (int i = 0; i < order; ++i) tuples *= g.dim;
  SpectralField out(g, fh.components() * tuples);
  for (int c = 0; c < fh.components(); ++c)
    for (int t = 0; t < tuples; ++t) {
      for (std::size_t p = 0; p < fh.point_count(); ++p) {
        complex mult{1.0, 0.0};
        int rest = t;
        for (int i = 0; i < order; ++i) {
          mult *= complex(0.0, table->derivative_xi(p)[static_cast<std::size_t>(rest % g.dim)]);
          rest /= g.dim;
        }
        out.at(c * tuples + t, p) = mult * fh.at(c, p);
      }
    }
  return inverse_transform(out);
}

}  // namespace detail

/// Labels:
///   rho_grad{k}_H{N-k}, u_grad{k}_H{N-k}   k = 0..N-1
///   rho_grad{k}_L2, u_grad{k}_L2           k = 0..N
///   n_grad{l}_L2                           l = 0..N+1
///   {rho,u,n}_L{2,6,inf}
/// N < 3 is accepted; the report then carries a `low_order_flag` entry of 1.
inline NormReport norm_report(const SpectralState& state, int N) {
  if (N < 1) throw InputError("norm_report: N must be >= 1");
  const SpectralField& U = state.fields;
  NormReport r;
  r.time = state.time;
  if (N < 3) r.add("low_order_flag", 1.0);
  const std::string Ns = std::to_string(N);
  for (int k = 0; k < N; ++k)
    r.add("rho_grad" + std::to_string(k) + "_H" + std::to_string(N - k), std::sqrt(detail::sobolev_sq(U, kRho, 1, k, N)));
  for (int k = 0; k < N; ++k)
    r.add("u_grad" + std::to_string(k) + "_H" + std::to_string(N - k),
          std::sqrt(detail::sobolev_sq(U, kVelocity, 3, k, N)));
  for (int k = 0; k <= N; ++k) r.add("rho_grad" + std::to_string(k) + "_L2", std::sqrt(detail::sobolev_sq(U, kRho, 1, k, k)));
  for (int k = 0; k <= N; ++k)
    r.add("u_grad" + std::to_string(k) + "_L2", std::sqrt(detail::sobolev_sq(U, kVelocity, 3, k, k)));
  for (int l = 0; l <= N + 1; ++l)
    r.add("n_grad" + std::to_string(l) + "_L2", std::sqrt(detail::sobolev_sq(U, kDirector, 3, l, l)));

  const PerturbationState phys = to_physical(state);
  const std::pair<const char*, const RealField*> fields[] = {
      {"rho", &phys.rho_pert}, {"u", &phys.velocity}, {"n", &phys.director_pert}};
  for (const auto& [name, f] : fields) {
    r.add(std::string(name) + "_L2", lp_norm(*f, 2.0));
    r.add(std::string(name) + "_L6", lp_norm(*f, 6.0));
    r.add(std::string(name) + "_Linf", lp_norm(*f, std::numeric_limits<double>::infinity()));
  }
  return r;
}

inline NormReport norm_report(const PerturbationState& state, int N) { return norm_report(to_spectral(state), N); }

/// Norms of (rho_t, u_t, n_t) obtained from the equations:
///   rho_t_grad{k}_H{N-1-k}, u_t_grad{k}_L2 (k <= N-2), n_t_grad{l}_L2 (l <= N-1).
inline NormReport time_derivative_norms(const SpectralState& state, const FluidParams& params, int N,
                                        bool nonlinear = true) {
  if (N < 2) throw InputError("time_derivative_norms: N must be >= 2");
  const SpectralField T = full_tendency(state, params, nonlinear);
  NormReport r;
  r.time = state.time;
  for (int k = 0; k <= N - 2; ++k)
    r.add("rho_t_grad" + std::to_string(k) + "_H" + std::to_string(N - 1 - k),
          std::sqrt(detail::sobolev_sq(T, kRho, 1, k, N - 1)));
  for (int k = 0; k <= N - 2; ++k)
    r.add("u_t_grad" + std::to_string(k) + "_L2", std::sqrt(detail::sobolev_sq(T, kVelocity, 3, k, k)));
  for (int l = 0; l <= N - 1; ++l)
    r.add("n_t_grad" + std::to_string(l) + "_L2", std::sqrt(detail::sobolev_sq(T, kDirector, 3, l, l)));
  return r;
}

/// int grad^k u . grad^{k+1} rho dx = L^{-dim} sum_m |xi|^{2k} Re( u^(m) . conj(i xi rho^(m)) ).
inline double velocity_density_cross_term(const SpectralField& U, int k) {
  const auto table = wave_table(U.grid());
  double sum = 0.0;
  for (std::size_t p = 0; p < U.point_count(); ++p) {
    const auto& xi = table->derivative_xi(p);
    const double k2 = table->derivative_k2(p);
    if (k2 == 0.0) continue;
    const complex grad_rho_factor = std::conj(complex(0.0, 1.0) * U.at(kRho, p));
    double acc = 0.0;
    for (int j = 0; j < 3; ++j)
      acc += (U.at(kVelocity + j, p) * xi[static_cast<std::size_t>(j)] * grad_rho_factor).real();
    sum += std::pow(k2, k) * acc;
  }
  return sum / U.grid().volume();
}

struct EnergyFunctional {
  int m = 0;
  int l = 0;
  double eta = 0.0;
  double value = 0.0;      ///< norm_sum + eta * cross
  double norm_sum = 0.0;   ///< squared-norm part
  double cross = 0.0;      ///< sum_{l<=k<=m-1} int grad^k u . grad^{k+1} rho
  /// |value - norm_sum| <= norm_sum / 2 (Young bound; guaranteed for eta <= 1/8).
  bool equivalent = true;
};

namespace detail {

inline void check_energy_indices(int m, int l, double eta) {
  if (l < 0 || l > m - 1) {
    std::ostringstream os;
    os << "energy functional requires 0 <= l <= m-1 (got m = " << m << ", l = " << l << ")";
    throw InputError(os.str());
  }
  if (!(eta > 0.0)) throw InputError("energy functional requires eta > 0");
}

inline EnergyFunctional finish_energy(int m, int l, double eta, double norms, const SpectralField& U) {
  EnergyFunctional e{m, l, eta, 0.0, norms, 0.0, true};
  for (int k = l; k <= m - 1; ++k) e.cross += velocity_density_cross_term(U, k);
  e.value = norms + eta * e.cross;
  e.equivalent = std::abs(e.value - norms) <= 0.5 * norms + 1e-300;
  return e;
}

}  // namespace detail

/// F^m_l = ||grad^l (rho,u)||^2_{H^{m-l}} + ||grad^l n||^2_{H^{m+1-l}} + eta * cross.
inline EnergyFunctional energy_functional_F(const SpectralState& state, int m, int l, double eta) {
  detail::check_energy_indices(m, l, eta);
  const SpectralField& U = state.fields;
  const double norms = detail::sobolev_sq(U, kRho, 1, l, m) + detail::sobolev_sq(U, kVelocity, 3, l, m) +
                       detail::sobolev_sq(U, kDirector, 3, l, m + 1);
  return detail::finish_energy(m, l, eta, norms, U);
}

/// E^m_l = ||grad^l (rho, u, grad n)||^2_{H^{m-l}} + eta * cross.
inline EnergyFunctional energy_functional_E(const SpectralState& state, int m, int l, double eta) {
  detail::check_energy_indices(m, l, eta);
  const SpectralField& U = state.fields;
  const double norms = detail::sobolev_sq(U, kRho, 1, l, m) + detail::sobolev_sq(U, kVelocity, 3, l, m) +
                       detail::sobolev_sq(U, kDirector, 3, l + 1, m + 1);
  return detail::finish_energy(m, l, eta, norms, U);
}

/// ||grad^{k+2} f||^2 - a ||grad^{k+1} f||^2 + a^2 ||grad^k f||^2 with a = R/(1+t).
/// Nonnegative by Parseval since |xi|^4 - a|xi|^2 + a^2 > 0.
inline double fourier_split_slack(const SpectralField& fh, int k, double R, double t) {
  if (k < 0) throw InputError("fourier_split_slack: k must be >= 0");
  if (!(R > 0.0) || !(t >= 0.0)) throw InputError("fourier_split_slack: need R > 0 and t >= 0");
  const double n0 = sobolev_norm(fh, k);
  if (l2_norm_squared(fh) == 0.0) throw InputError("fourier_split_slack: field must be nonzero");
  const double n1 = sobolev_norm(fh, k + 1);
  const double n2 = sobolev_norm(fh, k + 2);
  const double a = R / (1.0 + t);
  return n2 * n2 - a * n1 * n1 + a * a * n0 * n0;
}

/// Interpolation exponent of  1/p - alpha/d = (1/2 - m/d)(1 - theta) + (1/2 - l/d) theta.
inline double gn_theta(int dim, int alpha, double p, int m, int l) {
  const double d = dim;
  const double lhs = 1.0 / p - alpha / d;
  const double a = 0.5 - m / d;
  const double b = 0.5 - l / d;
  double theta;
  if (std::abs(b - a) < 1e-15) {
    theta = std::abs(lhs - a) < 1e-12 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  } else {
    theta = (lhs - a) / (b - a);
  }
  auto reject = [&](const std::string& why) {
    std::ostringstream os;
    os << "inadmissible Gagliardo-Nirenberg tuple (alpha=" << alpha << ", p=" << p << ", m=" << m << ", l=" << l
       << ", dim=" << dim << "): " << why << "; solved theta = " << theta;
    throw InputError(os.str());
  };
  if (!(p >= 1.0)) reject("p must be >= 1");
  if (m < 0 || alpha < 0 || m > l || alpha > l) reject("need 0 <= m, alpha <= l");
  if (!(theta >= -1e-14 && theta <= 1.0 + 1e-14)) reject("theta outside [0, 1]");
  return std::clamp(theta, 0.0, 1.0);
}

struct GnRatio {
  double theta_gn = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// ||grad^alpha f||_{L^p} / (||grad^m f||_{L2}^{1-theta} ||grad^l f||_{L2}^theta).
inline GnRatio gn_ratio(const RealField& f, int alpha, double p, int m, int l) {
  GnRatio r;
  r.theta_gn = gn_theta(f.grid().dim, alpha, p, m, l);
  const SpectralField fh = forward_transform(f);
  if (l2_norm_squared(fh) == 0.0) throw InputError("gn_ratio: field must be nonzero");
  r.lhs = lp_norm(alpha == 0 ? f : detail::derivative_tensor(fh, alpha), p);
  const double nm = sobolev_norm(fh, m);
  const double nl = sobolev_norm(fh, l);
  r.rhs = std::pow(nm, 1.0 - r.theta_gn) * std::pow(nl, r.theta_gn);
  r.ratio = r.lhs / r.rhs;
  return r;
}

struct CompositeBoundRatios {
  double h = 0.0;
  double f = 0.0;
  double g = 0.0;
};

/// ||grad^m G(rho)||_{Linf} / ||grad^m rho||_{Linf} for G in {h, f, g}; 0/0 is reported as 0.
inline CompositeBoundRatios composite_bound_ratio(const RealField& rho_pert, int m, const PressureLaw& law = {}) {
  if (m < 1) throw InputError("composite_bound_ratio: m must be >= 1");
  const double sup = lp_norm(rho_pert, std::numeric_limits<double>::infinity());
  if (sup > 1.0) {
    std::ostringstream os;
    os << "composite_bound_ratio: hypothesis ||rho||_Linf <= 1 violated (" << sup << ")";
    throw InputError(os.str());
  }
  const CoefficientFields cf = coefficients(rho_pert, law);
  const double inf = std::numeric_limits<double>::infinity();
  const double denom = lp_norm(detail::derivative_tensor(forward_transform(rho_pert), m), inf);
  auto ratio = [&](const RealField& G) {
    const double num = lp_norm(detail::derivative_tensor(forward_transform(G), m), inf);
    return denom == 0.0 ? 0.0 : num / denom;
  };
  return {ratio(cf.h_field), ratio(cf.f_field), ratio(cf.g_field)};
}

struct DecayFit {
  std::string label;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double exponent = 0.0;   ///< slope of log(value) against log(1+t)
  double r_squared = 0.0;
  std::size_t samples = 0;
};

inline DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& values, double t_lo,
                          double t_hi, std::string label = {}) {
  if (times.size() != values.size()) throw InputError("decay_fit: times and values differ in length");
  if (!(t_lo < t_hi)) throw InputError("decay_fit: window must satisfy t_lo < t_hi");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0)) {
      std::ostringstream os;
      os << "decay_fit: nonpositive value " << values[i] << " at t = " << times[i];
      throw InputError(os.str());
    }
    x.push_back(std::log1p(times[i]));
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 8) throw InputError("decay_fit: need at least 8 samples in the window (got " + std::to_string(x.size()) + ")");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  DecayFit fit{std::move(label), t_lo, t_hi, sxy / sxx, 1.0, x.size()};
  const double ss_res = std::max(0.0, syy - fit.exponent * sxy);
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

/// ||(S1,S2,S3)||_{L1} / [(||rho|| + ||u|| + ||grad n||)(||grad rho|| + ||grad u||_{H1} + ||grad n||_{H1})].
inline double source_estimate_ratio(const SpectralState& state, const FluidParams& params) {
  const SpectralField S = nonlinear_sources(state, params);
  const RealField s = inverse_transform(S);
  double l1 = 0.0;
  for (std::size_t p = 0; p < s.point_count(); ++p) {
    double sq = 0.0;
    for (int c = 0; c < 7; ++c) sq += s.at(c, p) * s.at(c, p);
    l1 += std::sqrt(sq);
  }
  l1 *= s.grid().cell_volume();
  const SpectralField& U = state.fields;
  using detail::sobolev_sq;
  const double low = std::sqrt(sobolev_sq(U, kRho, 1, 0, 0)) + std::sqrt(sobolev_sq(U, kVelocity, 3, 0, 0)) +
                     std::sqrt(sobolev_sq(U, kDirector, 3, 1, 1));
  const double high = std::sqrt(sobolev_sq(U, kRho, 1, 1, 1)) + std::sqrt(sobolev_sq(U, kVelocity, 3, 1, 2)) +
                      std::sqrt(sobolev_sq(U, kDirector, 3, 1, 2));
  const double denom = low * high;
  return denom == 0.0 ? 0.0 : l1 / denom;
}

struct DirectorShadow {
  /// max over samples of max(excess, 0) / ||grad^{k+1} u||^2
  double empirical_constant = 0.0;
  /// max over samples of excess - bound * ||grad^{k+1} u||^2 - tolerance
  double worst_margin = -std::numeric_limits<double>::infinity();
  bool holds = true;
};

/// Discrete form of  d/dt ||grad^k n||^2 + ||grad^{k+1} n||^2 <= C ||grad^{k+1} u||^2:
///   excess_i = (a_{i+1} - a_i)/(t_{i+1} - t_i) + b_i,  a = ||grad^k n||^2, b = ||grad^{k+1} n||^2,
/// checked against bound * c_i with c = ||grad^{k+1} u||^2.
inline DirectorShadow director_energy_shadow(const std::vector<double>& times, const std::vector<double>& nk_sq,
                                             const std::vector<double>& nk1_sq, const std::vector<double>& uk1_sq,
                                             double bound, std::size_t skip = 0) {
  DirectorShadow out;
  for (std::size_t i = skip; i + 1 < times.size(); ++i) {
    const double dt = times[i + 1] - times[i];
    const double excess = (nk_sq[i + 1] - nk_sq[i]) / dt + nk1_sq[i];
    const double tol = 1e-10 * nk_sq[i] / dt + 1e-300;
    if (excess > 0.0) {
      out.empirical_constant = std::max(out.empirical_constant, uk1_sq[i] > 0.0 ? excess / uk1_sq[i]
                                                                                  : std::numeric_limits<double>::infinity());
    }
    const double margin = excess - bound * uk1_sq[i] - tol;
    out.worst_margin = std::max(out.worst_margin, margin);
    if (margin > 0.0) out.holds = false;
  }
  return out;
}

struct MonotoneCheck {
  bool nonincreasing = true;
  double worst_relative_increase = 0.0;
};

inline MonotoneCheck check_nonincreasing(const std::vector<double>& values, std::size_t skip, double rel_tol) {
  MonotoneCheck out;
  for (std::size_t i = skip; i + 1 < values.size(); ++i) {
    const double inc = (values[i + 1] - values[i]) / std::max(std::abs(values[i]), 1e-300);
    out.worst_relative_increase = std::max(out.worst_relative_increase, inc);
    if (inc > rel_tol) out.nonincreasing = false;
  }
  return out;
}

}  // namespace nlcl
