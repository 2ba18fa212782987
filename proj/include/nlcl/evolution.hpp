#pragma once

// Exponential integrators built on the exact linear propagator. Writing the
// system as U_t = L U + N(U, t), the Duhamel form
//
//   U(t + h) = e^{hL} U(t) + int_0^h e^{(h-s)L} N(U(t+s), t+s) ds
//
// is discretized per mode:
//
//   ETD1:    U+ = e^{hL} U + h phi1(hL) N(U, t)
//   ETD2RK:  a  = e^{hL} U + h phi1(hL) N(U, t)
//            U+ = a + h phi2(hL) (N(a, t+h) - N(U, t))
//   IMEX-CN: U+ = (1 - hL/2)^{-1} [(1 + hL/2) U + h N(U, t)]
//
// All weights are block functions of the generator (see green.hpp), so the
// acoustic oscillation never constrains the step.

#include "nlcl/diagnostics.hpp"
#include "nlcl/dynamics.hpp"
#include "nlcl/green.hpp"
#include "nlcl/params.hpp"
#include "nlcl/state.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nlcl {

enum class Scheme { etd1, etd2rk, imex_cn };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::etd1: return "ETD1";
    case Scheme::etd2rk: return "ETD2RK";
    case Scheme::imex_cn: return "IMEX-CN";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "ETD1" || s == "etd1") return Scheme::etd1;
  if (s == "ETD2RK" || s == "etd2rk") return Scheme::etd2rk;
  if (s == "IMEX-CN" || s == "imex-cn" || s == "imex_cn") return Scheme::imex_cn;
  throw ConfigError("unknown integration scheme '" + s + "' (expected ETD1, ETD2RK or IMEX-CN)");
}

struct IntegratorConfig {
  Scheme scheme = Scheme::etd2rk;
  double dt = 1e-2;
  double t_end = 1.0;
  int renormalize_every = 0;  ///< 0 = never
  int diagnostics_every = 1;
  int snapshot_every = 0;     ///< 0 = keep no snapshots
  bool nonlinear = true;
  int norm_order = 3;         ///< N of the norm report
  double eta = 0.125;         ///< cross-term coupling of the energy functional

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integrator dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("integrator t_end must be positive");
    if (dt > t_end) throw ConfigError("integrator dt must not exceed t_end");
    if (renormalize_every < 0) throw ConfigError("renormalize_every must be >= 0");
    if (diagnostics_every < 1) throw ConfigError("diagnostics_every must be >= 1");
    if (snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
    const double steps = t_end / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
      throw ConfigError("t_end must be an integer multiple of dt");
  }

  std::size_t total_steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }
};

/// Extra time-dependent term added to N(U, t), e.g. a manufactured forcing.
using Forcing = std::function<SpectralField(double t)>;

/// Precomputed per-mode weights for one scheme and step size.
class Stepper {
public:
  Stepper(const GridSpec& grid, const FluidParams& params, Scheme scheme, double dt, bool nonlinear = true,
          Forcing forcing = {})
      : params_(params), scheme_(scheme), dt_(dt), nonlinear_(nonlinear), forcing_(std::move(forcing)) {
    if (!(dt > 0.0)) throw InputError("Stepper: dt must be positive");
    switch (scheme) {
      case Scheme::etd1:
        propagate_ = ModeOperator(grid, params, PhiFunction{0, dt, 0});
        weight1_ = ModeOperator(grid, params, PhiFunction{1, dt, 1});
        break;
      case Scheme::etd2rk:
        propagate_ = ModeOperator(grid, params, PhiFunction{0, dt, 0});
        weight1_ = ModeOperator(grid, params, PhiFunction{1, dt, 1});
        weight2_ = ModeOperator(grid, params, PhiFunction{2, dt, 1});
        break;
      case Scheme::imex_cn:
        propagate_ = ModeOperator(grid, params, CrankNicolsonFunction{CrankNicolsonFunction::Part::propagate, dt});
        weight1_ = ModeOperator(grid, params, CrankNicolsonFunction{CrankNicolsonFunction::Part::forcing, dt});
        break;
    }
  }

  double dt() const { return dt_; }

  /// N(U, t): nonlinear sources (if enabled) plus forcing.
  SpectralField rhs(const SpectralState& s) const {
    SpectralField n = nonlinear_ ? nonlinear_sources(s, params_) : SpectralField(s.grid(), 7);
    if (forcing_) n += forcing_(s.time);
    return n;
  }

  bool has_source() const { return nonlinear_ || static_cast<bool>(forcing_); }

  /// One step; the output time is `time_after` (defaults to state.time + dt).
  SpectralState step(const SpectralState& s, std::optional<double> time_after = std::nullopt) const {
    SpectralState out = s;
    out.time = time_after.value_or(s.time + dt_);
    propagate_.apply(out.fields);
    if (!has_source()) return out;

    const SpectralField n0 = rhs(s);
    SpectralField w = n0;
    weight1_.apply(w);
    out.fields += w;
    if (scheme_ == Scheme::etd2rk) {
      SpectralField diff = rhs(out);
      diff -= n0;
      weight2_.apply(diff);
      out.fields += diff;
    }
    return out;
  }

private:
  FluidParams params_;
  Scheme scheme_;
  double dt_;
  bool nonlinear_;
  Forcing forcing_;
  ModeOperator propagate_;
  ModeOperator weight1_;
  ModeOperator weight2_;
};

inline bool all_finite(const SpectralField& f) {
  for (const auto& v : f.data())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

/// Single step of the chosen scheme.
inline SpectralState etd_step(const SpectralState& state, const FluidParams& params, double dt, Scheme scheme,
                              bool nonlinear = true, Forcing forcing = {}) {
  const Stepper stepper(state.grid(), params, scheme, dt, nonlinear, std::move(forcing));
  SpectralState out;
  try {
    out = stepper.step(state);
  } catch (const InputError& e) {
    throw IntegrationError(e.what(), 1);
  }
  if (!all_finite(out.fields)) throw IntegrationError("non-finite value after step", 1);
  return out;
}

struct TrajectoryRecord {
  double time = 0.0;
  std::size_t step = 0;
  NormReport norms;
  double mass = 0.0;            ///< int rho dx (zero mode of rho)
  double director_drift = 0.0;  ///< max | |n + w0| - 1 |
  double energy = 0.0;          ///< F^N_1 with the configured eta
  std::optional<SpectralState> snapshot;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  SpectralState final_state;
  std::uint64_t provenance = 0;
  double max_renormalization_drift = 0.0;
};

/// FNV-1a over the run configuration, stamped into trajectories.
inline std::uint64_t config_hash(const GridSpec& grid, const FluidParams& params, const IntegratorConfig& cfg) {
  std::uint64_t h = params.hash();
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t ints[] = {grid.dim, grid.points_per_axis, static_cast<int>(cfg.scheme), cfg.renormalize_every,
                               cfg.diagnostics_every, cfg.nonlinear ? 1 : 0, cfg.norm_order};
  const double reals[] = {grid.period, cfg.dt, cfg.t_end, cfg.eta};
  mix(ints, sizeof ints);
  mix(reals, sizeof reals);
  return h;
}

inline TrajectoryRecord make_record(const SpectralState& s, std::size_t step, const IntegratorConfig& cfg,
                                    bool keep_snapshot) {
  TrajectoryRecord r;
  r.time = s.time;
  r.step = step;
  r.norms = norm_report(s, cfg.norm_order);
  r.mass = s.fields.at(kRho, 0).real();
  r.director_drift = director_drift(inverse_transform(extract_components(s.fields, kDirector, 3)), s.w0);
  r.energy = energy_functional_F(s, std::max(cfg.norm_order, 2), 1, cfg.eta).value;
  if (keep_snapshot) r.snapshot = s;
  return r;
}

using StepObserver = std::function<void(const SpectralState&, std::size_t step)>;

/// Advances `initial` to cfg.t_end. The global step index is round(time/dt),
/// so a run resumed from a checkpoint reproduces the original cadence.
inline Trajectory simulate(const SpectralState& initial, const FluidParams& params, const IntegratorConfig& cfg,
                           Forcing forcing = {}, const StepObserver& observer = {}) {
  params.validate();
  cfg.validate();
  Trajectory traj;
  traj.provenance = config_hash(initial.grid(), params, cfg);
  const Stepper stepper(initial.grid(), params, cfg.scheme, cfg.dt, cfg.nonlinear, std::move(forcing));

  const std::size_t total = cfg.total_steps();
  const auto first = static_cast<std::size_t>(std::llround(initial.time / cfg.dt));
  const double initial_size = std::sqrt(l2_norm_squared(initial.fields));
  const double blowup = 1e6 * std::max(initial_size, std::numeric_limits<double>::min());

  auto wants_snapshot = [&](std::size_t i) {
    return cfg.snapshot_every > 0 && i % static_cast<std::size_t>(cfg.snapshot_every) == 0;
  };

  SpectralState s = initial;
  traj.records.push_back(make_record(s, first, cfg, wants_snapshot(first)));
  if (observer) observer(s, first);
  for (std::size_t i = first + 1; i <= total; ++i) {
    try {
      s = stepper.step(s, static_cast<double>(i) * cfg.dt);
    } catch (const InputError& e) {
      throw IntegrationError(e.what(), i);
    }
    if (!all_finite(s.fields)) throw IntegrationError("non-finite value in state", i);
    if (std::sqrt(l2_norm_squared(s.fields)) > blowup)
      throw IntegrationError("blow-up: state norm exceeded 1e6 x its initial value", i);
    if (cfg.renormalize_every > 0 && i % static_cast<std::size_t>(cfg.renormalize_every) == 0) {
      const RenormalizedDirector r = renormalize_director(to_physical(s));
      traj.max_renormalization_drift = std::max(traj.max_renormalization_drift, r.drift);
      insert_components(s.fields, kDirector, forward_transform(r.state.director_pert));
    }
    if (observer) observer(s, i);
    if (i % static_cast<std::size_t>(cfg.diagnostics_every) == 0 || i == total)
      traj.records.push_back(make_record(s, i, cfg, wants_snapshot(i) || (i == total && cfg.snapshot_every > 0)));
  }
  traj.final_state = s;
  return traj;
}

inline Trajectory simulate(const PerturbationState& initial, const FluidParams& params, const IntegratorConfig& cfg) {
  SpectralState s = to_spectral(initial);
  s.fields = dealias(std::move(s.fields));
  return simulate(s, params, cfg);
}

}  // namespace nlcl
