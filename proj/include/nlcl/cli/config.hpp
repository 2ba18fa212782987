#pragma once

// Run configuration read from a TOML-style key/value file:
//
//   mode = "simulate"          # simulate | linear-decay | check | fit | report
//   scenario = "mixed-small"
//   seed = 42
//
//   [grid]
//   dim = 2
//   points = 64
//
// Supported syntax: [section] headers, key = value with strings in double
// quotes, integers, floats, true/false and flat arrays; '#' starts a comment.
// Unknown sections or keys are rejected.

#include "nlcl/error.hpp"
#include "nlcl/evolution.hpp"
#include "nlcl/params.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/wholespace.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace nlcl::cli {

using Value = std::variant<bool, std::int64_t, double, std::string, std::vector<double>, std::vector<std::string>>;

/// Flat table keyed by "section.key" (top-level keys have no prefix).
class KeyValueTable {
public:
  void set(const std::string& key, Value v, int line) {
    if (values_.count(key)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    values_[key] = {std::move(v), line};
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;
  }

  double number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto d = std::get_if<double>(&it->second.value)) return *d;
    if (auto i = std::get_if<std::int64_t>(&it->second.value)) return static_cast<double>(*i);
    throw type_error(key, "a number");
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto i = std::get_if<std::int64_t>(&it->second.value)) return *i;
    throw type_error(key, "an integer");
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto b = std::get_if<bool>(&it->second.value)) return *b;
    throw type_error(key, "true or false");
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto s = std::get_if<std::string>(&it->second.value)) return *s;
    throw type_error(key, "a string");
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto v = std::get_if<std::vector<double>>(&it->second.value)) return *v;
    throw type_error(key, "an array of numbers");
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto v = std::get_if<std::vector<std::string>>(&it->second.value)) return *v;
    throw type_error(key, "an array of strings");
  }

private:
  struct Entry {
    Value value;
    int line = 0;
  };

  ConfigError type_error(const std::string& key, const char* expected) const {
    return ConfigError("line " + std::to_string(values_.at(key).line) + ": '" + key + "' must be " + expected);
  }

  std::map<std::string, Entry> values_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline bool bare_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

[[noreturn]] inline void syntax(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

inline std::string parse_string(const std::string& s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') syntax(line, "malformed string " + s);
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) {
      const char e = s[++i];
      out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
    } else if (s[i] == '"') {
      syntax(line, "unexpected quote in " + s);
    } else {
      out += s[i];
    }
  }
  return out;
}

inline Value parse_scalar(const std::string& s, int line) {
  if (s.empty()) syntax(line, "missing value");
  if (s.front() == '"') return parse_string(s, line);
  if (s == "true") return true;
  if (s == "false") return false;
  std::string digits;
  for (char c : s)
    if (c != '_') digits += c;
  const bool floating = digits.find_first_of(".eEni") != std::string::npos;
  if (!floating) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec == std::errc() && p == digits.data() + digits.size()) return v;
    // unsigned 64-bit values above INT64_MAX (seeds) are kept exact as strings of digits
    std::uint64_t u = 0;
    auto [q, ec2] = std::from_chars(digits.data(), digits.data() + digits.size(), u);
    if (ec2 == std::errc() && q == digits.data() + digits.size()) return std::string(digits);
    syntax(line, "malformed integer " + s);
  }
  if (digits == "inf" || digits == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || p != digits.data() + digits.size()) syntax(line, "malformed number " + s);
  return v;
}

inline Value parse_value(const std::string& s, int line) {
  if (s.empty() || s.front() != '[') return parse_scalar(s, line);
  if (s.back() != ']') syntax(line, "unterminated array");
  std::vector<std::string> items;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) items.push_back(trim(cur));
  std::vector<double> nums;
  std::vector<std::string> strs;
  for (const auto& item : items) {
    const Value v = parse_scalar(item, line);
    if (auto str = std::get_if<std::string>(&v); str && item.front() == '"') {
      strs.push_back(*str);
    } else if (auto d = std::get_if<double>(&v)) {
      nums.push_back(*d);
    } else if (auto i = std::get_if<std::int64_t>(&v)) {
      nums.push_back(static_cast<double>(*i));
    } else {
      syntax(line, "unsupported array element " + item);
    }
  }
  if (!nums.empty() && !strs.empty()) syntax(line, "mixed array");
  if (!strs.empty()) return strs;
  return nums;
}

}  // namespace detail

inline KeyValueTable parse_key_values(const std::string& text) {
  KeyValueTable table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(detail::strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') detail::syntax(line, "malformed section header");
      section = detail::trim(std::string_view(s).substr(1, s.size() - 2));
      if (!detail::bare_key(section)) detail::syntax(line, "malformed section name '" + section + "'");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) detail::syntax(line, "expected key = value");
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    if (!detail::bare_key(key)) detail::syntax(line, "malformed key '" + key + "'");
    table.set(section.empty() ? key : section + "." + key, detail::parse_value(detail::trim(std::string_view(s).substr(eq + 1)), line),
              line);
  }
  return table;
}

enum class Mode { simulate, linear_decay, check, fit, report };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::linear_decay: return "linear-decay";
    case Mode::check: return "check";
    case Mode::fit: return "fit";
    case Mode::report: return "report";
  }
  return "?";
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "simulate") return Mode::simulate;
  if (s == "linear-decay") return Mode::linear_decay;
  if (s == "check" || s == "check-inequalities") return Mode::check;
  if (s == "fit") return Mode::fit;
  if (s == "report") return Mode::report;
  throw ConfigError("unknown mode '" + s + "' (expected simulate, linear-decay, check, fit or report)");
}

struct DecaySettings {
  std::vector<WholespaceComponent> components{WholespaceComponent::rho, WholespaceComponent::u_potential,
                                              WholespaceComponent::u_solenoidal, WholespaceComponent::n};
  std::vector<int> ks{0, 1, 2};
  double t_min = 1.0;
  double t_max = 1e4;
  int points_per_decade = 20;
  double fit_lo = 1e2;
  double fit_hi = 1e4;
  double rel_tol = 1e-9;
  std::string profile = "gaussian";  ///< gaussian | rational
  double sigma = 1.0;                ///< gaussian width / rational scale a
  int power = 0;                     ///< gaussian prefactor r^power
  double exponent = 2.0;             ///< rational exponent b
};

struct FitSettings {
  double t_lo = 10.0;
  double t_hi = 0.0;  ///< 0 = last time in norms.csv
};

struct RunConfig {
  Mode mode = Mode::simulate;
  std::string scenario = "mixed-small";
  double amplitude = 1e-3;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  GridSpec grid{2, 64, 2.0 * std::numbers::pi};
  FluidParams fluid;
  IntegratorConfig integrator;
  int checkpoint_every = 0;  ///< steps between checkpoints, 0 = final only
  DecaySettings decay;
  FitSettings fit;

  void validate() const {
    fluid.validate();
    try {
      grid.validate();
    } catch (const InputError& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
    if (mode == Mode::simulate || mode == Mode::check) integrator.validate();
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ConfigError("amplitude must be finite and >= 0");
    if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
    if (integrator.norm_order < 1) throw ConfigError("diagnostics order must be >= 1");
    if (!(integrator.eta > 0.0)) throw ConfigError("diagnostics eta must be positive");
    if (mode == Mode::linear_decay) decay_config().validate();
  }

  DecayStudyConfig decay_config() const {
    DecayStudyConfig c;
    c.params = fluid;
    c.components = decay.components;
    c.ks = decay.ks;
    c.t_min = decay.t_min;
    c.t_max = decay.t_max;
    c.points_per_decade = decay.points_per_decade;
    c.fit_lo = decay.fit_lo;
    c.fit_hi = decay.fit_hi;
    c.rel_tol = decay.rel_tol;
    RadialProfile p = RadialProfile::gaussian();
    if (decay.profile == "gaussian") {
      p = RadialProfile::gaussian(decay.sigma, decay.power);
    } else if (decay.profile == "rational") {
      p = RadialProfile::rational(decay.sigma, decay.exponent);
    } else {
      throw ConfigError("unknown decay profile '" + decay.profile + "' (expected gaussian or rational)");
    }
    c.data = {p, std::nullopt, p, p};
    return c;
  }
};

namespace detail {

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mode", "scenario", "amplitude", "seed", "output_dir",
      "grid.dim", "grid.points", "grid.period",
      "fluid.mu", "fluid.nu", "fluid.pressure_law", "fluid.gamma",
      "integrator.scheme", "integrator.dt", "integrator.t_end", "integrator.renormalize_every",
      "integrator.diagnostics_every", "integrator.checkpoint_every", "integrator.nonlinear",
      "diagnostics.order", "diagnostics.eta",
      "decay.components", "decay.k", "decay.t_min", "decay.t_max", "decay.points_per_decade", "decay.fit_lo",
      "decay.fit_hi", "decay.rel_tol", "decay.profile", "decay.sigma", "decay.power", "decay.exponent",
      "fit.t_lo", "fit.t_hi"};
  return keys;
}

inline int to_int(std::int64_t v, const char* key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(std::string(key) + " out of range");
  return static_cast<int>(v);
}

inline std::uint64_t parse_seed(const KeyValueTable& t) {
  if (!t.has("seed")) return 0;
  try {
    const std::int64_t v = t.integer("seed", 0);
    if (v < 0) throw ConfigError("seed must be a nonnegative integer");
    return static_cast<std::uint64_t>(v);
  } catch (const ConfigError&) {
    const std::string s = t.string("seed", "");
    std::uint64_t u = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), u);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("seed must be an unsigned 64-bit integer");
    return u;
  }
}

}  // namespace detail

inline RunConfig config_from_table(const KeyValueTable& t) {
  for (const auto& k : t.keys())
    if (!detail::known_keys().count(k)) throw ConfigError("unknown configuration key '" + k + "'");
  using detail::to_int;
  RunConfig c;
  c.mode = mode_from_string(t.string("mode", "simulate"));
  c.scenario = t.string("scenario", c.scenario);
  c.amplitude = t.number("amplitude", c.amplitude);
  c.seed = detail::parse_seed(t);
  c.output_dir = t.string("output_dir", c.output_dir);

  c.grid.dim = to_int(t.integer("grid.dim", c.grid.dim), "grid.dim");
  c.grid.points_per_axis = to_int(t.integer("grid.points", c.grid.points_per_axis), "grid.points");
  c.grid.period = t.number("grid.period", c.grid.period);

  c.fluid.mu = t.number("fluid.mu", c.fluid.mu);
  c.fluid.nu = t.number("fluid.nu", c.fluid.nu);
  const std::string law = t.string("fluid.pressure_law", "linear");
  if (law == "linear") {
    c.fluid.pressure = PressureLaw{};
  } else if (law == "gamma") {
    c.fluid.pressure = PressureLaw{PressureLaw::Kind::gamma_law, t.number("fluid.gamma", 1.4)};
  } else {
    throw ConfigError("unknown pressure_law '" + law + "' (expected linear or gamma)");
  }

  auto& ic = c.integrator;
  ic.scheme = scheme_from_string(t.string("integrator.scheme", to_string(ic.scheme)));
  ic.dt = t.number("integrator.dt", ic.dt);
  ic.t_end = t.number("integrator.t_end", ic.t_end);
  ic.renormalize_every = to_int(t.integer("integrator.renormalize_every", 0), "integrator.renormalize_every");
  ic.diagnostics_every = to_int(t.integer("integrator.diagnostics_every", ic.diagnostics_every),
                                "integrator.diagnostics_every");
  ic.nonlinear = t.boolean("integrator.nonlinear", ic.nonlinear);
  c.checkpoint_every = to_int(t.integer("integrator.checkpoint_every", 0), "integrator.checkpoint_every");
  ic.norm_order = to_int(t.integer("diagnostics.order", ic.norm_order), "diagnostics.order");
  ic.eta = t.number("diagnostics.eta", ic.eta);

  auto& d = c.decay;
  if (t.has("decay.components")) {
    d.components.clear();
    for (const auto& s : t.strings("decay.components", {})) d.components.push_back(wholespace_component_from_string(s));
  }
  if (t.has("decay.k")) {
    d.ks.clear();
    for (double k : t.numbers("decay.k", {})) {
      if (k != std::floor(k)) throw ConfigError("decay.k entries must be integers");
      d.ks.push_back(static_cast<int>(k));
    }
  }
  d.t_min = t.number("decay.t_min", d.t_min);
  d.t_max = t.number("decay.t_max", d.t_max);
  d.points_per_decade = to_int(t.integer("decay.points_per_decade", d.points_per_decade), "decay.points_per_decade");
  d.fit_lo = t.number("decay.fit_lo", d.fit_lo);
  d.fit_hi = t.number("decay.fit_hi", d.fit_hi);
  d.rel_tol = t.number("decay.rel_tol", d.rel_tol);
  d.profile = t.string("decay.profile", d.profile);
  d.sigma = t.number("decay.sigma", d.sigma);
  d.power = to_int(t.integer("decay.power", d.power), "decay.power");
  d.exponent = t.number("decay.exponent", d.exponent);

  c.fit.t_lo = t.number("fit.t_lo", c.fit.t_lo);
  c.fit.t_hi = t.number("fit.t_hi", c.fit.t_hi);
  return c;
}

/// Parses and validates; any constraint violation is reported before compute starts.
inline RunConfig parse_config(const std::string& text) {
  RunConfig c = config_from_table(parse_key_values(text));
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace nlcl::cli
