#pragma once

// Machine-readable artifacts.
//
//   norms.csv          time, then one column per labelled quantity
//   decay.csv          component,k,exponent,r2,window_lo,window_hi
//   fits.csv           label,exponent,r2,window_lo,window_hi
//   inequalities.json  [{"check": ..., "ratio" | "min_slack": ..., "pass": ...}, ...]
//
// Numbers are printed with 17 significant digits, so output is a pure
// function of the computed doubles.

#include "nlcl/evolution.hpp"
#include "nlcl/wholespace.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nlcl::cli {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Column labels of a norms table: norm-report labels plus trajectory monitors.
inline std::vector<std::string> norms_columns(const TrajectoryRecord& r) {
  std::vector<std::string> cols{"time"};
  for (const auto& [label, v] : r.norms.entries) cols.push_back(label);
  cols.insert(cols.end(), {"mass", "director_drift", "energy_F"});
  return cols;
}

inline std::string norms_row(const TrajectoryRecord& r) {
  std::string line = format_double(r.time);
  for (const auto& [label, v] : r.norms.entries) line += "," + format_double(v);
  line += "," + format_double(r.mass) + "," + format_double(r.director_drift) + "," + format_double(r.energy);
  return line;
}

inline std::string norms_csv(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) return {};
  std::string out;
  const auto cols = norms_columns(records.front());
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& r : records) out += norms_row(r) + "\n";
  return out;
}

inline std::string decay_csv(const std::vector<DecayStudyRow>& rows) {
  std::string out = "component,k,exponent,r2,window_lo,window_hi\n";
  for (const auto& r : rows)
    out += to_string(r.component) + "," + std::to_string(r.k) + "," + format_double(r.fit.exponent) + "," +
           format_double(r.fit.r_squared) + "," + format_double(r.fit.t_lo) + "," + format_double(r.fit.t_hi) + "\n";
  return out;
}

inline std::string fits_csv(const std::vector<DecayFit>& fits) {
  std::string out = "label,exponent,r2,window_lo,window_hi\n";
  for (const auto& f : fits)
    out += f.label + "," + format_double(f.exponent) + "," + format_double(f.r_squared) + "," +
           format_double(f.t_lo) + "," + format_double(f.t_hi) + "\n";
  return out;
}

struct InequalityCheck {
  std::string check;
  std::optional<double> ratio;
  std::optional<double> min_slack;
  bool pass = false;
};

inline std::string inequalities_json(const std::vector<InequalityCheck>& checks) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json j;
    j["check"] = c.check;
    if (c.ratio) j["ratio"] = std::isfinite(*c.ratio) ? nlohmann::ordered_json(*c.ratio) : nlohmann::ordered_json(nullptr);
    if (c.min_slack)
      j["min_slack"] = std::isfinite(*c.min_slack) ? nlohmann::ordered_json(*c.min_slack) : nlohmann::ordered_json(nullptr);
    j["pass"] = c.pass;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

inline std::vector<InequalityCheck> parse_inequalities_json(const std::string& text) {
  std::vector<InequalityCheck> out;
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw InputError("inequalities.json: expected a JSON array");
  for (const auto& j : arr) {
    InequalityCheck c;
    c.check = j.at("check").get<std::string>();
    if (j.contains("ratio") && j["ratio"].is_number()) c.ratio = j["ratio"].get<double>();
    if (j.contains("min_slack") && j["min_slack"].is_number()) c.min_slack = j["min_slack"].get<double>();
    c.pass = j.at("pass").get<bool>();
    out.push_back(std::move(c));
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InputError("CSV has no column '" + name + "'");
  }

  std::vector<double> numeric(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::stod(r.at(c)));
    return out;
  }
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw InputError("CSV row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw InputError("CSV is empty");
  return t;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace nlcl::cli
