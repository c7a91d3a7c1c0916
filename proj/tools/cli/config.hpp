#pragma once

// Run configuration: INI-style "key = value" lines grouped in [sections].
// Every accepted key and its default lives in config_schema(); anything
// else is rejected.

#include "cli/expression.hpp"
#include "wsigma/core.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace wsigma::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ConfigKey {
  std::string section;
  std::string key;
  std::string default_value;
  std::string doc;
};

inline const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"run", "seed", "20240611", "seed of the randomized identity sweeps (overridden by --seed)"},

      {"output", "dir", "", "directory for report files; empty writes the JSON report to stdout (--out)"},
      {"output", "format", "json", "json, csv or both (--json / --csv)"},

      {"fixture", "name", "sphere",
       "sphere, ellipsoid, torus, graph, geodesic_sphere, great_sphere, clifford_torus"},
      {"fixture", "params", "", "space-separated key=value fixture parameters, e.g. \"R=2\""},
      {"fixture", "grid", "24", "quadrature nodes per chart axis; one value or a comma list per axis"},

      {"weight", "mu0", "0", "constant weight mu0"},
      {"weight", "function", "", "ambient weight expression in x1..x4; when set it replaces mu0"},

      {"identities", "instances", "1000", "random instances per identity"},
      {"identities", "n_max", "8", "largest operator dimension"},
      {"identities", "tolerance", "1e-11", "max relative residual"},
      {"identities", "inject_fault", "false", "test hook: perturb one weighted sigma by 1e-6"},
      {"identities", "divergence_tolerance", "1e-6", "divergence-formula check on the torus"},

      {"analyze", "r_max", "3", "largest r tabulated"},

      {"variation", "r", "0,1,2", "comma list of r"},
      {"variation", "cases", "normal_constant,normal_ambient,tangential,mixed",
       "comma list of normal_constant, normal_ambient, tangential, mixed, custom"},
      {"variation", "lambda", "", "normal speed expression for the custom case"},
      {"variation", "tau1", "", "tangential chart component 1 for the custom case"},
      {"variation", "tau2", "", "tangential chart component 2 for the custom case"},
      {"variation", "tau3", "", "tangential chart component 3 for the custom case"},
      {"variation", "indexing", "consistent", "consistent or as_printed Newton indexing in the analytic formula"},
      {"variation", "tolerance", "1e-5", "relative analytic vs finite-difference agreement"},
      {"variation", "null_tolerance", "1e-7", "tangential cases: |dF| relative to the variation scale"},
      {"variation", "reduction_tolerance", "1e-9", "curvature-tensor route vs closed route"},
      {"variation", "fd_step", "1e-3", "initial finite-difference step as a fraction of the diameter"},

      {"minimality", "r", "1,2", "comma list of r"},
      {"minimality", "support_direction", "0.2,-0.1,1", "fixed ambient vector B of the support function"},
      {"minimality", "divergence_weight", "0.3*z + 0.2*x", "varying weight for the divergence check"},
      {"minimality", "pde_tolerance", "1e-10", "Euclidean PDE characterization"},
      {"minimality", "support_tolerance", "1e-6", "support-function identity"},
      {"minimality", "position_tolerance", "1e-8", "sphere position identity"},
      {"minimality", "divergence_tolerance", "1e-6", "divergence formula"},
      {"minimality", "adjudicate", "true", "run the geodesic-sphere adjudication of the two sphere forms"},
      {"minimality", "adjudication_mu0", "0.5", "weight used by the adjudication"},
      {"minimality", "adjudication_r", "2", "r used by the adjudication"},
      {"minimality", "adjudication_samples", "40", "geodesic radii sampled in [0.15, 3]"},
      {"minimality", "adjudication_grid", "16", "quadrature nodes per axis in the adjudication"},

      {"flow", "mode", "radial", "radial (round-sphere ODE) or normal (radial-graph normal flow)"},
      {"flow", "n", "2", "radial: sphere dimension"},
      {"flow", "r", "1", "order r of the functional"},
      {"flow", "R_init", "2", "radial: initial radius"},
      {"flow", "t_end", "20", "radial: final time"},
      {"flow", "dt", "0.05", "time step (radial: RK4 step; normal: explicit step)"},
      {"flow", "tolerance", "1e-6", "radial: convergence tolerance on |R - R*|"},
      {"flow", "ambient", "euclidean", "normal: euclidean or sphere"},
      {"flow", "steps", "10", "normal: number of steps"},
      {"flow", "radius", "1", "normal: base radius of the profile (geodesic radius in the sphere)"},
      {"flow", "perturbation", "0.05", "normal: amplitude of the non-round profile perturbation"},
      {"flow", "degree", "4", "normal: polynomial degree of the profile"},
      {"flow", "grid", "16,32", "normal: quadrature nodes (polar, azimuthal)"},
      {"flow", "form", "first_variation", "normal, sphere ambient: first_variation or grouped_weight residual"},
  };
  return schema;
}

/// Parsed configuration with defaults filled in. Values stay text until a
/// typed getter validates them.
class RunConfig {
 public:
  RunConfig() {
    for (const auto& k : config_schema()) values_[k.section + "." + k.key] = k.default_value;
  }

  static RunConfig from_ini(std::istream& in, const std::string& origin = "config") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
      if (body.empty()) {
        // either an empty section or a key above the first section header
        bool known_section = false;
        for (const auto& k : config_schema()) known_section |= k.section == section;
        if (!known_section || !body.data().empty())
          throw ConfigError(origin + ": '" + section + "' is not a known section");
        continue;
      }
      for (const auto& [key, node] : body) cfg.set(section, key, node.get_value<std::string>());
    }
    return cfg;
  }

  static RunConfig from_string(const std::string& text) {
    std::istringstream in(text);
    return from_ini(in);
  }

  void set(const std::string& section, const std::string& key, const std::string& value) {
    const std::string full = section + "." + key;
    if (!values_.count(full)) {
      bool known_section = false;
      for (const auto& k : config_schema()) known_section |= k.section == section;
      throw ConfigError(known_section ? "unknown key '" + key + "' in section [" + section + "]"
                                      : "unknown section [" + section + "]");
    }
    values_[full] = trim(value);
  }

  /// "section.key" -> text, in schema-independent sorted order.
  const std::map<std::string, std::string>& values() const { return values_; }

  const std::string& str(const std::string& full) const {
    const auto it = values_.find(full);
    if (it == values_.end()) throw std::logic_error("config key not in schema: " + full);
    return it->second;
  }

  double real(const std::string& full) const { return parse_real(full, str(full)); }

  long long integer(const std::string& full, long long lo, long long hi) const {
    const std::string& s = str(full);
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(full, s, "an integer");
    if (v < lo || v > hi) bad(full, s, "an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::uint64_t seed(const std::string& full) const {
    const std::string& s = str(full);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(full, s, "a non-negative integer");
    return v;
  }

  double positive(const std::string& full) const {
    const double v = real(full);
    if (!(v > 0.0)) bad(full, str(full), "a positive number");
    return v;
  }

  bool boolean(const std::string& full) const {
    const std::string& s = str(full);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad(full, s, "true or false");
  }

  std::string choice(const std::string& full, const std::vector<std::string>& allowed) const {
    const std::string& s = str(full);
    for (const auto& a : allowed)
      if (a == s) return s;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    bad(full, s, "one of " + list);
  }

  std::vector<std::string> list(const std::string& full) const {
    std::vector<std::string> out;
    std::stringstream ss(str(full));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) bad(full, str(full), "a comma-separated list without empty items");
      out.push_back(item);
    }
    if (out.empty()) bad(full, str(full), "a non-empty list");
    return out;
  }

  std::vector<double> reals(const std::string& full) const {
    std::vector<double> out;
    for (const auto& s : list(full)) out.push_back(parse_real(full, s));
    return out;
  }

  std::vector<int> ints(const std::string& full, int lo, int hi) const {
    std::vector<int> out;
    for (const auto& s : list(full)) {
      int v = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < lo || v > hi)
        bad(full, s, "integers in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out.push_back(v);
    }
    return out;
  }

  /// Empty text gives an empty expression.
  Expression expression(const std::string& full) const {
    if (str(full).empty()) return {};
    try {
      return Expression::parse(str(full));
    } catch (const ExpressionError& e) {
      throw ConfigError(full + ": " + e.what());
    }
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(b, e - b + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
  }

  [[noreturn]] static void bad(const std::string& full, const std::string& value, const std::string& expected) {
    throw ConfigError(full + " = '" + value + "': expected " + expected);
  }

  static double parse_real(const std::string& full, const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) bad(full, s, "a finite number");
    return v;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace wsigma::cli
