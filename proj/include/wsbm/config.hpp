#pragma once

// Run configuration for the command-line tool.
//
// File format (format_version 1): one `key: value` per line, `#` starts a
// comment, blank lines are ignored. Lists are comma separated, optionally
// wrapped in [ ]; numeric grids may also be written `lo:hi:count`.
// Unknown keys are rejected. Command-line flags override file values and
// go through the same parser.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsbm/core.hpp"

namespace wsbm {

inline constexpr int kConfigFormatVersion = 1;

struct RunConfig {
  int format_version = kConfigFormatVersion;
  std::string command;  // simulate | estimate | montecarlo
  std::string input;
  std::string output;
  std::string table;   // montecarlo flat CSV
  std::string labels;  // simulate: latent labels side file
  std::string network_format = "auto";  // auto | edgelist | dense
  std::string design = "design1";       // design1..3 or a params JSON path

  std::size_t r = 2;
  std::string basis = "auto";  // auto | indicator | polynomial
  std::vector<double> thresholds;
  int degree = 3;

  std::vector<int> moments;
  std::vector<double> pmf;
  std::vector<double> cdf_grid;
  bool rearrange = false;
  std::vector<double> density_grid;
  std::string bandwidth = "rate";  // rate | fixed
  double bandwidth_value = 1.0;    // c for rate, h for fixed
  std::string kernel = "epanechnikov";

  double tol = 1e-12;
  int max_sweeps = 100;
  bool allow_nonconvergence = false;
  bool canonical = true;

  std::uint64_t seed = 1;
  std::size_t reps = 1000;
  std::size_t n = 100;
  unsigned threads = 1;

  std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
  T out{};
  const auto s = trim(text);
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || s.empty())
    throw Error(ErrorCode::config, "key '" + key + "': cannot parse '" + s + "' as a number");
  return out;
}

inline bool parse_bool(const std::string& text, const std::string& key) {
  const auto s = trim(text);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw Error(ErrorCode::config, "key '" + key + "': expected a boolean, got '" + s + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw Error(ErrorCode::config, "key '" + key + "': unterminated list");
    s = trim(std::string_view(s).substr(1, s.size() - 2));
  }
  std::vector<T> out;
  if (s.empty()) return out;
  if constexpr (std::is_floating_point_v<T>) {
    // lo:hi:count
    if (s.find(':') != std::string::npos && s.find(',') == std::string::npos) {
      std::vector<std::string> parts;
      std::stringstream ss(s);
      for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
      if (parts.size() != 3) throw Error(ErrorCode::config, "key '" + key + "': grid must be lo:hi:count");
      const auto lo = parse_number<double>(parts[0], key);
      const auto hi = parse_number<double>(parts[1], key);
      const auto count = parse_number<int>(parts[2], key);
      if (count < 1 || (count > 1 && !(hi > lo)))
        throw Error(ErrorCode::config, "key '" + key + "': grid needs count >= 1 and hi > lo");
      for (int k = 0; k < count; ++k)
        out.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
      return out;
    }
  }
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_number<T>(part, key));
  return out;
}

}  // namespace detail

/// Assigns one key. Throws config errors for unknown keys or bad values.
inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& raw) {
  using namespace detail;
  const std::string v = unquote(trim(raw));
  if (key == "format_version") {
    cfg.format_version = parse_number<int>(v, key);
    if (cfg.format_version != kConfigFormatVersion)
      throw Error(ErrorCode::config, "unsupported format_version " + v);
  } else if (key == "command") cfg.command = v;
  else if (key == "input") cfg.input = v;
  else if (key == "output") cfg.output = v;
  else if (key == "table") cfg.table = v;
  else if (key == "labels") cfg.labels = v;
  else if (key == "network_format") cfg.network_format = v;
  else if (key == "design") cfg.design = v;
  else if (key == "r") cfg.r = parse_number<std::size_t>(v, key);
  else if (key == "basis") cfg.basis = v;
  else if (key == "thresholds") cfg.thresholds = parse_list<double>(v, key);
  else if (key == "degree") cfg.degree = parse_number<int>(v, key);
  else if (key == "moments") cfg.moments = parse_list<int>(v, key);
  else if (key == "pmf") cfg.pmf = parse_list<double>(v, key);
  else if (key == "cdf_grid") cfg.cdf_grid = parse_list<double>(v, key);
  else if (key == "rearrange") cfg.rearrange = parse_bool(v, key);
  else if (key == "density_grid") cfg.density_grid = parse_list<double>(v, key);
  else if (key == "bandwidth") cfg.bandwidth = v;
  else if (key == "bandwidth_value") cfg.bandwidth_value = parse_number<double>(v, key);
  else if (key == "kernel") cfg.kernel = v;
  else if (key == "tol") cfg.tol = parse_number<double>(v, key);
  else if (key == "max_sweeps") cfg.max_sweeps = parse_number<int>(v, key);
  else if (key == "allow_nonconvergence") cfg.allow_nonconvergence = parse_bool(v, key);
  else if (key == "canonical") cfg.canonical = parse_bool(v, key);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(v, key);
  else if (key == "reps") cfg.reps = parse_number<std::size_t>(v, key);
  else if (key == "n") cfg.n = parse_number<std::size_t>(v, key);
  else if (key == "threads") cfg.threads = parse_number<unsigned>(v, key);
  else throw Error(ErrorCode::config, "unknown key '" + key + "'");
}

/// Checks cross-field constraints; appends soft warnings to cfg.warnings.
inline void validate(RunConfig& cfg) {
  const auto bad = [](const std::string& m) { throw Error(ErrorCode::config, m); };
  if (cfg.command != "simulate" && cfg.command != "estimate" && cfg.command != "montecarlo")
    bad("command must be simulate, estimate or montecarlo (got '" + cfg.command + "')");
  if (cfg.r < 1) bad("r must be >= 1");
  if (cfg.basis != "auto" && cfg.basis != "indicator" && cfg.basis != "polynomial")
    bad("basis must be auto, indicator or polynomial");
  if (cfg.basis == "indicator") {
    if (cfg.thresholds.empty()) bad("indicator basis needs thresholds");
    BasisSpec::indicator_grid(cfg.thresholds);  // throws if not increasing
    if (cfg.thresholds.size() < cfg.r) bad("basis size l = " + std::to_string(cfg.thresholds.size()) + " is below r");
  }
  if (cfg.basis == "polynomial") {
    if (cfg.degree < 0) bad("polynomial degree must be >= 0");
    if (static_cast<std::size_t>(cfg.degree) + 1 < cfg.r) bad("polynomial basis size is below r");
  }
  if (cfg.bandwidth != "rate" && cfg.bandwidth != "fixed") bad("bandwidth must be rate or fixed");
  if (!(cfg.bandwidth_value > 0.0)) bad("bandwidth_value must be > 0");
  if (cfg.kernel != "epanechnikov" && cfg.kernel != "gaussian") bad("kernel must be epanechnikov or gaussian");
  if (!(cfg.tol > 0.0)) bad("tol must be > 0");
  if (cfg.max_sweeps < 1) bad("max_sweeps must be >= 1");
  if (cfg.network_format != "auto" && cfg.network_format != "edgelist" && cfg.network_format != "dense")
    bad("network_format must be auto, edgelist or dense");
  for (int m : cfg.moments)
    if (m < 0) bad("moment powers must be >= 0");

  if (cfg.command == "estimate") {
    if (cfg.input.empty()) bad("estimate needs an input network");
    if (!std::filesystem::exists(cfg.input))
      throw Error(ErrorCode::io, "input file '" + cfg.input + "' does not exist");
  }
  if (cfg.command == "montecarlo" && cfg.reps < 2) bad("montecarlo needs reps >= 2");
  if (cfg.command != "estimate" && cfg.n < 4) bad("n must be >= 4");
  if (cfg.command == "simulate" && cfg.output.empty()) bad("simulate needs an output path");
  if (cfg.threads < 1) cfg.threads = 1;

  const bool binary_preset = (cfg.basis == "indicator" && cfg.thresholds == std::vector<double>{0.0, 1.0}) ||
                             (cfg.command == "montecarlo" && cfg.design.rfind("design", 0) == 0);
  if (!cfg.density_grid.empty() && binary_preset)
    cfg.warnings.push_back("density requested together with a binary basis preset; densities need continuous weights");
}

/// Parses config text, then applies overrides in order, then validates.
inline RunConfig parse_config(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto colon = body.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::config, "line " + std::to_string(lineno) + ": expected 'key: value'");
    const auto key = detail::trim(body.substr(0, colon));
    try {
      set_config_value(cfg, key, body.substr(colon + 1));
    } catch (const Error& e) {
      const std::string what = e.what();
      const auto prefix = std::string(to_string(e.code())) + ": ";
      throw Error(ErrorCode::config, "line " + std::to_string(lineno) + ": " +
                                         (what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what));
    }
  }
  for (const auto& [k, v] : overrides) set_config_value(cfg, k, v);
  validate(cfg);
  return cfg;
}

inline RunConfig load_config(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  std::string text;
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::config, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  return parse_config(text, overrides);
}

}  // namespace wsbm
