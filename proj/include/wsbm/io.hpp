#pragma once

// File formats.
//
// Networks
//   edge list: header `i,j,weight`, then one row per unordered pair with
//              0-based node ids. Every pair of the complete graph must be
//              present exactly once (a binary non-link is an explicit 0).
//   dense:     n rows of n comma-separated numbers; the diagonal is ignored.
//   Weights are written with 17 significant digits, so write -> read is exact.
//
// Block-model parameters: JSON, {"format_version": 1, "p": [...],
//   "edge_law": [[law, ...], ...]} with law one of
//   {"family": "bernoulli", "theta"} | {"family": "discrete", "values", "probs"} |
//   {"family": "beta", "a", "b"} | {"family": "normal", "mu", "sigma"} |
//   {"family": "point", "value"}.

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wsbm/core.hpp"

namespace wsbm {

using json = nlohmann::json;

enum class NetworkFormat { auto_detect, edge_list, dense };

namespace detail {

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_index(const std::string& s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::string where(int lineno) { return "line " + std::to_string(lineno) + ": "; }

}  // namespace detail

inline Network parse_edge_list(std::istream& in) {
  std::string line;
  int lineno = 0;
  // header
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  const auto header = detail::split_csv(line);
  if (header != std::vector<std::string>{"i", "j", "weight"})
    throw Error(ErrorCode::non_numeric_weight, "edge list must start with header 'i,j,weight'");

  struct Row {
    std::size_t i, j;
    double w;
  };
  std::vector<Row> rows;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 3)
      throw Error(ErrorCode::non_numeric_weight, detail::where(lineno) + "expected 3 fields");
    Row row{};
    if (!detail::parse_index(cells[0], row.i) || !detail::parse_index(cells[1], row.j))
      throw Error(ErrorCode::non_numeric_weight, detail::where(lineno) + "node ids must be non-negative integers");
    if (!detail::parse_double(cells[2], row.w))
      throw Error(ErrorCode::non_numeric_weight, detail::where(lineno) + "weight '" + cells[2] + "' is not a number");
    if (!std::isfinite(row.w))
      throw Error(ErrorCode::non_finite_entry, detail::where(lineno) + "weight is not finite");
    if (row.i == row.j)
      throw Error(ErrorCode::self_loop, detail::where(lineno) + "self-loop on node " + std::to_string(row.i));
    const auto key = std::minmax(row.i, row.j);
    if (!seen.insert(key).second)
      throw Error(ErrorCode::duplicate_pair, detail::where(lineno) + "pair (" + std::to_string(key.first) + "," +
                                                 std::to_string(key.second) + ") listed twice");
    n = std::max({n, row.i + 1, row.j + 1});
    rows.push_back(row);
  }
  if (n * (n - 1) / 2 != rows.size() || n == 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (!seen.count({i, j}))
          throw Error(ErrorCode::missing_pair, "pair (" + std::to_string(i) + "," + std::to_string(j) +
                                                   ") is missing; every pair needs an explicit weight");
    throw Error(ErrorCode::missing_pair, "edge list is empty");
  }
  const auto N = static_cast<Eigen::Index>(n);
  Matrix w = Matrix::Zero(N, N);
  for (const auto& row : rows) {
    w(static_cast<Eigen::Index>(row.i), static_cast<Eigen::Index>(row.j)) = row.w;
    w(static_cast<Eigen::Index>(row.j), static_cast<Eigen::Index>(row.i)) = row.w;
  }
  return Network(std::move(w));
}

inline Network parse_dense(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    for (const auto& cell : detail::split_csv(line)) {
      double v = 0.0;
      if (!detail::parse_double(cell, v))
        throw Error(ErrorCode::non_numeric_weight, detail::where(lineno) + "'" + cell + "' is not a number");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const auto n = rows.size();
  for (const auto& row : rows)
    if (row.size() != n) throw Error(ErrorCode::missing_pair, "dense matrix must be square");
  const auto N = static_cast<Eigen::Index>(n);
  Matrix w(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) w(i, j) = rows[i][j];
  return Network(std::move(w));
}

inline Network read_network(const std::string& path, NetworkFormat fmt = NetworkFormat::auto_detect) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  if (fmt == NetworkFormat::auto_detect) {
    std::string first;
    const auto pos = in.tellg();
    while (std::getline(in, first) && first.find_first_not_of(" \t\r") == std::string::npos) {
    }
    fmt = first.find("weight") != std::string::npos ? NetworkFormat::edge_list : NetworkFormat::dense;
    in.clear();
    in.seekg(pos);
  }
  return fmt == NetworkFormat::edge_list ? parse_edge_list(in) : parse_dense(in);
}

inline void write_network(const Network& net, std::ostream& out, NetworkFormat fmt = NetworkFormat::edge_list) {
  const auto n = net.size();
  if (fmt == NetworkFormat::dense) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << detail::format_double(i == j ? 0.0 : net.weight(i, j));
      out << '\n';
    }
    return;
  }
  out << "i,j,weight\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out << i << ',' << j << ',' << detail::format_double(net.weight(i, j)) << '\n';
}

inline void write_network(const Network& net, const std::string& path, NetworkFormat fmt = NetworkFormat::edge_list) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  write_network(net, out, fmt);
  if (!out) throw Error(ErrorCode::io, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Parameters

inline json to_json(const EdgeLaw& law) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) return {{"family", "bernoulli"}, {"theta", d.theta}};
        else if constexpr (std::is_same_v<T, Discrete>)
          return {{"family", "discrete"}, {"values", d.values}, {"probs", d.probs}};
        else if constexpr (std::is_same_v<T, BetaLaw>) return {{"family", "beta"}, {"a", d.a}, {"b", d.b}};
        else if constexpr (std::is_same_v<T, NormalLaw>)
          return {{"family", "normal"}, {"mu", d.mu}, {"sigma", d.sigma}};
        else return {{"family", "point"}, {"value", d.value}};
      },
      law.law());
}

inline EdgeLaw edge_law_from_json(const json& j) {
  try {
    const auto family = j.at("family").get<std::string>();
    if (family == "bernoulli") return Bernoulli{j.at("theta").get<double>()};
    if (family == "discrete")
      return Discrete{j.at("values").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>()};
    if (family == "beta") return BetaLaw{j.at("a").get<double>(), j.at("b").get<double>()};
    if (family == "normal") return NormalLaw{j.at("mu").get<double>(), j.at("sigma").get<double>()};
    if (family == "point") return PointMass{j.at("value").get<double>()};
    throw Error(ErrorCode::invalid_params, "unknown edge-law family '" + family + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_params, std::string("malformed edge law: ") + e.what());
  }
}

inline json to_json(const BlockModelParams& params) {
  json laws = json::array();
  for (std::size_t a = 0; a < params.r(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < params.r(); ++b) row.push_back(to_json(params.edge_law(a, b)));
    laws.push_back(std::move(row));
  }
  return {{"format_version", 1}, {"p", params.p()}, {"edge_law", std::move(laws)}};
}

inline BlockModelParams params_from_json(const json& j) {
  try {
    if (j.contains("format_version") && j.at("format_version").get<int>() != 1)
      throw Error(ErrorCode::invalid_params, "unsupported params format_version");
    auto p = j.at("p").get<std::vector<double>>();
    const auto& laws = j.at("edge_law");
    const auto r = p.size();
    if (!laws.is_array() || laws.size() != r) throw Error(ErrorCode::invalid_params, "edge_law must be r x r");
    std::vector<EdgeLaw> full;
    for (const auto& row : laws) {
      if (!row.is_array() || row.size() != r) throw Error(ErrorCode::invalid_params, "edge_law must be r x r");
      for (const auto& law : row) full.push_back(edge_law_from_json(law));
    }
    return BlockModelParams(std::move(p), std::move(full));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_params, std::string("malformed params: ") + e.what());
  }
}

inline BlockModelParams read_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  try {
    return params_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_params, std::string("params file is not valid JSON: ") + e.what());
  }
}

inline void write_params(const BlockModelParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  out << to_json(params).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Matrices

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace wsbm
