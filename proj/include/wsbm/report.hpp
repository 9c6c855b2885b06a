#pragma once

// Glue between RunConfig and the library, plus structured output for the
// estimate and montecarlo commands.

#include <chrono>
#include <ctime>
#include <ostream>
#include <string>

#include "wsbm/config.hpp"
#include "wsbm/estimate.hpp"
#include "wsbm/harness.hpp"
#include "wsbm/io.hpp"

namespace wsbm {

inline std::optional<BasisSpec> basis_from(const RunConfig& cfg) {
  if (cfg.basis == "indicator") return BasisSpec::indicator_grid(cfg.thresholds);
  if (cfg.basis == "polynomial") return BasisSpec::polynomial(cfg.degree);
  return std::nullopt;
}

inline Kernel kernel_from(const RunConfig& cfg) {
  return cfg.kernel == "gaussian" ? Kernel::gaussian : Kernel::epanechnikov;
}

inline FitOptions fit_options_from(const RunConfig& cfg) {
  FitOptions opt;
  opt.r = cfg.r;
  opt.basis = basis_from(cfg);
  opt.tol = cfg.tol;
  opt.max_sweeps = cfg.max_sweeps;
  for (int m : cfg.moments) opt.functionals.push_back(FunctionalSpec::moment(m));
  for (double v : cfg.pmf) opt.functionals.push_back(FunctionalSpec::pmf_at(v));
  opt.cdf_grid = cfg.cdf_grid;
  opt.rearrange_cdf = cfg.rearrange;
  if (!cfg.density_grid.empty()) {
    DensityOptions d;
    d.grid = cfg.density_grid;
    d.kernel = kernel_from(cfg);
    d.bandwidth = cfg.bandwidth == "fixed" ? BandwidthRule::fixed(cfg.bandwidth_value)
                                           : BandwidthRule::rate(cfg.bandwidth_value);
    opt.density = std::move(d);
  }
  opt.canonical_labels = cfg.canonical;
  return opt;
}

inline BlockModelParams params_from(const RunConfig& cfg) {
  if (cfg.design == "design1" || cfg.design == "design2" || cfg.design == "design3")
    return binary_design(cfg.design.back() - '0').params;
  return read_params(cfg.design);
}

/// Montecarlo design: a preset, or a params file estimated with the
/// configured basis and the identity functional plus any requested moments.
inline Design design_from(const RunConfig& cfg) {
  Design d = (cfg.design == "design1" || cfg.design == "design2" || cfg.design == "design3")
                 ? binary_design(cfg.design.back() - '0')
                 : Design{cfg.design, read_params(cfg.design), std::nullopt, {FunctionalSpec::identity()}};
  if (auto b = basis_from(cfg)) d.basis = std::move(b);
  for (int m : cfg.moments)
    if (m != 1) d.functionals.push_back(FunctionalSpec::moment(m));
  return d;
}

inline json to_json(const RunConfig& cfg) {
  return {{"format_version", cfg.format_version},
          {"command", cfg.command},
          {"input", cfg.input},
          {"output", cfg.output},
          {"design", cfg.design},
          {"r", cfg.r},
          {"basis", cfg.basis},
          {"thresholds", cfg.thresholds},
          {"degree", cfg.degree},
          {"moments", cfg.moments},
          {"pmf", cfg.pmf},
          {"cdf_grid", cfg.cdf_grid},
          {"rearrange", cfg.rearrange},
          {"density_grid", cfg.density_grid},
          {"bandwidth", cfg.bandwidth},
          {"bandwidth_value", cfg.bandwidth_value},
          {"kernel", cfg.kernel},
          {"tol", cfg.tol},
          {"max_sweeps", cfg.max_sweeps},
          {"allow_nonconvergence", cfg.allow_nonconvergence},
          {"canonical", cfg.canonical},
          {"seed", cfg.seed},
          {"reps", cfg.reps},
          {"n", cfg.n},
          {"threads", cfg.threads}};
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json basis_json(const BasisSpec& b) {
  json out{{"description", b.describe()}, {"l", b.size()}};
  if (b.kind() == BasisSpec::Kind::indicator_grid) out["thresholds"] = b.thresholds();
  if (b.kind() == BasisSpec::Kind::polynomial) out["degree"] = b.degree();
  return out;
}

/// One structured document per estimate run. Everything except
/// "timestamp" is a deterministic function of the input and config.
inline json estimate_report(const FitResult& res, const RunConfig& cfg, std::size_t n) {
  const auto& b = res.block;
  json out;
  out["library"] = {{"name", "wsbm"}, {"version", kVersion}};
  out["timestamp"] = utc_timestamp();
  out["config"] = to_json(cfg);
  out["n"] = n;
  out["r"] = b.r;
  out["basis"] = basis_json(res.basis);
  out["p_hat"] = {{"raw", to_json(b.p_hat)}, {"normalized", to_json(b.p_hat_normalized)}};
  out["G_hat"] = to_json(b.G_hat);
  out["H1_hat"] = to_json(b.H1_hat);
  json fs = json::array();
  for (const auto& f : res.functionals)
    fs.push_back({{"functional", f.phi.label()}, {"phi_hat", to_json(f.phi_hat)}, {"H_phi_hat", to_json(f.H_phi_hat)}});
  out["functionals"] = std::move(fs);
  json cdf = json::array();
  for (const auto& f : res.cdf) cdf.push_back({{"x", f.phi.point}, {"F_hat", to_json(f.phi_hat)}});
  out["cdf"] = std::move(cdf);
  if (res.density) {
    json f = json::array();
    for (const auto& m : res.density->f_hat) f.push_back(to_json(m));
    out["density"] = {{"grid", res.density->grid},
                      {"bandwidth", res.density->bandwidth},
                      {"kernel", to_string(res.density->kernel)},
                      {"f_hat", std::move(f)}};
  }
  std::vector<std::size_t> order;
  for (auto z : b.label_order) order.push_back(z + 1);
  out["diagnostics"] = {{"eigvals", to_json(b.eigvals)},
                        {"spectrum", to_json(b.spectrum)},
                        {"eiggap", b.eiggap},
                        {"eigengap_r", res.eigengap_r},
                        {"offdiag_final", b.offdiag_final},
                        {"converged", b.converged},
                        {"sweeps", b.sweeps},
                        {"condition_G", b.condition_G},
                        {"label_order", order},
                        {"warnings", res.warnings}};
  return out;
}

inline json to_json(const McSummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"parameter", r.name},
                    {"true", r.truth},
                    {"mean", r.stats.mean},
                    {"median", r.stats.median},
                    {"std_dev", r.stats.std_dev},
                    {"iqr", r.stats.iqr},
                    {"min", r.stats.min},
                    {"max", r.stats.max}});
  return {{"library", {{"name", "wsbm"}, {"version", kVersion}}},
          {"design", s.design},
          {"r", s.r},
          {"n", s.n},
          {"reps", s.reps},
          {"seed0", s.seed0},
          {"failures", s.failures},
          {"failure_reasons", s.failure_reasons},
          {"rows", std::move(rows)}};
}

/// Flat table: one column per parameter, rows true/mean/median/std_dev/iqr.
inline void write_mc_csv(const McSummary& s, std::ostream& out) {
  out << "statistic";
  for (const auto& r : s.rows) out << ",\"" << r.name << '"';
  out << '\n';
  const auto line = [&](const char* label, auto&& get) {
    out << label;
    for (const auto& r : s.rows) out << ',' << detail::format_double(get(r));
    out << '\n';
  };
  line("true", [](const ParamRow& r) { return r.truth; });
  line("mean", [](const ParamRow& r) { return r.stats.mean; });
  line("median", [](const ParamRow& r) { return r.stats.median; });
  line("std_dev", [](const ParamRow& r) { return r.stats.std_dev; });
  line("iqr", [](const ParamRow& r) { return r.stats.iqr; });
}

inline void write_mc_text(const McSummary& s, std::ostream& out) {
  char buf[64];
  out << s.design << ": n = " << s.n << ", reps = " << s.reps << ", seed0 = " << s.seed0
      << ", failures = " << s.failures << '\n';
  out << "            ";
  for (const auto& r : s.rows) {
    std::snprintf(buf, sizeof buf, "%12s", r.name.c_str());
    out << buf;
  }
  out << '\n';
  const auto line = [&](const char* label, auto&& get) {
    std::snprintf(buf, sizeof buf, "%-12s", label);
    out << buf;
    for (const auto& r : s.rows) {
      std::snprintf(buf, sizeof buf, "%12.3f", get(r));
      out << buf;
    }
    out << '\n';
  };
  line("true value", [](const ParamRow& r) { return r.truth; });
  line("mean", [](const ParamRow& r) { return r.stats.mean; });
  line("median", [](const ParamRow& r) { return r.stats.median; });
  line("std. dev.", [](const ParamRow& r) { return r.stats.std_dev; });
  line("iqr", [](const ParamRow& r) { return r.stats.iqr; });
}

}  // namespace wsbm
