#pragma once

// Monte Carlo replication of simulation designs: simulate, fit, align the
// arbitrary community labels to the truth, summarize across replications.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wsbm/core.hpp"
#include "wsbm/estimate.hpp"
#include "wsbm/simulate.hpp"

namespace wsbm {

struct Design {
  std::string name;
  BlockModelParams params;
  std::optional<BasisSpec> basis;          // default_basis() per draw when empty
  std::vector<FunctionalSpec> functionals;  // targets reported per (z1 <= z2)
};

/// Binary two-community designs: p = (0.3, 0.7), theta_11 = 0.2,
/// theta_12 = 0, theta_22 = 0.4 / 0.6 / 0.8 for designs 1 / 2 / 3.
inline Design binary_design(int which) {
  if (which < 1 || which > 3) throw Error(ErrorCode::config, "design must be 1, 2 or 3");
  const double theta22 = 0.2 + 0.2 * which;
  auto params = BlockModelParams::from_upper(
      {0.3, 0.7}, {Bernoulli{0.2}, Bernoulli{0.0}, Bernoulli{theta22}});
  return Design{"design" + std::to_string(which), std::move(params),
                BasisSpec::indicator_grid({0.0, 1.0}), {FunctionalSpec::identity()}};
}

struct McConfig {
  double tol = kDefaultJdTolerance;
  int max_sweeps = kDefaultMaxSweeps;
  unsigned threads = 1;
};

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double std_dev = 0.0;
  double iqr = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Sample statistics; std_dev uses the n - 1 denominator, quartiles are
/// type-7 sample quantiles.
inline SummaryStats summarize(std::vector<double> v) {
  SummaryStats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  CompensatedSum sum;
  for (double x : v) sum += x;
  s.mean = sum.value() / static_cast<double>(v.size());
  CompensatedSum ss;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std_dev = v.size() > 1 ? std::sqrt(ss.value() / static_cast<double>(v.size() - 1)) : 0.0;
  s.median = detail::quantile_sorted(v, 0.5);
  s.iqr = detail::quantile_sorted(v, 0.75) - detail::quantile_sorted(v, 0.25);
  s.min = v.front();
  s.max = v.back();
  return s;
}

struct ParamRow {
  std::string name;  // e.g. "phi[1,1]" (first functional), "moment(2)[1,2]", "p[1]"
  double truth = 0.0;
  SummaryStats stats;
};

struct McSummary {
  std::string design;
  std::size_t r = 0;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed0 = 0;
  std::vector<ParamRow> rows;
  std::size_t failures = 0;
  std::map<std::string, std::size_t> failure_reasons;

  const ParamRow& row(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return r;
    throw Error(ErrorCode::config, "no summary row named " + name);
  }
};

struct Replication {
  bool ok = false;
  std::string error;
  Vector p_hat;                 // aligned, raw least squares
  std::vector<Matrix> phi_hat;  // aligned, one per design functional
};

/// Permutation of estimated labels minimizing the squared error of
/// (p, diag phi) against the truth, by enumeration over all r! orders.
/// Returns perm with new label k = estimated label perm[k].
inline std::vector<std::size_t> align_to_truth(const Vector& p_hat, const std::vector<Matrix>& phi_hat,
                                               const std::vector<double>& p_true,
                                               const std::vector<Matrix>& phi_true) {
  const std::size_t r = p_true.size();
  std::vector<std::size_t> perm(r), best;
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const auto e = static_cast<Eigen::Index>(perm[k]);
      const auto t = static_cast<Eigen::Index>(k);
      cost += std::pow(p_hat[e] - p_true[k], 2);
      for (std::size_t f = 0; f < phi_hat.size(); ++f) cost += std::pow(phi_hat[f](e, e) - phi_true[f](t, t), 2);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::string param_name(std::size_t f, const FunctionalSpec& phi, std::size_t z1, std::size_t z2) {
  const std::string base = f == 0 ? "phi" : phi.label();
  return base + "[" + std::to_string(z1 + 1) + "," + std::to_string(z2 + 1) + "]";
}

/// One replication: simulate with `seed`, fit, align to truth.
inline Replication replicate(const Design& design, std::size_t n, std::uint64_t seed,
                             const McConfig& cfg, const std::vector<Matrix>& phi_true) {
  Replication rep;
  try {
    const auto draw = draw_network(design.params, n, seed);
    FitOptions opt;
    opt.r = design.params.r();
    opt.basis = design.basis;
    opt.tol = cfg.tol;
    opt.max_sweeps = cfg.max_sweeps;
    opt.functionals = design.functionals;
    opt.canonical_labels = false;
    const auto res = fit(draw.net, opt);
    std::vector<Matrix> phis;
    for (const auto& f : res.functionals) phis.push_back(f.phi_hat);
    const auto perm = align_to_truth(res.block.p_hat, phis, design.params.p(), phi_true);
    const auto inv_src = [&](std::size_t k) { return static_cast<Eigen::Index>(perm[k]); };
    const auto r = perm.size();
    rep.p_hat.resize(static_cast<Eigen::Index>(r));
    for (std::size_t k = 0; k < r; ++k) rep.p_hat[static_cast<Eigen::Index>(k)] = res.block.p_hat[inv_src(k)];
    for (const auto& m : phis) {
      Matrix out(m.rows(), m.cols());
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b)
          out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(inv_src(a), inv_src(b));
      rep.phi_hat.push_back(std::move(out));
    }
    rep.ok = true;
  } catch (const Error& e) {
    rep.error = to_string(e.code());
  }
  return rep;
}

/// Runs `reps` replications with seeds seed0, seed0 + 1, ...; workers pick
/// replication indices dynamically, results are reduced in index order.
inline McSummary run_design(const Design& design, std::size_t n, std::size_t reps, std::uint64_t seed0,
                            const McConfig& cfg = {}) {
  if (reps < 2) throw Error(ErrorCode::config, "montecarlo needs reps >= 2");
  std::vector<Matrix> phi_true;
  for (const auto& f : design.functionals) phi_true.push_back(design.params.functional_truth(f));

  std::vector<Replication> results(reps);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < reps; k = next++)
      results[k] = replicate(design, n, seed0 + k, cfg, phi_true);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(reps)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  McSummary s;
  s.design = design.name;
  s.r = design.params.r();
  s.n = n;
  s.reps = reps;
  s.seed0 = seed0;
  for (const auto& rep : results)
    if (!rep.ok) {
      ++s.failures;
      ++s.failure_reasons[rep.error];
    }
  if (s.failures == reps)
    throw Error(ErrorCode::all_replications_failed, "all " + std::to_string(reps) + " replications failed");

  const auto collect = [&](auto&& get) {
    std::vector<double> v;
    for (const auto& rep : results)
      if (rep.ok) v.push_back(get(rep));
    return summarize(std::move(v));
  };
  const std::size_t r = s.r;
  for (std::size_t f = 0; f < design.functionals.size(); ++f)
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a; b < r; ++b) {
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        s.rows.push_back({param_name(f, design.functionals[f], a, b), phi_true[f](ia, ib),
                          collect([&](const Replication& rep) { return rep.phi_hat[f](ia, ib); })});
      }
  for (std::size_t z = 0; z < r; ++z) {
    const auto iz = static_cast<Eigen::Index>(z);
    s.rows.push_back({"p[" + std::to_string(z + 1) + "]", design.params.p()[z],
                      collect([&](const Replication& rep) { return rep.p_hat[iz]; })});
  }
  return s;
}

}  // namespace wsbm
