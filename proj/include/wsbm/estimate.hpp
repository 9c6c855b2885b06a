#pragma once

// Second-stage estimators. Given G_hat, everything is least squares:
//
//   p_hat   = (G'G)^{-1} G' a_hat
//   H_phi   = (G'G)^{-1} G' M_phi G (G'G)^{-1}
//   phi_hat = H_phi ./ H_1          (elementwise)
//
// plus CDF grids, kernel conditional densities, and label handling.

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wsbm/core.hpp"
#include "wsbm/jointdiag.hpp"
#include "wsbm/moments.hpp"

namespace wsbm {

inline constexpr double kMaxConditionG = 1e8;
inline constexpr double kMinH1 = 1e-6;

struct FunctionalEstimate {
  FunctionalSpec phi;
  Matrix phi_hat;    // r x r
  Matrix H_phi_hat;  // r x r
  Matrix H1_hat;     // r x r
  Matrix M_hat;      // l x l path statistic behind H_phi_hat
};

/// Least-squares map attached to a fixed G_hat: holds (G'G)^{-1} G'.
class LeastSquaresMap {
 public:
  explicit LeastSquaresMap(const Matrix& G) : G_(G) {
    if (G.cols() == 0 || G.rows() < G.cols())
      throw Error(ErrorCode::ill_conditioned, "G_hat must have at least as many rows as columns");
    Eigen::JacobiSVD<Matrix> svd(G);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    condition_ = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    if (!(condition_ <= kMaxConditionG))
      throw Error(ErrorCode::ill_conditioned,
                  "G_hat condition number " + std::to_string(condition_) + " exceeds 1e8");
    const auto qr = G.colPivHouseholderQr();
    pinv_ = qr.solve(Matrix::Identity(G.rows(), G.rows()));
  }

  double condition() const noexcept { return condition_; }
  const Matrix& pinv() const noexcept { return pinv_; }
  const Matrix& G() const noexcept { return G_; }

  Vector apply(const Vector& a) const { return pinv_ * a; }
  Matrix apply(const Matrix& M) const { return pinv_ * M * pinv_.transpose(); }

 private:
  Matrix G_;
  Matrix pinv_;  // r x l
  double condition_ = 0.0;
};

struct PEstimate {
  Vector raw;
  Vector normalized;
  double condition = 0.0;
};

/// Clip at zero and rescale to unit sum; uniform if nothing survives.
inline Vector normalize_shares(const Vector& raw) {
  Vector out = raw.cwiseMax(0.0);
  const double s = out.sum();
  if (s > 0.0) return out / s;
  return Vector::Constant(raw.size(), 1.0 / static_cast<double>(raw.size()));
}

inline PEstimate estimate_p(const Matrix& G_hat, const Vector& a_hat) {
  if (G_hat.rows() != a_hat.size())
    throw Error(ErrorCode::config, "estimate_p: G_hat and a_hat sizes differ");
  const LeastSquaresMap ls(G_hat);
  PEstimate out;
  out.raw = ls.apply(a_hat);
  out.normalized = normalize_shares(out.raw);
  out.condition = ls.condition();
  return out;
}

inline Matrix estimate_H(const Matrix& G_hat, const Matrix& M_hat) {
  if (M_hat.rows() != G_hat.rows() || M_hat.cols() != G_hat.rows())
    throw Error(ErrorCode::config, "estimate_H: M_hat must be l x l");
  return LeastSquaresMap(G_hat).apply(M_hat);
}

inline Matrix functional_ratio(const Matrix& H_phi, const Matrix& H1) {
  for (Eigen::Index j = 0; j < H1.cols(); ++j)
    for (Eigen::Index i = 0; i < H1.rows(); ++i)
      if (!(std::abs(H1(i, j)) >= kMinH1))
        throw Error(ErrorCode::near_zero_h1,
                    "H1_hat(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                        std::to_string(H1(i, j)) +
                        " is near zero; a community has vanishing estimated share");
  return H_phi.cwiseQuotient(H1);
}

inline FunctionalEstimate estimate_functional(const Matrix& G_hat, const Matrix& H1_hat,
                                              const PathMoment& M_phi) {
  FunctionalEstimate out;
  out.phi = M_phi.phi;
  out.H1_hat = H1_hat;
  out.M_hat = M_phi.M_hat;
  out.H_phi_hat = estimate_H(G_hat, M_phi.M_hat);
  out.phi_hat = functional_ratio(out.H_phi_hat, H1_hat);
  return out;
}

// ---------------------------------------------------------------------------
// Label handling

/// Relabels so that new community k is old community perm[k].
inline void permute(BlockEstimate& est, const std::vector<std::size_t>& perm) {
  const auto r = static_cast<Eigen::Index>(perm.size());
  Eigen::PermutationMatrix<Eigen::Dynamic> P(r);
  for (Eigen::Index k = 0; k < r; ++k) P.indices()[k] = static_cast<int>(perm[k]);
  // Column k of (X * P) is column perm[k] of X when P maps e_k -> e_perm[k].
  est.G_hat = est.G_hat * P;
  est.Q_hat = est.Q_hat * P;
  est.H1_hat = P.transpose() * est.H1_hat * P;
  est.p_hat = P.transpose() * est.p_hat;
  est.p_hat_normalized = P.transpose() * est.p_hat_normalized;
  std::vector<std::size_t> order(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k)
    order[k] = est.label_order.empty() ? perm[k] : est.label_order[perm[k]];
  est.label_order = std::move(order);
}

inline void permute(FunctionalEstimate& f, const std::vector<std::size_t>& perm) {
  const auto r = static_cast<Eigen::Index>(perm.size());
  Eigen::PermutationMatrix<Eigen::Dynamic> P(r);
  for (Eigen::Index k = 0; k < r; ++k) P.indices()[k] = static_cast<int>(perm[k]);
  f.phi_hat = P.transpose() * f.phi_hat * P;
  f.H_phi_hat = P.transpose() * f.H_phi_hat * P;
  f.H1_hat = P.transpose() * f.H1_hat * P;
}

inline std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
  return inv;
}

/// Sorts communities by ascending p_hat, ties broken by ascending
/// phi_hat(z, z) of the first functional. Returns the permutation applied.
inline std::vector<std::size_t> canonical_labeling(BlockEstimate& est,
                                                   std::span<FunctionalEstimate> functionals) {
  std::vector<std::size_t> perm(est.r);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const auto tie = [&](std::size_t z) {
    return functionals.empty() ? 0.0
                               : functionals.front().phi_hat(static_cast<Eigen::Index>(z),
                                                             static_cast<Eigen::Index>(z));
  };
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    const double pa = est.p_hat[static_cast<Eigen::Index>(a)];
    const double pb = est.p_hat[static_cast<Eigen::Index>(b)];
    if (pa != pb) return pa < pb;
    return tie(a) < tie(b);
  });
  permute(est, perm);
  for (auto& f : functionals) permute(f, perm);
  return perm;
}

// ---------------------------------------------------------------------------
// Pipeline

/// Largest consecutive eigenvalue ratio among the positive part of a
/// descending spectrum, as a rough guide to the number of communities.
inline std::size_t eigengap_rank(const Vector& spectrum, std::size_t max_r) {
  std::size_t best = 1;
  double best_ratio = 0.0;
  const auto m = static_cast<std::size_t>(spectrum.size());
  for (std::size_t k = 1; k <= std::min(max_r, m); ++k) {
    const double cur = spectrum[static_cast<Eigen::Index>(k - 1)];
    if (!(cur > 0.0)) break;
    const double next = k < m ? std::abs(spectrum[static_cast<Eigen::Index>(k)]) : 0.0;
    const double ratio = next > 0.0 ? cur / next : std::numeric_limits<double>::infinity();
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return best;
}

/// Fixed bandwidth, or c * sd(weights) * n^{-2/5}.
struct BandwidthRule {
  enum class Kind { fixed, rate };
  Kind kind = Kind::rate;
  double value = 1.0;  // h for fixed, c for rate

  static BandwidthRule fixed(double h) { return {Kind::fixed, h}; }
  static BandwidthRule rate(double c = 1.0) { return {Kind::rate, c}; }
};

inline double weight_sd(const Network& net) {
  const auto w = net.pair_weights();
  CompensatedSum s;
  for (double x : w) s += x;
  const double mean = s.value() / static_cast<double>(w.size());
  CompensatedSum ss;
  for (double x : w) ss += (x - mean) * (x - mean);
  return std::sqrt(ss.value() / static_cast<double>(w.size() - 1));
}

inline double resolve_bandwidth(const BandwidthRule& rule, const Network& net) {
  double h = rule.value;
  if (rule.kind == BandwidthRule::Kind::rate)
    h = rule.value * weight_sd(net) * std::pow(static_cast<double>(net.size()), -0.4);
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::config, "bandwidth resolved to a non-positive value (constant weights?)");
  return h;
}

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<Matrix> f_hat;  // one r x r matrix per grid point
  double bandwidth = 0.0;
  Kernel kernel = Kernel::epanechnikov;
};

inline void permute(DensityEstimate& d, const std::vector<std::size_t>& perm) {
  const auto r = static_cast<Eigen::Index>(perm.size());
  Eigen::PermutationMatrix<Eigen::Dynamic> P(r);
  for (Eigen::Index k = 0; k < r; ++k) P.indices()[k] = static_cast<int>(perm[k]);
  for (auto& m : d.f_hat) m = P.transpose() * m * P;
}

struct DensityOptions {
  std::vector<double> grid;
  BandwidthRule bandwidth = BandwidthRule::rate(1.0);
  Kernel kernel = Kernel::epanechnikov;
};

struct FitOptions {
  std::size_t r = 2;
  std::optional<BasisSpec> basis;  // default_basis() when empty
  double tol = kDefaultJdTolerance;
  int max_sweeps = kDefaultMaxSweeps;
  std::vector<FunctionalSpec> functionals;
  std::vector<double> cdf_grid;
  bool rearrange_cdf = false;
  std::optional<DensityOptions> density;
  bool canonical_labels = true;
};

struct FitResult {
  BasisSpec basis;
  MomentSet moments;
  Matrix M1_hat;  // path statistic for phi = 1
  BlockEstimate block;
  std::vector<FunctionalEstimate> functionals;  // requested functionals
  std::vector<FunctionalEstimate> cdf;          // one per cdf grid point
  std::optional<DensityEstimate> density;
  std::size_t eigengap_r = 1;
  std::vector<std::string> warnings;
};

/// Monotone rearrangement across the grid, entrywise.
inline void rearrange_monotone(std::vector<FunctionalEstimate>& cdf) {
  if (cdf.empty()) return;
  const auto r = cdf.front().phi_hat.rows();
  std::vector<double> vals(cdf.size());
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b) {
      for (std::size_t k = 0; k < cdf.size(); ++k) vals[k] = cdf[k].phi_hat(a, b);
      std::sort(vals.begin(), vals.end());
      for (std::size_t k = 0; k < cdf.size(); ++k) cdf[k].phi_hat(a, b) = vals[k];
    }
}

namespace detail {

inline BlockEstimate block_from(const RecoverResult& rec, const MomentSet& m, const Matrix& M1,
                                std::size_t r) {
  BlockEstimate est;
  est.r = r;
  est.G_hat = rec.G_hat;
  est.Q_hat = rec.Q_hat;
  est.V_hat = rec.whitening.V_hat;
  est.eigvals = rec.whitening.eigvals;
  est.spectrum = rec.whitening.spectrum;
  est.eiggap = rec.whitening.eiggap;
  est.offdiag_final = rec.jd.offdiag_final;
  est.converged = rec.jd.converged;
  est.sweeps = rec.jd.sweeps;
  const LeastSquaresMap ls(rec.G_hat);
  est.condition_G = ls.condition();
  est.p_hat = ls.apply(m.a_hat);
  est.p_hat_normalized = normalize_shares(est.p_hat);
  est.H1_hat = ls.apply(M1);
  est.label_order.resize(r);
  std::iota(est.label_order.begin(), est.label_order.end(), std::size_t{0});
  return est;
}

}  // namespace detail

/// moments -> recover_G -> p_hat, H1_hat -> functionals, CDF grid, densities.
inline FitResult fit(const Network& net, const FitOptions& opt) {
  if (opt.r == 0) throw Error(ErrorCode::config, "r must be >= 1");
  FitResult out{opt.basis ? *opt.basis : default_basis(net, opt.r), {}, {}, {}, {}, {}, {}, 1, {}};
  if (out.basis.size() < opt.r)
    throw Error(ErrorCode::invalid_basis, "basis has l = " + std::to_string(out.basis.size()) +
                                              " functions but r = " + std::to_string(opt.r));

  out.moments = compute_moments(net, out.basis);
  const auto rec = recover_G(out.moments, opt.r, opt.tol, opt.max_sweeps);
  if (!rec.jd.converged)
    out.warnings.push_back("joint diagonalization hit max_sweeps without converging");

  // One pass over the path statistic for every functional requested.
  std::vector<FunctionalSpec> phis{FunctionalSpec::constant()};
  phis.insert(phis.end(), opt.functionals.begin(), opt.functionals.end());
  for (double x : opt.cdf_grid) phis.push_back(FunctionalSpec::cdf_at(x));
  double h = 0.0;
  if (opt.density) {
    h = resolve_bandwidth(opt.density->bandwidth, net);
    if (h < 1.0 / static_cast<double>(net.size()))
      out.warnings.push_back("bandwidth " + std::to_string(h) + " is below 1/n");
    for (double x : opt.density->grid) phis.push_back(FunctionalSpec::density_at(x, h, opt.density->kernel));
  }
  const PathAccumulator acc(net, out.basis);
  const auto paths = acc.compute(phis);

  out.M1_hat = paths.front().M_hat;
  out.block = detail::block_from(rec, out.moments, out.M1_hat, opt.r);
  out.eigengap_r = eigengap_rank(rec.whitening.spectrum, out.basis.size());

  std::size_t k = 1;
  for (; k < 1 + opt.functionals.size(); ++k)
    out.functionals.push_back(estimate_functional(out.block.G_hat, out.block.H1_hat, paths[k]));
  for (std::size_t c = 0; c < opt.cdf_grid.size(); ++c, ++k)
    out.cdf.push_back(estimate_functional(out.block.G_hat, out.block.H1_hat, paths[k]));
  if (opt.rearrange_cdf) rearrange_monotone(out.cdf);
  if (opt.density) {
    DensityEstimate d;
    d.grid = opt.density->grid;
    d.bandwidth = h;
    d.kernel = opt.density->kernel;
    for (; k < paths.size(); ++k)
      d.f_hat.push_back(estimate_functional(out.block.G_hat, out.block.H1_hat, paths[k]).phi_hat);
    out.density = std::move(d);
  }

  if (opt.canonical_labels) {
    const auto perm = canonical_labeling(out.block, out.functionals);
    for (auto& c : out.cdf) permute(c, perm);
    if (out.density) permute(*out.density, perm);
  }
  return out;
}

/// CDF of every (z1, z2) at each grid point.
inline std::vector<FunctionalEstimate> estimate_cdf(const Network& net, const BasisSpec& basis,
                                                    const Matrix& G_hat, const Matrix& H1_hat,
                                                    std::span<const double> x_points,
                                                    bool rearrange = false) {
  std::vector<FunctionalSpec> phis;
  for (double x : x_points) phis.push_back(FunctionalSpec::cdf_at(x));
  const auto paths = M_phi_hat_fast(net, basis, phis);
  std::vector<FunctionalEstimate> out;
  for (const auto& m : paths) out.push_back(estimate_functional(G_hat, H1_hat, m));
  if (rearrange) rearrange_monotone(out);
  return out;
}

inline DensityEstimate estimate_density(const Network& net, const BasisSpec& basis,
                                        const Matrix& G_hat, const Matrix& H1_hat,
                                        const DensityOptions& opt) {
  DensityEstimate d;
  d.grid = opt.grid;
  d.kernel = opt.kernel;
  d.bandwidth = resolve_bandwidth(opt.bandwidth, net);
  std::vector<FunctionalSpec> phis;
  for (double x : opt.grid) phis.push_back(FunctionalSpec::density_at(x, d.bandwidth, opt.kernel));
  for (const auto& m : M_phi_hat_fast(net, basis, phis))
    d.f_hat.push_back(estimate_functional(G_hat, H1_hat, m).phi_hat);
  return d;
}

/// Averages star statistics over independent networks of equal size drawn
/// from the same model.
inline MomentSet pool_moments(std::span<const MomentSet> sets) {
  if (sets.empty()) throw Error(ErrorCode::config, "pool_moments: nothing to pool");
  MomentSet out = sets.front();
  for (std::size_t k = 1; k < sets.size(); ++k) {
    if (sets[k].l() != out.l()) throw Error(ErrorCode::config, "pool_moments: basis sizes differ");
    out.a_hat += sets[k].a_hat;
    out.A0_hat += sets[k].A0_hat;
    for (std::size_t lp = 0; lp < out.A_hat.size(); ++lp) out.A_hat[lp] += sets[k].A_hat[lp];
  }
  const double m = static_cast<double>(sets.size());
  out.a_hat /= m;
  out.A0_hat /= m;
  for (auto& A : out.A_hat) A /= m;
  return out;
}

}  // namespace wsbm
