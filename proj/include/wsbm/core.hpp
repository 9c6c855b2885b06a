#pragma once

// Domain types shared by the whole library: the observed network, the
// generating block model, the edge-weight transformations, the functionals
// being estimated, and the containers that carry intermediate and final
// results between the stages of the estimator.

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wsbm/rng.hpp"

namespace wsbm {

inline constexpr const char* kVersion = "0.3.1";

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors

enum class ErrorCode {
  // usage / configuration
  config,
  invalid_params,
  invalid_basis,
  // data
  too_few_nodes,
  asymmetric_weights,
  non_finite_entry,
  duplicate_pair,
  self_loop,
  missing_pair,
  non_numeric_weight,
  io,
  // numerical
  rank_deficient,
  ill_conditioned,
  near_zero_h1,
  non_finite_functional,
  not_converged,
  all_replications_failed,
};

enum class ErrorKind { usage, data, numerical };

inline constexpr ErrorKind kind_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::invalid_params:
    case ErrorCode::invalid_basis:
      return ErrorKind::usage;
    case ErrorCode::too_few_nodes:
    case ErrorCode::asymmetric_weights:
    case ErrorCode::non_finite_entry:
    case ErrorCode::duplicate_pair:
    case ErrorCode::self_loop:
    case ErrorCode::missing_pair:
    case ErrorCode::non_numeric_weight:
    case ErrorCode::io:
      return ErrorKind::data;
    default:
      return ErrorKind::numerical;
  }
}

inline constexpr const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config: return "config";
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::invalid_basis: return "invalid-basis";
    case ErrorCode::too_few_nodes: return "too-few-nodes";
    case ErrorCode::asymmetric_weights: return "asymmetric-weights";
    case ErrorCode::non_finite_entry: return "non-finite-entry";
    case ErrorCode::duplicate_pair: return "duplicate-pair";
    case ErrorCode::self_loop: return "self-loop";
    case ErrorCode::missing_pair: return "missing-pair";
    case ErrorCode::non_numeric_weight: return "non-numeric-weight";
    case ErrorCode::io: return "io";
    case ErrorCode::rank_deficient: return "rank-deficient";
    case ErrorCode::ill_conditioned: return "ill-conditioned";
    case ErrorCode::near_zero_h1: return "near-zero-h1";
    case ErrorCode::non_finite_functional: return "non-finite-functional";
    case ErrorCode::not_converged: return "not-converged";
    case ErrorCode::all_replications_failed: return "all-replications-failed";
  }
  return "unknown";
}

/// Process exit status for a failure: 1 usage/config, 2 data, 3 numerical.
inline constexpr int exit_code(ErrorCode code) noexcept {
  switch (kind_of(code)) {
    case ErrorKind::usage: return 1;
    case ErrorKind::data: return 2;
    case ErrorKind::numerical: return 3;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Network

struct ValidationResult {
  std::optional<ErrorCode> error;
  std::size_t i = 0;  // first offending pair, when relevant
  std::size_t j = 0;
  std::string message;

  bool ok() const noexcept { return !error.has_value(); }
};

/// Checks a raw weight matrix against the Network invariants. Pairs are
/// scanned in (i, j) lexicographic order over i < j; the diagonal is ignored.
inline ValidationResult validate_network(const Matrix& weights) {
  ValidationResult res;
  const auto fail = [&](ErrorCode code, std::size_t i, std::size_t j,
                        std::string msg) {
    res.error = code;
    res.i = i;
    res.j = j;
    res.message = std::move(msg);
    return res;
  };
  if (weights.rows() != weights.cols())
    return fail(ErrorCode::asymmetric_weights, 0, 0, "weight matrix is not square");
  const auto n = static_cast<std::size_t>(weights.rows());
  if (n < 4)
    return fail(ErrorCode::too_few_nodes, 0, 0,
                "network has " + std::to_string(n) +
                    " nodes; path statistics need at least 4");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = weights(i, j);
      const double b = weights(j, i);
      if (!std::isfinite(a) || !std::isfinite(b))
        return fail(ErrorCode::non_finite_entry, i, j,
                    "non-finite weight at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      if (a != b)
        return fail(ErrorCode::asymmetric_weights, i, j,
                    "weights(" + std::to_string(i) + "," + std::to_string(j) +
                        ") != weights(" + std::to_string(j) + "," +
                        std::to_string(i) + ")");
    }
  }
  return res;
}

/// Symmetric n x n edge-weight matrix of one undirected, loop-free graph.
/// The diagonal is stored as zero and never read by any statistic.
class Network {
 public:
  explicit Network(Matrix weights) : weights_(std::move(weights)) {
    const auto check = validate_network(weights_);
    if (!check.ok()) throw Error(*check.error, check.message);
    weights_.diagonal().setZero();
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
  const Matrix& weights() const noexcept { return weights_; }

  /// Off-diagonal weights in (i < j) lexicographic order.
  std::vector<double> pair_weights() const {
    std::vector<double> out;
    const auto n = size();
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) out.push_back(weights_(i, j));
    return out;
  }

  bool operator==(const Network& other) const {
    return weights_.rows() == other.weights_.rows() && weights_ == other.weights_;
  }

 private:
  Matrix weights_;
};

// ---------------------------------------------------------------------------
// Kernels and functionals

enum class Kernel { gaussian, epanechnikov };

inline double kernel_value(Kernel k, double u) noexcept {
  switch (k) {
    case Kernel::gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    case Kernel::epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

/// Half-width of the kernel support in units of the bandwidth (gaussian is
/// truncated where its value falls below 1e-17 of the peak).
inline double kernel_reach(Kernel k) noexcept {
  return k == Kernel::gaussian ? 8.5 : 1.0;
}

inline const char* to_string(Kernel k) noexcept {
  return k == Kernel::gaussian ? "gaussian" : "epanechnikov";
}

/// A scalar transformation phi of an edge weight whose conditional mean
/// E(phi(X_ij) | Z_i = z1, Z_j = z2) is the estimation target.
struct FunctionalSpec {
  enum class Kind { cdf, pmf, moment, kernel_density };

  Kind kind = Kind::moment;
  double point = 0.0;  // x' for cdf, v for pmf, x for kernel_density
  int power = 1;       // moment only
  double bandwidth = 0.0;
  Kernel kernel = Kernel::epanechnikov;

  static FunctionalSpec cdf_at(double x) { return {Kind::cdf, x, 0, 0.0, Kernel::epanechnikov}; }
  static FunctionalSpec pmf_at(double v) { return {Kind::pmf, v, 0, 0.0, Kernel::epanechnikov}; }
  static FunctionalSpec moment(int power) { return {Kind::moment, 0.0, power, 0.0, Kernel::epanechnikov}; }
  static FunctionalSpec constant() { return moment(0); }
  static FunctionalSpec identity() { return moment(1); }
  static FunctionalSpec density_at(double x, double bandwidth, Kernel k) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
      throw Error(ErrorCode::config, "kernel bandwidth must be positive and finite");
    return {Kind::kernel_density, x, 0, bandwidth, k};
  }

  double operator()(double x) const noexcept {
    switch (kind) {
      case Kind::cdf: return x <= point ? 1.0 : 0.0;
      case Kind::pmf: return x == point ? 1.0 : 0.0;
      case Kind::moment: return power == 0 ? 1.0 : std::pow(x, power);
      case Kind::kernel_density:
        return kernel_value(kernel, (x - point) / bandwidth) / bandwidth;
    }
    return 0.0;
  }

  std::string label() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
      case Kind::cdf: os << "cdf(" << point << ")"; break;
      case Kind::pmf: os << "pmf(" << point << ")"; break;
      case Kind::moment: os << "moment(" << power << ")"; break;
      case Kind::kernel_density:
        os << "density(" << point << ";h=" << bandwidth << "," << to_string(kernel) << ")";
        break;
    }
    return os.str();
  }

  bool operator==(const FunctionalSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Edge-weight distributions

namespace detail {

/// Composite Simpson rule on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels = 4000) {
  if (!(b > a)) return 0.0;
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int k = 1; k < panels; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace detail

struct Bernoulli {
  double theta = 0.5;
  bool operator==(const Bernoulli&) const = default;
};
/// Finite support with probabilities summing to one.
struct Discrete {
  std::vector<double> values;
  std::vector<double> probs;
  bool operator==(const Discrete&) const = default;
};
struct BetaLaw {
  double a = 1.0;
  double b = 1.0;
  bool operator==(const BetaLaw&) const = default;
};
struct NormalLaw {
  double mu = 0.0;
  double sigma = 1.0;
  bool operator==(const NormalLaw&) const = default;
};
struct PointMass {
  double value = 0.0;
  bool operator==(const PointMass&) const = default;
};

/// One samplable scalar distribution F_{z1,z2}.
class EdgeLaw {
 public:
  using Variant = std::variant<Bernoulli, Discrete, BetaLaw, NormalLaw, PointMass>;

  EdgeLaw() : law_(PointMass{}) {}
  EdgeLaw(Variant law) : law_(std::move(law)) { check(); }  // NOLINT(implicit)
  template <class T, class = std::enable_if_t<std::is_constructible_v<Variant, T> &&
                                              !std::is_same_v<std::decay_t<T>, Variant> &&
                                              !std::is_same_v<std::decay_t<T>, EdgeLaw>>>
  EdgeLaw(T&& law) : EdgeLaw(Variant(std::forward<T>(law))) {}  // NOLINT(implicit)

  const Variant& law() const noexcept { return law_; }

  double sample(Stream& s) const {
    return std::visit(
        [&](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Bernoulli>) {
            return s.uniform() < d.theta ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<T, Discrete>) {
            const double u = s.uniform();
            double c = 0.0;
            for (std::size_t k = 0; k + 1 < d.values.size(); ++k) {
              c += d.probs[k];
              if (u < c) return d.values[k];
            }
            return d.values.back();
          } else if constexpr (std::is_same_v<T, BetaLaw>) {
            return s.beta(d.a, d.b);
          } else if constexpr (std::is_same_v<T, NormalLaw>) {
            return d.mu + d.sigma * s.normal();
          } else {
            return d.value;
          }
        },
        law_);
  }

  bool continuous() const noexcept {
    return std::holds_alternative<BetaLaw>(law_) || std::holds_alternative<NormalLaw>(law_);
  }

  /// Probability density, continuous laws only (0 otherwise).
  double density(double x) const {
    if (const auto* d = std::get_if<BetaLaw>(&law_)) {
      if (x < 0.0 || x > 1.0) return 0.0;
      if ((x == 0.0 && d->a < 1.0) || (x == 1.0 && d->b < 1.0))
        return std::numeric_limits<double>::infinity();
      const double lognorm =
          std::lgamma(d->a + d->b) - std::lgamma(d->a) - std::lgamma(d->b);
      return std::exp(lognorm) * std::pow(x, d->a - 1.0) * std::pow(1.0 - x, d->b - 1.0);
    }
    if (const auto* d = std::get_if<NormalLaw>(&law_)) {
      const double u = (x - d->mu) / d->sigma;
      return std::exp(-0.5 * u * u) / (d->sigma * std::sqrt(2.0 * std::numbers::pi));
    }
    return 0.0;
  }

  /// Population value of E(phi(X)) under this law.
  double expect(const FunctionalSpec& phi) const {
    using Kind = FunctionalSpec::Kind;
    return std::visit(
        [&](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Bernoulli>) {
            return (1.0 - d.theta) * phi(0.0) + d.theta * phi(1.0);
          } else if constexpr (std::is_same_v<T, Discrete>) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d.values.size(); ++k) acc += d.probs[k] * phi(d.values[k]);
            return acc;
          } else if constexpr (std::is_same_v<T, PointMass>) {
            return phi(d.value);
          } else if constexpr (std::is_same_v<T, BetaLaw>) {
            switch (phi.kind) {
              case Kind::cdf:
                if (phi.point <= 0.0) return 0.0;
                if (phi.point >= 1.0) return 1.0;
                return boost::math::ibeta(d.a, d.b, phi.point);
              case Kind::pmf: return 0.0;
              case Kind::moment: {
                double m = 1.0;
                for (int i = 0; i < phi.power; ++i) m *= (d.a + i) / (d.a + d.b + i);
                return m;
              }
              case Kind::kernel_density: return smoothed_density(phi, 0.0, 1.0);
            }
            return 0.0;
          } else {
            switch (phi.kind) {
              case Kind::cdf:
                return 0.5 * std::erfc(-(phi.point - d.mu) / (d.sigma * std::numbers::sqrt2));
              case Kind::pmf: return 0.0;
              case Kind::moment: {
                double prev = 1.0, cur = d.mu;
                if (phi.power == 0) return 1.0;
                for (int k = 2; k <= phi.power; ++k) {
                  const double next = d.mu * cur + (k - 1) * d.sigma * d.sigma * prev;
                  prev = cur;
                  cur = next;
                }
                return cur;
              }
              case Kind::kernel_density: {
                if (phi.kernel == Kernel::gaussian) {
                  const double s = std::hypot(d.sigma, phi.bandwidth);
                  const double u = (phi.point - d.mu) / s;
                  return std::exp(-0.5 * u * u) / (s * std::sqrt(2.0 * std::numbers::pi));
                }
                return smoothed_density(phi, d.mu - 12.0 * d.sigma, d.mu + 12.0 * d.sigma);
              }
            }
            return 0.0;
          }
        },
        law_);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Bernoulli>) os << "bernoulli(" << d.theta << ")";
          else if constexpr (std::is_same_v<T, Discrete>) os << "discrete(" << d.values.size() << " values)";
          else if constexpr (std::is_same_v<T, BetaLaw>) os << "beta(" << d.a << "," << d.b << ")";
          else if constexpr (std::is_same_v<T, NormalLaw>) os << "normal(" << d.mu << "," << d.sigma << ")";
          else os << "point(" << d.value << ")";
        },
        law_);
    return os.str();
  }

  bool operator==(const EdgeLaw&) const = default;

 private:
  // E(k_h(X - x)) for a continuous law with support clipped to [lo, hi].
  double smoothed_density(const FunctionalSpec& phi, double lo, double hi) const {
    const double reach = kernel_reach(phi.kernel) * phi.bandwidth;
    const double a = std::max(lo, phi.point - reach);
    const double b = std::min(hi, phi.point + reach);
    return detail::simpson([&](double t) { return density(t) * phi(t); }, a, b);
  }

  void check() const {
    const auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_params, m); };
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Bernoulli>) {
            if (!(d.theta >= 0.0 && d.theta <= 1.0)) bad("bernoulli theta outside [0,1]");
          } else if constexpr (std::is_same_v<T, Discrete>) {
            if (d.values.empty() || d.values.size() != d.probs.size())
              bad("discrete law needs matching non-empty values/probs");
            double s = 0.0;
            for (double q : d.probs) {
              if (!(q >= 0.0)) bad("discrete probability negative");
              s += q;
            }
            if (std::abs(s - 1.0) > 1e-12) bad("discrete probabilities must sum to 1");
            for (double v : d.values)
              if (!std::isfinite(v)) bad("discrete support value not finite");
          } else if constexpr (std::is_same_v<T, BetaLaw>) {
            if (!(d.a > 0.0 && d.b > 0.0)) bad("beta shape parameters must be positive");
          } else if constexpr (std::is_same_v<T, NormalLaw>) {
            if (!(d.sigma > 0.0) || !std::isfinite(d.mu)) bad("normal law needs sigma > 0");
          } else {
            if (!std::isfinite(d.value)) bad("point mass must be finite");
          }
        },
        law_);
  }

  Variant law_;
};

// ---------------------------------------------------------------------------
// Block model

/// Ground-truth generator: community shares p and an r x r symmetric
/// family of edge laws.
class BlockModelParams {
 public:
  BlockModelParams(std::vector<double> p, std::vector<EdgeLaw> edge_law)
      : p_(std::move(p)), laws_(std::move(edge_law)) {
    const auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_params, m); };
    const std::size_t r = p_.size();
    if (r == 0) bad("need at least one community");
    if (laws_.size() != r * r) bad("edge_law must hold r*r entries");
    double s = 0.0;
    for (double q : p_) {
      if (!(q > 0.0)) bad("community shares must be strictly positive");
      s += q;
    }
    if (std::abs(s - 1.0) > 1e-12) bad("community shares must sum to 1");
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a + 1; b < r; ++b)
        if (!(laws_[a * r + b] == laws_[b * r + a])) bad("edge_law must be symmetric");
  }

  /// Shares p plus the upper triangle (row-major, z1 <= z2) of the law matrix.
  static BlockModelParams from_upper(std::vector<double> p, const std::vector<EdgeLaw>& upper) {
    const std::size_t r = p.size();
    if (upper.size() != r * (r + 1) / 2)
      throw Error(ErrorCode::invalid_params, "upper triangle must hold r(r+1)/2 laws");
    std::vector<EdgeLaw> full(r * r);
    std::size_t k = 0;
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a; b < r; ++b) full[a * r + b] = full[b * r + a] = upper[k++];
    return BlockModelParams(std::move(p), std::move(full));
  }

  std::size_t r() const noexcept { return p_.size(); }
  const std::vector<double>& p() const noexcept { return p_; }
  const EdgeLaw& edge_law(std::size_t z1, std::size_t z2) const { return laws_[z1 * r() + z2]; }

  /// Population matrix of phi_{z1,z2}.
  Matrix functional_truth(const FunctionalSpec& phi) const {
    Matrix out(r(), r());
    for (std::size_t a = 0; a < r(); ++a)
      for (std::size_t b = 0; b < r(); ++b) out(a, b) = edge_law(a, b).expect(phi);
    return out;
  }

  bool operator==(const BlockModelParams&) const = default;

 private:
  std::vector<double> p_;
  std::vector<EdgeLaw> laws_;
};

// ---------------------------------------------------------------------------
// Basis

/// The l transformation functions alpha_1..alpha_l applied to edge weights.
class BasisSpec {
 public:
  enum class Kind { indicator_grid, polynomial, custom };
  using Function = std::function<double(double)>;

  static BasisSpec indicator_grid(std::vector<double> thresholds) {
    if (thresholds.empty()) throw Error(ErrorCode::invalid_basis, "indicator grid is empty");
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      if (!std::isfinite(thresholds[k]))
        throw Error(ErrorCode::invalid_basis, "indicator threshold not finite");
      if (k > 0 && !(thresholds[k] > thresholds[k - 1]))
        throw Error(ErrorCode::invalid_basis, "indicator thresholds must be strictly increasing");
    }
    BasisSpec b;
    b.kind_ = Kind::indicator_grid;
    b.thresholds_ = std::move(thresholds);
    return b;
  }

  /// Monomials 1, x, ..., x^degree.
  static BasisSpec polynomial(int degree) {
    if (degree < 0) throw Error(ErrorCode::invalid_basis, "polynomial degree must be >= 0");
    BasisSpec b;
    b.kind_ = Kind::polynomial;
    b.degree_ = degree;
    return b;
  }

  static BasisSpec custom(std::vector<Function> functions, std::string name = "custom") {
    if (functions.empty()) throw Error(ErrorCode::invalid_basis, "custom basis is empty");
    BasisSpec b;
    b.kind_ = Kind::custom;
    b.functions_ = std::move(functions);
    b.name_ = std::move(name);
    return b;
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  int degree() const noexcept { return degree_; }

  std::size_t size() const noexcept {
    switch (kind_) {
      case Kind::indicator_grid: return thresholds_.size();
      case Kind::polynomial: return static_cast<std::size_t>(degree_) + 1;
      case Kind::custom: return functions_.size();
    }
    return 0;
  }

  double evaluate(std::size_t k, double x) const {
    switch (kind_) {
      case Kind::indicator_grid: return x <= thresholds_[k] ? 1.0 : 0.0;
      case Kind::polynomial: return k == 0 ? 1.0 : std::pow(x, static_cast<int>(k));
      case Kind::custom: return functions_[k](x);
    }
    return 0.0;
  }

  Vector apply(double x) const {
    Vector out(static_cast<Eigen::Index>(size()));
    for (std::size_t k = 0; k < size(); ++k) out[static_cast<Eigen::Index>(k)] = evaluate(k, x);
    return out;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::indicator_grid:
        os << "indicator-grid{";
        for (std::size_t k = 0; k < thresholds_.size(); ++k) os << (k ? "," : "") << thresholds_[k];
        os << "}";
        break;
      case Kind::polynomial: os << "polynomial(" << degree_ << ")"; break;
      case Kind::custom: os << name_ << "(" << functions_.size() << ")"; break;
    }
    return os.str();
  }

 private:
  BasisSpec() = default;

  Kind kind_ = Kind::indicator_grid;
  std::vector<double> thresholds_;
  int degree_ = 0;
  std::vector<Function> functions_;
  std::string name_;
};

namespace detail {

/// Sample quantile, linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and non-empty.
inline double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

inline bool is_binary(const Network& net) {
  const auto n = net.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = net.weight(i, j);
      if (w != 0.0 && w != 1.0) return false;
    }
  return true;
}

/// Default basis: the fixed grid {0, 1} for binary data, otherwise an
/// indicator grid at max(r + 1, 5) empirical quantiles of the edge weights
/// taken at probability levels k / (l + 1), duplicates dropped.
inline BasisSpec default_basis(const Network& net, std::size_t r) {
  if (is_binary(net)) return BasisSpec::indicator_grid({0.0, 1.0});
  auto w = net.pair_weights();
  std::sort(w.begin(), w.end());
  const std::size_t l = std::max<std::size_t>(r + 1, 5);
  std::vector<double> grid;
  for (std::size_t k = 1; k <= l; ++k) {
    const double q = detail::quantile_sorted(w, static_cast<double>(k) / static_cast<double>(l + 1));
    if (grid.empty() || q > grid.back()) grid.push_back(q);
  }
  return BasisSpec::indicator_grid(std::move(grid));
}

// ---------------------------------------------------------------------------
// Result containers

/// Two-star and three-star statistics of one network under one basis.
struct MomentSet {
  Vector a_hat;               // l
  Matrix A0_hat;              // l x l
  std::vector<Matrix> A_hat;  // l matrices, each l x l, indexed by l'
  std::size_t n = 0;

  std::size_t l() const noexcept { return static_cast<std::size_t>(a_hat.size()); }
};

/// First-stage estimate of the block structure.
struct BlockEstimate {
  std::size_t r = 0;
  Matrix G_hat;        // l x r
  Vector p_hat;        // r, raw least squares
  Vector p_hat_normalized;
  Matrix H1_hat;       // r x r
  Matrix Q_hat;        // r x r
  Matrix V_hat;        // r x l
  Vector eigvals;      // retained eigenvalues of A0_hat, descending
  Vector spectrum;     // all eigenvalues of A0_hat, descending
  double eiggap = 0.0;
  double offdiag_final = 0.0;
  bool converged = true;
  int sweeps = 0;
  double condition_G = 0.0;
  std::vector<std::size_t> label_order;  // new label k holds old label label_order[k]
};

}  // namespace wsbm
