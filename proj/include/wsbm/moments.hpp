#pragma once

// Subgraph U-statistics of a weighted network.
//
//   a_hat[l']          mean of alpha_l'(X_ij) over unordered pairs
//   A0_hat[l1,l2]      two-star:   alpha_l1(X_{i1,i2}) alpha_l2(X_{i1,i3})
//   A_hat[l'][l1,l2]   three-star: alpha_l1(X_{i1,i2}) alpha_l'(X_{i1,i3}) alpha_l2(X_{i1,i4})
//   M_hat[l1,l2]       path:       alpha_l1(X_{i1,i2}) phi(X_{i2,i3}) alpha_l2(X_{i3,i4})
//
// each averaged over ordered tuples of distinct nodes. Every statistic has a
// brute-force enumeration (the oracle, O(n^4) at worst) and a fast form
// built from per-node sums with inclusion-exclusion corrections for
// coinciding indices. The two must agree; tests hold them to 1e-10.

#include <cstddef>
#include <span>
#include <vector>

#include "wsbm/core.hpp"

namespace wsbm {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Largest n the brute-force oracle accepts unless forced.
inline constexpr std::size_t kBruteForceMaxNodes = 40;

struct PathMoment {
  Matrix M_hat;  // l x l
  FunctionalSpec phi;
};

namespace detail {

inline double falling(std::size_t n, int k) {
  double out = 1.0;
  for (int t = 0; t < k; ++t) out *= static_cast<double>(n) - t;
  return out;
}

inline void guard_bruteforce(std::size_t n, bool force) {
  if (n > kBruteForceMaxNodes && !force)
    throw Error(ErrorCode::config, "brute-force enumeration refused for n = " + std::to_string(n) +
                                       " > " + std::to_string(kBruteForceMaxNodes) +
                                       " (pass force to override)");
}

/// alpha_k applied to every off-diagonal weight; zero diagonal.
inline std::vector<Matrix> transformed(const Network& net, const BasisSpec& basis) {
  const auto n = static_cast<Eigen::Index>(net.size());
  std::vector<Matrix> out(basis.size(), Matrix::Zero(n, n));
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        out[k](i, j) = out[k](j, i) = basis.evaluate(k, net.weight(i, j));
  return out;
}

/// phi applied to every off-diagonal weight; zero diagonal.
inline Matrix transformed(const Network& net, const FunctionalSpec& phi) {
  const auto n = static_cast<Eigen::Index>(net.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = phi(net.weight(i, j));
      if (!std::isfinite(v))
        throw Error(ErrorCode::non_finite_functional,
                    phi.label() + " is not finite at weight " + std::to_string(net.weight(i, j)));
      out(i, j) = out(j, i) = v;
    }
  return out;
}

/// Per-edge basis vectors, alpha(X_ij) for all ordered i != j (oracle side).
inline std::vector<Vector> edge_vectors(const Network& net, const BasisSpec& basis) {
  const auto n = net.size();
  std::vector<Vector> out(n * n, Vector::Zero(static_cast<Eigen::Index>(basis.size())));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) out[i * n + j] = basis.apply(net.weight(i, j));
  return out;
}

inline double sum_product(const Matrix& a, const Matrix& b) {
  CompensatedSum acc;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) acc += a(i, j) * b(i, j);
  return acc.value();
}

inline double sum_product(const Matrix& a, const Matrix& b, const Matrix& c) {
  CompensatedSum acc;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) acc += a(i, j) * b(i, j) * c(i, j);
  return acc.value();
}

inline double dot(const Vector& a, const Vector& b) {
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc.value();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// a_hat

inline Vector a_hat(const Network& net, const BasisSpec& basis) {
  const auto n = net.size();
  const auto l = basis.size();
  Vector out(static_cast<Eigen::Index>(l));
  for (std::size_t k = 0; k < l; ++k) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) acc += basis.evaluate(k, net.weight(i, j));
    out[static_cast<Eigen::Index>(k)] = 2.0 * acc.value() / detail::falling(n, 2);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-star

inline Matrix A0_hat_bruteforce(const Network& net, const BasisSpec& basis, bool force = false) {
  const auto n = net.size();
  detail::guard_bruteforce(n, force);
  const auto l = static_cast<Eigen::Index>(basis.size());
  const auto e = detail::edge_vectors(net, basis);
  Matrix acc = Matrix::Zero(l, l);
  for (std::size_t i1 = 0; i1 < n; ++i1)
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      if (i2 == i1) continue;
      for (std::size_t i3 = 0; i3 < n; ++i3) {
        if (i3 == i1 || i3 == i2) continue;
        acc.noalias() += e[i1 * n + i2] * e[i1 * n + i3].transpose();
      }
    }
  return acc / detail::falling(n, 3);
}

/// sum_{i1 != i2 != i3} f(i1,i2) g(i1,i3) = sum_i [S_f(i) S_g(i) - sum_j f(i,j) g(i,j)].
inline Matrix A0_hat_fast(const Network& net, const BasisSpec& basis) {
  const auto n = net.size();
  const auto l = basis.size();
  const auto B = detail::transformed(net, basis);
  std::vector<Vector> S(l);
  for (std::size_t k = 0; k < l; ++k) S[k] = B[k].rowwise().sum();

  const auto L = static_cast<Eigen::Index>(l);
  Matrix out(L, L);
  for (std::size_t a = 0; a < l; ++a)
    for (std::size_t b = a; b < l; ++b) {
      const double v = detail::dot(S[a], S[b]) - detail::sum_product(B[a], B[b]);
      out(a, b) = out(b, a) = v / detail::falling(n, 3);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Three-star

inline std::vector<Matrix> A_lprime_hat_bruteforce(const Network& net, const BasisSpec& basis,
                                                   bool force = false) {
  const auto n = net.size();
  detail::guard_bruteforce(n, force);
  const auto l = basis.size();
  const auto L = static_cast<Eigen::Index>(l);
  const auto e = detail::edge_vectors(net, basis);
  std::vector<Matrix> acc(l, Matrix::Zero(L, L));
  for (std::size_t i1 = 0; i1 < n; ++i1)
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      if (i2 == i1) continue;
      for (std::size_t i3 = 0; i3 < n; ++i3) {
        if (i3 == i1 || i3 == i2) continue;
        for (std::size_t i4 = 0; i4 < n; ++i4) {
          if (i4 == i1 || i4 == i2 || i4 == i3) continue;
          const Matrix outer = e[i1 * n + i2] * e[i1 * n + i4].transpose();
          const Vector& mid = e[i1 * n + i3];
          for (std::size_t lp = 0; lp < l; ++lp) acc[lp] += mid[static_cast<Eigen::Index>(lp)] * outer;
        }
      }
    }
  const double norm = detail::falling(n, 4);
  for (auto& m : acc) m /= norm;
  return acc;
}

/// Three distinct neighbours of i1: expand the product of row sums and
/// remove the terms where two or three of i2, i3, i4 coincide.
inline std::vector<Matrix> A_lprime_hat_fast(const Network& net, const BasisSpec& basis) {
  const auto n = net.size();
  const auto l = basis.size();
  const auto N = static_cast<Eigen::Index>(n);
  const auto L = static_cast<Eigen::Index>(l);
  const auto B = detail::transformed(net, basis);

  std::vector<Vector> S(l);
  for (std::size_t k = 0; k < l; ++k) S[k] = B[k].rowwise().sum();
  // P2[a*l+b](i) = sum_j B_a(i,j) B_b(i,j)
  std::vector<Vector> P2(l * l);
  for (std::size_t a = 0; a < l; ++a)
    for (std::size_t b = a; b < l; ++b)
      P2[a * l + b] = P2[b * l + a] = B[a].cwiseProduct(B[b]).rowwise().sum();

  const double norm = detail::falling(n, 4);
  std::vector<Matrix> out(l, Matrix(L, L));
  for (std::size_t lp = 0; lp < l; ++lp) {
    for (std::size_t a = 0; a < l; ++a) {
      const Matrix BaBl = B[a].cwiseProduct(B[lp]);
      for (std::size_t c = a; c < l; ++c) {
        const Vector T3 = BaBl.cwiseProduct(B[c]).rowwise().sum();
        CompensatedSum acc;
        for (Eigen::Index i = 0; i < N; ++i) {
          acc += S[a][i] * S[lp][i] * S[c][i];
          acc += -P2[a * l + lp][i] * S[c][i];
          acc += -P2[a * l + c][i] * S[lp][i];
          acc += -P2[lp * l + c][i] * S[a][i];
          acc += 2.0 * T3[i];
        }
        out[lp](a, c) = out[lp](c, a) = acc.value() / norm;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Four-node path

inline std::vector<PathMoment> M_phi_hat_bruteforce(const Network& net, const BasisSpec& basis,
                                                    std::span<const FunctionalSpec> phis,
                                                    bool force = false) {
  const auto n = net.size();
  detail::guard_bruteforce(n, force);
  const auto L = static_cast<Eigen::Index>(basis.size());
  const auto e = detail::edge_vectors(net, basis);
  const double norm = detail::falling(n, 4);
  std::vector<PathMoment> out;
  out.reserve(phis.size());
  for (const auto& phi : phis) {
    const Matrix P = detail::transformed(net, phi);
    Matrix acc = Matrix::Zero(L, L);
    for (std::size_t i1 = 0; i1 < n; ++i1)
      for (std::size_t i2 = 0; i2 < n; ++i2) {
        if (i2 == i1) continue;
        for (std::size_t i3 = 0; i3 < n; ++i3) {
          if (i3 == i1 || i3 == i2) continue;
          const double mid = P(i2, i3);
          for (std::size_t i4 = 0; i4 < n; ++i4) {
            if (i4 == i1 || i4 == i2 || i4 == i3) continue;
            acc.noalias() += mid * e[i1 * n + i2] * e[i3 * n + i4].transpose();
          }
        }
      }
    out.push_back({acc / norm, phi});
  }
  return out;
}

inline PathMoment M_phi_hat_bruteforce(const Network& net, const BasisSpec& basis,
                                       const FunctionalSpec& phi, bool force = false) {
  return M_phi_hat_bruteforce(net, basis, std::span<const FunctionalSpec>(&phi, 1), force).front();
}

/// Shares the basis-side work of the path statistic across any number of
/// functionals. With F_k the transformed weight matrices (zero diagonal,
/// symmetric), S_k their row sums, and P the transformed phi matrix,
///
///   sum over distinct (i1,i2,i3,i4) of F_a(i1,i2) P(i2,i3) F_c(i3,i4)
///     = sum_{i2,i3} P(i2,i3) (S_a(i2) - F_a(i2,i3)) (S_c(i3) - F_c(i2,i3))
///       - sum_{i2,i3} P(i2,i3) (F_a F_c)(i2,i3)
///
/// where the last term removes i1 == i4. The products F_a F_c cost
/// O(l^2 n^3) once; each functional then costs O(l^2 n^2).
class PathAccumulator {
 public:
  PathAccumulator(const Network& net, const BasisSpec& basis)
      : net_(net), l_(basis.size()), B_(detail::transformed(net, basis)), S_(l_), FF_(l_ * l_) {
    for (std::size_t k = 0; k < l_; ++k) S_[k] = B_[k].rowwise().sum();
    for (std::size_t a = 0; a < l_; ++a)
      for (std::size_t c = a; c < l_; ++c) FF_[a * l_ + c].noalias() = B_[a] * B_[c];
  }

  Matrix compute(const FunctionalSpec& phi) const {
    const auto n = net_.size();
    const Matrix P = detail::transformed(net_, phi);
    const auto L = static_cast<Eigen::Index>(l_);
    std::vector<Vector> PS(l_), PF(l_);
    for (std::size_t k = 0; k < l_; ++k) {
      PS[k] = P * S_[k];
      PF[k] = P.cwiseProduct(B_[k]).rowwise().sum();
    }
    Matrix out(L, L);
    const double norm = detail::falling(n, 4);
    for (std::size_t a = 0; a < l_; ++a)
      for (std::size_t c = a; c < l_; ++c) {
        CompensatedSum acc;
        acc += detail::dot(S_[a], PS[c]);
        acc += -detail::dot(S_[a], PF[c]);
        acc += -detail::dot(S_[c], PF[a]);
        acc += detail::sum_product(P, B_[a], B_[c]);
        acc += -detail::sum_product(P, FF_[a * l_ + c]);
        out(a, c) = out(c, a) = acc.value() / norm;
      }
    return out;
  }

  std::vector<PathMoment> compute(std::span<const FunctionalSpec> phis) const {
    std::vector<PathMoment> out;
    out.reserve(phis.size());
    for (const auto& phi : phis) out.push_back({compute(phi), phi});
    return out;
  }

 private:
  Network net_;
  std::size_t l_;
  std::vector<Matrix> B_;
  std::vector<Vector> S_;
  std::vector<Matrix> FF_;  // upper-triangular index pairs only
};

inline std::vector<PathMoment> M_phi_hat_fast(const Network& net, const BasisSpec& basis,
                                              std::span<const FunctionalSpec> phis) {
  return PathAccumulator(net, basis).compute(phis);
}

inline PathMoment M_phi_hat_fast(const Network& net, const BasisSpec& basis,
                                 const FunctionalSpec& phi) {
  return {PathAccumulator(net, basis).compute(phi), phi};
}

// ---------------------------------------------------------------------------

/// All star statistics by the fast route.
inline MomentSet compute_moments(const Network& net, const BasisSpec& basis) {
  MomentSet m;
  m.n = net.size();
  m.a_hat = a_hat(net, basis);
  m.A0_hat = A0_hat_fast(net, basis);
  m.A_hat = A_lprime_hat_fast(net, basis);
  return m;
}

}  // namespace wsbm
