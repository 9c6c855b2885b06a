#pragma once

// Recovery of G from the star statistics.
//
// A0 = G diag(p) G' has rank r. Whitening with V = L^{-1/2} U' (the r leading
// eigenpairs of A0) turns each three-star matrix into
//   N_l' = V A_l' V' = W diag(G_{l',.}) W',   W = V G diag(p)^{1/2} orthonormal,
// so one orthonormal Q jointly diagonalizes the whole family and the
// diagonals of Q' N_l' Q are the rows of G. With sample moments the family
// is only approximately diagonalizable; Q minimizes the summed squared
// off-diagonal entries, found by cyclic Jacobi (Givens) sweeps whose angles
// come in closed form from a 2x2 eigenproblem (Cardoso & Souloumiac).

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "wsbm/core.hpp"

namespace wsbm {

/// r-th eigenvalue must exceed this fraction of the largest one.
inline constexpr double kRankTolerance = 1e-10;

struct WhiteningResult {
  Matrix V_hat;    // r x l, V A0 V' = I_r
  Vector eigvals;  // r retained, descending
  Vector spectrum; // all l eigenvalues, descending
  double eiggap = std::numeric_limits<double>::infinity();
};

inline WhiteningResult whiten(const Matrix& A0_hat, std::size_t r) {
  const auto l = static_cast<std::size_t>(A0_hat.rows());
  if (A0_hat.cols() != A0_hat.rows()) throw Error(ErrorCode::config, "whiten: A0 must be square");
  if (r == 0 || r > l)
    throw Error(ErrorCode::invalid_basis,
                "whiten: need 1 <= r <= l (r = " + std::to_string(r) + ", l = " + std::to_string(l) + ")");

  const Matrix sym = 0.5 * (A0_hat + A0_hat.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::rank_deficient, "eigendecomposition of A0 failed");

  // Eigen returns ascending order.
  const auto L = static_cast<Eigen::Index>(l);
  WhiteningResult out;
  out.spectrum = eig.eigenvalues().reverse();
  const double largest = out.spectrum[0];
  const double rth = out.spectrum[static_cast<Eigen::Index>(r) - 1];
  if (!(largest > 0.0) || !(rth > kRankTolerance * largest))
    throw Error(ErrorCode::rank_deficient,
                "A0 has numerical rank below r = " + std::to_string(r) + " (r-th eigenvalue " +
                    std::to_string(rth) + ", largest " + std::to_string(largest) +
                    "); the basis may be too small or r too large");

  const auto R = static_cast<Eigen::Index>(r);
  out.eigvals = out.spectrum.head(R);
  out.V_hat.resize(R, L);
  for (Eigen::Index k = 0; k < R; ++k) {
    const Eigen::Index col = L - 1 - k;
    out.V_hat.row(k) = eig.eigenvectors().col(col).transpose() / std::sqrt(out.eigvals[k]);
  }
  if (r < l) {
    const double next = std::abs(out.spectrum[R]);
    out.eiggap = next > 0.0 ? std::abs(rth) / next : std::numeric_limits<double>::infinity();
  }
  return out;
}

/// Summed squared off-diagonal entries over the family.
inline double offdiag_objective(std::span<const Matrix> family) {
  double acc = 0.0;
  for (const auto& m : family)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (i != j) acc += m(i, j) * m(i, j);
  return acc;
}

struct JointDiagResult {
  Matrix Q;                      // r x r orthonormal
  double offdiag_final = 0.0;
  bool converged = true;
  int sweeps = 0;
  std::vector<double> objective;  // before the first sweep, then after each sweep
  std::vector<Matrix> diagonalized;  // Q' N_k Q
};

inline constexpr double kDefaultJdTolerance = 1e-12;
inline constexpr int kDefaultMaxSweeps = 100;

/// Orthogonal joint approximate diagonalization of symmetric matrices.
/// Stops once a full sweep performs no rotation with |sin| >= tol, or after
/// max_sweeps sweeps (then converged == false).
inline JointDiagResult joint_diagonalize(std::vector<Matrix> family, double tol = kDefaultJdTolerance,
                                         int max_sweeps = kDefaultMaxSweeps) {
  if (family.empty()) throw Error(ErrorCode::config, "joint_diagonalize: empty family");
  const Eigen::Index r = family.front().rows();
  for (const auto& m : family)
    if (m.rows() != r || m.cols() != r)
      throw Error(ErrorCode::config, "joint_diagonalize: matrices must be square and equally sized");

  JointDiagResult out;
  out.Q = Matrix::Identity(r, r);
  out.objective.push_back(offdiag_objective(family));

  bool rotated = r > 1;
  while (rotated && out.sweeps < max_sweeps) {
    rotated = false;
    ++out.sweeps;
    for (Eigen::Index p = 0; p + 1 < r; ++p) {
      for (Eigen::Index q = p + 1; q < r; ++q) {
        // 2x2 Gram matrix of h_k = (N_pp - N_qq, N_pq + N_qp).
        double g11 = 0.0, g12 = 0.0, g22 = 0.0;
        for (const auto& m : family) {
          const double h1 = m(p, p) - m(q, q);
          const double h2 = m(p, q) + m(q, p);
          g11 += h1 * h1;
          g12 += h1 * h2;
          g22 += h2 * h2;
        }
        const double ton = g11 - g22;
        const double toff = 2.0 * g12;
        const double theta = 0.5 * std::atan2(toff, ton + std::hypot(ton, toff));
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        if (!(std::abs(s) >= tol)) continue;
        rotated = true;

        for (auto& m : family) {
          // columns, then rows: m <- G' m G with G = [[c, -s], [s, c]] on (p, q)
          const Eigen::VectorXd cp = m.col(p);
          const Eigen::VectorXd cq = m.col(q);
          m.col(p) = c * cp + s * cq;
          m.col(q) = -s * cp + c * cq;
          const Eigen::RowVectorXd rp = m.row(p);
          const Eigen::RowVectorXd rq = m.row(q);
          m.row(p) = c * rp + s * rq;
          m.row(q) = -s * rp + c * rq;
        }
        const Eigen::VectorXd qp = out.Q.col(p);
        const Eigen::VectorXd qq = out.Q.col(q);
        out.Q.col(p) = c * qp + s * qq;
        out.Q.col(q) = -s * qp + c * qq;
      }
    }
    out.objective.push_back(offdiag_objective(family));
  }
  out.converged = !rotated;
  out.offdiag_final = out.objective.back();
  out.diagonalized = std::move(family);
  return out;
}

struct RecoverResult {
  Matrix G_hat;  // l x r
  Matrix Q_hat;
  WhiteningResult whitening;
  JointDiagResult jd;
};

/// whiten -> N_l' = V A_l' V' (symmetrized) -> joint diagonalization ->
/// G(l', z) = (Q' N_l' Q)(z, z).
inline RecoverResult recover_G(const MomentSet& moments, std::size_t r,
                               double tol = kDefaultJdTolerance,
                               int max_sweeps = kDefaultMaxSweeps) {
  const auto l = moments.l();
  if (moments.A_hat.size() != l)
    throw Error(ErrorCode::config, "recover_G: moment set has inconsistent basis size");
  RecoverResult out;
  out.whitening = whiten(moments.A0_hat, r);
  const Matrix& V = out.whitening.V_hat;

  std::vector<Matrix> family;
  family.reserve(l);
  for (const auto& A : moments.A_hat) {
    const Matrix N = V * A * V.transpose();
    family.push_back(0.5 * (N + N.transpose()));
  }
  out.jd = joint_diagonalize(std::move(family), tol, max_sweeps);
  out.Q_hat = out.jd.Q;

  const auto R = static_cast<Eigen::Index>(r);
  out.G_hat.resize(static_cast<Eigen::Index>(l), R);
  for (std::size_t lp = 0; lp < l; ++lp)
    out.G_hat.row(static_cast<Eigen::Index>(lp)) = out.jd.diagonalized[lp].diagonal().transpose();
  return out;
}

}  // namespace wsbm
