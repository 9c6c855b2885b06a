#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wsbm/wsbm.hpp"

namespace wsbm::testing {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double asymmetry(const Matrix& m) { return max_abs(m - m.transpose()); }

inline double rel_err(const Matrix& fast, const Matrix& ref) {
  return max_abs(fast - ref) / std::max(1.0, max_abs(ref));
}

/// Symmetric random network; weights drawn from a small discrete support
/// when `levels` > 0 so indicator bases see ties, else Uniform(0, 1).
inline Network random_network(std::size_t n, std::mt19937_64& gen, int levels = 0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> d(0, std::max(levels - 1, 0));
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) w(i, j) = w(j, i) = levels > 0 ? d(gen) : u(gen);
  return Network(w);
}

inline Network constant_network(std::size_t n, double c) {
  const auto N = static_cast<Eigen::Index>(n);
  Matrix w = Matrix::Constant(N, N, c);
  w.diagonal().setZero();
  return Network(w);
}

/// Analytic population moments of a binary design under the basis
/// {1{x <= 0}, 1{x <= 1}}.
struct Population {
  Vector p;
  Matrix theta;  // r x r success probabilities
  Matrix G;      // l x r
  Vector a;
  Matrix A0;
  std::vector<Matrix> A;
  Matrix H1;
  Matrix H_id;  // phi = identity
  Matrix M1;
  Matrix M_id;

  MomentSet moments() const { return {a, A0, A, 0}; }
};

inline Population binary_population(const BlockModelParams& params) {
  Population pop;
  const auto r = static_cast<Eigen::Index>(params.r());
  pop.p = Eigen::Map<const Vector>(params.p().data(), r);
  pop.theta.resize(r, r);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b)
      pop.theta(a, b) = params.edge_law(a, b).expect(FunctionalSpec::identity());
  pop.G.resize(2, r);
  for (Eigen::Index z = 0; z < r; ++z) {
    pop.G(0, z) = 1.0 - pop.p.dot(pop.theta.col(z));
    pop.G(1, z) = 1.0;
  }
  pop.a = pop.G * pop.p;
  pop.A0 = pop.G * pop.p.asDiagonal() * pop.G.transpose();
  for (Eigen::Index lp = 0; lp < 2; ++lp) {
    const Vector w = pop.p.cwiseProduct(pop.G.row(lp).transpose());
    pop.A.push_back(pop.G * w.asDiagonal() * pop.G.transpose());
  }
  pop.H1 = pop.p * pop.p.transpose();
  pop.H_id = pop.H1.cwiseProduct(pop.theta);
  pop.M1 = pop.G * pop.H1 * pop.G.transpose();
  pop.M_id = pop.G * pop.H_id * pop.G.transpose();
  return pop;
}

/// Structural invariants that must hold on every pipeline run.
inline void expect_pipeline_invariants(const FitResult& res) {
  constexpr double tol = 1e-10;
  const auto& m = res.moments;
  EXPECT_LE(asymmetry(m.A0_hat), tol);
  for (const auto& A : m.A_hat) EXPECT_LE(asymmetry(A), tol);
  EXPECT_LE(asymmetry(res.M1_hat), tol);
  const auto& b = res.block;
  const auto r = static_cast<Eigen::Index>(b.r);
  EXPECT_LE(max_abs(b.Q_hat.transpose() * b.Q_hat - Matrix::Identity(r, r)), tol);
  EXPECT_LE(asymmetry(b.H1_hat), tol);
  const Vector resid = m.a_hat - b.G_hat * b.p_hat;
  EXPECT_LE(max_abs(b.G_hat.transpose() * resid), tol);
  for (const auto* group : {&res.functionals, &res.cdf}) {
    for (const auto& f : *group) {
      EXPECT_LE(asymmetry(f.M_hat), tol);
      EXPECT_LE(asymmetry(f.H_phi_hat), tol);
      EXPECT_LE(asymmetry(f.phi_hat), tol);
    }
  }
  if (res.density)
    for (const auto& f : res.density->f_hat) EXPECT_LE(asymmetry(f), tol);
}

}  // namespace wsbm::testing
