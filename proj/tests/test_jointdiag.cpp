#include "support.hpp"

using namespace wsbm;
using wsbm::testing::max_abs;

namespace {

Matrix random_orthonormal(Eigen::Index r, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix X(r, r);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = nd(gen);
  return Eigen::HouseholderQR<Matrix>(X).householderQ() * Matrix::Identity(r, r);
}

Matrix diag3(double a, double b, double c) { return Vector(Eigen::Vector3d(a, b, c)).asDiagonal(); }

// Smallest error between two column sets over column permutations and signs.
double column_match(const Matrix& A, const Matrix& B) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(A.cols()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      const double e = std::min(max_abs(A.col(c) - B.col(perm[c])), max_abs(A.col(c) + B.col(perm[c])));
      worst = std::max(worst, e);
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(Whiten, Identity) {
  const auto w = whiten(Matrix::Identity(3, 3), 3);
  EXPECT_LE(max_abs(w.V_hat * w.V_hat.transpose() - Matrix::Identity(3, 3)), 1e-14);
  EXPECT_LE(max_abs(w.eigvals - Vector::Ones(3)), 1e-14);
}

TEST(Whiten, Design1Population) {
  const auto pop = wsbm::testing::binary_population(binary_design(1).params);
  const auto w = whiten(pop.A0, 2);
  EXPECT_LE(max_abs(w.V_hat * pop.A0 * w.V_hat.transpose() - Matrix::Identity(2, 2)), 1e-12);
  EXPECT_GT(w.eigvals.minCoeff(), 0.0);
}

TEST(Whiten, RankDeficiency) {
  const Vector g = (Vector(3) << 1.0, 0.5, 0.2).finished();
  const Matrix A0 = g * g.transpose();
  try {
    whiten(A0, 2);
    FAIL() << "expected rank deficiency";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::rank_deficient);
  }
  EXPECT_THROW(whiten(Matrix::Identity(2, 2), 3), Error);
}

TEST(JointDiag, AlreadyDiagonal) {
  std::vector<Matrix> fam{diag3(1.0, 2.0, 3.0), diag3(-1.0, 0.5, 4.0)};
  const auto jd = joint_diagonalize(fam);
  EXPECT_EQ(jd.offdiag_final, 0.0);
  EXPECT_LE(max_abs(jd.Q.cwiseAbs() - Matrix::Identity(3, 3)), 1e-15);
}

TEST(JointDiag, ExactlyDiagonalizableFamily) {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> nd;
  for (Eigen::Index r = 2; r <= 4; ++r) {
    const Matrix Q = random_orthonormal(r, gen);
    std::vector<Matrix> fam;
    Matrix D(r, 5);
    for (int k = 0; k < 5; ++k) {
      for (Eigen::Index z = 0; z < r; ++z) D(z, k) = nd(gen);
      fam.push_back(Q.transpose() * D.col(k).asDiagonal() * Q);
    }
    const auto jd = joint_diagonalize(fam);
    EXPECT_TRUE(jd.converged);
    EXPECT_LE(jd.offdiag_final, 1e-12);
    Matrix rec(r, 5);
    for (int k = 0; k < 5; ++k) rec.col(k) = jd.diagonalized[k].diagonal();
    // Rows of rec and D must agree up to one permutation of communities.
    EXPECT_LE(column_match(rec.transpose(), D.transpose()), 1e-10);
  }
}

TEST(JointDiag, SingleCommunity) {
  const auto jd = joint_diagonalize({Matrix::Constant(1, 1, 2.5), Matrix::Constant(1, 1, -1.0)});
  EXPECT_EQ(std::abs(jd.Q(0, 0)), 1.0);
  EXPECT_EQ(jd.offdiag_final, 0.0);
}

TEST(JointDiag, ObjectiveNonIncreasing) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd;
  std::vector<Matrix> fam;
  for (int k = 0; k < 6; ++k) {
    Matrix X(4, 4);
    for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = nd(gen);
    fam.push_back(X + X.transpose());
  }
  const auto jd = joint_diagonalize(fam);
  ASSERT_GE(jd.objective.size(), 2u);
  for (std::size_t k = 1; k < jd.objective.size(); ++k)
    EXPECT_LE(jd.objective[k], jd.objective[k - 1] * (1.0 + 1e-12) + 1e-14);
  EXPECT_LE(max_abs(jd.Q.transpose() * jd.Q - Matrix::Identity(4, 4)), 1e-10);
}

TEST(JointDiag, NonConvergenceIsFlagged) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  std::vector<Matrix> fam;
  for (int k = 0; k < 4; ++k) {
    Matrix X(4, 4);
    for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = nd(gen);
    fam.push_back(X + X.transpose());
  }
  const auto jd = joint_diagonalize(fam, 1e-12, 1);
  EXPECT_FALSE(jd.converged);
  EXPECT_EQ(jd.sweeps, 1);
}

TEST(RecoverG, Design1Population) {
  const auto pop = wsbm::testing::binary_population(binary_design(1).params);
  const auto rec = recover_G(pop.moments(), 2);
  EXPECT_LE(column_match(rec.G_hat, pop.G), 1e-8);
}

TEST(RecoverG, SignAndPermutationOfQ) {
  const auto draw = draw_network(binary_design(1).params, 100, 12);
  const auto m = compute_moments(draw.net, BasisSpec::indicator_grid({0.0, 1.0}));
  const auto rec = recover_G(m, 2);
  std::vector<Matrix> N;
  for (const auto& A : m.A_hat) {
    const Matrix t = rec.whitening.V_hat * A * rec.whitening.V_hat.transpose();
    N.push_back(0.5 * (t + t.transpose()));
  }
  const auto G_from = [&](const Matrix& Q) {
    Matrix G(static_cast<Eigen::Index>(N.size()), Q.cols());
    for (std::size_t k = 0; k < N.size(); ++k)
      G.row(static_cast<Eigen::Index>(k)) = (Q.transpose() * N[k] * Q).diagonal().transpose();
    return G;
  };
  EXPECT_LE(max_abs(G_from(rec.Q_hat) - rec.G_hat), 1e-12);
  Matrix flipped = rec.Q_hat;
  flipped.col(1) *= -1.0;
  EXPECT_LE(max_abs(G_from(flipped) - rec.G_hat), 1e-12);
  Matrix swapped(2, 2);
  swapped << rec.Q_hat.col(1), rec.Q_hat.col(0);
  const Matrix Gs = G_from(swapped);
  EXPECT_LE(max_abs(Gs.col(0) - rec.G_hat.col(1)), 1e-12);
  EXPECT_LE(max_abs(Gs.col(1) - rec.G_hat.col(0)), 1e-12);
  // Indicator basis sanity range.
  EXPECT_GE(rec.G_hat.minCoeff(), -0.05);
  EXPECT_LE(rec.G_hat.maxCoeff(), 1.05);
}

TEST(RecoverG, SingleCommunityEqualsAHat) {
  const auto net = wsbm::testing::constant_network(12, 3.0);
  const auto m = compute_moments(net, BasisSpec::polynomial(2));
  const auto rec = recover_G(m, 1);
  EXPECT_LE(max_abs(rec.G_hat.col(0) - m.a_hat), 1e-10);
  EXPECT_LE(max_abs(m.a_hat - (Vector(3) << 1.0, 3.0, 9.0).finished()), 1e-12);
}
