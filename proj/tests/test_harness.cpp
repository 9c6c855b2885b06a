#include "support.hpp"

using namespace wsbm;

TEST(Summarize, BasicStatistics) {
  const auto s = summarize({4.0, 1.0, 3.0, 2.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.iqr, 1.5);
  EXPECT_NEAR(s.std_dev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 4.0);
}

TEST(AlignToTruth, SwapsLabels) {
  const Vector p = (Vector(2) << 0.68, 0.32).finished();
  const std::vector<Matrix> phi{(Matrix(2, 2) << 0.41, 0.0, 0.0, 0.19).finished()};
  const std::vector<Matrix> truth{(Matrix(2, 2) << 0.2, 0.0, 0.0, 0.4).finished()};
  EXPECT_EQ(align_to_truth(p, phi, {0.3, 0.7}, truth), (std::vector<std::size_t>{1, 0}));
}

TEST(RunDesign, Design1Small) {
  const auto s = run_design(binary_design(1), 100, 40, 1000);
  EXPECT_EQ(s.failures, 0u);
  for (const auto& r : s.rows) {
    EXPECT_GE(r.stats.median, r.stats.min);
    EXPECT_LE(r.stats.median, r.stats.max);
    EXPECT_GE(r.stats.iqr, 0.0);
    EXPECT_GE(r.stats.std_dev, 0.0);
  }
  EXPECT_DOUBLE_EQ(s.row("phi[1,1]").truth, 0.2);
  EXPECT_DOUBLE_EQ(s.row("p[1]").truth, 0.3);
  EXPECT_NEAR(s.row("phi[2,2]").stats.mean, 0.4, 0.03);
}

TEST(RunDesign, DeterministicAcrossThreadCounts) {
  McConfig one, four;
  four.threads = 4;
  const auto a = run_design(binary_design(2), 60, 16, 5, one);
  const auto b = run_design(binary_design(2), 60, 16, 5, four);
  const auto c = run_design(binary_design(2), 60, 16, 5, one);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].stats.mean, b.rows[k].stats.mean);
    EXPECT_EQ(a.rows[k].stats.std_dev, b.rows[k].stats.std_dev);
    EXPECT_EQ(a.rows[k].stats.mean, c.rows[k].stats.mean);
  }
}

TEST(RunDesign, PointMassHasNoDispersion) {
  Design d{"point", BlockModelParams({1.0}, {PointMass{2.0}}), BasisSpec::polynomial(1),
           {FunctionalSpec::identity()}};
  const auto s = run_design(d, 10, 5, 1);
  for (const auto& r : s.rows) EXPECT_EQ(r.stats.std_dev, 0.0) << r.name;
  EXPECT_NEAR(s.row("phi[1,1]").stats.mean, 2.0, 1e-10);
}

TEST(RunDesign, Preconditions) {
  EXPECT_THROW(run_design(binary_design(1), 100, 1, 1), Error);
  // r = 3 with a two-function basis fails every replication.
  Design bad = binary_design(1);
  bad.params = BlockModelParams::from_upper({0.2, 0.3, 0.5}, std::vector<EdgeLaw>(6, Bernoulli{0.5}));
  try {
    run_design(bad, 20, 3, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::all_replications_failed);
  }
}

TEST(RunDesign, TimePerReplication) {
  const auto t0 = std::chrono::steady_clock::now();
  run_design(binary_design(1), 100, 10, 77);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  EXPECT_LT(dt.count() / 10.0, 1.0);
}
