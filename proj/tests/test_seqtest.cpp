#include <gtest/gtest.h>

#include <random>

#include "netlmi/seqtest.hpp"
#include "test_util.hpp"

using namespace netlmi;

namespace {

Topology chain(int n) {
  Topology t(n);
  for (int i = 0; i + 1 < n; ++i) {
    t.add_edge(i, i + 1);
    t.add_edge(i + 1, i);
  }
  return t;
}

BlockMatrix scalar_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  Mat m(n, n);
  int r = 0;
  for (auto row : rows) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return BlockMatrix(Dims(n, 1), Dims(n, 1), m);
}

double rel_diff(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST(SeqTest, IdentityIsPositiveDefinite) {
  const auto r = sequential_pd_test(BlockMatrix::identity({2, 1, 3}), nullptr, false);
  EXPECT_TRUE(r.pd);
  EXPECT_FALSE(r.failing_index.has_value());
  ASSERT_EQ(r.rows.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(r.rows[i].blocks[i].isIdentity());
}

TEST(SeqTest, TwoByTwoSchurValue) {
  const auto r = sequential_pd_test(scalar_matrix({{2, 1}, {1, 2}}), nullptr, false);
  EXPECT_TRUE(r.pd);
  EXPECT_NEAR(r.rows[1].blocks[1](0, 0), 1.5, 1e-15);
}

TEST(SeqTest, IndefiniteFailsAtSecondSubsystem) {
  const auto r = sequential_pd_test(scalar_matrix({{1, 2}, {2, 1}}), nullptr, false);
  EXPECT_FALSE(r.pd);
  ASSERT_TRUE(r.failing_index.has_value());
  EXPECT_EQ(*r.failing_index, 1);
  EXPECT_NEAR(r.rows[1].blocks[1](0, 0), -3.0, 1e-15);
  EXPECT_FALSE(r.singular);
}

TEST(SeqTest, SingularMatrixFlagged) {
  const auto r = sequential_pd_test(scalar_matrix({{1, 1}, {1, 1}}), nullptr, false);
  EXPECT_FALSE(r.pd);
  EXPECT_TRUE(r.singular);
}

TEST(SeqTest, RejectsAsymmetricInput) {
  EXPECT_THROW(sequential_pd_test(scalar_matrix({{1, 0.5}, {0, 1}}), nullptr, false), Error);
  const Topology t(3);
  EXPECT_THROW(sequential_pd_test(BlockMatrix::identity({1, 1}), &t, true), Error);
}

TEST(SeqTest, VerdictMatchesEigenvalueOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 8;
    const Dims d = testutil::random_dims(rng, n, 1, 3);
    const auto w = testutil::random_symmetric(rng, d, 1e-6);
    const bool oracle = min_eig(w.dense()) > 0;
    const auto r = sequential_pd_test(w, nullptr, false);
    EXPECT_EQ(r.pd, oracle) << "trial " << trial;
    EXPECT_EQ(r.pd, !r.failing_index.has_value());
  }
}

TEST(SeqTest, TildeDiagonalMatchesCholesky) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims d = testutil::random_dims(rng, 6, 1, 4);
    const auto w = testutil::random_pd_block(rng, d);
    const Mat l = Eigen::LLT<Mat>(w.dense()).matrixL();
    const auto off = offsets(d);
    const auto r = sequential_pd_test(w, nullptr, false);
    ASSERT_TRUE(r.pd);
    for (int i = 0; i < 6; ++i) {
      const Mat lii = l.block(off[i], off[i], d[i], d[i]);
      EXPECT_LE(rel_diff(r.rows[i].blocks[i], lii * lii.transpose()), 1e-10);
    }
  }
}

TEST(SeqTest, SkippingOnNetworkMatricesIsExact) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Topology t = random_geometric_topology(8, 0.4, 0.5, 500 + trial);
    const Dims d = testutil::random_dims(rng, 8, 1, 3);
    const auto w = testutil::random_pd_network(rng, t, d);
    const auto full = sequential_pd_test(w, &t, false);
    const auto skip = sequential_pd_test(w, &t, true);
    ASSERT_TRUE(full.pd);
    ASSERT_TRUE(skip.pd);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j <= i; ++j) {
        EXPECT_LE((skip.rows[i].blocks[j] - full.rows[i].blocks[j]).norm(), 1e-10 * (1.0 + w.dense().norm()));
        const int start = std::max(t.min_combined_closed(i), t.min_combined_closed(j));
        if (j < start) EXPECT_LE(full.rows[i].blocks[j].norm(), 1e-10);
      }
    EXPECT_LE(skip.log.entries.size(), full.log.entries.size());
  }
}

TEST(SeqTest, ChainSkipsEverythingBeyondNeighbors) {
  const Topology t = chain(5);
  BlockMatrix w = BlockMatrix::identity(Dims(5, 1));
  for (int i = 0; i + 1 < 5; ++i) w.dense()(i, i + 1) = w.dense()(i + 1, i) = 0.3;
  const auto skip = sequential_pd_test(w, &t, true);
  const auto full = sequential_pd_test(w, &t, false);
  EXPECT_TRUE(skip.pd);
  for (const auto& m : skip.log.entries) EXPECT_EQ(m.receiver - m.sender, 1);
  EXPECT_LT(skip.log.entries.size(), full.log.entries.size());
}

TEST(SeqTest, ResidualsOfPdNetworkMatricesStayPd) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = random_geometric_topology(6, 0.5, 0.5, 700 + trial);
    const Dims d = testutil::random_dims(rng, 6, 1, 3);
    const auto w = testutil::random_pd_network(rng, t, d);
    for (int i = 0; i < 6; ++i) {
      const auto r = residual(w, i);
      EXPECT_EQ(r.n_block_rows(), 5);
      EXPECT_GT(min_eig(r.dense()), 0.0);
      EXPECT_TRUE(sequential_pd_test(r, nullptr, false).pd);
    }
  }
}

TEST(SeqTest, ResidualRemovalCommutes) {
  std::mt19937_64 rng(5);
  const auto w = testutil::random_pd_block(rng, {1, 2, 3, 1});
  const auto a = residual(residual(w, 1), 2);  // removes original 1, then original 3
  const auto b = residual(residual(w, 3), 1);
  EXPECT_TRUE(a.dense() == b.dense());
  EXPECT_THROW(residual(w, 4), Error);
}

TEST(SeqTest, IncrementalPushEqualsBatch) {
  std::mt19937_64 rng(6);
  const Topology t = random_geometric_topology(6, 0.5, 0.5, 77);
  const Dims d = testutil::random_dims(rng, 6, 1, 3);
  const auto w = testutil::random_pd_network(rng, t, d);
  const auto batch = sequential_pd_test(w, &t, true);
  SequentialFactor f(&t, true);
  const auto off = offsets(d);
  for (int i = 0; i < 6; ++i) {
    std::vector<Mat> row;
    for (int j = 0; j <= i; ++j) row.push_back(w.block(i, j));
    f.push_row(row);
    EXPECT_TRUE(f.last_pd());
    // earlier rows are untouched by later pushes
    for (int k = 0; k <= i; ++k)
      for (int j = 0; j <= k; ++j) EXPECT_TRUE(f.rows()[k].blocks[j] == batch.rows[k].blocks[j]);
    const Mat lead = w.dense().topLeftCorner(off[i + 1], off[i + 1]);
    EXPECT_LE((f.leading_product() - lead).norm(), 1e-10 * lead.norm());
  }
  EXPECT_EQ(f.log().to_text(), batch.log.to_text());
}

TEST(SeqTest, MessageLogRoundTrip) {
  std::mt19937_64 rng(7);
  const Topology t = random_geometric_topology(7, 0.6, 0.3, 8);
  const auto w = testutil::random_pd_network(rng, t, testutil::random_dims(rng, 7, 1, 3));
  const auto r = sequential_pd_test(w, &t, true);
  ASSERT_FALSE(r.log.entries.empty());
  const auto back = MessageLog::from_text(r.log.to_text());
  ASSERT_EQ(back.entries.size(), r.log.entries.size());
  for (size_t k = 0; k < back.entries.size(); ++k) EXPECT_EQ(back.entries[k], r.log.entries[k]);
  for (size_t k = 1; k < r.log.entries.size(); ++k)
    EXPECT_LE(r.log.entries[k - 1].receiver, r.log.entries[k].receiver);
  EXPECT_THROW(MessageLog::from_text("1 2 garbage\n"), Error);
}

TEST(SeqTest, SingleSubsystemSendsNothing) {
  const Topology t(1);
  const auto r = sequential_pd_test(BlockMatrix::identity({3}), &t, true);
  EXPECT_TRUE(r.pd);
  EXPECT_TRUE(r.log.entries.empty());
  EXPECT_TRUE(comm_count(r).empty());
}

TEST(SeqTest, CommCountGroupsBySenderReceiver) {
  const Topology t = chain(3);
  const auto r = sequential_pd_test(BlockMatrix::identity({1, 1, 1}), &t, false);
  const auto c = comm_count(r);
  int total = 0;
  for (const auto& [k, v] : c) total += v;
  EXPECT_EQ(total, static_cast<int>(r.log.entries.size()));
  EXPECT_TRUE(c.count({0, 1}));
}

TEST(EnforceEquality, ScalarExamples) {
  const auto i2 = BlockMatrix::identity({1, 1});
  BlockMatrix c({1, 1}, {1, 1});
  c.dense() << 1, 2, 3, 4;
  const auto x = enforce_equality(i2, i2, c, EqualityStructure::General);
  EXPECT_TRUE(x.dense() == -c.dense());

  const BlockMatrix a({1}, {1}, Mat::Constant(1, 1, 2.0));
  const BlockMatrix b({1}, {1}, Mat::Constant(1, 1, 4.0));
  const BlockMatrix cc({1}, {1}, Mat::Constant(1, 1, 8.0));
  EXPECT_DOUBLE_EQ(enforce_equality(a, b, cc, EqualityStructure::BlockDiag).dense()(0, 0), -1.0);
}

TEST(EnforceEquality, SolvesRandomBlockDiagonalSystems) {
  std::mt19937_64 rng(9);
  const Dims d{2, 1, 3};
  std::vector<Mat> ab, bb;
  for (int v : d) {
    ab.push_back(testutil::random_pd(rng, v));
    bb.push_back(testutil::random_pd(rng, v));
  }
  const auto a = BlockMatrix::block_diag(ab), b = BlockMatrix::block_diag(bb);
  const BlockMatrix c(d, d, testutil::randn(rng, 6, 6));
  const auto x = enforce_equality(a, b, c, EqualityStructure::General);
  EXPECT_LE((a.dense() * x.dense() * b.dense() + c.dense()).norm(), 1e-10 * c.dense().norm());
}

TEST(EnforceEquality, StructureErrors) {
  BlockMatrix coupled = BlockMatrix::identity({1, 1});
  coupled.dense()(0, 1) = 1.0;
  const auto i2 = BlockMatrix::identity({1, 1});
  EXPECT_THROW(enforce_equality(coupled, i2, i2, EqualityStructure::General), Error);
  EXPECT_THROW(enforce_equality(i2, i2, coupled, EqualityStructure::BlockDiag), Error);
  BlockMatrix singular = BlockMatrix::identity({1, 1});
  singular.dense()(1, 1) = 0.0;
  EXPECT_THROW(enforce_equality(singular, i2, i2, EqualityStructure::General), Error);
}
