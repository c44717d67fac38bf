#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <random>

#include "netlmi/system.hpp"
#include "netlmi/topology.hpp"
#include "test_util.hpp"

using namespace netlmi;

namespace {

std::vector<double> sorted_spectrum(const Mat& a) {
  Eigen::EigenSolver<Mat> es(a, false);
  std::vector<double> v;
  for (int i = 0; i < a.rows(); ++i) v.push_back(std::abs(es.eigenvalues()(i)) + es.eigenvalues()(i).real());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Topology, FiveSubsystemExampleNeighborhoods) {
  const Topology t = derive_topology(five_subsystem_example());
  ASSERT_EQ(t.size(), 5);
  EXPECT_EQ(t.in(0), (std::set<int>{1, 3}));
  EXPECT_EQ(t.in(1), (std::set<int>{0, 3}));
  EXPECT_EQ(t.in(2), (std::set<int>{0, 1, 3}));
  EXPECT_EQ(t.in(3), (std::set<int>{0}));
  EXPECT_EQ(t.in(4), (std::set<int>{3}));
  EXPECT_EQ(t.out(3), (std::set<int>{0, 1, 2, 4}));
}

TEST(Topology, DecoupledSystemHasNoNeighbors) {
  auto s = NetworkedSystem::zeros(Domain::CT, {2, 1, 3}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1});
  for (int i = 0; i < 3; ++i) s.A.set_block(i, i, Mat::Identity(s.n[i], s.n[i]));
  const Topology t = derive_topology(s);
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(t.in(i).empty());
    EXPECT_TRUE(t.out(i).empty());
    EXPECT_EQ(t.min_combined_closed(i), i);
  }
}

TEST(Topology, ChainNeighborhoods) {
  const int n = 5;
  auto s = NetworkedSystem::zeros(Domain::CT, Dims(n, 1), Dims(n, 1), Dims(n, 1), Dims(n, 1), Dims(n, 1));
  for (int i = 0; i + 1 < n; ++i) {
    s.A.dense()(i, i + 1) = 1.0;
    s.A.dense()(i + 1, i) = -1.0;
  }
  const Topology t = derive_topology(s);
  for (int i = 0; i < n; ++i) {
    std::set<int> nb;
    if (i > 0) nb.insert(i - 1);
    if (i + 1 < n) nb.insert(i + 1);
    EXPECT_EQ(t.in(i), nb);
    EXPECT_EQ(t.out(i), nb);
    EXPECT_EQ(t.min_combined_closed(i), std::max(i - 1, 0));
  }
}

TEST(Topology, CouplingThroughNoiseChannel) {
  auto s = NetworkedSystem::zeros(Domain::CT, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1});
  s.E.dense()(1, 0) = 0.3;
  const Topology t = derive_topology(s);
  EXPECT_EQ(t.in(1), (std::set<int>{0}));
  EXPECT_TRUE(t.in(0).empty());
}

TEST(Topology, InOutDuality) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Topology t = random_geometric_topology(8, 0.5, 0.4, seed);
    for (int i = 0; i < 8; ++i) {
      EXPECT_FALSE(t.has_in(i, i));
      for (int j : t.in(i)) EXPECT_TRUE(t.has_out(j, i));
      for (int j : t.out(i)) EXPECT_TRUE(t.has_in(j, i));
    }
  }
}

TEST(Topology, ReindexMatchesPermutedTopology) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sys = testutil::random_system(seed, 6, Domain::CT);
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    const IndexingScheme sc(perm);
    EXPECT_EQ(derive_topology(reindex(sys, sc)), permute_topology(derive_topology(sys), sc));
  }
}

TEST(Topology, ReindexIdentityAndInvolution) {
  const auto sys = testutil::random_system(3, 5, Domain::DT);
  EXPECT_EQ(reindex(sys, IndexingScheme::identity(5)), sys);
  const IndexingScheme swap({1, 0, 2, 3, 4});
  EXPECT_EQ(reindex(reindex(sys, swap), swap), sys);
}

TEST(Topology, ReindexPreservesSpectrum) {
  const auto sys = testutil::random_system(11, 6, Domain::CT);
  const IndexingScheme sc({3, 5, 0, 1, 4, 2});
  const auto a = sorted_spectrum(sys.A.dense());
  const auto b = sorted_spectrum(reindex(sys, sc).A.dense());
  ASSERT_EQ(a.size(), b.size());
  for (size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-9);
}

TEST(Topology, IndexingSchemeInverse) {
  const IndexingScheme sc({2, 0, 3, 1});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(sc.original_at(sc.new_index(i)), i);
  EXPECT_EQ(IndexingScheme::from_order(sc.order()), sc);
  EXPECT_THROW(IndexingScheme({0, 0, 1}), Error);
}

TEST(Topology, RandomGenerationIsDeterministic) {
  EXPECT_EQ(random_geometric_topology(7, 0.4, 0.5, 42), random_geometric_topology(7, 0.4, 0.5, 42));
  EXPECT_EQ(testutil::random_system(5, 4, Domain::CT), testutil::random_system(5, 4, Domain::CT));
}

TEST(Topology, LargeRadiusGivesCompleteGraph) {
  const Topology t = random_geometric_topology(6, std::sqrt(2.0), 1.0, 7);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(static_cast<int>(t.in(i).size()), 5);
}

TEST(Topology, SingleSubsystem) {
  const Topology t = random_geometric_topology(1, 0.5, 0.5, 1);
  EXPECT_EQ(t.size(), 1);
  EXPECT_TRUE(t.in(0).empty());
}

TEST(Topology, RandomNetworkMatchesGeneratedTopology) {
  RandomNetworkOptions o;
  o.n = 6;
  o.seed = 9;
  o.radius = 0.6;
  o.state_dims = {1, 2, 3, 1, 2, 3};
  o.input_dims = o.noise_dims = o.output_dims = o.perf_dims = Dims(6, 1);
  const auto sys = random_network(o);
  sys.validate();
  EXPECT_EQ(derive_topology(sys), random_geometric_topology(6, 0.6, o.p_bidir, 9));
}
