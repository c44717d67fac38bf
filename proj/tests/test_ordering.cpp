#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "netlmi/ordering.hpp"
#include "test_util.hpp"

using namespace netlmi;

namespace {

Topology star(int n, int center) {
  Topology t(n);
  for (int i = 0; i < n; ++i)
    if (i != center) {
      t.add_edge(i, center);
      t.add_edge(center, i);
    }
  return t;
}

Topology complete(int n) {
  Topology t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.add_edge(i, j);
  return t;
}

// subsystem i hears from every j < i
Topology cascade(int n) {
  Topology t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) t.add_edge(j, i);
  return t;
}

IndexingScheme random_scheme(std::mt19937_64& rng, int n) {
  std::vector<int> o(n);
  std::iota(o.begin(), o.end(), 0);
  std::shuffle(o.begin(), o.end(), rng);
  return IndexingScheme::from_order(o);
}

// Runs the protocol on W under `scheme` and relabels the log back to original subsystems.
MessageLog protocol_log(const BlockMatrix& w, const Topology& topo, const IndexingScheme& scheme, bool skip) {
  const auto pw = permute(w, scheme.perm());
  const Topology pt = permute_topology(topo, scheme);
  auto log = sequential_pd_test(pw, &pt, skip).log;
  for (auto& m : log.entries) {
    m.sender = scheme.original_at(m.sender);
    m.receiver = scheme.original_at(m.receiver);
    m.a = scheme.original_at(m.a);
    m.b = scheme.original_at(m.b);
  }
  return log;
}

}  // namespace

TEST(Ordering, DefaultModelEntries) {
  Topology t(3);
  t.add_edge(0, 1);
  const auto m = default_cost_model(t, {1, 2, 3});
  EXPECT_EQ(m.alpha(1, 0), 0.0);
  EXPECT_EQ(m.alpha(0, 1), 1.0);
  EXPECT_EQ(m.beta(0, 2), 18.0);
  EXPECT_EQ(m.gamma(0, 1, 1), 4.0);
  EXPECT_EQ(m.gamma(0, 1, 2), 6.0);
  EXPECT_NO_THROW(m.validate());
  EXPECT_EQ(linear_cost_model(t, {1, 2, 3}).gamma(0, 1, 2), 0.0);
  auto bad = m;
  bad.beta(0, 1) = -1.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Ordering, TrivialNetworksCostNothing) {
  const Topology one(1);
  EXPECT_EQ(comm_cost(one, IndexingScheme::identity(1), default_cost_model(one, {2})), 0.0);
  Topology pair(2);
  pair.add_edge(0, 1);
  pair.add_edge(1, 0);
  const auto m = default_cost_model(pair, {2, 3});
  EXPECT_EQ(comm_cost(pair, IndexingScheme::identity(2), m), 0.0);
  EXPECT_EQ(comm_cost(pair, IndexingScheme({1, 0}), m), 0.0);
}

TEST(Ordering, OneWayPairDependsOnOrder) {
  Topology t(2);
  t.add_edge(0, 1);  // 0 in E_1
  const auto m = default_cost_model(t, {2, 1});
  EXPECT_EQ(comm_cost(t, IndexingScheme::identity(2), m), 0.0);
  // 0 placed second must fetch from 1: raw block (beta = 2) and W~_11 (gamma = 1)
  EXPECT_EQ(comm_cost(t, IndexingScheme({1, 0}), m), 3.0);
}

TEST(Ordering, CascadeIsDistributedAndFree) {
  const Topology t = cascade(6);
  const auto id = IndexingScheme::identity(6);
  EXPECT_TRUE(is_distributed(t, id));
  EXPECT_EQ(comm_cost(t, id, default_cost_model(t, Dims(6, 2))), 0.0);
  const auto r = optimize_indexing(t, default_cost_model(t, Dims(6, 2)), OrderMethod::Brute);
  EXPECT_EQ(r.best_cost, 0.0);
  EXPECT_TRUE(is_distributed(t, r.best));
}

TEST(Ordering, ZeroCostImpliesDistributedForPositivePrices) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Topology t = random_geometric_topology(5, 0.7, 0.5, 40 + trial);
    const auto m = default_cost_model(t, testutil::random_dims(rng, 5, 1, 3));
    const auto sc = random_scheme(rng, 5);
    EXPECT_EQ(is_distributed(t, sc), comm_cost(t, sc, m) == 0.0);
  }
}

TEST(Ordering, ChainIsNotDistributed) {
  Topology t(4);
  for (int i = 0; i + 1 < 4; ++i) {
    t.add_edge(i, i + 1);
    t.add_edge(i + 1, i);
  }
  EXPECT_FALSE(is_distributed(t, IndexingScheme::identity(4)));
  EXPECT_GT(comm_cost(t, IndexingScheme::identity(4), default_cost_model(t, Dims(4, 1))), 0.0);
}

TEST(Ordering, CompleteGraphReturnsIdentity) {
  const Topology t = complete(5);
  const auto r = optimize_indexing(t, default_cost_model(t, Dims(5, 2)), OrderMethod::Brute);
  EXPECT_EQ(r.best_cost, 0.0);
  EXPECT_EQ(r.worst_cost, 0.0);
  EXPECT_EQ(r.best, IndexingScheme::identity(5));
  EXPECT_EQ(r.evaluations, 120);
}

TEST(Ordering, StarPlacesCenterNearTheEnd) {
  // leaf pairs exchange nothing unless two leaves follow the center
  const Topology t = star(5, 2);
  auto m = default_cost_model(t, Dims(5, 2));
  m.charge_skipped_pairs = false;
  const auto r = optimize_indexing(t, m, OrderMethod::Brute);
  EXPECT_EQ(r.best_cost, 0.0);
  EXPECT_EQ(r.best.order(), (std::vector<int>{0, 1, 3, 2, 4}));
  EXPECT_EQ(comm_cost(t, IndexingScheme::from_order({0, 1, 3, 4, 2}), m), 0.0);
  EXPECT_GT(comm_cost(t, IndexingScheme::from_order({2, 0, 1, 3, 4}), m), 0.0);
  EXPECT_GT(r.worst_cost, 0.0);
}

TEST(Ordering, LinearModelMatchesLinearOrderingObjective) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Topology t = random_geometric_topology(6, 0.6, 0.4, 60 + trial);
    auto m = linear_cost_model(t, testutil::random_dims(rng, 6, 1, 3));
    const Mat g = pairwise_cost_matrix(t, m);
    for (int k = 0; k < 5; ++k) {
      const auto sc = random_scheme(rng, 6);
      EXPECT_DOUBLE_EQ(comm_cost(t, sc, m), linear_ordering_cost(g, sc));
    }
  }
}

TEST(Ordering, PairwiseMatrixRejectsCrossTerms) {
  const Topology t = random_geometric_topology(4, 0.8, 0.5, 3);
  EXPECT_THROW(pairwise_cost_matrix(t, default_cost_model(t, Dims(4, 2))), Error);
}

TEST(Ordering, EmpiricalCostEqualsAnalyticCost) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = random_geometric_topology(6, 0.55, 0.5, 80 + trial);
    const Dims d = testutil::random_dims(rng, 6, 1, 3);
    auto m = default_cost_model(t, d);
    m.charge_skipped_pairs = false;
    const auto w = testutil::random_pd_network(rng, t, d);
    const auto sc = random_scheme(rng, 6);
    const auto log = protocol_log(w, t, sc, true);
    EXPECT_DOUBLE_EQ(empirical_cost(log, m), comm_cost(t, sc, m)) << "trial " << trial;
  }
}

TEST(Ordering, SkippingNeverCostsMore) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = random_geometric_topology(6, 0.5, 0.5, 100 + trial);
    const Dims d = testutil::random_dims(rng, 6, 1, 3);
    const auto m = default_cost_model(t, d);
    const auto w = testutil::random_pd_network(rng, t, d);
    const auto sc = random_scheme(rng, 6);
    EXPECT_GE(empirical_cost(protocol_log(w, t, sc, false), m), empirical_cost(protocol_log(w, t, sc, true), m));
  }
}

TEST(Ordering, LiteralPricingDominatesProtocolPricing) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Topology t = random_geometric_topology(6, 0.5, 0.5, 120 + trial);
    auto literal = default_cost_model(t, testutil::random_dims(rng, 6, 1, 3));
    auto protocol = literal;
    protocol.charge_skipped_pairs = false;
    const auto sc = random_scheme(rng, 6);
    EXPECT_GE(comm_cost(t, sc, literal), comm_cost(t, sc, protocol));
  }
}

TEST(Ordering, HeuristicNeverBeatsBruteForce) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 15; ++trial) {
    const Topology t = random_geometric_topology(6, 0.5, 0.5, 140 + trial);
    const auto m = default_cost_model(t, testutil::random_dims(rng, 6, 1, 3));
    const auto brute = optimize_indexing(t, m, OrderMethod::Brute);
    const auto greedy = optimize_indexing(t, m, OrderMethod::GreedyLocal);
    EXPECT_GE(greedy.best_cost, brute.best_cost);
    EXPECT_LE(brute.best_cost, comm_cost(t, IndexingScheme::identity(6), m));
    EXPECT_GE(brute.worst_cost, comm_cost(t, IndexingScheme::identity(6), m));
    EXPECT_DOUBLE_EQ(brute.best_cost, comm_cost(t, brute.best, m));
    EXPECT_DOUBLE_EQ(greedy.best_cost, comm_cost(t, greedy.best, m));
    EXPECT_DOUBLE_EQ(brute.worst_cost, comm_cost(t, brute.worst, m));
  }
}

TEST(Ordering, BruteForceLimits) {
  const Topology t = random_geometric_topology(7, 0.5, 0.5, 9);
  const auto m = default_cost_model(t, Dims(7, 1));
  EXPECT_THROW(optimize_indexing(t, m, OrderMethod::Brute, 100), Error);
  const Topology big = random_geometric_topology(11, 0.5, 0.5, 9);
  EXPECT_THROW(optimize_indexing(big, default_cost_model(big, Dims(11, 1)), OrderMethod::Brute), Error);
  EXPECT_NO_THROW(optimize_indexing(big, default_cost_model(big, Dims(11, 1)), OrderMethod::GreedyLocal));
}

TEST(Ordering, MethodNames) {
  EXPECT_EQ(order_method_from_string("brute"), OrderMethod::Brute);
  EXPECT_EQ(order_method_from_string(to_string(OrderMethod::GreedyLocal)), OrderMethod::GreedyLocal);
  EXPECT_THROW(order_method_from_string("annealing"), Error);
}
