#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "netlmi/common.hpp"

namespace netlmi {

struct NetworkedSystem;

// Subsystem indices are 0-based throughout the library.
class Topology {
 public:
  Topology() = default;
  explicit Topology(int n);
  Topology(int n, const std::vector<std::set<int>>& in_neighbors);

  int size() const { return n_; }
  void add_edge(int from, int to);  // x_from influences subsystem `to`: from in E_to

  const std::set<int>& in(int i) const { return in_[i]; }
  const std::set<int>& out(int i) const { return out_[i]; }
  std::set<int> combined(int i) const;
  std::set<int> in_closed(int i) const;
  std::set<int> combined_closed(int i) const;
  int min_combined_closed(int i) const;

  bool has_in(int i, int j) const { return in_[i].count(j) > 0; }
  bool has_out(int i, int j) const { return out_[i].count(j) > 0; }
  bool coupled(int i, int j) const { return i == j || has_in(i, j) || has_out(i, j); }

  bool operator==(const Topology& o) const { return n_ == o.n_ && in_ == o.in_; }

 private:
  int n_ = 0;
  std::vector<std::set<int>> in_, out_;
};

class IndexingScheme {
 public:
  IndexingScheme() = default;
  explicit IndexingScheme(std::vector<int> perm);
  static IndexingScheme identity(int n);

  int size() const { return static_cast<int>(perm_.size()); }
  int new_index(int original) const { return perm_[original]; }
  int original_at(int position) const { return inv_[position]; }
  const std::vector<int>& perm() const { return perm_; }
  // order()[k] = original subsystem placed at position k
  const std::vector<int>& order() const { return inv_; }
  static IndexingScheme from_order(const std::vector<int>& order);

  bool operator==(const IndexingScheme& o) const { return perm_ == o.perm_; }

 private:
  std::vector<int> perm_, inv_;
};

Topology derive_topology(const NetworkedSystem& sys);
Topology permute_topology(const Topology& topo, const IndexingScheme& scheme);
NetworkedSystem reindex(const NetworkedSystem& sys, const IndexingScheme& scheme);

struct RandomNetworkOptions {
  int n = 1;
  Dims state_dims, input_dims, noise_dims, output_dims, perf_dims;
  double radius = 0.5;
  double p_bidir = 0.5;
  Domain domain = Domain::CT;
  double coupling_scale = 0.1;
  std::uint64_t seed = 1;
};

NetworkedSystem random_network(const RandomNetworkOptions& opt);
Topology random_geometric_topology(int n, double radius, double p_bidir, std::uint64_t seed);

}  // namespace netlmi
