#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netlmi/seqtest.hpp"
#include "netlmi/topology.hpp"

namespace netlmi {

// Transmission prices in original subsystem labels. i is the receiver, j < i (in the
// indexing being priced) the sender, k an earlier subsystem whose tilde block W~_jk is sent.
struct CostModel {
  int n = 0;
  Mat alpha;                  // alpha(i, j): unit cost of any transmission j -> i
  Mat beta;                   // beta(i, j): raw block W_ij request
  Mat gamma_self;             // gamma(i, j, j): tilde block W~_jj
  std::vector<double> cross;  // gamma(i, j, k), k != j, flattened as (i * n + j) * n + k
  // true: gamma_ijj is charged for every earlier j (the cost formula as written);
  // false: pairs whose whole exchange is redundant (W~_ij = 0) cost nothing, matching the protocol log.
  bool charge_skipped_pairs = true;

  double gamma(int i, int j, int k) const {
    return j == k ? gamma_self(i, j) : cross[(static_cast<size_t>(i) * n + j) * n + k];
  }
  void set_gamma(int i, int j, int k, double v);
  void validate() const;
};

// alpha_ij = 1{j not in E_i}, beta_ij = 2 n_j^2, gamma_ijj = n_j^2, gamma_ijk = n_j n_k.
CostModel default_cost_model(const Topology& topo, const Dims& state_dims);
// Same alpha, beta, gamma_ijj with gamma_ijk = 0 for k != j (satisfies the linear-ordering assumption).
CostModel linear_cost_model(const Topology& topo, const Dims& state_dims);

double comm_cost(const Topology& topo, const IndexingScheme& scheme, const CostModel& model);

// Pairwise cost matrix G (original labels) when no cross terms are priced; throws otherwise.
Mat pairwise_cost_matrix(const Topology& topo, const CostModel& model);
// Sum of G(order[a], order[b]) over positions b < a, i.e. the strictly triangular part of P G P^T.
double linear_ordering_cost(const Mat& g, const IndexingScheme& scheme);

enum class OrderMethod { Brute, GreedyLocal };
std::string to_string(OrderMethod m);
OrderMethod order_method_from_string(const std::string& s);

struct OrderingResult {
  IndexingScheme best;
  double best_cost = 0.0;
  double worst_cost = 0.0;  // brute only; equals best_cost for greedy_local
  IndexingScheme worst;
  OrderMethod method = OrderMethod::Brute;
  long long evaluations = 0;
};

// brute requires N <= 10 and N! <= budget (budget <= 0: no limit). Ties go to the
// lexicographically smallest order vector.
OrderingResult optimize_indexing(const Topology& topo, const CostModel& model, OrderMethod method,
                                 long long budget = 0);

// E_i contains every earlier subsystem, for all i, in the re-indexed topology.
bool is_distributed(const Topology& topo, const IndexingScheme& scheme);

// Prices a protocol log (labels as in the model) with skip_redundant on.
double empirical_cost(const MessageLog& log, const CostModel& model);

}  // namespace netlmi
