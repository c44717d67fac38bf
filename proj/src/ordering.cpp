#include "netlmi/ordering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace netlmi {

void CostModel::set_gamma(int i, int j, int k, double v) {
  if (j == k)
    gamma_self(i, j) = v;
  else
    cross[(static_cast<size_t>(i) * n + j) * n + k] = v;
}

void CostModel::validate() const {
  const auto sq = [&](const Mat& m) { return m.rows() == n && m.cols() == n; };
  if (!sq(alpha) || !sq(beta) || !sq(gamma_self) || cross.size() != static_cast<size_t>(n) * n * n)
    throw Error("cost model: dimensions do not match the subsystem count");
  const bool neg = (alpha.array() < 0).any() || (beta.array() < 0).any() || (gamma_self.array() < 0).any() ||
                   std::any_of(cross.begin(), cross.end(), [](double v) { return v < 0; });
  if (neg) throw Error("cost model: costs must be nonnegative");
}

namespace {

CostModel base_model(const Topology& topo, const Dims& nd) {
  const int n = topo.size();
  if (static_cast<int>(nd.size()) != n) throw Error("cost model: state dimension count mismatch");
  CostModel m;
  m.n = n;
  m.alpha = Mat::Zero(n, n);
  m.beta = Mat::Zero(n, n);
  m.gamma_self = Mat::Zero(n, n);
  m.cross.assign(static_cast<size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      m.alpha(i, j) = topo.has_in(i, j) ? 0.0 : 1.0;
      m.beta(i, j) = 2.0 * nd[j] * nd[j];
      m.gamma_self(i, j) = static_cast<double>(nd[j]) * nd[j];
    }
  return m;
}

// Cost of an ordering of a subset of subsystems; positions and neighbor sets are induced on the subset.
double order_cost(const Topology& topo, const std::vector<int>& order, const CostModel& model) {
  const int len = static_cast<int>(order.size());
  std::vector<int> pos(topo.size(), -1);
  for (int a = 0; a < len; ++a) pos[order[a]] = a;
  std::vector<int> min_c(len);
  for (int a = 0; a < len; ++a) {
    int mc = a;
    for (int o : topo.combined(order[a]))
      if (pos[o] >= 0) mc = std::min(mc, pos[o]);
    min_c[a] = mc;
  }
  double j_cost = 0.0;
  for (int a = 1; a < len; ++a) {
    const int i = order[a];
    for (int b = 0; b < a; ++b) {
      const int j = order[b];
      const double al = model.alpha(i, j);
      if (al == 0.0) continue;
      const int l = std::max(min_c[a], min_c[b]);
      if (l > b && !model.charge_skipped_pairs) continue;
      double term = (topo.has_out(i, j) ? model.beta(i, j) : 0.0) + model.gamma_self(i, j);
      for (int c = l; c < b; ++c) term += model.gamma(i, j, order[c]);
      j_cost += al * term;
    }
  }
  return j_cost;
}

struct Best {
  std::vector<int> order;
  double cost = std::numeric_limits<double>::infinity();

  bool offer(const std::vector<int>& o, double c) {
    if (c < cost || (c == cost && o < order)) {
      order = o;
      cost = c;
      return true;
    }
    return false;
  }
};

std::vector<int> insertion_greedy(const Topology& topo, const CostModel& model, const std::vector<int>& seq,
                                  long long& evals) {
  std::vector<int> cur;
  for (int e : seq) {
    Best b;
    for (size_t at = 0; at <= cur.size(); ++at) {
      std::vector<int> cand = cur;
      cand.insert(cand.begin() + static_cast<long>(at), e);
      b.offer(cand, order_cost(topo, cand, model));
      ++evals;
    }
    cur = b.order;
  }
  return cur;
}

// Best-improvement descent over adjacent swaps and single-element relocations; returns the final cost.
double local_search(const Topology& topo, const CostModel& model, std::vector<int>& cur, long long budget,
                    long long& evals) {
  const int n = static_cast<int>(cur.size());
  double cur_cost = order_cost(topo, cur, model);
  ++evals;
  while (true) {
    Best b;
    b.order = cur;
    b.cost = cur_cost;
    bool improved = false;
    auto consider = [&](const std::vector<int>& cand) {
      if (budget > 0 && evals >= budget) return;
      const double c = order_cost(topo, cand, model);
      ++evals;
      if (c < cur_cost && b.offer(cand, c)) improved = true;
    };
    for (int a = 0; a + 1 < n; ++a) {
      std::vector<int> cand = cur;
      std::swap(cand[a], cand[a + 1]);
      consider(cand);
    }
    for (int from = 0; from < n; ++from)
      for (int to = 0; to < n; ++to) {
        if (to == from || to == from + 1 || to + 1 == from) continue;  // adjacent moves are swaps
        std::vector<int> cand = cur;
        const int v = cand[from];
        cand.erase(cand.begin() + from);
        cand.insert(cand.begin() + to, v);
        consider(cand);
      }
    if (!improved) return cur_cost;
    cur = b.order;
    cur_cost = b.cost;
  }
}

}  // namespace

CostModel default_cost_model(const Topology& topo, const Dims& nd) {
  CostModel m = base_model(topo, nd);
  const int n = m.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (i != j && k != j) m.set_gamma(i, j, k, static_cast<double>(nd[j]) * nd[k]);
  return m;
}

CostModel linear_cost_model(const Topology& topo, const Dims& nd) { return base_model(topo, nd); }

double comm_cost(const Topology& topo, const IndexingScheme& scheme, const CostModel& model) {
  if (scheme.size() != topo.size() || model.n != topo.size())
    throw Error("comm_cost: scheme, model and topology sizes differ");
  return order_cost(topo, scheme.order(), model);
}

Mat pairwise_cost_matrix(const Topology& topo, const CostModel& model) {
  const int n = topo.size();
  if (model.n != n) throw Error("pairwise_cost_matrix: model size mismatch");
  if (std::any_of(model.cross.begin(), model.cross.end(), [](double v) { return v != 0.0; }))
    throw Error("pairwise_cost_matrix: cross tilde-block costs make the cost order dependent");
  Mat g = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!model.charge_skipped_pairs && !topo.coupled(i, j))
        throw Error("pairwise_cost_matrix: skipped-pair pricing depends on the order");
      g(i, j) = model.alpha(i, j) * ((topo.has_out(i, j) ? model.beta(i, j) : 0.0) + model.gamma_self(i, j));
    }
  return g;
}

double linear_ordering_cost(const Mat& g, const IndexingScheme& scheme) {
  const auto& o = scheme.order();
  double s = 0.0;
  for (int a = 0; a < scheme.size(); ++a)
    for (int b = 0; b < a; ++b) s += g(o[a], o[b]);
  return s;
}

std::string to_string(OrderMethod m) { return m == OrderMethod::Brute ? "brute" : "greedy_local"; }

OrderMethod order_method_from_string(const std::string& s) {
  if (s == "brute") return OrderMethod::Brute;
  if (s == "greedy_local" || s == "greedy") return OrderMethod::GreedyLocal;
  throw Error("unknown ordering method: " + s);
}

OrderingResult optimize_indexing(const Topology& topo, const CostModel& model, OrderMethod method, long long budget) {
  const int n = topo.size();
  if (model.n != n) throw Error("optimize_indexing: model size mismatch");
  OrderingResult res;
  res.method = method;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  if (method == OrderMethod::Brute) {
    if (n > 10) throw Error("optimize_indexing: brute force supports at most 10 subsystems");
    long long total = 1;
    for (int k = 2; k <= n; ++k) total *= k;
    if (budget > 0 && total > budget)
      throw Error("optimize_indexing: brute force needs " + std::to_string(total) + " evaluations, over budget");
    Best best;
    std::vector<int> worst_order = order;
    double worst = -std::numeric_limits<double>::infinity();
    do {
      const double c = order_cost(topo, order, model);
      ++res.evaluations;
      best.offer(order, c);
      if (c > worst) {
        worst = c;
        worst_order = order;
      }
    } while (std::next_permutation(order.begin(), order.end()));
    res.best = IndexingScheme::from_order(best.order);
    res.best_cost = best.cost;
    res.worst = IndexingScheme::from_order(worst_order);
    res.worst_cost = n == 0 ? 0.0 : worst;
    return res;
  }

  // insertion greedy from several insertion sequences, each refined by local search
  auto by_degree = [&](bool desc) {
    std::vector<int> seq = order;
    std::stable_sort(seq.begin(), seq.end(), [&](int a, int b) {
      const size_t da = topo.combined(a).size(), db = topo.combined(b).size();
      return desc ? da > db : da < db;
    });
    return seq;
  };
  std::vector<int> reversed(order.rbegin(), order.rend());
  Best overall;
  for (const auto& seq : {by_degree(true), order, by_degree(false), reversed}) {
    std::vector<int> cur = insertion_greedy(topo, model, seq, res.evaluations);
    const double c = local_search(topo, model, cur, budget, res.evaluations);
    overall.offer(cur, c);
  }
  res.best = IndexingScheme::from_order(overall.order);
  res.best_cost = overall.cost;
  res.worst = res.best;
  res.worst_cost = overall.cost;
  return res;
}

bool is_distributed(const Topology& topo, const IndexingScheme& scheme) {
  const auto& o = scheme.order();
  for (int a = 0; a < scheme.size(); ++a)
    for (int b = 0; b < a; ++b)
      if (!topo.has_in(o[a], o[b])) return false;
  return true;
}

double empirical_cost(const MessageLog& log, const CostModel& model) {
  double s = 0.0;
  for (const auto& m : log.entries) {
    const int i = m.receiver, j = m.sender;
    if (i < 0 || j < 0 || i >= model.n || j >= model.n) throw Error("empirical_cost: message outside the model");
    const double price = m.kind == Message::Kind::Raw ? model.beta(i, j) : model.gamma(i, j, m.b);
    s += model.alpha(i, j) * price;
  }
  return s;
}

}  // namespace netlmi
