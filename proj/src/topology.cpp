#include "netlmi/topology.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "netlmi/system.hpp"

namespace netlmi {

Topology::Topology(int n) : n_(n), in_(n), out_(n) {}

Topology::Topology(int n, const std::vector<std::set<int>>& in_neighbors) : Topology(n) {
  if (static_cast<int>(in_neighbors.size()) != n) throw Error("Topology: neighbor table size mismatch");
  for (int i = 0; i < n; ++i)
    for (int j : in_neighbors[i]) add_edge(j, i);
}

void Topology::add_edge(int from, int to) {
  if (from < 0 || to < 0 || from >= n_ || to >= n_) throw Error("Topology: index out of range");
  if (from == to) return;
  in_[to].insert(from);
  out_[from].insert(to);
}

std::set<int> Topology::combined(int i) const {
  std::set<int> c = in_[i];
  c.insert(out_[i].begin(), out_[i].end());
  return c;
}

std::set<int> Topology::in_closed(int i) const {
  std::set<int> c = in_[i];
  c.insert(i);
  return c;
}

std::set<int> Topology::combined_closed(int i) const {
  std::set<int> c = combined(i);
  c.insert(i);
  return c;
}

int Topology::min_combined_closed(int i) const { return *combined_closed(i).begin(); }

IndexingScheme::IndexingScheme(std::vector<int> perm) : perm_(std::move(perm)), inv_(perm_.size(), -1) {
  const int n = static_cast<int>(perm_.size());
  for (int i = 0; i < n; ++i) {
    if (perm_[i] < 0 || perm_[i] >= n || inv_[perm_[i]] != -1) throw Error("IndexingScheme: not a permutation");
    inv_[perm_[i]] = i;
  }
}

IndexingScheme IndexingScheme::identity(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return IndexingScheme(p);
}

IndexingScheme IndexingScheme::from_order(const std::vector<int>& order) {
  std::vector<int> p(order.size(), -1);
  for (size_t k = 0; k < order.size(); ++k) {
    if (order[k] < 0 || order[k] >= static_cast<int>(order.size())) throw Error("IndexingScheme: bad order");
    p[order[k]] = static_cast<int>(k);
  }
  return IndexingScheme(p);
}

Topology derive_topology(const NetworkedSystem& sys) {
  sys.validate();
  const int N = sys.size();
  Topology t(N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      for (char c : {'A', 'B', 'C', 'D', 'E', 'F'}) {
        if (!is_zero_block(sys.param(c).block(i, j))) {
          t.add_edge(j, i);
          break;
        }
      }
    }
  return t;
}

Topology permute_topology(const Topology& topo, const IndexingScheme& scheme) {
  if (scheme.size() != topo.size()) throw Error("permute_topology: scheme size mismatch");
  Topology t(topo.size());
  for (int i = 0; i < topo.size(); ++i)
    for (int j : topo.in(i)) t.add_edge(scheme.new_index(j), scheme.new_index(i));
  return t;
}

NetworkedSystem reindex(const NetworkedSystem& sys, const IndexingScheme& scheme) {
  if (scheme.size() != sys.size()) throw Error("reindex: scheme size mismatch");
  NetworkedSystem r;
  r.domain = sys.domain;
  auto pd = [&](const Dims& d) {
    Dims o(d.size());
    for (size_t i = 0; i < d.size(); ++i) o[scheme.new_index(static_cast<int>(i))] = d[i];
    return o;
  };
  r.n = pd(sys.n);
  r.p = pd(sys.p);
  r.q = pd(sys.q);
  r.m = pd(sys.m);
  r.l = pd(sys.l);
  for (char c : kParamNames) r.param(c) = permute(sys.param(c), scheme.perm());
  r.validate();
  return r;
}

Topology random_geometric_topology(int n, double radius, double p_bidir, std::uint64_t seed) {
  if (n < 1) throw Error("random topology: N must be positive");
  if (!(radius > 0.0) || radius > std::sqrt(2.0) + 1e-15) throw Error("random topology: radius must lie in (0, sqrt(2)]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = U(rng);
    y[i] = U(rng);
  }
  Topology t(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = std::hypot(x[i] - x[j], y[i] - y[j]);
      const double u1 = U(rng), u2 = U(rng);
      if (d > radius) continue;
      if (u1 < p_bidir) {
        t.add_edge(i, j);
        t.add_edge(j, i);
      } else if (u2 < 0.5) {
        t.add_edge(i, j);
      } else {
        t.add_edge(j, i);
      }
    }
  return t;
}

namespace {

Mat random_self_dynamics(int n, Domain domain, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> Nd(0.0, 1.0);
  Mat lam = Mat::Zero(n, n);
  int k = 0;
  while (k < n) {
    const bool pair = (k + 1 < n) && U(rng) < 0.5;
    if (domain == Domain::CT) {
      const double re = -3.0 + 6.0 * U(rng);
      if (pair) {
        const double im = 0.2 + 2.8 * U(rng);
        lam(k, k) = re;
        lam(k + 1, k + 1) = re;
        lam(k, k + 1) = im;
        lam(k + 1, k) = -im;
      } else {
        lam(k, k) = re;
      }
    } else {
      const double r = 0.2 + 1.1 * U(rng);
      if (pair) {
        const double th = 0.1 + 3.0 * U(rng);
        lam(k, k) = r * std::cos(th);
        lam(k + 1, k + 1) = r * std::cos(th);
        lam(k, k + 1) = r * std::sin(th);
        lam(k + 1, k) = -r * std::sin(th);
      } else {
        lam(k, k) = (U(rng) < 0.5 ? -1.0 : 1.0) * r;
      }
    }
    k += pair ? 2 : 1;
  }
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = Nd(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat Q = qr.householderQ();
  return Q * lam * Q.transpose();
}

Mat randn(int r, int c, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> Nd(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * Nd(rng);
  return m;
}

}  // namespace

NetworkedSystem random_network(const RandomNetworkOptions& opt) {
  const int N = opt.n;
  auto fill = [N](const Dims& d, int def) { return d.empty() ? Dims(N, def) : d; };
  Dims n = fill(opt.state_dims, 2), p = fill(opt.input_dims, 1), q = fill(opt.noise_dims, 1),
       m = fill(opt.output_dims, 1), l = fill(opt.perf_dims, 1);
  Topology topo = random_geometric_topology(N, opt.radius, opt.p_bidir, opt.seed);
  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  NetworkedSystem s = NetworkedSystem::zeros(opt.domain, n, p, q, m, l);
  for (int i = 0; i < N; ++i) {
    s.A.set_block(i, i, random_self_dynamics(n[i], opt.domain, rng));
    s.B.set_block(i, i, randn(n[i], p[i], 1.0, rng));
    s.C.set_block(i, i, randn(m[i], n[i], 1.0, rng));
    s.E.set_block(i, i, randn(n[i], q[i], 0.1, rng));
    s.G.set_block(i, i, randn(l[i], n[i], 1.0, rng));
    s.H.set_block(i, i, randn(l[i], p[i], 1.0, rng));
    for (int j : topo.in(i)) {
      s.A.set_block(i, j, randn(n[i], n[j], opt.coupling_scale, rng));
      s.E.set_block(i, j, randn(n[i], q[j], 0.1 * opt.coupling_scale, rng));
    }
  }
  return s;
}

}  // namespace netlmi
