#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "netlmi/synthesis.hpp"

namespace testutil {

using netlmi::BlockMatrix;
using netlmi::Dims;
using netlmi::Mat;

inline Mat randn(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

inline Mat random_pd(std::mt19937_64& rng, int n, double shift = 0.5) {
  Mat a = randn(rng, n, n);
  return a * a.transpose() + shift * Mat::Identity(n, n);
}

inline Dims random_dims(std::mt19937_64& rng, int n, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  Dims d(n);
  for (int& v : d) v = u(rng);
  return d;
}

// Random symmetric block matrix whose smallest eigenvalue is at least `gap` away from zero.
inline BlockMatrix random_symmetric(std::mt19937_64& rng, const Dims& dims, double gap = 1e-6) {
  const int n = netlmi::dims_sum(dims);
  Mat g = randn(rng, n, n);
  Mat w = 0.5 * (g + g.transpose());
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  w.diagonal().array() += u(rng) * std::sqrt(static_cast<double>(n));
  while (std::abs(netlmi::min_eig(w)) < gap) w.diagonal().array() += 10 * gap;
  return BlockMatrix(dims, dims, w);
}

inline BlockMatrix random_pd_block(std::mt19937_64& rng, const Dims& dims, double shift = 0.5) {
  const int n = netlmi::dims_sum(dims);
  return BlockMatrix(dims, dims, random_pd(rng, n, shift));
}

// Symmetric positive definite network matrix on `topo`: diagonally dominant with coupled off-diagonal blocks.
inline BlockMatrix random_pd_network(std::mt19937_64& rng, const netlmi::Topology& topo, const Dims& dims) {
  BlockMatrix w(dims, dims);
  const int N = topo.size();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < i; ++j)
      if (topo.coupled(i, j)) {
        Mat b = randn(rng, dims[i], dims[j]);
        w.set_block(i, j, b);
        w.set_block(j, i, b.transpose());
      }
  Mat& d = w.dense();
  for (int r = 0; r < d.rows(); ++r) d(r, r) = d.row(r).cwiseAbs().sum() + 0.5 + std::abs(randn(rng, 1, 1)(0));
  return w;
}

// Makes A contractive (P = I certifies stability), so block-diagonal certificates exist.
inline void stabilize(netlmi::NetworkedSystem& s, double margin = 0.5) {
  Mat& a = s.A.dense();
  if (s.domain == netlmi::Domain::CT) {
    const double mu = -netlmi::min_eig(-0.5 * (a + a.transpose()));
    a -= (std::max(mu, 0.0) + margin) * Mat::Identity(a.rows(), a.cols());
  } else {
    const double norm = a.operatorNorm();
    a *= (1.0 - 0.5 * margin) / std::max(norm, 1e-12);
  }
}

inline std::optional<netlmi::QsrSpec> l2_spec(const Dims& out, const Dims& in, double gamma) {
  netlmi::QsrSpec s{BlockMatrix::identity(out), BlockMatrix(out, in), BlockMatrix::identity(in)};
  s.Q.dense() *= -1.0 / gamma;
  s.R.dense() *= gamma;
  return s;
}

inline netlmi::NetworkedSystem random_system(std::uint64_t seed, int n, netlmi::Domain dom, int max_state = 3) {
  std::mt19937_64 rng(seed * 7919 + 13);
  netlmi::RandomNetworkOptions o;
  o.n = n;
  o.seed = seed;
  o.domain = dom;
  o.state_dims = random_dims(rng, n, 1, max_state);
  o.input_dims = o.noise_dims = o.output_dims = o.perf_dims = Dims(n, 1);
  return netlmi::random_network(o);
}

}  // namespace testutil
