#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <random>

#include "netlmi/lmikit.hpp"

using namespace netlmi;

namespace {

Mat randn(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> nd;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

Mat random_pd(std::mt19937_64& rng, int n, double shift = 0.5) {
  Mat a = randn(rng, n, n);
  return a * a.transpose() + shift * Mat::Identity(n, n);
}

Mat stable_ct(std::mt19937_64& rng, int n) {
  Mat a = randn(rng, n, n);
  const double s = Eigen::EigenSolver<Mat>(a, false).eigenvalues().real().maxCoeff();
  return a - (s + 0.3) * Mat::Identity(n, n);
}

Mat stable_dt(std::mt19937_64& rng, int n) {
  Mat a = randn(rng, n, n);
  double r = 0;
  Eigen::EigenSolver<Mat> es(a, false);
  for (int i = 0; i < n; ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
  return a * (0.85 / r);
}

// vec-Kronecker Lyapunov oracle
Mat kron_lyap(Domain d, const Mat& a, const Mat& q) {
  const int n = static_cast<int>(a.rows());
  Mat k(n * n, n * n);
  for (int p = 0; p < n; ++p)
    for (int q2 = 0; q2 < n; ++q2) {
      Mat e = Mat::Zero(n, n);
      e(p, q2) = 1.0;
      Mat img = d == Domain::CT ? Mat(a.transpose() * e + e * a) : Mat(a.transpose() * e * a - e);
      k.col(p + n * q2) = Eigen::Map<Vec>(img.data(), n * n);
    }
  Vec rhs = -Eigen::Map<const Vec>(q.data(), n * n);
  Vec x = k.fullPivLu().solve(rhs);
  return Eigen::Map<Mat>(x.data(), n, n);
}

double sweep_hinf(Domain d, const Mat& a, const Mat& b, const Mat& c, const Mat& dm) {
  const int n = static_cast<int>(a.rows());
  double best = 0;
  for (int k = 0; k <= 20000; ++k) {
    std::complex<double> z;
    if (d == Domain::CT)
      z = std::complex<double>(0, std::pow(10.0, -3.0 + 6.0 * k / 20000.0));
    else
      z = std::polar(1.0, M_PI * k / 20000.0);
    Eigen::MatrixXcd m = z * Eigen::MatrixXcd::Identity(n, n) - a.cast<std::complex<double>>();
    Eigen::MatrixXcd g = c.cast<std::complex<double>>() * m.inverse() * b.cast<std::complex<double>>() +
                         dm.cast<std::complex<double>>();
    best = std::max(best, Eigen::JacobiSVD<Eigen::MatrixXcd>(g).singularValues()(0));
  }
  return best;
}

}  // namespace

TEST(Schur, ScalarExamples) {
  Mat w(2, 2);
  w << 1, 1, 1, 2;
  auto r = schur_reduce(w, 1, Pivot::Theta);
  EXPECT_NEAR(r.complement(0, 0), 1.0, 1e-15);
  EXPECT_TRUE(r.pd());
  w(1, 1) = 1;
  r = schur_reduce(w, 1, Pivot::Theta);
  EXPECT_NEAR(r.complement(0, 0), 0.0, 1e-15);
  EXPECT_FALSE(r.pd());
}

TEST(Schur, SingularPivotThrows) {
  Mat w = Mat::Zero(2, 2);
  EXPECT_THROW(schur_reduce(w, 1, Pivot::Theta), Error);
}

TEST(Schur, BothPivotsAgreeWithEigenvalues) {
  std::mt19937_64 rng(3);
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 5, k = 1 + t % (n - 1);
    Mat a = randn(rng, n, n);
    Mat w = a + a.transpose() + 1.5 * Mat::Identity(n, n);
    const double e = min_eig(w);
    if (std::abs(e) < 1e-6) continue;
    const bool oracle = e > 0;
    auto r1 = schur_reduce(w, k, Pivot::Theta);
    auto r2 = schur_reduce(w, k, Pivot::Gamma);
    agree += (r1.pd() == oracle) && (r2.pd() == oracle);
    EXPECT_EQ(r1.pd(), oracle);
    EXPECT_EQ(r2.pd(), oracle);
  }
  EXPECT_GT(agree, 150);
}

TEST(Congruence, PreservesDefiniteness) {
  std::mt19937_64 rng(5);
  Mat w = random_pd(rng, 4);
  EXPECT_LT((congruence(w, Mat::Identity(4, 4)) - w).norm(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Mat> e1(w), e2(congruence(w, 2 * Mat::Identity(4, 4)));
  EXPECT_LT((4 * e1.eigenvalues() - e2.eigenvalues()).norm(), 1e-10);
  for (int t = 0; t < 50; ++t) EXPECT_GT(min_eig(congruence(w, randn(rng, 4, 4))), 0);
  Mat p = Mat::Identity(4, 4);
  p(3, 3) = 0;
  EXPECT_THROW(congruence(w, p), Error);
}

TEST(LocalSchur, ScalarChain) {
  // prior W~_11 = 2, W_21 = 1, W_22 = p: feasible iff p > 1/2
  VarSpace vs;
  int p = vs.add_scalar("p");
  auto c = local_schur_constraint(AffineExpr::variable(vs, p), AffineExpr::identity(1), Mat::Constant(1, 1, 2.0));
  for (double v : {0.4, 0.49, 0.51, 0.8}) {
    vs.set_value(p, Mat::Constant(1, 1, v));
    EXPECT_EQ(min_eig(c.eval(vs)) > 0, v > 0.5);
  }
}

TEST(LocalSchur, NoPriorsDegenerates) {
  VarSpace vs;
  int p = vs.add_symmetric("P", 2);
  auto c = local_schur_constraint(AffineExpr::variable(vs, p), AffineExpr::zero(2, 0), Mat(0, 0));
  EXPECT_EQ(c.size(), 2);
}

TEST(LocalSchur, RejectsIndefinitePriors) {
  VarSpace vs;
  int p = vs.add_scalar("p");
  EXPECT_THROW(local_schur_constraint(AffineExpr::variable(vs, p), AffineExpr::identity(1), Mat::Identity(1, 1),
                                      std::vector<Mat>{Mat::Constant(1, 1, -1.0)}),
               Error);
}

TEST(Cov, Examples) {
  auto f = cov_recover(Mat::Zero(2, 2), Mat::Zero(2, 2));
  EXPECT_LT((f.M * f.N.transpose() - Mat::Identity(2, 2)).norm(), 1e-15);
  f = cov_recover(Mat::Constant(1, 1, 2.0), Mat::Constant(1, 1, 1.0));
  EXPECT_NEAR(2.0 + (f.M * f.N.transpose())(0, 0), 1.0, 1e-15);
  EXPECT_THROW(cov_recover(Mat::Identity(2, 2), Mat::Identity(2, 2)), Error);
}

TEST(Cov, RecoverResidual) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 5;
    Mat x = random_pd(rng, n), y = random_pd(rng, n);
    auto f = cov_recover(x, y);
    EXPECT_LE(inf_norm(x * y + f.M * f.N.transpose() - Mat::Identity(n, n)), 1e-10);
  }
}

TEST(Cov, ZeroSystemPassesThrough) {
  std::mt19937_64 rng(2);
  DofPlant p{Mat::Zero(2, 2), Mat::Zero(2, 1), Mat::Zero(1, 2), Mat::Zero(2, 1),
             Mat::Zero(1, 1), Mat::Zero(1, 2), Mat::Zero(1, 1), Mat::Zero(1, 1)};
  AuxParams a{randn(rng, 2, 2), randn(rng, 2, 1), randn(rng, 1, 2), randn(rng, 1, 1)};
  auto d = dof_from_aux(a, Mat::Zero(2, 2), Mat::Zero(2, 2), Mat::Identity(2, 2), Mat::Identity(2, 2), p);
  EXPECT_LT((d.Ac - a.An).norm(), 1e-14);
  EXPECT_LT((d.Bc - a.Bn).norm(), 1e-14);
  EXPECT_LT((d.Cc - a.Cn).norm(), 1e-14);
  EXPECT_LT((d.Dc - a.Dn).norm(), 1e-14);
}

TEST(Cov, RoundTrip) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 4, m = 1 + t % 2, p = 1 + (t / 2) % 2;
    DofPlant pl{randn(rng, n, n), randn(rng, n, m), randn(rng, p, n), randn(rng, n, 1),
                randn(rng, p, 1), randn(rng, 1, n), randn(rng, 1, m), randn(rng, 1, 1)};
    Mat x = random_pd(rng, n), y = random_pd(rng, n);
    auto f = cov_recover(x, y);
    AuxParams a{randn(rng, n, n), randn(rng, n, p), randn(rng, m, n), randn(rng, m, p)};
    auto d = dof_from_aux(a, x, y, f.M, f.N, pl);
    auto b = aux_from_dof(d, x, y, f.M, f.N, pl);
    const double s = 1.0 + inf_norm(a.An);
    EXPECT_LE(inf_norm(b.An - a.An) / s, 1e-9);
    EXPECT_LE(inf_norm(b.Bn - a.Bn) / s, 1e-9);
    EXPECT_LE(inf_norm(b.Cn - a.Cn) / s, 1e-9);
    EXPECT_LE(inf_norm(b.Dn - a.Dn) / s, 1e-9);
  }
}

TEST(Norms, LyapunovMatchesKronecker) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 6;
    const Domain d = t % 2 ? Domain::DT : Domain::CT;
    Mat a = d == Domain::CT ? stable_ct(rng, n) : stable_dt(rng, n);
    Mat q = random_pd(rng, n);
    Mat p1 = lyapunov(d, a, q), p2 = kron_lyap(d, a, q);
    EXPECT_LT((p1 - p2).norm() / (1 + p2.norm()), 1e-8);
  }
}

TEST(Norms, FirstOrderAnalytic) {
  Mat a = Mat::Constant(1, 1, -1), b = Mat::Identity(1, 1), c = Mat::Identity(1, 1), d = Mat::Zero(1, 1);
  EXPECT_NEAR(hinf_norm(Domain::CT, a, b, c, d), 1.0, 1e-5);
  EXPECT_NEAR(h2_norm(Domain::CT, a, b, c, d), std::sqrt(0.5), 1e-12);
  Mat ad = Mat::Constant(1, 1, 0.5);
  EXPECT_NEAR(hinf_norm(Domain::DT, ad, b, c, d), 2.0, 1e-5);
  EXPECT_NEAR(h2_norm(Domain::DT, ad, b, c, d), std::sqrt(1.0 / 0.75), 1e-12);
}

TEST(Norms, HinfMatchesFrequencySweep) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 16; ++t) {
    const int n = 1 + t % 5;
    const Domain d = t % 2 ? Domain::DT : Domain::CT;
    Mat a = d == Domain::CT ? stable_ct(rng, n) : stable_dt(rng, n);
    Mat b = randn(rng, n, 2), c = randn(rng, 2, n), dm = 0.3 * randn(rng, 2, 2);
    const double h = hinf_norm(d, a, b, c, dm), s = sweep_hinf(d, a, b, c, dm);
    EXPECT_GE(h, s * (1 - 1e-6));
    EXPECT_LE(h, s * 1.01) << "trial " << t;
  }
}

TEST(Norms, DtH2MatchesImpulseSum) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 10; ++t) {
    const int n = 1 + t % 4;
    Mat a = stable_dt(rng, n), b = randn(rng, n, 2), c = randn(rng, 2, n), dm = randn(rng, 2, 2);
    double s = dm.squaredNorm();
    Mat ak = Mat::Identity(n, n);
    for (int k = 0; k < 5000; ++k) {
      s += (c * ak * b).squaredNorm();
      ak = ak * a;
    }
    EXPECT_NEAR(h2_norm(Domain::DT, a, b, c, dm), std::sqrt(s), 1e-8 * (1 + std::sqrt(s)));
  }
}
