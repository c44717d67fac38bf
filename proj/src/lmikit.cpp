#include "netlmi/lmikit.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <limits>

namespace netlmi {

namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

bool pd_llt(const Mat& m, double tol) {
  if (m.rows() == 0) return true;
  return min_eig(m) > tol;
}

double max_sv(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

double condition(const Mat& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

Mat checked_inverse(const Mat& m, const char* what, double cond_max) {
  if (m.rows() != m.cols()) throw Error(std::string(what) + " is not square");
  if (condition(m) > cond_max) throw Error(std::string(what) + " is singular or ill-conditioned");
  return m.fullPivLu().inverse();
}

}  // namespace

SchurResult schur_reduce(const Mat& w, int k, Pivot pivot, double tol) {
  const int n = static_cast<int>(w.rows());
  if (w.cols() != n || k < 0 || k > n) throw Error("schur_reduce: bad partition");
  Mat sym = 0.5 * (w + w.transpose());
  Mat theta = sym.topLeftCorner(k, k), gamma = sym.bottomRightCorner(n - k, n - k);
  Mat phi = sym.topRightCorner(k, n - k);
  SchurResult r;
  const Mat& piv = pivot == Pivot::Theta ? theta : gamma;
  Eigen::FullPivLU<Mat> lu(piv);
  if (piv.rows() > 0 && !lu.isInvertible()) throw Error("schur_reduce: singular pivot");
  r.pivot_pd = pd_llt(piv, tol);
  if (pivot == Pivot::Theta)
    r.complement = gamma - phi.transpose() * lu.solve(phi);
  else
    r.complement = theta - phi * lu.solve(Mat(phi.transpose()));
  r.complement = 0.5 * (r.complement + r.complement.transpose());
  r.complement_pd = pd_llt(r.complement, tol);
  return r;
}

SymLmi schur_constant_pivot(const Mat& theta, const AffineExpr& phi, const AffineExpr& gamma, std::string name) {
  if (theta.rows() > 0 && min_eig(theta) <= 0) throw Error("schur_constant_pivot: pivot is not positive definite");
  SymLmi s(Dims{static_cast<int>(theta.rows()), gamma.rows()}, std::move(name));
  s.set(0, 0, AffineExpr::constant(theta));
  s.set(0, 1, phi);
  s.set(1, 1, gamma);
  return s;
}

Mat congruence(const Mat& w, const Mat& p, double cond_max) {
  if (p.rows() != w.rows()) throw Error("congruence: dimension mismatch");
  if (p.rows() != p.cols() || condition(p) > cond_max) throw Error("congruence: transformation is rank deficient");
  return p.transpose() * w * p;
}

SymLmi local_schur_constraint(const AffineExpr& w_ii, const AffineExpr& w_i, const Mat& ada, std::string name) {
  if (ada.rows() == 0) return SymLmi::single(w_ii, std::move(name));
  if (w_i.cols() != ada.rows()) throw Error("local_schur_constraint: dimension mismatch");
  SymLmi s(Dims{w_ii.rows(), static_cast<int>(ada.rows())}, std::move(name));
  s.set(0, 0, w_ii);
  s.set(0, 1, w_i);
  s.set(1, 1, AffineExpr::constant(ada));
  return s;
}

SymLmi local_schur_constraint(const AffineExpr& w_ii, const AffineExpr& w_i, const Mat& a,
                              const std::vector<Mat>& d_blocks, std::string name) {
  int n = 0;
  for (const auto& d : d_blocks) {
    if (d.rows() > 0 && min_eig(d) <= 0) throw Error("local_schur_constraint: prior diagonal factor is not positive definite");
    n += static_cast<int>(d.rows());
  }
  Mat dm = Mat::Zero(n, n);
  for (int o = 0, k = 0; k < static_cast<int>(d_blocks.size()); ++k) {
    dm.block(o, o, d_blocks[k].rows(), d_blocks[k].rows()) = d_blocks[k];
    o += static_cast<int>(d_blocks[k].rows());
  }
  return local_schur_constraint(w_ii, w_i, Mat(a * dm * a.transpose()), std::move(name));
}

CovFactors cov_recover(const Mat& x, const Mat& y, double cond_max) {
  const int n = static_cast<int>(x.rows());
  Mat t = Mat::Identity(n, n) - x * y;
  if (condition(t) > cond_max)
    throw Error("cov_recover: I - XY is singular; perturb the X, Y solution by a small epsilon");
  Eigen::PartialPivLU<Mat> lu(t);
  Mat l = Mat::Identity(n, n);
  l.triangularView<Eigen::StrictlyLower>() = lu.matrixLU();
  Mat u = lu.matrixLU().triangularView<Eigen::Upper>();
  CovFactors f;
  f.M = lu.permutationP().transpose() * l;
  f.N = u.transpose();
  return f;
}

DofParams dof_from_aux(const AuxParams& aux, const Mat& x, const Mat& y, const Mat& m, const Mat& n,
                       const DofPlant& p) {
  const Mat mi = checked_inverse(m, "M", kCondWarn);
  const Mat nit = checked_inverse(Mat(n.transpose()), "N", kCondWarn);
  DofParams d;
  d.Dc = aux.Dn;
  d.Cc = (aux.Cn - aux.Dn * p.C * y) * nit;
  d.Bc = mi * (aux.Bn - x * p.B * aux.Dn);
  d.Ac = mi * (aux.An - aux.Bn * p.C * y - x * p.B * aux.Cn - x * (p.A - p.B * aux.Dn * p.C) * y) * nit;
  return d;
}

AuxParams aux_from_dof(const DofParams& d, const Mat& x, const Mat& y, const Mat& m, const Mat& n,
                       const DofPlant& p) {
  AuxParams a;
  a.Dn = d.Dc;
  a.Cn = d.Dc * p.C * y + d.Cc * n.transpose();
  a.Bn = x * p.B * d.Dc + m * d.Bc;
  a.An = m * d.Ac * n.transpose() + m * d.Bc * p.C * y + x * p.B * d.Cc * n.transpose() +
         x * (p.A + p.B * d.Dc * p.C) * y;
  return a;
}

ClosedLoop dof_closed_loop(const DofPlant& p, const DofParams& d) {
  const int n = static_cast<int>(p.A.rows()), nc = static_cast<int>(d.Ac.rows());
  ClosedLoop cl;
  cl.A.resize(n + nc, n + nc);
  cl.A << p.A + p.B * d.Dc * p.C, p.B * d.Cc, d.Bc * p.C, d.Ac;
  cl.B.resize(n + nc, p.E.cols());
  cl.B << p.E + p.B * d.Dc * p.F, d.Bc * p.F;
  cl.C.resize(p.G.rows(), n + nc);
  cl.C << p.G + p.H * d.Dc * p.C, p.H * d.Cc;
  cl.D = p.J + p.H * d.Dc * p.F;
  return cl;
}

double spectral_abscissa(Domain d, const Mat& a) {
  if (a.rows() == 0) return d == Domain::CT ? -std::numeric_limits<double>::infinity() : 0.0;
  Eigen::EigenSolver<Mat> es(a, false);
  const auto& ev = es.eigenvalues();
  double r = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < ev.size(); ++i) r = std::max(r, d == Domain::CT ? ev(i).real() : std::abs(ev(i)));
  return r;
}

bool is_stable(Domain d, const Mat& a, double margin) {
  const double s = spectral_abscissa(d, a);
  return d == Domain::CT ? s < -margin : s < 1.0 - margin;
}

Mat lyapunov(Domain d, const Mat& a, const Mat& q) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Mat(0, 0);
  Eigen::ComplexSchur<Mat> cs(a);
  const CMat& t = cs.matrixT();
  const CMat& u = cs.matrixU();
  CMat c = -(u.adjoint() * q.cast<std::complex<double>>() * u);
  CMat th = t.adjoint();
  CMat xs = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    CVec rhs = c.col(j);
    CVec acc = CVec::Zero(n);
    for (int k = 0; k < j; ++k) acc += xs.col(k) * t(k, j);
    CMat lhs;
    if (d == Domain::CT) {
      rhs -= acc;
      lhs = th + t(j, j) * CMat::Identity(n, n);
    } else {
      rhs -= th * acc;
      lhs = t(j, j) * th - CMat::Identity(n, n);
    }
    xs.col(j) = lhs.triangularView<Eigen::Lower>().solve(rhs);
  }
  Mat p = (u * xs * u.adjoint()).real();
  return 0.5 * (p + p.transpose());
}

double h2_norm(Domain d, const Mat& a, const Mat& b, const Mat& c, const Mat& dm) {
  if (!is_stable(d, a)) return std::numeric_limits<double>::infinity();
  if (d == Domain::CT && !is_zero_block(dm, 0.0)) return std::numeric_limits<double>::infinity();
  Mat wo = lyapunov(d, a, Mat(c.transpose() * c));
  double v = (b.transpose() * wo * b).trace();
  if (d == Domain::DT) v += (dm.transpose() * dm).trace();
  return std::sqrt(std::max(0.0, v));
}

namespace {

// sigma_max of C (jw I - A)^-1 B + D
double gain_at(const Mat& a, const Mat& b, const Mat& c, const Mat& d, double w) {
  const int n = static_cast<int>(a.rows());
  CMat m = std::complex<double>(0, w) * CMat::Identity(n, n) - a.cast<std::complex<double>>();
  CMat g = c.cast<std::complex<double>>() * m.partialPivLu().solve(b.cast<std::complex<double>>()) +
           d.cast<std::complex<double>>();
  if (g.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMat>(g).singularValues()(0);
}

// true if the Hamiltonian for level g has an eigenvalue on the imaginary axis
bool imaginary_eig(const Mat& a, const Mat& b, const Mat& c, const Mat& d, double g, std::vector<double>* freqs) {
  const int n = static_cast<int>(a.rows());
  const int mi = static_cast<int>(b.cols()), po = static_cast<int>(c.rows());
  Mat r = g * g * Mat::Identity(mi, mi) - d.transpose() * d;
  Mat ri = r.inverse();
  Mat ah = a + b * ri * d.transpose() * c;
  Mat h(2 * n, 2 * n);
  h << ah, b * ri * b.transpose(), -c.transpose() * (Mat::Identity(po, po) + d * ri * d.transpose()) * c,
      -ah.transpose();
  Eigen::EigenSolver<Mat> es(h, false);
  const auto& ev = es.eigenvalues();
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  bool found = false;
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i).real()) < 1e-8 * scale) {
      found = true;
      if (freqs) freqs->push_back(std::abs(ev(i).imag()));
    }
  return found;
}

double hinf_ct(const Mat& a, const Mat& b, const Mat& c, const Mat& d, double rel_tol) {
  const int n = static_cast<int>(a.rows());
  double lo = d.size() ? max_sv(d) : 0.0;
  if (n == 0 || b.cols() == 0 || c.rows() == 0) return lo;
  lo = std::max(lo, gain_at(a, b, c, d, 0.0));
  Eigen::EigenSolver<Mat> es(a, false);
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    lo = std::max(lo, gain_at(a, b, c, d, std::abs(es.eigenvalues()(i).imag())));
  for (int k = -4; k <= 4; ++k) lo = std::max(lo, gain_at(a, b, c, d, std::pow(10.0, k)));
  if (lo <= 0) return 0.0;
  // Bruinsma-Steinbuch style iteration
  for (int it = 0; it < 100; ++it) {
    const double g = (1.0 + 2.0 * rel_tol) * lo;
    std::vector<double> w;
    if (!imaginary_eig(a, b, c, d, g, &w)) return 0.5 * (lo + g);
    std::sort(w.begin(), w.end());
    double best = lo;
    for (size_t i = 0; i + 1 < w.size(); ++i) best = std::max(best, gain_at(a, b, c, d, 0.5 * (w[i] + w[i + 1])));
    for (double wi : w) best = std::max(best, gain_at(a, b, c, d, wi));
    if (best <= lo * (1.0 + 1e-12)) return g;
    lo = best;
  }
  return lo;
}

}  // namespace

double hinf_norm(Domain dom, const Mat& a, const Mat& b, const Mat& c, const Mat& d, double rel_tol) {
  if (!is_stable(dom, a)) return std::numeric_limits<double>::infinity();
  if (dom == Domain::CT) return hinf_ct(a, b, c, d, rel_tol);
  // bilinear map of the unit disk onto the left half-plane preserves the H-infinity norm
  const int n = static_cast<int>(a.rows());
  if (n == 0) return d.size() ? max_sv(d) : 0.0;
  Mat ip = (a + Mat::Identity(n, n)).inverse();
  Mat ac = ip * (a - Mat::Identity(n, n));
  Mat bc = std::sqrt(2.0) * ip * b;
  Mat cc = std::sqrt(2.0) * c * ip;
  Mat dc = d - c * ip * b;
  return hinf_ct(ac, bc, cc, dc, rel_tol);
}

}  // namespace netlmi
