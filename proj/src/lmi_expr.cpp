#include <algorithm>
#include <set>

#include "netlmi/lmi.hpp"

namespace netlmi {

int VarSpace::add(const std::string& name, int rows, int cols, bool symmetric, int owner) {
  if (symmetric && rows != cols) throw Error("variable " + name + ": symmetric variables must be square");
  LmiVariable v;
  v.name = name;
  v.rows = rows;
  v.cols = cols;
  v.symmetric = symmetric;
  v.owner = owner;
  vars_.push_back(std::move(v));
  return count() - 1;
}

Mat VarSpace::value(int id) const {
  const auto& v = vars_.at(id);
  if (!v.value) throw Error("variable " + v.name + " has no value");
  return *v.value;
}

void VarSpace::set_value(int id, const Mat& m) {
  auto& v = vars_.at(id);
  if (m.rows() != v.rows || m.cols() != v.cols) throw Error("variable " + v.name + ": value shape mismatch");
  v.value = v.symmetric ? Mat(0.5 * (m + m.transpose())) : m;
}

Mat VarSpace::from_dofs(const LmiVariable& v, const double* x) {
  Mat m(v.rows, v.cols);
  if (v.symmetric) {
    int k = 0;
    for (int b = 0; b < v.cols; ++b)
      for (int a = 0; a <= b; ++a) {
        m(a, b) = x[k];
        m(b, a) = x[k];
        ++k;
      }
  } else {
    for (int b = 0; b < v.cols; ++b)
      for (int a = 0; a < v.rows; ++a) m(a, b) = x[a + v.rows * b];
  }
  return m;
}

void VarSpace::to_dofs(const LmiVariable& v, const Mat& m, double* x) {
  if (v.symmetric) {
    int k = 0;
    for (int b = 0; b < v.cols; ++b)
      for (int a = 0; a <= b; ++a) x[k++] = 0.5 * (m(a, b) + m(b, a));
  } else {
    for (int b = 0; b < v.cols; ++b)
      for (int a = 0; a < v.rows; ++a) x[a + v.rows * b] = m(a, b);
  }
}

AffineExpr AffineExpr::constant(const Mat& m) {
  AffineExpr e(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  e.c_ = m;
  return e;
}

AffineExpr AffineExpr::variable(const VarSpace& vs, int id) {
  const auto& v = vs.at(id);
  AffineExpr e(v.rows, v.cols);
  Term t;
  t.var = id;
  t.L = Mat::Identity(v.rows, v.rows);
  t.R = Mat::Identity(v.cols, v.cols);
  e.terms_.push_back(std::move(t));
  return e;
}

AffineExpr AffineExpr::scaled(const VarSpace& vs, int id, const Mat& m) {
  if (!vs.at(id).scalar()) throw Error("AffineExpr::scaled: variable is not scalar");
  AffineExpr e(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  Term t;
  t.var = id;
  t.L = m;
  t.R = Mat::Identity(m.cols(), m.cols());
  e.terms_.push_back(std::move(t));
  return e;
}

AffineExpr AffineExpr::transpose() const {
  AffineExpr e(cols_, rows_);
  e.c_ = c_.transpose();
  for (const auto& t : terms_) {
    Term u;
    u.var = t.var;
    u.L = t.R.transpose();
    u.R = t.L.transpose();
    u.trans = !t.trans;
    e.terms_.push_back(std::move(u));
  }
  return e;
}

AffineExpr AffineExpr::operator-() const { return -1.0 * (*this); }

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  if (rows_ == 0 && cols_ == 0 && terms_.empty() && c_.size() == 0) return *this = o;
  if (o.rows_ != rows_ || o.cols_ != cols_) throw Error("AffineExpr: dimension mismatch in sum");
  c_ += o.c_;
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

AffineExpr operator*(double s, const AffineExpr& a) {
  AffineExpr e = a;
  e.c_ *= s;
  for (auto& t : e.terms_) t.L *= s;
  return e;
}

AffineExpr operator*(const Mat& m, const AffineExpr& a) {
  if (m.cols() != a.rows_) throw Error("AffineExpr: dimension mismatch in left product");
  AffineExpr e(static_cast<int>(m.rows()), a.cols_);
  if (m.rows() == 0 || a.cols_ == 0 || is_zero_block(m, 0.0)) return e;
  e.c_ = m * a.c_;
  for (const auto& t : a.terms_) {
    Term u = t;
    u.L = m * t.L;
    e.terms_.push_back(std::move(u));
  }
  return e;
}

AffineExpr operator*(const AffineExpr& a, const Mat& m) {
  if (m.rows() != a.cols_) throw Error("AffineExpr: dimension mismatch in right product");
  AffineExpr e(a.rows_, static_cast<int>(m.cols()));
  if (m.cols() == 0 || a.rows_ == 0 || is_zero_block(m, 0.0)) return e;
  e.c_ = a.c_ * m;
  for (const auto& t : a.terms_) {
    Term u = t;
    u.R = t.R * m;
    e.terms_.push_back(std::move(u));
  }
  return e;
}

AffineExpr operator*(const AffineExpr& a, const AffineExpr& b) {
  if (b.is_constant()) return a * b.constant_part();
  if (a.is_constant()) return a.constant_part() * b;
  throw Error("AffineExpr: product of two non-constant expressions is not affine");
}

namespace {

Mat term_value(const Term& t, const LmiVariable& v) {
  const Mat& x = *v.value;
  if (v.scalar()) return x(0, 0) * (t.L * t.R);
  return t.trans ? Mat(t.L * x.transpose() * t.R) : Mat(t.L * x * t.R);
}

}  // namespace

Mat AffineExpr::eval(const VarSpace& vs) const {
  Mat out = c_;
  for (const auto& t : terms_) {
    const auto& v = vs.at(t.var);
    if (!v.value) throw Error("AffineExpr::eval: variable " + v.name + " has no value");
    out += term_value(t, v);
  }
  return out;
}

AffineExpr AffineExpr::substitute(const VarSpace& vs) const {
  AffineExpr e(rows_, cols_);
  e.c_ = c_;
  for (const auto& t : terms_) {
    const auto& v = vs.at(t.var);
    if (v.value)
      e.c_ += term_value(t, v);
    else
      e.terms_.push_back(t);
  }
  return e;
}

AffineExpr AffineExpr::embed(int rows, int cols, int r0, int c0) const {
  if (r0 + rows_ > rows || c0 + cols_ > cols) throw Error("AffineExpr::embed: out of range");
  AffineExpr e(rows, cols);
  e.c_.block(r0, c0, rows_, cols_) = c_;
  for (const auto& t : terms_) {
    Term u;
    u.var = t.var;
    u.trans = t.trans;
    u.L = Mat::Zero(rows, t.L.cols());
    u.L.middleRows(r0, rows_) = t.L;
    u.R = Mat::Zero(t.R.rows(), cols);
    u.R.middleCols(c0, cols_) = t.R;
    e.terms_.push_back(std::move(u));
  }
  return e;
}

std::vector<int> AffineExpr::variables() const {
  std::set<int> s;
  for (const auto& t : terms_) s.insert(t.var);
  return {s.begin(), s.end()};
}

AffineExpr trace(const AffineExpr& a) {
  if (a.rows() != a.cols()) throw Error("trace: expression is not square");
  AffineExpr e = AffineExpr::constant(Mat::Constant(1, 1, a.constant_part().trace()));
  const AffineExpr v = a - AffineExpr::constant(a.constant_part());
  for (int k = 0; k < a.rows(); ++k) {
    Mat row = Mat::Zero(1, a.rows());
    row(0, k) = 1.0;
    e += row * v * Mat(row.transpose());
  }
  return e;
}

AffineExpr hs(const AffineExpr& a) { return a + a.transpose(); }

AffineExpr assemble(const ExprGrid& grid) {
  const int nr = static_cast<int>(grid.size());
  if (nr == 0) return AffineExpr();
  const int nc = static_cast<int>(grid[0].size());
  Dims rd(nr), cd(nc);
  for (int r = 0; r < nr; ++r) rd[r] = grid[r][0].rows();
  for (int c = 0; c < nc; ++c) cd[c] = grid[0][c].cols();
  auto ro = offsets(rd), co = offsets(cd);
  AffineExpr out = AffineExpr::zero(ro.back(), co.back());
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nc; ++c) {
      const auto& b = grid[r][c];
      if (b.rows() != rd[r] || b.cols() != cd[c]) throw Error("assemble: inconsistent block dimensions");
      if (b.is_zero()) continue;
      out += b.embed(ro.back(), co.back(), ro[r], co[c]);
    }
  return out;
}

SymLmi::SymLmi(Dims d, std::string nm) : name(std::move(nm)), dims(std::move(d)) {
  const int n = static_cast<int>(dims.size());
  upper.assign(n, std::vector<AffineExpr>(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) upper[r][c] = AffineExpr::zero(dims[r], dims[c]);
}

SymLmi SymLmi::single(const AffineExpr& e, std::string nm) {
  SymLmi s({e.rows()}, std::move(nm));
  s.set(0, 0, e);
  return s;
}

SymLmi SymLmi::from_grid(const ExprGrid& full, std::string nm) {
  const int n = static_cast<int>(full.size());
  Dims d(n);
  for (int r = 0; r < n; ++r) d[r] = full[r][r].rows();
  SymLmi s(d, std::move(nm));
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) s.set(r, c, full[r][c]);
  return s;
}

void SymLmi::set(int r, int c, const AffineExpr& e) {
  if (r > c) {
    set(c, r, e.transpose());
    return;
  }
  if (e.rows() != dims[r] || e.cols() != dims[c]) throw Error("SymLmi::set: block shape mismatch in " + name);
  upper[r][c] = e;
}

Mat SymLmi::eval(const VarSpace& vs) const {
  auto off = offsets(dims);
  Mat m = Mat::Zero(off.back(), off.back());
  const int n = static_cast<int>(dims.size());
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) {
      Mat b = upper[r][c].eval(vs);
      m.block(off[r], off[c], dims[r], dims[c]) = b;
      if (r != c) m.block(off[c], off[r], dims[c], dims[r]) = b.transpose();
    }
  return 0.5 * (m + m.transpose());
}

Mat SymLmi::constant_part(const VarSpace& vs) const {
  auto off = offsets(dims);
  Mat m = Mat::Zero(off.back(), off.back());
  const int n = static_cast<int>(dims.size());
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) {
      Mat b = upper[r][c].substitute(vs).constant_part();
      m.block(off[r], off[c], dims[r], dims[c]) = b;
      if (r != c) m.block(off[c], off[r], dims[c], dims[r]) = b.transpose();
    }
  return 0.5 * (m + m.transpose());
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Inaccurate: return "inaccurate";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

}  // namespace netlmi
