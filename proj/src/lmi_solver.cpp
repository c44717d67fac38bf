#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "netlmi/lmi.hpp"

namespace netlmi {

namespace {

struct Blk {
  int n = 0;
  Mat F0;  // constant part with the strictness shift already subtracted
  Mat U, V;
  std::vector<int> dof;
  std::vector<int> margin_rows;  // rows shifted by the phase-one margin; constant principal blocks are exempt
};

struct Lowered {
  int m = 0;
  std::vector<int> vars;
  std::vector<int> base;
  std::vector<Blk> blocks;
  std::vector<Mat> block_const;  // unshifted constant parts, for residual reporting
  Mat Aeq;
  Vec beq;
  Vec c;
  double c0 = 0.0;
};

using PieceList = std::vector<std::pair<Vec, Vec>>;

template <typename F>
void for_each_dof_piece(const Term& t, const LmiVariable& v, F&& emit) {
  auto col = [&](int a) { return Vec(t.L.col(a)); };
  auto row = [&](int b) { return Vec(t.R.row(b).transpose()); };
  if (v.scalar()) {
    for (int s = 0; s < t.L.cols(); ++s) emit(0, col(s), row(s));
  } else if (v.symmetric) {
    int k = 0;
    for (int b = 0; b < v.cols; ++b)
      for (int a = 0; a <= b; ++a, ++k) {
        emit(k, col(a), row(b));
        if (a != b) emit(k, col(b), row(a));
      }
  } else {
    for (int b = 0; b < v.cols; ++b)
      for (int a = 0; a < v.rows; ++a) {
        const int k = a + v.rows * b;
        if (t.trans)
          emit(k, col(b), row(a));
        else
          emit(k, col(a), row(b));
      }
  }
}

void merge_pieces(PieceList& pl) {
  PieceList out;
  for (auto& pc : pl) {
    if (pc.first.isZero(0.0) || pc.second.isZero(0.0)) continue;
    bool merged = false;
    for (auto& o : out)
      if (o.first == pc.first) {
        o.second += pc.second;
        merged = true;
        break;
      }
    if (!merged) out.push_back(pc);
  }
  PieceList out2;
  for (auto& pc : out) {
    bool merged = false;
    for (auto& o : out2)
      if (o.second == pc.second) {
        o.first += pc.first;
        merged = true;
        break;
      }
    if (!merged) out2.push_back(pc);
  }
  pl.clear();
  for (auto& pc : out2)
    if (!pc.first.isZero(0.0) && !pc.second.isZero(0.0)) pl.push_back(pc);
}

Lowered lower(const LmiProblem& prob, const VarSpace& vs, const SolverOptions& opt) {
  Lowered lw;
  std::set<int> free;
  auto collect = [&](const AffineExpr& e) {
    for (int v : e.variables())
      if (!vs.at(v).fixed()) free.insert(v);
  };
  for (const auto& lmi : prob.psd)
    for (size_t r = 0; r < lmi.upper.size(); ++r)
      for (size_t c = r; c < lmi.upper.size(); ++c) collect(lmi.upper[r][c]);
  for (const auto& e : prob.equalities) collect(e);
  if (prob.objective) collect(*prob.objective);
  auto has_free = [&](const AffineExpr& e) {
    for (const auto& t : e.terms())
      if (!vs.at(t.var).fixed()) return true;
    return false;
  };
  std::map<int, int> base;
  for (int v : free) {
    base[v] = lw.m;
    lw.vars.push_back(v);
    lw.base.push_back(lw.m);
    lw.m += vs.at(v).dof_count();
  }

  for (const auto& lmi : prob.psd) {
    Blk b;
    b.n = lmi.size();
    Mat c0 = lmi.constant_part(vs);
    lw.block_const.push_back(c0);
    b.F0 = c0;
    std::map<int, PieceList> per;
    auto off = offsets(lmi.dims);
    const int nb = static_cast<int>(lmi.dims.size());
    for (int r = 0; r < nb; ++r)
      for (int c = r; c < nb; ++c) {
        const double w = (r == c) ? 0.5 : 1.0;
        for (const auto& t : lmi.upper[r][c].terms()) {
          const auto& v = vs.at(t.var);
          if (v.fixed()) continue;
          const int bs = base.at(t.var);
          for_each_dof_piece(t, v, [&](int k, const Vec& ul, const Vec& vl) {
            if (ul.isZero(0.0) || vl.isZero(0.0)) return;
            Vec u = Vec::Zero(b.n), vv = Vec::Zero(b.n);
            u.segment(off[r], ul.size()) = ul;
            vv.segment(off[c], vl.size()) = w * vl;
            per[bs + k].emplace_back(std::move(u), std::move(vv));
          });
        }
      }
    std::vector<bool> cst(nb);
    for (int r = 0; r < nb; ++r) cst[r] = !has_free(lmi.upper[r][r]);
    for (bool changed = true; changed;) {
      changed = false;
      for (int r = 0; r < nb; ++r)
        for (int c = 0; c < nb && cst[r]; ++c)
          if (c != r && cst[c] && has_free(lmi.upper[std::min(r, c)][std::max(r, c)])) {
            cst[r] = false;
            changed = true;
          }
    }
    for (int r = 0; r < nb; ++r)
      if (!cst[r])
        for (int k = 0; k < lmi.dims[r]; ++k) b.margin_rows.push_back(off[r] + k);
    if (b.margin_rows.empty())
      for (int k = 0; k < b.n; ++k) b.margin_rows.push_back(k);
    // strictness margin on the variable rows only, relative to their constant part
    const double eps = opt.eps_rel * (1.0 + inf_norm(Mat(c0(b.margin_rows, b.margin_rows))));
    for (int r : b.margin_rows) b.F0(r, r) -= eps;
    int K = 0;
    for (auto& [d, pl] : per) {
      merge_pieces(pl);
      K += static_cast<int>(pl.size());
    }
    b.U.resize(b.n, K);
    b.V.resize(b.n, K);
    int k = 0;
    for (auto& [d, pl] : per)
      for (auto& pc : pl) {
        b.U.col(k) = pc.first;
        b.V.col(k) = pc.second;
        b.dof.push_back(d);
        ++k;
      }
    lw.blocks.push_back(std::move(b));
  }

  auto linear_rows = [&](const AffineExpr& e0, Mat& A, Vec& rhs) {
    AffineExpr e = e0.substitute(vs);
    const int r = e.rows(), c = e.cols();
    A = Mat::Zero(r * c, lw.m);
    rhs.resize(r * c);
    for (int b = 0; b < c; ++b)
      for (int a = 0; a < r; ++a) rhs(a + r * b) = -e.constant_part()(a, b);
    for (const auto& t : e.terms()) {
      const auto& v = vs.at(t.var);
      const int bs = base.at(t.var);
      for_each_dof_piece(t, v, [&](int k, const Vec& ul, const Vec& vl) {
        for (int b = 0; b < c; ++b)
          if (vl(b) != 0.0)
            for (int a = 0; a < r; ++a) A(a + r * b, bs + k) += ul(a) * vl(b);
      });
    }
  };
  std::vector<Mat> rows;
  std::vector<Vec> rhss;
  int neq = 0;
  for (const auto& e : prob.equalities) {
    Mat A;
    Vec r;
    linear_rows(e, A, r);
    neq += static_cast<int>(A.rows());
    rows.push_back(A);
    rhss.push_back(r);
  }
  lw.Aeq = Mat::Zero(neq, lw.m);
  lw.beq = Vec::Zero(neq);
  for (int i = 0, o = 0; i < static_cast<int>(rows.size()); ++i) {
    lw.Aeq.middleRows(o, rows[i].rows()) = rows[i];
    lw.beq.segment(o, rows[i].rows()) = rhss[i];
    o += static_cast<int>(rows[i].rows());
  }
  lw.c = Vec::Zero(lw.m);
  if (prob.objective) {
    if (prob.objective->rows() != 1 || prob.objective->cols() != 1) throw Error("solve: objective must be 1x1");
    Mat A;
    Vec r;
    linear_rows(*prob.objective, A, r);
    lw.c = A.row(0).transpose();
    lw.c0 = -r(0);
  }
  return lw;
}

// Barrier state over the augmented unknown (x, s); s only present in phase one.
struct Barrier {
  const Lowered* lw;
  bool with_s;
  Vec cost;      // linear objective over augmented unknowns
  Vec radius;    // box radius per augmented unknown
  int dim() const { return lw->m + (with_s ? 1 : 0); }
  double nu() const {
    double v = 0;
    for (const auto& b : lw->blocks) v += b.n;
    return v + 2.0 * dim();
  }

  bool block_matrix(const Blk& b, const Vec& x, Mat& F) const {
    F = b.F0;
    if (with_s)
      for (int r : b.margin_rows) F(r, r) -= x(lw->m);
    if (b.U.cols() > 0) {
      Mat T = b.U;
      for (int k = 0; k < T.cols(); ++k) T.col(k) *= x(b.dof[k]);
      Mat TV = T * b.V.transpose();
      F += TV + TV.transpose();
    }
    return true;
  }

  // returns +inf outside the domain
  double value(const Vec& x, double t) const {
    double phi = t * cost.dot(x);
    for (int j = 0; j < dim(); ++j) {
      const double r2 = radius(j) * radius(j) - x(j) * x(j);
      if (!(r2 > 0)) return std::numeric_limits<double>::infinity();
      phi -= std::log(r2);
    }
    Mat F;
    for (const auto& b : lw->blocks) {
      if (b.n == 0) continue;
      block_matrix(b, x, F);
      Eigen::LLT<Mat> llt(F);
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const auto& L = llt.matrixLLT();
      double ld = 0;
      for (int i = 0; i < b.n; ++i) {
        if (!(L(i, i) > 0)) return std::numeric_limits<double>::infinity();
        ld += std::log(L(i, i));
      }
      phi -= 2.0 * ld;
    }
    return phi;
  }

  bool derivatives(const Vec& x, double t, Vec& g, Mat& H) const {
    const int d = dim();
    g = t * cost;
    H = Mat::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      const double r2 = radius(j) * radius(j), x2 = x(j) * x(j);
      const double den = r2 - x2;
      g(j) += 2.0 * x(j) / den;
      H(j, j) += 2.0 * (r2 + x2) / (den * den);
    }
    Mat F;
    for (const auto& b : lw->blocks) {
      if (b.n == 0) continue;
      block_matrix(b, x, F);
      Eigen::LLT<Mat> llt(F);
      if (llt.info() != Eigen::Success) return false;
      Mat U = b.U, V = b.V;
      std::vector<int> dof = b.dof;
      if (with_s) {
        const int k0 = static_cast<int>(U.cols()), nm = static_cast<int>(b.margin_rows.size());
        U.conservativeResize(b.n, k0 + nm);
        V.conservativeResize(b.n, k0 + nm);
        U.rightCols(nm).setZero();
        V.rightCols(nm).setZero();
        for (int i = 0; i < nm; ++i) {
          U(b.margin_rows[i], k0 + i) = 1.0;
          V(b.margin_rows[i], k0 + i) = -0.5;
          dof.push_back(lw->m);
        }
      }
      const int K = static_cast<int>(U.cols());
      if (K == 0) continue;
      Mat WU = llt.matrixL().solve(U);
      Mat WV = llt.matrixL().solve(V);
      Mat Muv = WU.transpose() * WV;
      Mat Muu = WU.transpose() * WU;
      Mat Mvv = WV.transpose() * WV;
      for (int p = 0; p < K; ++p) g(dof[p]) -= 2.0 * Muv(p, p);
      for (int p = 0; p < K; ++p) {
        const int dp = dof[p];
        for (int q = 0; q < K; ++q) H(dp, dof[q]) += 2.0 * (Muv(q, p) * Muv(p, q) + Mvv(p, q) * Muu(p, q));
      }
    }
    return true;
  }
};

struct NewtonResult {
  bool ok = true;
  int steps = 0;
};

// Centers x for barrier parameter t. `stop` may end the run early (e.g. once s > 0).
template <typename Stop>
NewtonResult center(const Barrier& bar, const Mat* N, Vec& x, double t, int budget, Stop&& stop) {
  NewtonResult res;
  Vec g;
  Mat H;
  for (int it = 0; it < budget; ++it) {
    if (stop(x)) return res;
    if (!bar.derivatives(x, t, g, H)) {
      res.ok = false;
      return res;
    }
    Vec gz = N ? Vec(N->transpose() * g) : g;
    Mat Hz = N ? Mat(N->transpose() * H * (*N)) : H;
    Eigen::LLT<Mat> llt(Hz);
    if (llt.info() != Eigen::Success) {
      const double reg = 1e-12 * (1.0 + Hz.diagonal().cwiseAbs().maxCoeff());
      Hz.diagonal().array() += reg;
      llt.compute(Hz);
      if (llt.info() != Eigen::Success) {
        res.ok = false;
        return res;
      }
    }
    Vec dz = -llt.solve(gz);
    Vec dx = N ? Vec((*N) * dz) : dz;
    const double lam2 = -gz.dot(dz);
    ++res.steps;
    if (lam2 < 1e-9) return res;
    const double f0 = bar.value(x, t);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-14) {
      Vec xn = x + alpha * dx;
      const double fn = bar.value(xn, t);
      if (std::isfinite(fn) && fn <= f0 - 0.25 * alpha * lam2) {
        x = xn;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // no sufficient decrease at this precision: treat as centered
      return res;
    }
  }
  return res;
}

}  // namespace

double psd_margin(const LmiProblem& problem, const VarSpace& vars, int* worst) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < problem.psd.size(); ++i) {
    if (problem.psd[i].size() == 0) continue;
    const double e = min_eig(problem.psd[i].eval(vars));
    if (e < m) {
      m = e;
      if (worst) *worst = static_cast<int>(i);
    }
  }
  return m;
}

SolveReport solve(const LmiProblem& problem, VarSpace& vars, const SolverOptions& opt) {
  SolveReport rep;
  Lowered lw = lower(problem, vars, opt);
  const int m = lw.m;

  // equality elimination: x = x0 + N z
  Vec x0 = Vec::Zero(m);
  Mat Nmat;
  const Mat* N = nullptr;
  if (lw.Aeq.rows() > 0) {
    Eigen::JacobiSVD<Mat> svd(lw.Aeq, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double stol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > stol) ++rank;
    if (m > 0) {
      Vec ub = svd.matrixU().transpose() * lw.beq;
      Vec y = Vec::Zero(m);
      for (int i = 0; i < rank; ++i) y(i) = ub(i) / s(i);
      x0 = svd.matrixV() * y;
    }
    const double res = m > 0 ? (lw.Aeq * x0 - lw.beq).cwiseAbs().maxCoeff() : lw.beq.cwiseAbs().maxCoeff();
    if (res > 1e-9 * (1.0 + lw.beq.cwiseAbs().maxCoeff())) {
      rep.status = SolveStatus::Infeasible;
      rep.note = "linear equalities are inconsistent";
      rep.max_eq_residual = res;
      return rep;
    }
    Nmat = svd.matrixV().rightCols(m - rank);
    N = &Nmat;
  }

  auto assign = [&](const Vec& x) {
    rep.assignment.clear();
    for (size_t i = 0; i < lw.vars.size(); ++i) {
      const auto& v = vars.at(lw.vars[i]);
      Mat val = VarSpace::from_dofs(v, x.data() + lw.base[i]);
      vars.set_value(lw.vars[i], val);
      rep.assignment.emplace_back(lw.vars[i], val);
    }
    rep.objective = lw.c.dot(x) + lw.c0;
    rep.min_psd_eig = psd_margin(problem, vars, &rep.failing_constraint);
    rep.max_eq_residual = 0.0;
    for (const auto& e : problem.equalities) rep.max_eq_residual = std::max(rep.max_eq_residual, inf_norm(e.eval(vars)));
  };

  if (m == 0) {
    Vec x(0);
    assign(x);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& b : lw.blocks)
      if (b.n > 0) worst = std::min(worst, min_eig(b.F0));
    rep.status = worst > 0 ? SolveStatus::Feasible : SolveStatus::Infeasible;
    rep.margin = worst;
    return rep;
  }

  // phase one: maximize s subject to F_b(x) - eps_b I - s I >= 0
  Barrier p1{&lw, true, Vec::Zero(m + 1), Vec::Constant(m + 1, opt.radius)};
  Vec x = Vec::Zero(m + 1);
  x.head(m) = x0;
  if ((x0.cwiseAbs().array() >= 0.5 * opt.radius).any()) {
    rep.status = SolveStatus::Inaccurate;
    rep.note = "equality solution lies outside the variable box";
    return rep;
  }
  double s0 = std::numeric_limits<double>::infinity();
  {
    Mat F;
    Barrier tmp{&lw, false, Vec(), Vec()};
    for (size_t bi = 0; bi < lw.blocks.size(); ++bi) {
      const auto& b = lw.blocks[bi];
      if (b.n == 0) continue;
      tmp.block_matrix(b, x, F);
      if (static_cast<int>(b.margin_rows.size()) == b.n) {
        s0 = std::min(s0, min_eig(F));
        continue;
      }
      std::vector<bool> in(b.n, false);
      for (int r : b.margin_rows) in[r] = true;
      std::vector<int> cr;
      for (int r = 0; r < b.n; ++r)
        if (!in[r]) cr.push_back(r);
      const Mat fcc = F(cr, cr), fvc = F(b.margin_rows, cr), fvv = F(b.margin_rows, b.margin_rows);
      if (min_eig(fcc) <= 0.0) {
        rep.status = SolveStatus::Infeasible;
        rep.failing_constraint = static_cast<int>(bi);
        rep.note = "constant principal block of constraint " + problem.psd[bi].name + " is not positive definite";
        return rep;
      }
      s0 = std::min(s0, min_eig(Mat(fvv - fvc * fcc.llt().solve(Mat(fvc.transpose())))));
    }
    if (!std::isfinite(s0)) s0 = 0.0;
  }
  x(m) = s0 - 1.0;
  p1.radius(m) = std::max(opt.radius, 4.0 * std::abs(x(m)) + 1.0);
  p1.cost(m) = -1.0;
  Mat N1;
  const Mat* N1p = nullptr;
  if (N) {
    N1 = Mat::Zero(m + 1, N->cols() + 1);
    N1.topLeftCorner(m, N->cols()) = *N;
    N1(m, N->cols()) = 1.0;
    N1p = &N1;
  }
  const double nu1 = p1.nu();
  double scale = 1.0;
  for (const auto& c : lw.block_const) scale = std::max(scale, inf_norm(c));
  double t = nu1 / (std::abs(x(m)) + 1.0);
  int steps = 0;
  bool feasible = false;
  bool decided = false;
  const bool need_center = opt.maximize_margin;
  while (steps < opt.max_newton) {
    auto stop = [&](const Vec& xx) { return need_center ? xx(m) >= opt.margin_target : xx(m) > 0.0; };
    NewtonResult nr = center(p1, N1p, x, t, std::min(60, opt.max_newton - steps), stop);
    steps += nr.steps;
    if (!nr.ok) break;
    const double s = x(m);
    const double gap = nu1 / t;
    if (s > 0.0 && (!need_center || gap <= opt.margin_rel_tol * s || s >= opt.margin_target)) {
      feasible = true;
      decided = true;
      break;
    }
    if (s + gap < 0.0) {
      decided = true;
      break;
    }
    if (gap < 1e-11 * scale) {
      decided = true;
      feasible = s > 0.0;
      if (!feasible) rep.note = "marginal: optimal margin within numerical precision of zero";
      break;
    }
    t *= opt.mu;
  }
  rep.margin = x(m);
  rep.newton_steps = steps;
  if (!decided) {
    if (x(m) > 0.0) {
      feasible = true;
    } else {
      assign(x.head(m));
      rep.status = SolveStatus::Inaccurate;
      if (rep.note.empty()) rep.note = "phase one did not converge";
      return rep;
    }
  }
  if (!feasible) {
    assign(x.head(m));
    rep.status = SolveStatus::Infeasible;
    return rep;
  }

  Vec xf = x.head(m);
  if (!problem.objective) {
    assign(xf);
    rep.status = SolveStatus::Feasible;
    return rep;
  }

  // phase two: minimize c^T x over F_b(x) - eps_b I >= 0
  Barrier p2{&lw, false, lw.c, Vec::Constant(m, opt.radius)};
  const double nu2 = p2.nu();
  t = nu2 / (std::abs(lw.c.dot(xf)) + 1.0);
  bool converged = false;
  while (steps < opt.max_newton * 3) {
    NewtonResult nr = center(p2, N, xf, t, 60, [](const Vec&) { return false; });
    steps += nr.steps;
    if (!nr.ok) break;
    const double obj = lw.c.dot(xf);
    if (nu2 / t <= opt.tol * std::max(1.0, std::abs(obj))) {
      converged = true;
      break;
    }
    t *= opt.mu;
  }
  rep.newton_steps = steps;
  assign(xf);
  if (!converged) {
    rep.status = SolveStatus::Inaccurate;
    rep.note = "phase two did not reach the gap target";
    return rep;
  }
  for (int j = 0; j < m; ++j)
    if (lw.c(j) != 0.0 && std::abs(xf(j)) >= 0.99 * opt.radius) {
      rep.status = SolveStatus::Unbounded;
      rep.note = "objective variable reached the variable box";
      return rep;
    }
  rep.status = SolveStatus::Feasible;
  return rep;
}

}  // namespace netlmi
