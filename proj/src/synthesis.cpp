#include "netlmi/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "synthesis_build.hpp"

namespace netlmi {

using detail::Built;
using detail::GammaKind;
using detail::NetLmi;

std::string to_string(Task t) {
  switch (t) {
    case Task::Analyze: return "analyze";
    case Task::Fsf: return "fsf";
    case Task::Observer: return "observer";
    case Task::Dof: return "dof";
  }
  return "?";
}

std::string to_string(Property p) {
  switch (p) {
    case Property::Stability: return "stability";
    case Property::Qsr: return "qsr";
    case Property::H2: return "h2";
    case Property::Hinf: return "hinf";
    case Property::Stabilizability: return "stabilizability";
    case Property::Detectability: return "detectability";
  }
  return "?";
}

std::string to_string(Mode m) { return m == Mode::Centralized ? "centralized" : "decentralized"; }

Task task_from_string(const std::string& s) {
  for (Task t : {Task::Analyze, Task::Fsf, Task::Observer, Task::Dof})
    if (to_string(t) == s) return t;
  throw Error("unknown task: " + s);
}

Property property_from_string(const std::string& s) {
  for (Property p : {Property::Stability, Property::Qsr, Property::H2, Property::Hinf, Property::Stabilizability,
                     Property::Detectability})
    if (to_string(p) == s) return p;
  throw Error("unknown property: " + s);
}

Mode mode_from_string(const std::string& s) {
  if (s == "centralized" || s == "central") return Mode::Centralized;
  if (s == "decentralized" || s == "decentral") return Mode::Decentralized;
  throw Error("unknown mode: " + s);
}

namespace {

bool symmetric(const Mat& m) { return inf_norm(m - m.transpose()) <= 1e-9 * std::max(1.0, inf_norm(m)); }

BlockMatrix scaled_identity(const Dims& rows, const Dims& cols, double s) {
  if (rows != cols) throw Error("qsr preset: output and input dimensions must agree for this supply rate");
  BlockMatrix b = BlockMatrix::identity(rows);
  b.dense() *= s;
  return b;
}

void require_positive(const std::vector<double>& params, size_t count, const std::string& kind,
                      const std::vector<bool>& positive) {
  if (params.size() != count)
    throw Error("qsr preset " + kind + " expects " + std::to_string(count) + " parameter(s)");
  for (size_t i = 0; i < count; ++i)
    if (positive[i] && !(params[i] > 0.0)) throw Error("qsr preset " + kind + ": parameter must be positive");
}

}  // namespace

void QsrSpec::validate() const {
  const Mat &q = Q.dense(), &s = S.dense(), &r = R.dense();
  if (q.rows() != q.cols() || r.rows() != r.cols() || s.rows() != q.rows() || s.cols() != r.rows())
    throw Error("qsr: Q, S, R have inconsistent dimensions");
  if (!symmetric(q)) throw Error("qsr: Q is not symmetric");
  if (!symmetric(r)) throw Error("qsr: R is not symmetric (R = R^T required)");
  if (!is_zero_block(q, 0.0) && min_eig(-q) <= 0.0) throw Error("qsr: -Q is not positive definite");
}

QsrSpec qsr_preset(const std::string& kind, const std::vector<double>& params, const Dims& out, const Dims& in) {
  QsrSpec s;
  s.Q = BlockMatrix(out, out);
  s.S = BlockMatrix(out, in);
  s.R = BlockMatrix(in, in);
  if (kind == "passive") {
    require_positive(params, 0, kind, {});
    s.S = scaled_identity(out, in, 0.5);
  } else if (kind == "strict_input") {
    require_positive(params, 1, kind, {true});
    s.S = scaled_identity(out, in, 0.5);
    s.R = scaled_identity(in, in, -params[0]);
  } else if (kind == "strict_output") {
    require_positive(params, 1, kind, {true});
    s.Q = scaled_identity(out, out, -params[0]);
    s.S = scaled_identity(out, in, 0.5);
  } else if (kind == "strict") {
    require_positive(params, 2, kind, {true, true});
    s.Q = scaled_identity(out, out, -params[1]);
    s.S = scaled_identity(out, in, 0.5);
    s.R = scaled_identity(in, in, -params[0]);
  } else if (kind == "l2") {
    require_positive(params, 1, kind, {true});
    s.Q = scaled_identity(out, out, -1.0 / params[0]);
    s.R = scaled_identity(in, in, -params[0]);
  } else if (kind == "conic") {
    require_positive(params, 2, kind, {false, true});
    const double c = params[0], r = params[1];
    s.Q = scaled_identity(out, out, -1.0);
    s.S = scaled_identity(out, in, c);
    s.R = scaled_identity(in, in, r * r - c * c);
  } else if (kind == "sector") {
    require_positive(params, 2, kind, {false, false});
    const double a = params[0], b = params[1];
    if (!(a < b)) throw Error("qsr preset sector: requires a < b");
    s.Q = scaled_identity(out, out, -1.0);
    s.S = scaled_identity(out, in, a + b);
    s.R = scaled_identity(in, in, -a * b);
  } else {
    throw Error("unknown qsr preset: " + kind);
  }
  return s;
}

std::pair<Dims, Dims> qsr_channel_dims(const NetworkedSystem& sys, Task task) {
  switch (task) {
    case Task::Analyze: return {sys.m, sys.p};
    case Task::Fsf: return {sys.m, sys.q};
    case Task::Observer:
    case Task::Dof: return {sys.l, sys.q};
  }
  return {};
}

SolverOptions default_synthesis_options() {
  SolverOptions o;
  o.maximize_margin = true;
  o.radius = 1e3;
  o.margin_rel_tol = 1e-2;
  o.margin_target = 1.0;
  return o;
}

void check_preconditions(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr) {
  sys.validate();
  const bool dec = spec.mode == Mode::Decentralized;
  const bool ct = sys.domain == Domain::CT;
  const Task t = spec.task;
  const Property p = spec.property;
  const std::string combo = to_string(t) + "/" + to_string(p);

  auto zero = [&](char name) {
    if (!is_zero_block(sys.param(name).dense()))
      throw Error("precondition violated for " + combo + ": " + std::string(1, name) + " must be zero");
  };
  auto diag = [&](char name) {
    if (!sys.param(name).is_block_diagonal())
      throw Error("precondition violated for decentralized " + combo + ": " + std::string(1, name) +
                  " must be block diagonal");
  };
  auto unsupported = [&]() {
    throw Error("unsupported combination: " + combo + " (" + to_string(spec.mode) + ", " + to_string(sys.domain) + ")");
  };

  const bool gain_prop = p == Property::Stabilizability || p == Property::Detectability;
  if (gain_prop && t != Task::Analyze) unsupported();
  if (dec && (p == Property::H2 || p == Property::Hinf)) unsupported();

  if (p == Property::Qsr) {
    if (!qsr) throw Error("precondition violated for " + combo + ": a (Q,S,R) specification is required");
    qsr->validate();
    auto [od, id] = qsr_channel_dims(sys, t);
    if (qsr->Q.row_dims() != od || qsr->S.row_dims() != od || qsr->S.col_dims() != id || qsr->R.row_dims() != id)
      throw Error("precondition violated for " + combo + ": (Q,S,R) dimensions do not match the channel");
    if (dec) {
      if (!qsr->Q.is_block_diagonal())
        throw Error("precondition violated for decentralized " + combo + ": Q must be block diagonal");
    }
  }

  switch (t) {
    case Task::Analyze:
      if (p == Property::H2 && ct) zero('D');
      if (dec && p == Property::Qsr) {
        diag('C');
        diag('D');
      }
      if (dec && p == Property::Stabilizability) diag('B');
      if (dec && p == Property::Detectability) diag('C');
      break;
    case Task::Fsf:
      if (p == Property::Stability || p == Property::Qsr) zero('D');
      if (p == Property::H2 && ct) zero('F');
      if (dec) {
        diag('B');
        if (p == Property::Qsr) {
          diag('C');
          diag('F');
        }
      }
      break;
    case Task::Observer:
      if (p == Property::H2 && ct) zero('J');
      if (dec) {
        diag('C');
        diag('D');
        if (p == Property::Qsr) {
          diag('F');
          diag('G');
          diag('J');
        }
      }
      break;
    case Task::Dof:
      zero('D');
      if (dec) {
        diag('B');
        diag('C');
        if (p == Property::Qsr) {
          diag('F');
          diag('H');
          if (!qsr->S.is_block_diagonal())
            throw Error("precondition violated for decentralized " + combo + ": S must be block diagonal");
        }
      }
      break;
  }
}

namespace {

LmiProblem centralized_problem(const Built& b) {
  LmiProblem pr;
  for (const auto& l : b.lmis) pr.psd.push_back(l.flatten());
  for (const auto& e : b.extra) pr.psd.push_back(e);
  pr.equalities = b.equalities;
  pr.objective = b.objective;
  return pr;
}

TaskSpec checked_spec(const TaskSpec& spec, Mode mode) {
  TaskSpec s = spec;
  s.mode = mode;
  return s;
}

Mat inv(const Mat& m, const char* what) {
  if (m.rows() == 0) return m;
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw Error(std::string("recovery: ") + what + " is singular");
  return lu.inverse();
}

Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

BlockMatrix like(const Dims& r, const Dims& c, const Mat& m) { return BlockMatrix(r, c, m); }

DofPlant plant_of(const NetworkedSystem& s) {
  return {s.A.dense(), s.B.dense(), s.C.dense(), s.E.dense(), s.F.dense(), s.G.dense(), s.H.dense(), s.J.dense()};
}

// Gains of the stabilizability and detectability propositions.
void stabilizability_gains(const NetworkedSystem& s, Design& d, const Mat& p) {
  const Mat pi = inv(p, "P");
  const Mat &a = s.A.dense(), &b = s.B.dense(), &c = s.C.dense();
  if (d.property == Property::Stabilizability) {
    Mat k;
    if (s.domain == Domain::CT) {
      k = -0.5 * b.transpose() * pi;
    } else {
      const int nu = static_cast<int>(b.cols());
      Mat g = 2.0 * Mat::Identity(nu, nu) + b.transpose() * pi * b;
      k = -g.fullPivLu().solve(Mat(b.transpose() * pi * a));
    }
    d.K = like(s.p, s.n, k);
  } else {
    Mat l;
    if (s.domain == Domain::CT) {
      l = 0.5 * pi * c.transpose();
    } else {
      const int ny = static_cast<int>(c.rows());
      Mat g = 2.0 * Mat::Identity(ny, ny) + c * pi * c.transpose();
      l = Mat(g.transpose().fullPivLu().solve(Mat((a * pi * c.transpose()).transpose()))).transpose();
    }
    d.L = like(s.n, s.m, l);
    d.Ahat = like(s.n, s.n, a - l * c);
    d.Bhat = like(s.n, s.p, s.B.dense() - l * s.D.dense());
  }
}

// Reads the solved variables of b into d (in the indexing of s) and normalizes the certificate.
void recover(const NetworkedSystem& s, const Built& b, bool structured, Design& d) {
  const auto& vs = b.vs;
  double graw = 0.0;
  if (b.gamma_var >= 0) {
    graw = vs.value(b.gamma_var)(0, 0);
    d.gamma = b.gamma_kind == GammaKind::Sqrt ? std::sqrt(std::max(0.0, graw)) : graw;
  }
  const bool ct = s.domain == Domain::CT;
  const Property prop = d.property;

  switch (d.task) {
    case Task::Analyze: {
      Mat p = b.P->value(vs).dense();
      if (prop == Property::Stabilizability || prop == Property::Detectability) {
        stabilizability_gains(s, d, p);
        d.P = like(s.n, s.n, p);
      } else if (prop == Property::H2) {
        d.certificate_dual = !ct;
        d.P = like(s.n, s.n, ct ? Mat(graw * inv(p, "P")) : p);
      } else if (prop == Property::Hinf) {
        d.P = like(s.n, s.n, graw * p);
      } else {
        d.P = like(s.n, s.n, p);
      }
      break;
    }
    case Task::Fsf: {
      BlockMatrix m = b.M->value(vs), l = b.L->value(vs);
      d.M = m;
      Mat mi = inv(m.dense(), "M");
      if (structured) {
        d.K = enforce_equality(BlockMatrix::identity(s.p), m, axpy(-1.0, l, 0.0, l), EqualityStructure::General);
      } else {
        d.K = like(s.p, s.n, l.dense() * mi);
      }
      if (prop == Property::H2) {
        d.certificate_dual = !ct;
        d.P = like(s.n, s.n, ct ? Mat(graw * mi) : m.dense());
      } else if (prop == Property::Hinf) {
        d.P = like(s.n, s.n, graw * mi);
      } else {
        d.P = like(s.n, s.n, sym(mi));
      }
      break;
    }
    case Task::Observer: {
      BlockMatrix p = b.P->value(vs), k = b.K->value(vs);
      if (structured) {
        d.L = enforce_equality(p, BlockMatrix::identity(s.m), axpy(-1.0, k, 0.0, k), EqualityStructure::General);
      } else {
        d.L = like(s.n, s.m, inv(p.dense(), "P") * k.dense());
      }
      d.Ahat = like(s.n, s.n, s.A.dense() - d.L.dense() * s.C.dense());
      d.Bhat = like(s.n, s.p, s.B.dense() - d.L.dense() * s.D.dense());
      if (prop == Property::H2) {
        d.certificate_dual = true;
        d.P = like(s.n, s.n, ct ? Mat(graw * inv(p.dense(), "P")) : inv(p.dense(), "P"));
      } else if (prop == Property::Hinf) {
        d.P = like(s.n, s.n, graw * p.dense());
      } else {
        d.P = p;
      }
      break;
    }
    case Task::Dof: {
      d.X = b.X->value(vs);
      d.Y = b.Y->value(vs);
      const Mat x = d.X.dense(), y = d.Y.dense();
      const int n = static_cast<int>(x.rows());
      Mat mm = Mat::Zero(n, n), nn = Mat::Zero(n, n);
      if (structured) {
        auto off = offsets(s.n);
        for (int i = 0; i < s.size(); ++i) {
          if (s.n[i] == 0) continue;
          CovFactors f = cov_recover(d.X.block(i, i), d.Y.block(i, i));
          mm.block(off[i], off[i], s.n[i], s.n[i]) = f.M;
          nn.block(off[i], off[i], s.n[i], s.n[i]) = f.N;
        }
      } else {
        CovFactors f = cov_recover(x, y);
        mm = f.M;
        nn = f.N;
      }
      d.Mcov = like(s.n, s.n, mm);
      d.Ncov = like(s.n, s.n, nn);
      AuxParams aux{b.An->value(vs).dense(), b.Bn->value(vs).dense(), b.Cn->value(vs).dense(),
                    b.Dn->value(vs).dense()};
      DofParams c = dof_from_aux(aux, x, y, mm, nn, plant_of(s));
      d.Ac = like(s.n, s.n, c.Ac);
      d.Bc = like(s.n, s.m, c.Bc);
      d.Cc = like(s.p, s.n, c.Cc);
      d.Dc = like(s.p, s.m, c.Dc);
      Dims nn2 = s.n;
      nn2.insert(nn2.end(), s.n.begin(), s.n.end());
      const Mat p = dof_storage(x, y, mm, nn);
      if (prop == Property::H2) {
        d.certificate_dual = ct;
        d.P = BlockMatrix(nn2, nn2, ct ? Mat(sym(inv(p, "P"))) : p);
      } else if (prop == Property::Hinf) {
        d.P = BlockMatrix(nn2, nn2, graw * p);
      } else {
        d.P = BlockMatrix(nn2, nn2, p);
      }
      break;
    }
  }
}

Design blank(const NetworkedSystem& sys, const TaskSpec& spec, Mode mode) {
  Design d;
  d.task = spec.task;
  d.property = spec.property;
  d.mode = mode;
  d.domain = sys.domain;
  d.indexing = IndexingScheme::identity(sys.size());
  return d;
}

BlockMatrix unpermute(const BlockMatrix& m, const IndexingScheme& scheme) {
  if (m.n_block_rows() == 0 && m.n_block_cols() == 0) return m;
  return permute(m, scheme.order());
}

// The DOF storage matrix is over [x; xc]; each half is reindexed separately.
BlockMatrix unpermute_doubled(const BlockMatrix& m, const IndexingScheme& scheme) {
  if (m.n_block_rows() == 0) return m;
  const int n = scheme.size();
  std::vector<int> order(2 * n);
  for (int k = 0; k < n; ++k) {
    order[k] = scheme.order()[k];
    order[n + k] = n + scheme.order()[k];
  }
  return permute(m, order);
}

}  // namespace

GlobalLmi build_global_lmi(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr) {
  check_preconditions(sys, checked_spec(spec, Mode::Centralized), qsr);
  Built b = detail::build(sys, spec.task, spec.property, nullptr, qsr);
  GlobalLmi g;
  g.problem = centralized_problem(b);
  g.vars = std::move(b.vs);
  g.proposition = b.name;
  return g;
}

Design synthesize_centralized(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr) {
  check_preconditions(sys, checked_spec(spec, Mode::Centralized), qsr);
  Design d = blank(sys, spec, Mode::Centralized);
  Built b = detail::build(sys, spec.task, spec.property, nullptr, qsr);
  LmiProblem pr = centralized_problem(b);
  SolveReport rep = solve(pr, b.vs, spec.solver);
  d.status = rep.status;
  d.newton_steps = rep.newton_steps;
  if (rep.status != SolveStatus::Feasible) {
    d.feasible = false;
    if (rep.failing_constraint >= 0) d.failing_constraint = pr.psd[rep.failing_constraint].name;
    d.message = b.name + ": " + to_string(rep.status) + (rep.note.empty() ? "" : " (" + rep.note + ")");
    return d;
  }
  try {
    recover(sys, b, false, d);
  } catch (const Error& e) {
    d.feasible = false;
    d.message = b.name + ": " + e.what();
    return d;
  }
  d.feasible = true;
  d.message = b.name + ": feasible";
  return d;
}

Design synthesize_decentralized(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr) {
  check_preconditions(sys, checked_spec(spec, Mode::Decentralized), qsr);
  const int N = sys.size();
  const IndexingScheme scheme = spec.indexing ? *spec.indexing : IndexingScheme::identity(N);
  if (scheme.size() != N) throw Error("indexing scheme size does not match the system");
  Design d = blank(sys, spec, Mode::Decentralized);
  d.indexing = scheme;
  d.local_margins.assign(N, 0.0);

  const NetworkedSystem rs = reindex(sys, scheme);
  std::optional<QsrSpec> rq;
  if (qsr) {
    rq = QsrSpec{permute(qsr->Q, scheme.perm()), permute(qsr->S, scheme.perm()), permute(qsr->R, scheme.perm())};
  }
  const Topology topo = derive_topology(rs);
  Built b = detail::build(rs, spec.task, spec.property, &topo, rq);
  if (b.objective || !b.extra.empty() || !b.equalities.empty())
    throw Error("unsupported combination: " + to_string(spec.task) + "/" + to_string(spec.property) + " (decentralized)");

  const size_t nl = b.lmis.size();
  std::vector<SequentialFactor> factors;
  for (size_t k = 0; k < nl; ++k) factors.emplace_back(&topo, spec.skip_redundant);
  // numeric rows W_ij (j <= i) of every BEW matrix, kept to form the prior principal block
  std::vector<std::vector<std::vector<Mat>>> rows(nl);

  auto fail = [&](int i, const std::string& constraint, const std::string& why) {
    d.feasible = false;
    d.failing_subsystem = scheme.original_at(i);
    d.failing_constraint = constraint;
    d.message = b.name + ": local problem of subsystem " + std::to_string(d.failing_subsystem + 1) +
                " (step " + std::to_string(i + 1) + ") " + why;
  };

  for (int i = 0; i < N; ++i) {
    LmiProblem lp;
    std::vector<size_t> lmi_of;
    for (size_t k = 0; k < nl; ++k) {
      const NetLmi& W = b.lmis[k];
      const int di = W.bew_dim(i);
      if (di == 0) continue;
      AffineExpr wii = W.bew_block(i, i).substitute(b.vs);
      int prior = 0;
      for (int j = 0; j < i; ++j) prior += W.bew_dim(j);
      ExprGrid rowgrid(1);
      for (int j = 0; j < i; ++j)
        if (W.bew_dim(j) > 0) rowgrid[0].push_back(W.bew_block(i, j).substitute(b.vs));
      const std::string cname = W.name + "[" + std::to_string(scheme.original_at(i) + 1) + "]";
      if (prior == 0) {
        lp.psd.push_back(SymLmi::single(wii, cname));
      } else {
        Mat lead = Mat::Zero(prior, prior);
        std::vector<int> off(1, 0);
        for (int j = 0; j < i; ++j) off.push_back(off.back() + W.bew_dim(j));
        for (int r = 0; r < i; ++r)
          for (int c = 0; c <= r; ++c) {
            const Mat& blk = rows[k][r][c];
            lead.block(off[r], off[c], blk.rows(), blk.cols()) = blk;
            if (r != c) lead.block(off[c], off[r], blk.cols(), blk.rows()) = blk.transpose();
          }
        lp.psd.push_back(local_schur_constraint(wii, assemble(rowgrid), lead, cname));
      }
      lmi_of.push_back(k);
    }

    for (const auto& c : lp.psd)
      for (const auto& row : c.upper)
        for (const auto& e : row)
          for (int v : e.variables())
            if (!b.vs.at(v).fixed() && b.vs.at(v).owner != i)
              throw Error("decentralized " + b.name + ": variable " + b.vs.at(v).name +
                          " is not local to its step; the system violates the structural assumptions");

    SolveReport rep = solve(lp, b.vs, spec.solver);
    d.newton_steps += rep.newton_steps;
    if (rep.status != SolveStatus::Feasible) {
      d.status = rep.status;
      const std::string cn = rep.failing_constraint >= 0 ? lp.psd[rep.failing_constraint].name : std::string();
      fail(i, cn, "is " + to_string(rep.status) + (rep.note.empty() ? "" : " (" + rep.note + ")"));
      return d;
    }
    for (int v = 0; v < b.vs.count(); ++v) {
      auto& var = b.vs.at(v);
      if (var.owner == i && !var.fixed()) b.vs.set_value(v, Mat::Zero(var.rows, var.cols));
    }

    double margin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < nl; ++k) {
      const NetLmi& W = b.lmis[k];
      std::vector<Mat> wrow(i + 1);
      for (int j = 0; j <= i; ++j) wrow[j] = W.bew_block(i, j).eval(b.vs);
      wrow[i] = sym(wrow[i]);
      rows[k].push_back(wrow);
      const double me = factors[k].push_row(wrow);
      if (W.bew_dim(i) == 0) continue;
      margin = std::min(margin, me);
      if (!factors[k].last_pd()) {
        d.status = SolveStatus::Infeasible;
        fail(i, W.name + "[" + std::to_string(scheme.original_at(i) + 1) + "]",
             "returned a point where W~_ii is not positive definite (min eig " + std::to_string(me) + ")");
        return d;
      }
    }
    d.local_margins[scheme.original_at(i)] = margin;
  }

  for (const auto& f : factors) {
    MessageLog lg = f.log();
    for (auto& m : lg.entries) {
      m.sender = scheme.original_at(m.sender);
      m.receiver = scheme.original_at(m.receiver);
      m.a = scheme.original_at(m.a);
      m.b = scheme.original_at(m.b);
    }
    d.log.append(lg);
  }

  Design r = d;
  try {
    recover(rs, b, true, r);
  } catch (const Error& e) {
    d.feasible = false;
    d.status = SolveStatus::Inaccurate;
    d.message = b.name + ": " + e.what();
    return d;
  }
  auto back = [&](BlockMatrix& m) { m = unpermute(m, scheme); };
  for (BlockMatrix* m : {&r.K, &r.L, &r.Ahat, &r.Bhat, &r.Ac, &r.Bc, &r.Cc, &r.Dc, &r.M, &r.X, &r.Y, &r.Mcov, &r.Ncov})
    back(*m);
  r.P = spec.task == Task::Dof ? unpermute_doubled(r.P, scheme) : unpermute(r.P, scheme);
  r.feasible = true;
  r.status = SolveStatus::Feasible;
  r.message = b.name + ": decentralized sweep succeeded";
  return r;
}

Design synthesize(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr) {
  return spec.mode == Mode::Centralized ? synthesize_centralized(sys, spec, qsr)
                                        : synthesize_decentralized(sys, spec, qsr);
}

ClosedLoop closed_loop(const NetworkedSystem& s, const Design& d) {
  const Mat &A = s.A.dense(), &B = s.B.dense(), &C = s.C.dense(), &D = s.D.dense();
  switch (d.task) {
    case Task::Analyze:
      if (d.property == Property::Stabilizability) return {A + B * d.K.dense(), B, C + D * d.K.dense(), D};
      if (d.property == Property::Detectability) return {A - d.L.dense() * C, B - d.L.dense() * D, C, D};
      return {A, B, C, D};
    case Task::Fsf:
      return {A + B * d.K.dense(), s.E.dense(), C + D * d.K.dense(), s.F.dense()};
    case Task::Observer:
      return {A - d.L.dense() * C, s.E.dense() - d.L.dense() * s.F.dense(), s.G.dense(), s.J.dense()};
    case Task::Dof:
      return dof_closed_loop(plant_of(s), {d.Ac.dense(), d.Bc.dense(), d.Cc.dense(), d.Dc.dense()});
  }
  return {};
}

std::vector<Mat> analysis_matrices(Domain dom, Property prop, const ClosedLoop& cl, const Mat& p,
                                   const std::optional<QsrSpec>& qsr, std::optional<double> gamma) {
  const Mat &A = cl.A, &B = cl.B, &C = cl.C, &D = cl.D;
  const bool ct = dom == Domain::CT;
  std::vector<Mat> out{sym(p)};
  const int n = static_cast<int>(A.rows()), nw = static_cast<int>(B.cols()), nz = static_cast<int>(C.rows());
  switch (prop) {
    case Property::Stability:
    case Property::Stabilizability:
    case Property::Detectability:
      out.push_back(ct ? Mat(-A.transpose() * p - p * A) : Mat(p - A.transpose() * p * A));
      break;
    case Property::Qsr: {
      if (!qsr) throw Error("analysis_matrices: qsr property needs a (Q,S,R) specification");
      const Mat &Q = qsr->Q.dense(), &S = qsr->S.dense(), &R = qsr->R.dense();
      const bool qz = is_zero_block(Q, 0.0);
      const Mat mid = D.transpose() * S + S.transpose() * D + R;
      if (ct) {
        const int sz = n + nw + (qz ? 0 : nz);
        Mat w = Mat::Zero(sz, sz);
        w.block(0, 0, n, n) = -A.transpose() * p - p * A;
        w.block(0, n, n, nw) = -p * B + C.transpose() * S;
        w.block(n, n, nw, nw) = mid;
        if (!qz) {
          w.block(0, n + nw, n, nz) = C.transpose();
          w.block(n, n + nw, nw, nz) = D.transpose();
          w.block(n + nw, n + nw, nz, nz) = -Q.inverse();
        }
        out.push_back(Mat(w.selfadjointView<Eigen::Upper>()));
      } else {
        const int sz = n + nw + n + (qz ? 0 : nz);
        Mat w = Mat::Zero(sz, sz);
        w.block(0, 0, n, n) = p;
        w.block(0, n, n, nw) = C.transpose() * S;
        w.block(0, n + nw, n, n) = A.transpose() * p;
        w.block(n, n, nw, nw) = mid;
        w.block(n, n + nw, nw, n) = B.transpose() * p;
        w.block(n + nw, n + nw, n, n) = p;
        if (!qz) {
          w.block(0, 2 * n + nw, n, nz) = C.transpose();
          w.block(n, 2 * n + nw, nw, nz) = D.transpose();
          w.block(2 * n + nw, 2 * n + nw, nz, nz) = -Q.inverse();
        }
        out.push_back(Mat(w.selfadjointView<Eigen::Upper>()));
      }
      break;
    }
    case Property::H2: {
      if (!gamma) throw Error("analysis_matrices: h2 needs gamma");
      const double g2 = *gamma * *gamma;
      if (ct) {
        out.push_back(-A.transpose() * p - p * A - C.transpose() * C);
        Mat t(1, 1);
        t(0, 0) = g2 - (B.transpose() * p * B).trace();
        out.push_back(t);
        Mat dd(1, 1);
        dd(0, 0) = is_zero_block(D, 1e-12) ? 1.0 : -1.0;  // CT H2 is finite only for D = 0
        out.push_back(dd);
      } else {
        out.push_back(p - A.transpose() * p * A - C.transpose() * C);
        Mat t(1, 1);
        t(0, 0) = g2 - (B.transpose() * p * B + D.transpose() * D).trace();
        out.push_back(t);
      }
      break;
    }
    case Property::Hinf: {
      if (!gamma) throw Error("analysis_matrices: hinf needs gamma");
      const double g2 = *gamma * *gamma;
      Mat w(n + nw, n + nw);
      if (ct) {
        w.topLeftCorner(n, n) = -A.transpose() * p - p * A - C.transpose() * C;
        w.topRightCorner(n, nw) = -p * B - C.transpose() * D;
        w.bottomRightCorner(nw, nw) = g2 * Mat::Identity(nw, nw) - D.transpose() * D;
      } else {
        w.topLeftCorner(n, n) = p - A.transpose() * p * A - C.transpose() * C;
        w.topRightCorner(n, nw) = -A.transpose() * p * B - C.transpose() * D;
        w.bottomRightCorner(nw, nw) = g2 * Mat::Identity(nw, nw) - B.transpose() * p * B - D.transpose() * D;
      }
      w.bottomLeftCorner(nw, n) = w.topRightCorner(n, nw).transpose();
      out.push_back(sym(w));
      break;
    }
  }
  return out;
}

Mat dof_storage(const Mat& x, const Mat& y, const Mat& m, const Mat& n) {
  const int k = static_cast<int>(x.rows());
  Mat py = Mat::Zero(2 * k, 2 * k), px = Mat::Zero(2 * k, 2 * k);
  py.topLeftCorner(k, k) = y;
  py.topRightCorner(k, k) = Mat::Identity(k, k);
  py.bottomLeftCorner(k, k) = n.transpose();
  px.topLeftCorner(k, k) = Mat::Identity(k, k);
  px.topRightCorner(k, k) = x;
  px.bottomRightCorner(k, k) = m.transpose();
  // P Pi_y = Pi_x
  Mat p = py.transpose().fullPivLu().solve(px.transpose()).transpose();
  return sym(p);
}

bool matches_pattern(const BlockMatrix& gain, const Topology& topo, double tol) {
  if (gain.n_block_rows() != topo.size() || gain.n_block_cols() != topo.size()) return false;
  for (int i = 0; i < topo.size(); ++i) {
    const auto closed = topo.in_closed(i);
    for (int j = 0; j < topo.size(); ++j)
      if (!closed.count(j) && !is_zero_block(gain.block(i, j), tol)) return false;
  }
  return true;
}

VerifyReport verify_design(const NetworkedSystem& sys, const Design& d, const std::optional<QsrSpec>& qsr,
                           double spectral_margin) {
  VerifyReport r;
  if (!d.feasible) {
    r.notes.push_back("design is not feasible");
    r.spectral_ok = r.certificate_ok = false;
    return r;
  }
  ClosedLoop cl = closed_loop(sys, d);
  const bool ct = sys.domain == Domain::CT;
  r.abscissa = cl.A.rows() ? spectral_abscissa(sys.domain, cl.A) : -std::numeric_limits<double>::infinity();
  r.spectral_ok = ct ? r.abscissa < -spectral_margin : r.abscissa < 1.0 - spectral_margin;
  if (!r.spectral_ok) r.notes.push_back("closed loop is not strictly stable (abscissa " + std::to_string(r.abscissa) + ")");

  if (d.property == Property::Stabilizability || d.property == Property::Detectability) {
    // the proposition's own inequality on the open-loop data
    const Mat &A = sys.A.dense(), &p = d.P.dense();
    const bool st = d.property == Property::Stabilizability;
    const Mat bb = st ? Mat(sys.B.dense() * sys.B.dense().transpose()) : Mat(sys.C.dense().transpose() * sys.C.dense());
    const Mat a = st ? Mat(A.transpose()) : A;  // stabilizability is the dual of detectability
    Mat w;
    if (ct) {
      w = -a.transpose() * p - p * a + bb;
    } else {
      const int n = static_cast<int>(A.rows());
      w.resize(2 * n, 2 * n);
      w << p, p * a, a.transpose() * p, p + bb;
    }
    r.certificate_margin = std::min(min_eig(p), min_eig(w)) / std::max(1.0, inf_norm(w));
    r.certificate_ok = r.certificate_margin > -1e-9;
    return r;
  }

  ClosedLoop probe = cl;
  if (d.certificate_dual) probe = {cl.A.transpose(), cl.C.transpose(), cl.B.transpose(), cl.D.transpose()};
  std::optional<double> g = d.gamma;
  if ((d.property == Property::H2 || d.property == Property::Hinf) && g) *g *= 1.0 + 1e-6;
  auto mats = analysis_matrices(sys.domain, d.property, probe, d.P.dense(), qsr, g);
  r.certificate_margin = std::numeric_limits<double>::infinity();
  for (const auto& m : mats) {
    const double scale = std::max(1.0, inf_norm(m));
    r.certificate_margin = std::min(r.certificate_margin, m.rows() ? min_eig(m) / scale : 1.0);
  }
  r.certificate_ok = r.certificate_margin > -1e-9;
  if (!r.certificate_ok)
    r.notes.push_back("analysis LMI fails at the certificate (relative min eig " + std::to_string(r.certificate_margin) + ")");

  if (d.gamma && (d.property == Property::H2 || d.property == Property::Hinf)) {
    const double og = d.property == Property::H2 ? h2_norm(sys.domain, cl.A, cl.B, cl.C, cl.D)
                                                 : hinf_norm(sys.domain, cl.A, cl.B, cl.C, cl.D);
    r.oracle_gamma = og;
    r.gamma_ok = std::isfinite(og) && og <= 1.02 * *d.gamma + 1e-9;
    if (!r.gamma_ok)
      r.notes.push_back("achieved norm " + std::to_string(og) + " exceeds reported gamma " + std::to_string(*d.gamma));
  }

  if (d.mode == Mode::Decentralized) {
    const Topology topo = derive_topology(sys);
    std::vector<const BlockMatrix*> gains;
    if (d.task == Task::Fsf || d.property == Property::Stabilizability) gains.push_back(&d.K);
    if (d.task == Task::Observer || d.property == Property::Detectability) gains = {&d.L, &d.Ahat};
    if (d.task == Task::Dof) gains = {&d.Ac, &d.Bc, &d.Cc, &d.Dc};
    for (const auto* gm : gains)
      if (!matches_pattern(*gm, topo, 0.0)) {
        r.structure_ok = false;
        r.notes.push_back("a design block outside the coupling pattern is nonzero");
        break;
      }
  }
  return r;
}

}  // namespace netlmi
