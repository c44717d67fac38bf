#include "synthesis_expr.hpp"

namespace netlmi::detail {

NetExpr::NetExpr(Dims r, Dims c) : rd(std::move(r)), cd(std::move(c)) {
  g.resize(rd.size());
  for (size_t i = 0; i < rd.size(); ++i)
    for (size_t j = 0; j < cd.size(); ++j) g[i].push_back(AffineExpr::zero(rd[i], cd[j]));
}

NetExpr constant(const BlockMatrix& m) {
  NetExpr e(m.row_dims(), m.col_dims());
  for (int i = 0; i < e.n(); ++i)
    for (size_t j = 0; j < e.cd.size(); ++j) e.g[i][j] = AffineExpr::constant(m.block(i, j));
  return e;
}

NetExpr identity(const Dims& d) { return constant(BlockMatrix::identity(d)); }

NetExpr zero(const Dims& r, const Dims& c) { return NetExpr(r, c); }

NetExpr scalar_identity(const VarSpace& vs, int var, const Dims& d) {
  NetExpr e(d, d);
  for (size_t i = 0; i < d.size(); ++i) e.g[i][i] = AffineExpr::scaled(vs, var, Mat::Identity(d[i], d[i]));
  return e;
}

namespace {

void check_same(const NetExpr& a, const NetExpr& b) {
  if (a.rd != b.rd || a.cd != b.cd) throw Error("network expression: block structure mismatch");
}

}  // namespace

NetExpr operator+(const NetExpr& a, const NetExpr& b) {
  check_same(a, b);
  NetExpr r = a;
  for (size_t i = 0; i < a.rd.size(); ++i)
    for (size_t j = 0; j < a.cd.size(); ++j)
      if (!b.g[i][j].is_zero()) r.g[i][j] += b.g[i][j];
  return r;
}

NetExpr operator-(const NetExpr& a) {
  NetExpr r = a;
  for (auto& row : r.g)
    for (auto& e : row)
      if (!e.is_zero()) e = -e;
  return r;
}

NetExpr operator-(const NetExpr& a, const NetExpr& b) { return a + (-b); }

NetExpr operator*(const BlockMatrix& a, const NetExpr& x) {
  if (a.col_dims() != x.rd) throw Error("network expression: product dimension mismatch");
  NetExpr r(a.row_dims(), x.cd);
  for (int i = 0; i < a.n_block_rows(); ++i)
    for (size_t j = 0; j < x.cd.size(); ++j)
      for (int k = 0; k < a.n_block_cols(); ++k) {
        if (x.g[k][j].is_zero() || is_zero_block(a.block(i, k), 0.0)) continue;
        r.g[i][j] += Mat(a.block(i, k)) * x.g[k][j];
      }
  return r;
}

NetExpr operator*(const NetExpr& x, const BlockMatrix& a) {
  if (a.row_dims() != x.cd) throw Error("network expression: product dimension mismatch");
  NetExpr r(x.rd, a.col_dims());
  for (size_t i = 0; i < x.rd.size(); ++i)
    for (int j = 0; j < a.n_block_cols(); ++j)
      for (int k = 0; k < a.n_block_rows(); ++k) {
        if (x.g[i][k].is_zero() || is_zero_block(a.block(k, j), 0.0)) continue;
        r.g[i][j] += x.g[i][k] * Mat(a.block(k, j));
      }
  return r;
}

NetExpr operator+(const NetExpr& a, const BlockMatrix& b) { return a + constant(b); }
NetExpr operator+(const BlockMatrix& a, const NetExpr& b) { return constant(a) + b; }
NetExpr operator-(const BlockMatrix& a, const NetExpr& b) { return constant(a) - b; }
NetExpr operator-(const NetExpr& a, const BlockMatrix& b) { return a - constant(b); }

NetExpr tr(const NetExpr& x) {
  NetExpr r(x.cd, x.rd);
  for (size_t i = 0; i < x.rd.size(); ++i)
    for (size_t j = 0; j < x.cd.size(); ++j) r.g[j][i] = x.g[i][j].transpose();
  return r;
}

NetExpr hs(const NetExpr& x) { return x + tr(x); }

NetExpr NetVar::expr(const VarSpace& vs) const {
  NetExpr e(rd, cd);
  if (full >= 0) {
    auto v = AffineExpr::variable(vs, full);
    auto ro = offsets(rd), co = offsets(cd);
    const int nr = ro.back(), nc = co.back();
    for (size_t i = 0; i < rd.size(); ++i)
      for (size_t j = 0; j < cd.size(); ++j) {
        if (rd[i] == 0 || cd[j] == 0) continue;
        Mat sl = Mat::Zero(rd[i], nr), sr = Mat::Zero(nc, cd[j]);
        sl.middleCols(ro[i], rd[i]).setIdentity();
        sr.middleRows(co[j], cd[j]).setIdentity();
        e.g[i][j] = sl * v * sr;
      }
    return e;
  }
  for (size_t i = 0; i < rd.size(); ++i)
    for (size_t j = 0; j < cd.size(); ++j) {
      if (ids[i][j] >= 0) {
        e.g[i][j] = AffineExpr::variable(vs, ids[i][j]);
      } else if (symmetric && ids[j][i] >= 0 && i != j) {
        e.g[i][j] = AffineExpr::variable(vs, ids[j][i]).transpose();
      }
    }
  return e;
}

BlockMatrix NetVar::value(const VarSpace& vs) const {
  if (full >= 0) return BlockMatrix(rd, cd, vs.value(full));
  BlockMatrix b(rd, cd);
  for (size_t i = 0; i < rd.size(); ++i)
    for (size_t j = 0; j < cd.size(); ++j) {
      if (ids[i][j] >= 0)
        b.set_block(static_cast<int>(i), static_cast<int>(j), vs.value(ids[i][j]));
      else if (symmetric && i != j && ids[j][i] >= 0)
        b.set_block(static_cast<int>(i), static_cast<int>(j), vs.value(ids[j][i]).transpose());
    }
  return b;
}

NetVar make_var(VarSpace& vs, const std::string& name, const Dims& rd, const Dims& cd, bool symmetric,
                Pattern pattern, const Topology* topo) {
  NetVar v;
  v.rd = rd;
  v.cd = cd;
  v.symmetric = symmetric;
  if (!topo) {
    v.full = vs.add(name, dims_sum(rd), dims_sum(cd), symmetric);
    return v;
  }
  const int n = static_cast<int>(rd.size());
  v.ids.assign(n, std::vector<int>(cd.size(), -1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < static_cast<int>(cd.size()); ++j) {
      const bool on = pattern == Pattern::Diagonal ? i == j : (i == j || topo->has_in(i, j));
      if (!on || rd[i] == 0 || cd[j] == 0) continue;
      const std::string nm = name + "_" + std::to_string(i + 1) + std::to_string(j + 1);
      v.ids[i][j] = vs.add(nm, rd[i], cd[j], symmetric && i == j, std::max(i, j));
    }
  return v;
}

NetLmi::NetLmi(std::string nm, std::vector<Dims> d) : name(std::move(nm)), dims(std::move(d)) {
  const int k = static_cast<int>(dims.size());
  psi.resize(k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) psi[a].push_back(zero(dims[a], dims[b]));
}

void NetLmi::set(int k, int l, const NetExpr& e) {
  if (k > l) {
    set(l, k, tr(e));
    return;
  }
  if (e.rd != dims[k] || e.cd != dims[l])
    throw Error("LMI " + name + ": block (" + std::to_string(k + 1) + "," + std::to_string(l + 1) +
                ") has inconsistent dimensions");
  psi[k][l] = e;
}

void NetLmi::drop_part(int k) {
  dims.erase(dims.begin() + k);
  psi.erase(psi.begin() + k);
  for (auto& row : psi) row.erase(row.begin() + k);
}

SymLmi NetLmi::flatten() const {
  Dims all;
  for (const auto& d : dims) all.insert(all.end(), d.begin(), d.end());
  SymLmi s(all, name);
  const int k = parts();
  int ra = 0;
  for (int a = 0; a < k; ++a) {
    const int n = static_cast<int>(dims[a].size());
    int cb = 0;
    for (int b = 0; b < k; ++b) {
      const int m = static_cast<int>(dims[b].size());
      if (b >= a)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < m; ++j)
            if (ra + i <= cb + j) s.upper[ra + i][cb + j] = psi[a][b].g[i][j];
      cb += m;
    }
    ra += n;
  }
  return s;
}

int NetLmi::bew_dim(int i) const {
  int s = 0;
  for (const auto& d : dims) s += d[i];
  return s;
}

AffineExpr NetLmi::bew_block(int i, int j) const {
  const int k = parts();
  ExprGrid grid(k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      if (a <= b)
        grid[a].push_back(psi[a][b].g[i][j]);
      else
        grid[a].push_back(psi[b][a].g[j][i].transpose());
    }
  return assemble(grid);
}

}  // namespace netlmi::detail
