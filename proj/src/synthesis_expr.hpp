#pragma once

// Grids of affine expressions indexed by subsystem pairs, used to state network LMIs.

#include "netlmi/lmi.hpp"
#include "netlmi/netmat.hpp"
#include "netlmi/topology.hpp"

namespace netlmi::detail {

struct NetExpr {
  Dims rd, cd;
  std::vector<std::vector<AffineExpr>> g;

  NetExpr() = default;
  NetExpr(Dims r, Dims c);
  int n() const { return static_cast<int>(rd.size()); }
};

NetExpr constant(const BlockMatrix& m);
NetExpr identity(const Dims& d);
NetExpr zero(const Dims& r, const Dims& c);
NetExpr scalar_identity(const VarSpace& vs, int var, const Dims& d);
NetExpr operator+(const NetExpr& a, const NetExpr& b);
NetExpr operator-(const NetExpr& a, const NetExpr& b);
NetExpr operator-(const NetExpr& a);
NetExpr operator*(const BlockMatrix& a, const NetExpr& x);
NetExpr operator*(const NetExpr& x, const BlockMatrix& a);
NetExpr operator+(const NetExpr& a, const BlockMatrix& b);
NetExpr operator+(const BlockMatrix& a, const NetExpr& b);
NetExpr operator-(const BlockMatrix& a, const NetExpr& b);
NetExpr operator-(const NetExpr& a, const BlockMatrix& b);
NetExpr tr(const NetExpr& x);
NetExpr hs(const NetExpr& x);

// A structured matrix variable split into subsystem blocks.
struct NetVar {
  Dims rd, cd;
  bool symmetric = false;
  int full = -1;                       // centralized: one dense variable
  std::vector<std::vector<int>> ids;   // decentralized: per-block variables (-1 = structurally zero)

  NetExpr expr(const VarSpace& vs) const;
  BlockMatrix value(const VarSpace& vs) const;
};

enum class Pattern { Diagonal, InClosed };

NetVar make_var(VarSpace& vs, const std::string& name, const Dims& rd, const Dims& cd, bool symmetric,
                Pattern pattern, const Topology* topo);  // topo == nullptr: centralized dense variable

// Symmetric grid of network expressions: psi[k][l] for k <= l.
struct NetLmi {
  std::string name;
  std::vector<Dims> dims;
  std::vector<std::vector<NetExpr>> psi;

  explicit NetLmi(std::string nm, std::vector<Dims> d);
  void set(int k, int l, const NetExpr& e);
  void drop_part(int k);
  int parts() const { return static_cast<int>(dims.size()); }
  SymLmi flatten() const;
  // BEW block (i, j) as a single affine expression
  AffineExpr bew_block(int i, int j) const;
  int bew_dim(int i) const;
};

}  // namespace netlmi::detail
