#pragma once

// Network LMI programs for every (task, property, domain) combination.

#include <optional>

#include "netlmi/synthesis.hpp"
#include "synthesis_expr.hpp"

namespace netlmi::detail {

enum class GammaKind { None, Direct, Sqrt };

struct Built {
  VarSpace vs;
  std::string name;
  std::vector<NetLmi> lmis;
  std::vector<SymLmi> extra;           // scalar side constraints (centralized only)
  std::vector<AffineExpr> equalities;
  std::optional<AffineExpr> objective;
  GammaKind gamma_kind = GammaKind::None;
  int gamma_var = -1;
  std::optional<NetVar> P, M, L, K, X, Y, An, Bn, Cn, Dn, Qv;
};

// topo == nullptr: dense centralized variables; otherwise per-block variables following topo.
Built build(const NetworkedSystem& s, Task task, Property prop, const Topology* topo,
            const std::optional<QsrSpec>& qsr);

}  // namespace netlmi::detail
