#pragma once

#include <utility>

#include "netlmi/common.hpp"
#include "netlmi/netmat.hpp"
#include "netlmi/topology.hpp"

namespace netlmi {

// x' = Ax + Bu + Ew,  y = Cx + Du + Fw,  z = Gx + Hu + Jw
struct NetworkedSystem {
  Domain domain = Domain::CT;
  Dims n, p, q, m, l;  // state, input, noise, output, performance dims per subsystem
  BlockMatrix A, B, C, D, E, F, G, H, J;

  int size() const { return static_cast<int>(n.size()); }
  static NetworkedSystem zeros(Domain d, Dims n, Dims p, Dims q, Dims m, Dims l);
  void validate() const;

  BlockMatrix& param(char name);
  const BlockMatrix& param(char name) const;
  // block row/column dimension vectors of a named parameter
  std::pair<Dims, Dims> param_dims(char name) const;

  bool operator==(const NetworkedSystem& o) const;
};

// Five coupled two-state subsystems (unstable open loop) used as the reference example.
NetworkedSystem five_subsystem_example();

inline constexpr char kParamNames[] = {'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'J'};

}  // namespace netlmi
