#include "netlmi/system.hpp"

namespace netlmi {

NetworkedSystem NetworkedSystem::zeros(Domain d, Dims n, Dims p, Dims q, Dims m, Dims l) {
  NetworkedSystem s;
  s.domain = d;
  s.n = std::move(n);
  s.p = std::move(p);
  s.q = std::move(q);
  s.m = std::move(m);
  s.l = std::move(l);
  for (char c : kParamNames) {
    auto [r, cc] = s.param_dims(c);
    s.param(c) = BlockMatrix(r, cc);
  }
  s.validate();
  return s;
}

std::pair<Dims, Dims> NetworkedSystem::param_dims(char name) const {
  switch (name) {
    case 'A': return {n, n};
    case 'B': return {n, p};
    case 'C': return {m, n};
    case 'D': return {m, p};
    case 'E': return {n, q};
    case 'F': return {m, q};
    case 'G': return {l, n};
    case 'H': return {l, p};
    case 'J': return {l, q};
  }
  throw Error(std::string("unknown parameter matrix: ") + name);
}

BlockMatrix& NetworkedSystem::param(char name) {
  switch (name) {
    case 'A': return A;
    case 'B': return B;
    case 'C': return C;
    case 'D': return D;
    case 'E': return E;
    case 'F': return F;
    case 'G': return G;
    case 'H': return H;
    case 'J': return J;
  }
  throw Error(std::string("unknown parameter matrix: ") + name);
}

const BlockMatrix& NetworkedSystem::param(char name) const {
  return const_cast<NetworkedSystem*>(this)->param(name);
}

void NetworkedSystem::validate() const {
  const size_t N = n.size();
  if (p.size() != N || q.size() != N || m.size() != N || l.size() != N)
    throw Error("system: dimension tables have different subsystem counts");
  for (char c : kParamNames) {
    auto [r, cc] = param_dims(c);
    const auto& b = param(c);
    if (b.row_dims() != r || b.col_dims() != cc)
      throw Error(std::string("system: dimension mismatch in block matrix ") + c);
  }
}

bool NetworkedSystem::operator==(const NetworkedSystem& o) const {
  if (domain != o.domain || n != o.n || p != o.p || q != o.q || m != o.m || l != o.l) return false;
  for (char c : kParamNames)
    if (param(c).dense() != o.param(c).dense()) return false;
  return true;
}

}  // namespace netlmi

namespace netlmi {

NetworkedSystem five_subsystem_example() {
  NetworkedSystem s = NetworkedSystem::zeros(Domain::CT, Dims(5, 2), Dims(5, 1), Dims(5, 1), Dims(5, 1), Dims(5, 1));
  auto m2 = [](double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); };
  auto v2 = [](double a, double b) { return (Mat(2, 1) << a, b).finished(); };
  auto r2 = [](double a, double b) { return (Mat(1, 2) << a, b).finished(); };
  auto s1 = [](double a) { return Mat::Constant(1, 1, a); };

  s.A.set_block(0, 0, m2(0.198, 3.412, -3.412, 0.198));
  s.A.set_block(0, 1, m2(-0.114, -0.038, -0.038, -0.073));
  s.A.set_block(0, 3, m2(-0.060, -1.032, 1.032, -0.060));
  s.A.set_block(1, 0, m2(-0.000, -0.001, -0.001, -0.194));
  s.A.set_block(1, 1, m2(1.547, 3.164, -3.164, 1.547));
  s.A.set_block(1, 3, m2(-0.258, -0.008, -0.008, -0.204));
  s.A.set_block(2, 0, m2(-0.232, -0.070, -0.070, -0.158));
  s.A.set_block(2, 1, m2(-0.096, -0.062, -0.062, -0.085));
  s.A.set_block(2, 2, m2(10.791, 5.354, 5.354, 3.134));
  s.A.set_block(2, 3, m2(-0.074, -0.384, 0.384, -0.074));
  s.A.set_block(3, 0, m2(-0.180, -0.066, -0.066, -0.078));
  s.A.set_block(3, 3, m2(1.669, 2.302, 2.302, 3.175));
  s.A.set_block(4, 3, m2(-0.059, 0.033, 0.033, -0.057));
  s.A.set_block(4, 4, m2(0.058, 0.250, 0.250, 1.074));

  s.B.set_block(0, 0, v2(0.000, 0.905));
  s.B.set_block(1, 1, v2(-0.902, 0.000));
  s.B.set_block(2, 2, v2(-0.324, -1.406));
  s.B.set_block(3, 3, v2(0.000, 0.998));
  s.B.set_block(4, 4, v2(0.870, -1.461));

  s.E.set_block(0, 0, v2(0.000, -0.013));
  s.E.set_block(0, 1, v2(0.000, 0.003));
  s.E.set_block(0, 3, v2(-0.001, 0.006));
  s.E.set_block(1, 0, v2(-0.004, -0.010));
  s.E.set_block(1, 1, v2(-0.000, 0.021));
  s.E.set_block(1, 3, v2(0.003, 0.002));
  s.E.set_block(2, 0, v2(0.000, -0.007));
  s.E.set_block(2, 1, v2(-0.002, -0.004));
  s.E.set_block(2, 2, v2(0.000, -0.008));
  s.E.set_block(2, 3, v2(-0.003, -0.001));
  s.E.set_block(3, 0, v2(-0.006, 0.003));
  s.E.set_block(3, 3, v2(-0.018, 0.008));
  s.E.set_block(4, 3, v2(-0.001, -0.004));
  s.E.set_block(4, 4, v2(-0.006, -0.000));

  s.C.set_block(0, 0, r2(1.114, -2.429));
  s.C.set_block(1, 1, r2(0.000, 1.062));
  s.C.set_block(2, 2, r2(1.052, 0.759));
  s.C.set_block(3, 3, r2(0.629, 0.000));
  s.C.set_block(4, 4, r2(-0.552, -0.750));

  s.F.set_block(1, 1, s1(0.002));
  s.F.set_block(2, 2, s1(-0.011));

  for (int i = 0; i < 5; ++i) {
    s.G.set_block(i, i, r2(1.0, 1.0));
    s.H.set_block(i, i, s1(1.0));
    s.J.set_block(i, i, s1(1.0));
  }
  s.validate();
  return s;
}

}  // namespace netlmi
