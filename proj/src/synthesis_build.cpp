#include "synthesis_build.hpp"

namespace netlmi::detail {

namespace {

bool q_zero(const QsrSpec& qsr) { return is_zero_block(qsr.Q.dense(), 0.0); }

// -Q^-1, or zero when Q = 0 (the corresponding part is then dropped)
BlockMatrix neg_inv_q(const QsrSpec& qsr) {
  if (q_zero(qsr)) return BlockMatrix(qsr.Q.row_dims(), qsr.Q.col_dims());
  Mat q = qsr.Q.dense();
  return BlockMatrix(qsr.Q.row_dims(), qsr.Q.col_dims(), Mat(-q.inverse()));
}

BlockMatrix tp(const BlockMatrix& m) { return transpose(m); }

}  // namespace

Built build(const NetworkedSystem& s, Task task, Property prop, const Topology* topo,
            const std::optional<QsrSpec>& qsr) {
  Built b;
  auto& vs = b.vs;
  const bool ct = s.domain == Domain::CT;
  const Dims &n = s.n, &p = s.p, &q = s.q, &m = s.m, &l = s.l;
  const auto &A = s.A, &B = s.B, &C = s.C, &D = s.D, &E = s.E, &F = s.F, &G = s.G, &H = s.H, &J = s.J;

  auto need_qsr = [&]() -> const QsrSpec& {
    if (!qsr) throw Error("a (Q,S,R) specification is required for the qsr property");
    return *qsr;
  };
  auto add_gamma = [&](bool squared) {
    b.gamma_var = vs.add_scalar("gamma");
    b.objective = AffineExpr::variable(vs, b.gamma_var);
    b.gamma_kind = squared ? GammaKind::Sqrt : GammaKind::Direct;
  };
  auto gI = [&](const Dims& d) { return scalar_identity(vs, b.gamma_var, d); };
  auto add_trace_aux = [&](const Dims& d) {
    b.Qv = make_var(vs, "Q", d, d, true, Pattern::Diagonal, nullptr);
    b.extra.push_back(SymLmi::single(AffineExpr::variable(vs, b.gamma_var) - trace(AffineExpr::variable(vs, b.Qv->full)),
                                     "trace"));
    return b.Qv->expr(vs);
  };
  auto pos = [&](const std::string& nm, const NetExpr& e, const Dims& d) {
    NetLmi L(nm, {d});
    L.set(0, 0, e);
    b.lmis.push_back(std::move(L));
  };
  auto unsupported = [&]() -> Built {
    throw Error("unsupported combination: " + to_string(task) + " / " + to_string(prop) + " / " + to_string(s.domain));
  };

  switch (task) {
    case Task::Analyze: {
      b.P = make_var(vs, "P", n, n, true, Pattern::Diagonal, topo);
      const NetExpr P = b.P->expr(vs);
      pos("P", P, n);
      if (prop == Property::Stability) {
        b.name = ct ? "CT stability (Lyapunov)" : "DT stability (Stein)";
        if (ct) {
          pos("W", -(tp(A) * P) - P * A, n);
        } else {
          NetLmi W("W", {n, n});
          W.set(0, 0, P);
          W.set(0, 1, tp(A) * P);
          W.set(1, 1, P);
          b.lmis.push_back(W);
        }
      } else if (prop == Property::Qsr) {
        const auto& Q = need_qsr();
        b.name = ct ? "CT (Q,S,R)-dissipativity u->y" : "DT (Q,S,R)-dissipativity u->y";
        if (ct) {
          NetLmi W("W", {n, p, m});
          W.set(0, 0, -(tp(A) * P) - P * A);
          W.set(0, 1, -(P * B) + constant(multiply(tp(C), Q.S)));
          W.set(0, 2, constant(tp(C)));
          W.set(1, 1, constant(axpy(1.0, multiply(tp(D), Q.S), 1.0, axpy(1.0, multiply(tp(Q.S), D), 1.0, Q.R))));
          W.set(1, 2, constant(tp(D)));
          W.set(2, 2, constant(neg_inv_q(Q)));
          if (q_zero(Q)) W.drop_part(2);
          b.lmis.push_back(W);
        } else {
          NetLmi W("W", {n, p, n, m});
          W.set(0, 0, P);
          W.set(0, 1, constant(multiply(tp(C), Q.S)));
          W.set(0, 2, tp(A) * P);
          W.set(0, 3, constant(tp(C)));
          W.set(1, 1, constant(axpy(1.0, multiply(tp(D), Q.S), 1.0, axpy(1.0, multiply(tp(Q.S), D), 1.0, Q.R))));
          W.set(1, 2, tp(B) * P);
          W.set(1, 3, constant(tp(D)));
          W.set(2, 2, P);
          W.set(3, 3, constant(neg_inv_q(Q)));
          if (q_zero(Q)) W.drop_part(3);
          b.lmis.push_back(W);
        }
      } else if (prop == Property::H2) {
        b.name = ct ? "CT H2 norm" : "DT H2 norm";
        add_gamma(!ct);
        if (ct) {
          NetLmi W1("W1", {n, m});
          W1.set(0, 0, -(A * P) - P * tp(A));
          W1.set(0, 1, -(P * tp(C)));
          W1.set(1, 1, gI(m));
          NetLmi W2("W2", {n, p});
          W2.set(0, 0, P);
          W2.set(0, 1, constant(B));
          W2.set(1, 1, add_trace_aux(p));
          b.lmis.push_back(W1);
          b.lmis.push_back(W2);
        } else {
          NetLmi W1("W1", {n, n, p});
          W1.set(0, 0, P);
          W1.set(0, 1, A * P);
          W1.set(0, 2, constant(B));
          W1.set(1, 1, P);
          W1.set(2, 2, identity(p));
          NetLmi W2("W2", {m, n, p});
          W2.set(0, 0, add_trace_aux(m));
          W2.set(0, 1, C * P);
          W2.set(0, 2, constant(D));
          W2.set(1, 1, P);
          W2.set(2, 2, identity(p));
          b.lmis.push_back(W1);
          b.lmis.push_back(W2);
        }
      } else if (prop == Property::Hinf) {
        b.name = ct ? "CT H-infinity norm" : "DT H-infinity norm";
        add_gamma(false);
        if (ct) {
          NetLmi W("W", {n, p, m});
          W.set(0, 0, -(tp(A) * P) - P * A);
          W.set(0, 1, -(P * B));
          W.set(0, 2, -constant(tp(C)));
          W.set(1, 1, gI(p));
          W.set(1, 2, -constant(tp(D)));
          W.set(2, 2, gI(m));
          b.lmis.push_back(W);
        } else {
          NetLmi W("W", {n, n, p, m});
          W.set(0, 0, P);
          W.set(0, 1, P * A);
          W.set(0, 2, P * B);
          W.set(1, 1, P);
          W.set(1, 3, constant(tp(C)));
          W.set(2, 2, gI(p));
          W.set(2, 3, constant(tp(D)));
          W.set(3, 3, gI(m));
          b.lmis.push_back(W);
        }
      } else if (prop == Property::Stabilizability) {
        b.name = ct ? "CT stabilizability" : "DT stabilizability";
        const BlockMatrix bbt = multiply(B, tp(B));
        if (ct) {
          pos("W", -(A * P) - P * tp(A) + bbt, n);
        } else {
          NetLmi W("W", {n, n});
          W.set(0, 0, P);
          W.set(0, 1, P * tp(A));
          W.set(1, 1, P + bbt);
          b.lmis.push_back(W);
        }
      } else {
        b.name = ct ? "CT detectability" : "DT detectability";
        const BlockMatrix ctc = multiply(tp(C), C);
        if (ct) {
          pos("W", -(tp(A) * P) - P * A + ctc, n);
        } else {
          NetLmi W("W", {n, n});
          W.set(0, 0, P);
          W.set(0, 1, P * A);
          W.set(1, 1, P + ctc);
          b.lmis.push_back(W);
        }
      }
      break;
    }

    case Task::Fsf: {
      b.M = make_var(vs, "M", n, n, true, Pattern::Diagonal, topo);
      b.L = make_var(vs, "L", p, n, false, Pattern::InClosed, topo);
      const NetExpr M = b.M->expr(vs), L = b.L->expr(vs);
      pos("M", M, n);
      const NetExpr AM_BL = A * M + B * L;
      if (prop == Property::Stability) {
        b.name = ct ? "CT FSF stabilization" : "DT FSF stabilization";
        if (ct) {
          pos("W", -hs(AM_BL), n);
        } else {
          NetLmi W("W", {n, n});
          W.set(0, 0, M);
          W.set(0, 1, tr(AM_BL));
          W.set(1, 1, M);
          b.lmis.push_back(W);
        }
      } else if (prop == Property::Qsr) {
        const auto& Q = need_qsr();
        b.name = ct ? "CT FSF (Q,S,R)-dissipativation w->y" : "DT FSF (Q,S,R)-dissipativation w->y";
        const NetExpr MCt = M * tp(C);
        const BlockMatrix fs = multiply(tp(F), Q.S);
        const BlockMatrix hfs_r = axpy(1.0, axpy(1.0, fs, 1.0, tp(fs)), 1.0, Q.R);
        if (ct) {
          NetLmi W("W", {n, q, m});
          W.set(0, 0, -hs(AM_BL));
          W.set(0, 1, MCt * Q.S - E);
          W.set(0, 2, MCt);
          W.set(1, 1, constant(hfs_r));
          W.set(1, 2, constant(tp(F)));
          W.set(2, 2, constant(neg_inv_q(Q)));
          if (q_zero(Q)) W.drop_part(2);
          b.lmis.push_back(W);
        } else {
          NetLmi W("W", {n, q, n, m});
          W.set(0, 0, M);
          W.set(0, 1, MCt * Q.S);
          W.set(0, 2, tr(AM_BL));
          W.set(0, 3, MCt);
          W.set(1, 1, constant(hfs_r));
          W.set(1, 2, constant(tp(E)));
          W.set(1, 3, constant(tp(F)));
          W.set(2, 2, M);
          W.set(3, 3, constant(neg_inv_q(Q)));
          if (q_zero(Q)) W.drop_part(3);
          b.lmis.push_back(W);
        }
      } else if (prop == Property::H2) {
        b.name = ct ? "CT H2-optimal FSF" : "DT H2-optimal FSF";
        add_gamma(!ct);
        const NetExpr CM_DL = C * M + D * L;
        if (ct) {
          NetLmi W1("W1", {n, m});
          W1.set(0, 0, -hs(AM_BL));
          W1.set(0, 1, -tr(CM_DL));
          W1.set(1, 1, gI(m));
          NetLmi W2("W2", {n, q});
          W2.set(0, 0, M);
          W2.set(0, 1, constant(E));
          W2.set(1, 1, add_trace_aux(q));
          b.lmis.push_back(W1);
          b.lmis.push_back(W2);
        } else {
          NetLmi W1("W1", {n, n, q});
          W1.set(0, 0, M);
          W1.set(0, 1, AM_BL);
          W1.set(0, 2, constant(E));
          W1.set(1, 1, M);
          W1.set(2, 2, identity(q));
          NetLmi W2("W2", {m, n, q});
          W2.set(0, 0, add_trace_aux(m));
          W2.set(0, 1, CM_DL);
          W2.set(0, 2, constant(F));
          W2.set(1, 1, M);
          W2.set(2, 2, identity(q));
          b.lmis.push_back(W1);
          b.lmis.push_back(W2);
        }
      } else if (prop == Property::Hinf) {
        b.name = ct ? "CT H-infinity-optimal FSF" : "DT H-infinity-optimal FSF";
        add_gamma(false);
        const NetExpr CM_DL = C * M + D * L;
        if (ct) {
          NetLmi W("W", {n, q, m});
          W.set(0, 0, -hs(AM_BL));
          W.set(0, 1, -constant(E));
          W.set(0, 2, -tr(CM_DL));
          W.set(1, 1, gI(q));
          W.set(1, 2, -constant(tp(F)));
          W.set(2, 2, gI(m));
          b.lmis.push_back(W);
        } else {
          NetLmi W("W", {n, n, q, m});
          W.set(0, 0, M);
          W.set(0, 1, AM_BL);
          W.set(0, 2, constant(E));
          W.set(1, 1, M);
          W.set(1, 3, tr(CM_DL));
          W.set(2, 2, gI(q));
          W.set(2, 3, constant(tp(F)));
          W.set(3, 3, gI(m));
          b.lmis.push_back(W);
        }
      } else {
        return unsupported();
      }
      break;
    }

    case Task::Observer: {
      b.P = make_var(vs, "P", n, n, true, Pattern::Diagonal, topo);
      b.K = make_var(vs, "K", n, m, false, Pattern::InClosed, topo);
      const NetExpr P = b.P->expr(vs), K = b.K->expr(vs);
      pos("P", P, n);
      const NetExpr PA_KC = P * A - K * C;
      const NetExpr PE_KF = P * E - K * F;
      if (prop == Property::Stability) {
        b.name = ct ? "CT stable observer" : "DT stable observer";
        if (ct) {
          pos("W", -hs(PA_KC), n);
        } else {
          NetLmi W("W", {n, n});
          W.set(0, 0, P);
          W.set(0, 1, tr(PA_KC));
          W.set(1, 1, P);
          b.lmis.push_back(W);
        }
      } else if (prop == Property::Qsr) {
        const auto& Q = need_qsr();
        b.name = ct ? "CT (Q,S,R)-dissipative observer w->z" : "DT (Q,S,R)-dissipative observer w->z";
        const BlockMatrix js = multiply(tp(J), Q.S);
        const BlockMatrix hjs_r = axpy(1.0, axpy(1.0, js, 1.0, tp(js)), 1.0, Q.R);
        const BlockMatrix gts = multiply(tp(G), Q.S);
        if (ct) {
          NetLmi W("W", {n, q, l});
          W.set(0, 0, -hs(PA_KC));
          W.set(0, 1, gts - PE_KF);
          W.set(0, 2, constant(tp(G)));
          W.set(1, 1, constant(hjs_r));
          W.set(1, 2, constant(tp(J)));
          W.set(2, 2, constant(neg_inv_q(Q)));
          if (q_zero(Q)) W.drop_part(2);
          b.lmis.push_back(W);
        } else {
          NetLmi W("W", {n, q, n, l});
          W.set(0, 0, P);
          W.set(0, 1, constant(gts));
          W.set(0, 2, tr(PA_KC));
          W.set(0, 3, constant(tp(G)));
          W.set(1, 1, constant(hjs_r));
          W.set(1, 2, tr(PE_KF));
          W.set(1, 3, constant(tp(J)));
          W.set(2, 2, P);
          W.set(3, 3, constant(neg_inv_q(Q)));
          if (q_zero(Q)) W.drop_part(3);
          b.lmis.push_back(W);
        }
      } else if (prop == Property::H2) {
        b.name = ct ? "CT H2-optimal observer" : "DT H2-optimal observer";
        add_gamma(!ct);
        if (ct) {
          NetLmi W1("W1", {n, q});
          W1.set(0, 0, -hs(PA_KC));
          W1.set(0, 1, -PE_KF);
          W1.set(1, 1, gI(q));
          NetLmi W2("W2", {n, l});
          W2.set(0, 0, P);
          W2.set(0, 1, constant(tp(G)));
          W2.set(1, 1, add_trace_aux(l));
          b.lmis.push_back(W1);
          b.lmis.push_back(W2);
        } else {
          NetLmi W1("W1", {n, n, q});
          W1.set(0, 0, P);
          W1.set(0, 1, PA_KC);
          W1.set(0, 2, PE_KF);
          W1.set(1, 1, P);
          W1.set(2, 2, identity(q));
          NetLmi W2("W2", {l, n, q});
          W2.set(0, 0, add_trace_aux(l));
          W2.set(0, 1, constant(G));
          W2.set(0, 2, constant(J));
          W2.set(1, 1, P);
          W2.set(2, 2, identity(q));
          b.lmis.push_back(W1);
          b.lmis.push_back(W2);
        }
      } else if (prop == Property::Hinf) {
        b.name = ct ? "CT H-infinity-optimal observer" : "DT H-infinity-optimal observer";
        add_gamma(false);
        if (ct) {
          NetLmi W("W", {n, q, l});
          W.set(0, 0, -hs(PA_KC));
          W.set(0, 1, -PE_KF);
          W.set(0, 2, -constant(tp(G)));
          W.set(1, 1, gI(q));
          W.set(1, 2, -constant(tp(J)));
          W.set(2, 2, gI(l));
          b.lmis.push_back(W);
        } else {
          NetLmi W("W", {n, n, q, l});
          W.set(0, 0, P);
          W.set(0, 1, PA_KC);
          W.set(0, 2, PE_KF);
          W.set(1, 1, P);
          W.set(1, 3, constant(tp(G)));
          W.set(2, 2, gI(q));
          W.set(2, 3, constant(tp(J)));
          W.set(3, 3, gI(l));
          b.lmis.push_back(W);
        }
      } else {
        return unsupported();
      }
      break;
    }

    case Task::Dof: {
      if (prop != Property::Stability && prop != Property::Qsr && prop != Property::H2 && prop != Property::Hinf)
        return unsupported();
      b.X = make_var(vs, "X", n, n, true, Pattern::Diagonal, topo);
      b.Y = make_var(vs, "Y", n, n, true, Pattern::Diagonal, topo);
      b.An = make_var(vs, "An", n, n, false, Pattern::InClosed, topo);
      b.Bn = make_var(vs, "Bn", n, m, false, Pattern::InClosed, topo);
      b.Cn = make_var(vs, "Cn", p, n, false, Pattern::InClosed, topo);
      b.Dn = make_var(vs, "Dn", p, m, false, Pattern::InClosed, topo);
      const NetExpr X = b.X->expr(vs), Y = b.Y->expr(vs), An = b.An->expr(vs), Bn = b.Bn->expr(vs),
                    Cn = b.Cn->expr(vs), Dn = b.Dn->expr(vs);
      NetLmi W1("W1", {n, n});
      W1.set(0, 0, Y);
      W1.set(0, 1, identity(n));
      W1.set(1, 1, X);
      b.lmis.push_back(W1);

      const NetExpr AY_BCn = A * Y + B * Cn;
      const NetExpr A_BDnC = A + B * Dn * C;
      const NetExpr XA_BnC = X * A + Bn * C;
      const NetExpr E_BDnF = E + B * Dn * F;
      const NetExpr XE_BnF = X * E + Bn * F;
      const NetExpr YG_CnH = Y * tp(G) + tr(Cn) * tp(H);
      const NetExpr G_CDnH = tp(G) + tp(C) * tr(Dn) * tp(H);
      const NetExpr J_FDnH = tp(J) + tp(F) * tr(Dn) * tp(H);

      if (prop == Property::Stability) {
        b.name = ct ? "CT DOF stabilization" : "DT DOF stabilization";
        if (ct) {
          NetLmi W("W2", {n, n});
          W.set(0, 0, -hs(AY_BCn));
          W.set(0, 1, -A_BDnC - tr(An));
          W.set(1, 1, -hs(XA_BnC));
          b.lmis.push_back(W);
        } else {
          NetLmi W("W2", {n, n, n, n});
          W.set(0, 0, Y);
          W.set(0, 1, identity(n));
          W.set(0, 2, tr(AY_BCn));
          W.set(0, 3, tr(An));
          W.set(1, 1, X);
          W.set(1, 2, tr(A_BDnC));
          W.set(1, 3, tr(XA_BnC));
          W.set(2, 2, Y);
          W.set(2, 3, identity(n));
          W.set(3, 3, X);
          b.lmis.push_back(W);
        }
      } else if (prop == Property::Qsr) {
        const auto& Q = need_qsr();
        b.name = ct ? "CT DOF (Q,S,R)-dissipativation w->z" : "DT DOF (Q,S,R)-dissipativation w->z";
        const NetExpr js = J_FDnH * Q.S;
        if (ct) {
          NetLmi W("W2", {n, n, q, l});
          W.set(0, 0, -hs(AY_BCn));
          W.set(0, 1, -A_BDnC - tr(An));
          W.set(0, 2, YG_CnH * Q.S - E_BDnF);
          W.set(0, 3, YG_CnH);
          W.set(1, 1, -hs(XA_BnC));
          W.set(1, 2, G_CDnH * Q.S - XE_BnF);
          W.set(1, 3, G_CDnH);
          W.set(2, 2, hs(js) + Q.R);
          W.set(2, 3, J_FDnH);
          W.set(3, 3, constant(neg_inv_q(Q)));
          if (q_zero(Q)) W.drop_part(3);
          b.lmis.push_back(W);
        } else {
          NetLmi W("W2", {n, n, q, n, n, l});
          W.set(0, 0, Y);
          W.set(0, 1, identity(n));
          W.set(0, 2, YG_CnH * Q.S);
          W.set(0, 3, tr(AY_BCn));
          W.set(0, 4, tr(An));
          W.set(0, 5, YG_CnH);
          W.set(1, 1, X);
          W.set(1, 2, G_CDnH * Q.S);
          W.set(1, 3, tr(A_BDnC));
          W.set(1, 4, tr(XA_BnC));
          W.set(1, 5, G_CDnH);
          W.set(2, 2, hs(js) + Q.R);
          W.set(2, 3, tr(E_BDnF));
          W.set(2, 4, tr(XE_BnF));
          W.set(2, 5, J_FDnH);
          W.set(3, 3, Y);
          W.set(3, 4, identity(n));
          W.set(4, 4, X);
          W.set(5, 5, constant(neg_inv_q(Q)));
          if (q_zero(Q)) W.drop_part(5);
          b.lmis.push_back(W);
        }
      } else if (prop == Property::H2) {
        b.name = ct ? "CT H2-optimal DOF" : "DT H2-optimal DOF";
        add_gamma(true);
        if (ct) {
          NetLmi W2("W2", {n, n, q});
          W2.set(0, 0, -hs(AY_BCn));
          W2.set(0, 1, -A_BDnC - tr(An));
          W2.set(0, 2, -E_BDnF);
          W2.set(1, 1, -hs(XA_BnC));
          W2.set(1, 2, -XE_BnF);
          W2.set(2, 2, identity(q));
          NetLmi W3("W3", {n, n, l});
          W3.set(0, 0, Y);
          W3.set(0, 1, identity(n));
          W3.set(0, 2, YG_CnH);
          W3.set(1, 1, X);
          W3.set(1, 2, G_CDnH);
          W3.set(2, 2, add_trace_aux(l));
          b.lmis.push_back(W2);
          b.lmis.push_back(W3);
          // J + H Dn F = 0
          const NetExpr feed = J + H * Dn * F;
          b.equalities.push_back(assemble(feed.g));
        } else {
          NetLmi W2("W2", {n, n, n, n, l});
          W2.set(0, 0, Y);
          W2.set(0, 1, identity(n));
          W2.set(0, 2, tr(AY_BCn));
          W2.set(0, 3, tr(An));
          W2.set(0, 4, YG_CnH);
          W2.set(1, 1, X);
          W2.set(1, 2, tr(A_BDnC));
          W2.set(1, 3, tr(XA_BnC));
          W2.set(1, 4, G_CDnH);
          W2.set(2, 2, Y);
          W2.set(2, 3, identity(n));
          W2.set(3, 3, X);
          W2.set(4, 4, identity(l));
          NetLmi W3("W3", {q, n, n, l});
          W3.set(0, 0, add_trace_aux(q));
          W3.set(0, 1, tr(E_BDnF));
          W3.set(0, 2, tr(XE_BnF));
          W3.set(0, 3, J_FDnH);
          W3.set(1, 1, Y);
          W3.set(1, 2, identity(n));
          W3.set(2, 2, X);
          W3.set(3, 3, identity(l));
          b.lmis.push_back(W2);
          b.lmis.push_back(W3);
        }
      } else {
        b.name = ct ? "CT H-infinity-optimal DOF" : "DT H-infinity-optimal DOF";
        add_gamma(false);
        if (ct) {
          NetLmi W("W2", {n, n, q, l});
          W.set(0, 0, -hs(AY_BCn));
          W.set(0, 1, -A_BDnC - tr(An));
          W.set(0, 2, -E_BDnF);
          W.set(0, 3, -YG_CnH);
          W.set(1, 1, -hs(XA_BnC));
          W.set(1, 2, -XE_BnF);
          W.set(1, 3, -G_CDnH);
          W.set(2, 2, gI(q));
          W.set(2, 3, -J_FDnH);
          W.set(3, 3, gI(l));
          b.lmis.push_back(W);
        } else {
          NetLmi W("W2", {n, n, n, n, q, l});
          W.set(0, 0, Y);
          W.set(0, 1, identity(n));
          W.set(0, 2, AY_BCn);
          W.set(0, 3, A_BDnC);
          W.set(0, 4, E_BDnF);
          W.set(1, 1, X);
          W.set(1, 2, An);
          W.set(1, 3, XA_BnC);
          W.set(1, 4, XE_BnF);
          W.set(2, 2, Y);
          W.set(2, 3, identity(n));
          W.set(2, 5, YG_CnH);
          W.set(3, 3, X);
          W.set(3, 5, G_CDnH);
          W.set(4, 4, gI(q));
          W.set(4, 5, J_FDnH);
          W.set(5, 5, gI(l));
          b.lmis.push_back(W);
        }
      }
      break;
    }
  }
  return b;
}

}  // namespace netlmi::detail
