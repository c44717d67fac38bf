#pragma once

#include "netlmi/lmi.hpp"

namespace netlmi {

enum class Pivot { Theta, Gamma };

struct SchurResult {
  Mat complement;  // Gamma - Phi^T Theta^-1 Phi, or Theta - Phi Gamma^-1 Phi^T
  bool pivot_pd = false;
  bool complement_pd = false;
  bool pd() const { return pivot_pd && complement_pd; }
};

// W = [Theta, Phi; Phi^T, Gamma] with Theta of size k.
SchurResult schur_reduce(const Mat& w, int k, Pivot pivot, double tol = 0.0);

// Symbolic form: Gamma - Phi^T Theta^-1 Phi > 0 with constant Theta > 0 becomes [Theta, Phi; Phi^T, Gamma] > 0.
SymLmi schur_constant_pivot(const Mat& theta, const AffineExpr& phi, const AffineExpr& gamma, std::string name = {});

Mat congruence(const Mat& w, const Mat& p, double cond_max = kCondWarn);

// [W_ii, W_i; W_i^T, A D A^T] > 0, equivalent to W~_ii > 0 for the prior rows summarized by A D A^T.
SymLmi local_schur_constraint(const AffineExpr& w_ii, const AffineExpr& w_i, const Mat& ada, std::string name = {});
SymLmi local_schur_constraint(const AffineExpr& w_ii, const AffineExpr& w_i, const Mat& a,
                              const std::vector<Mat>& d_blocks, std::string name = {});

struct CovFactors {
  Mat M, N;
};

// M N^T = I - X Y via partial-pivot LU: M is the lower factor (with the row permutation), N^T the upper one.
CovFactors cov_recover(const Mat& x, const Mat& y, double cond_max = kCondWarn);

struct DofPlant {
  Mat A, B, C, E, F, G, H, J;
};

struct DofParams {
  Mat Ac, Bc, Cc, Dc;
};

struct AuxParams {
  Mat An, Bn, Cn, Dn;
};

DofParams dof_from_aux(const AuxParams& aux, const Mat& x, const Mat& y, const Mat& m, const Mat& n,
                       const DofPlant& plant);
AuxParams aux_from_dof(const DofParams& dof, const Mat& x, const Mat& y, const Mat& m, const Mat& n,
                       const DofPlant& plant);

struct ClosedLoop {
  Mat A, B, C, D;
};

ClosedLoop dof_closed_loop(const DofPlant& plant, const DofParams& dof);

// Norm oracles for (A, B, C, D); CT or DT. Return +inf for unstable A.
double h2_norm(Domain d, const Mat& a, const Mat& b, const Mat& c, const Mat& d_mat);
double hinf_norm(Domain d, const Mat& a, const Mat& b, const Mat& c, const Mat& d_mat, double rel_tol = 1e-6);

bool is_stable(Domain d, const Mat& a, double margin = 0.0);
double spectral_abscissa(Domain d, const Mat& a);  // max Re(lambda) for CT, max |lambda| for DT

// Solves A^T P + P A + Q = 0 (CT) or A^T P A - P + Q = 0 (DT).
Mat lyapunov(Domain d, const Mat& a, const Mat& q);

}  // namespace netlmi
