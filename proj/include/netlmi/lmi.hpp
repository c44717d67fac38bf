#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "netlmi/common.hpp"

namespace netlmi {

struct LmiVariable {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool symmetric = false;
  int owner = -1;  // subsystem that solves for this variable (decentralized runs)
  std::optional<Mat> value;

  bool scalar() const { return rows == 1 && cols == 1; }
  int dof_count() const { return symmetric ? rows * (rows + 1) / 2 : rows * cols; }
  bool fixed() const { return value.has_value(); }
};

class VarSpace {
 public:
  int add(const std::string& name, int rows, int cols, bool symmetric, int owner = -1);
  int add_symmetric(const std::string& name, int n, int owner = -1) { return add(name, n, n, true, owner); }
  int add_scalar(const std::string& name, int owner = -1) { return add(name, 1, 1, false, owner); }

  int count() const { return static_cast<int>(vars_.size()); }
  const LmiVariable& at(int id) const { return vars_.at(id); }
  LmiVariable& at(int id) { return vars_.at(id); }
  Mat value(int id) const;
  void set_value(int id, const Mat& v);
  void clear_value(int id) { vars_.at(id).value.reset(); }

  // Matrix of a variable from its free scalar entries (symmetric: upper triangle by column).
  static Mat from_dofs(const LmiVariable& v, const double* x);
  static void to_dofs(const LmiVariable& v, const Mat& m, double* x);

 private:
  std::vector<LmiVariable> vars_;
};

// term contributes L * X * R (or L * X^T * R); for scalar variables it contributes x * L * R.
struct Term {
  int var = -1;
  Mat L, R;
  bool trans = false;
};

class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(int rows, int cols) : rows_(rows), cols_(cols), c_(Mat::Zero(rows, cols)) {}

  static AffineExpr zero(int rows, int cols) { return AffineExpr(rows, cols); }
  static AffineExpr constant(const Mat& m);
  static AffineExpr identity(int n) { return constant(Mat::Identity(n, n)); }
  static AffineExpr variable(const VarSpace& vs, int id);
  // scalar variable times a constant matrix
  static AffineExpr scaled(const VarSpace& vs, int id, const Mat& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Mat& constant_part() const { return c_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }
  bool is_zero() const { return terms_.empty() && is_zero_block(c_, 0.0); }

  AffineExpr transpose() const;
  AffineExpr operator-() const;
  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o) { return *this += -o; }
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(double s, const AffineExpr& a);
  friend AffineExpr operator*(const Mat& m, const AffineExpr& a);
  friend AffineExpr operator*(const AffineExpr& a, const Mat& m);

  Mat eval(const VarSpace& vs) const;
  // folds every term whose variable is fixed into the constant
  AffineExpr substitute(const VarSpace& vs) const;
  // embeds into a larger zero matrix at the given offset
  AffineExpr embed(int rows, int cols, int r0, int c0) const;
  std::vector<int> variables() const;

 private:
  int rows_ = 0, cols_ = 0;
  Mat c_;
  std::vector<Term> terms_;
};

AffineExpr operator*(const AffineExpr& a, const AffineExpr& b);  // one factor must be constant
AffineExpr trace(const AffineExpr& a);
AffineExpr hs(const AffineExpr& a);  // a + a^T

using ExprGrid = std::vector<std::vector<AffineExpr>>;

AffineExpr assemble(const ExprGrid& grid);

// Symmetric block LMI: only blocks (r, c) with r <= c are stored; lower blocks are their transposes.
struct SymLmi {
  std::string name;
  Dims dims;
  ExprGrid upper;  // upper[r][c] valid for r <= c

  SymLmi() = default;
  explicit SymLmi(Dims d, std::string nm = {});
  static SymLmi single(const AffineExpr& e, std::string nm = {});
  static SymLmi from_grid(const ExprGrid& full, std::string nm = {});  // uses r <= c entries only
  int size() const { return dims_sum(dims); }
  void set(int r, int c, const AffineExpr& e);
  Mat eval(const VarSpace& vs) const;
  Mat constant_part(const VarSpace& vs) const;
};

struct LmiProblem {
  std::vector<SymLmi> psd;              // each required > 0
  std::vector<AffineExpr> equalities;  // each required == 0
  std::optional<AffineExpr> objective;  // 1x1, minimized
  std::vector<int> free_vars;           // empty: every unfixed variable appearing in the problem
};

enum class SolveStatus { Feasible, Infeasible, Inaccurate, Unbounded };
std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol = 1e-7;             // relative duality-gap target
  double eps_rel = 1e-6;         // strictness margin: eps_b = eps_rel * (1 + |F_b0|_inf)
  double radius = 1e4;           // box bound on each scalar unknown
  bool maximize_margin = false;  // feasibility problems: return the max-margin point instead of the first strict one
  double margin_rel_tol = 1e-3;  // relative accuracy of the margin when maximizing it
  double margin_target = std::numeric_limits<double>::infinity();  // maximizing: stop once the margin reaches it
  int max_newton = 400;
  double mu = 20.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Inaccurate;
  std::vector<std::pair<int, Mat>> assignment;
  double objective = 0.0;
  double margin = 0.0;               // phase-one margin s
  double min_psd_eig = 0.0;          // min over constraints of min-eig at the assignment
  double max_eq_residual = 0.0;
  int newton_steps = 0;
  int failing_constraint = -1;
  std::string note;
};

SolveReport solve(const LmiProblem& problem, VarSpace& vars, const SolverOptions& opt = {});

double psd_margin(const LmiProblem& problem, const VarSpace& vars, int* worst = nullptr);

}  // namespace netlmi
