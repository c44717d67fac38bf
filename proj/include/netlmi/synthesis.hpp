#pragma once

#include <optional>
#include <string>

#include "netlmi/lmi.hpp"
#include "netlmi/lmikit.hpp"
#include "netlmi/seqtest.hpp"
#include "netlmi/system.hpp"

namespace netlmi {

enum class Task { Analyze, Fsf, Observer, Dof };
enum class Property { Stability, Qsr, H2, Hinf, Stabilizability, Detectability };
enum class Mode { Centralized, Decentralized };

std::string to_string(Task t);
std::string to_string(Property p);
std::string to_string(Mode m);
Task task_from_string(const std::string& s);
Property property_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);

// Supply rate [Q, S; S^T, R] over (output, input) of the analyzed channel.
struct QsrSpec {
  BlockMatrix Q, S, R;
  void validate() const;
};

// kinds: passive, strict_input(nu), strict_output(rho), strict(nu, rho), l2(gamma), conic(c, r), sector(a, b)
QsrSpec qsr_preset(const std::string& kind, const std::vector<double>& params, const Dims& output_dims,
                   const Dims& input_dims);

// Output and input dimensions of the channel a task makes dissipative.
std::pair<Dims, Dims> qsr_channel_dims(const NetworkedSystem& sys, Task task);

SolverOptions default_synthesis_options();

struct TaskSpec {
  Task task = Task::Analyze;
  Property property = Property::Stability;
  Mode mode = Mode::Centralized;
  std::optional<IndexingScheme> indexing;  // decentralized only; natural order when empty
  SolverOptions solver = default_synthesis_options();
  bool skip_redundant = true;
};

// The centralized program for a (task, property, domain) combination.
struct GlobalLmi {
  VarSpace vars;
  LmiProblem problem;
  std::string proposition;  // human-readable name of the condition
};

GlobalLmi build_global_lmi(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr);

struct Design {
  Task task = Task::Analyze;
  Property property = Property::Stability;
  Mode mode = Mode::Centralized;
  Domain domain = Domain::CT;
  bool feasible = false;
  SolveStatus status = SolveStatus::Inaccurate;
  std::string message;
  int failing_subsystem = -1;  // decentralized: original index of the first infeasible local problem
  std::string failing_constraint;

  BlockMatrix K;                       // FSF gain (u = K x), also stabilizability gain
  BlockMatrix L, Ahat, Bhat;           // observer: xhat' = Ahat xhat + Bhat u + L y
  BlockMatrix Ac, Bc, Cc, Dc;          // DOF controller
  BlockMatrix P;                       // normalized certificate of the closed loop (see certificate_dual)
  bool certificate_dual = false;       // H2 only: P bounds the controllability Gramian instead of the observability one
  BlockMatrix M;                       // FSF certificate (P = M^-1)
  BlockMatrix X, Y, Mcov, Ncov;        // DOF change-of-variables matrices
  std::optional<double> gamma;

  MessageLog log;
  IndexingScheme indexing;
  std::vector<double> local_margins;   // min eig of W~_ii per subsystem (original indices)
  int newton_steps = 0;
};

Design synthesize_centralized(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr);
Design synthesize_decentralized(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr);
Design synthesize(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr);

// Closed-loop performance channel (A, B, C, D) realized by a design.
ClosedLoop closed_loop(const NetworkedSystem& sys, const Design& d);

struct VerifyReport {
  bool spectral_ok = false;
  bool certificate_ok = false;
  bool gamma_ok = true;
  bool structure_ok = true;
  double abscissa = 0.0;            // max Re (CT) or max |lambda| (DT)
  double certificate_margin = 0.0;  // min eig of the analysis LMI at the certificate
  std::optional<double> oracle_gamma;
  std::vector<std::string> notes;
  bool ok() const { return spectral_ok && certificate_ok && gamma_ok && structure_ok; }
};

VerifyReport verify_design(const NetworkedSystem& sys, const Design& d, const std::optional<QsrSpec>& qsr,
                           double spectral_margin = 1e-7);

// Numeric analysis conditions of a closed loop at storage matrix P (each returned matrix must be > 0).
// stability: V = x'Px decreases; qsr: dissipativity for the supply rate; h2: P bounds the observability
// Gramian and tr(B'PB + D'D) < gamma^2; hinf: bounded-real inequality with level gamma.
std::vector<Mat> analysis_matrices(Domain dom, Property prop, const ClosedLoop& cl, const Mat& p,
                                   const std::optional<QsrSpec>& qsr, std::optional<double> gamma = std::nullopt);

// Storage matrix of the DOF closed loop assembled from X, Y, M, N.
Mat dof_storage(const Mat& x, const Mat& y, const Mat& m, const Mat& n);

// True iff every block (i, j) with j outside the closed in-neighborhood of i is zero.
bool matches_pattern(const BlockMatrix& gain, const Topology& topo, double tol = kZeroTol);

// Diagonality and preliminary conditions of a (task, property) combination; throws Error naming the violation.
void check_preconditions(const NetworkedSystem& sys, const TaskSpec& spec, const std::optional<QsrSpec>& qsr);

}  // namespace netlmi
