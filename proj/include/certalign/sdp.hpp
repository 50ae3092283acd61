#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace certalign::sdp {

// Small dense semidefinite programs in standard primal form
//
//   minimize  C . X   subject to  A_i . X = b_i,  X >= 0
//
// with the dual
//
//   maximize  b^T y   subject to  C - sum_i y_i A_i = S >= 0.

struct Constraint {
  Eigen::MatrixXd a;
  double b = 0.0;
};

struct Problem {
  Eigen::MatrixXd c;
  std::vector<Constraint> constraints;

  int dim() const { return static_cast<int>(c.rows()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
};

enum class Status { Optimal, MaxIterations, NumericalFailure, Infeasible };

const char* to_string(Status status);

struct Options {
  double tol = 1e-9;  // in [1e-12, 1e-4]
  int max_iter = 100;
  bool record_history = false;
};

struct IterationInfo {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double complementarity = 0.0;  // X . S
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

struct Solution {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd s;
  Status status = Status::NumericalFailure;
  int iterations = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// |C.X - b^T y| / (1 + |C.X|)
  double gap = 0.0;
  /// ||b - A(X)|| / (1 + ||b||)
  double primal_residual = 0.0;
  /// ||C - A^T(y) - S||_F / (1 + ||C||_F)
  double dual_residual = 0.0;
  /// X.S / (1 + |C.X|)
  double complementarity = 0.0;
  /// Constraints found linearly dependent on others and removed; their multipliers are zero.
  std::vector<int> dropped_constraints;
  std::vector<IterationInfo> history;

  /// Largest of the four relative accuracy measures.
  double accuracy() const;
};

/// Primal-dual path-following interior-point method (Nesterov-Todd direction, Mehrotra
/// predictor-corrector, fraction-to-boundary step control). Once the iterates are
/// feasible, primal and dual take a common step, shortened so the duality gap never
/// grows; when no such step exists the last iterate is returned with NumericalFailure.
/// Deterministic.
/// Throws std::invalid_argument on malformed problems or tolerances outside [1e-12, 1e-4].
Solution solve(const Problem& problem, const Options& opts = {});

/// Plain-text dump: "n m", then C, then for every constraint b_i followed by A_i,
/// all matrices dense row-major with one row per line, 17 significant digits.
void write_problem(std::ostream& os, const Problem& problem);
Problem read_problem(std::istream& is);

}  // namespace certalign::sdp
