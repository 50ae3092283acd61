#pragma once

#include <span>
#include <string>
#include <vector>

#include "certalign/model.hpp"

namespace certalign {

/// Blocks of the full cost [t; x]^T Q [t; x] with x = [vec(R); 1].
struct CostBlocks {
  double q_tt = 0.0;         // sum of weights (K for unit weights)
  Vec10 q_tr = Vec10::Zero();  // sum w [m; -d_bar]
  Mat10 q_rr = Mat10::Zero();  // sum w [m; -d_bar][m; -d_bar]^T
  std::size_t count = 0;
};

struct CostAssembly {
  CostBlocks blocks;
  Mat10 q_bar = Mat10::Zero();  // clock drift marginalized out
};

/// Throws Errc::EmptyBatch when `meas` is empty. Summation is sequential in input order.
CostAssembly assemble_cost(std::span<const ReducedMeasurement> meas);

/// Full cost evaluated at clock drift t and homogeneous x.
double full_cost(const CostBlocks& blocks, double t, const Vec10& x);

/// t minimizing the full cost for a fixed x: -q_tr^T x / q_tt.
ClockDrift recover_clock_drift(const CostBlocks& blocks, const Vec10& x);

/// x = [vec(R); 1].
Vec10 homogenize(const Rotation& r);

/// g(x) = x^T A x - d.
struct QuadraticConstraint {
  Mat10 a = Mat10::Zero();
  double d = 0.0;
  std::string label;

  double value(const Vec10& x) const { return x.dot(a * x) - d; }
};

struct ConstraintSet {
  std::vector<QuadraticConstraint> constraints;
  bool redundant = true;

  std::size_t size() const { return constraints.size(); }
  /// max_i |g_i(x)|
  double max_violation(const Vec10& x) const;
};

/// Redundant: 6 column + 6 row orthonormality, 9 handedness, y^2 = 1 (22 total).
/// Minimal: 6 column orthonormality and y^2 = 1 (7 total).
ConstraintSet so3_constraints(bool redundant);

enum class RankMode { Exact, Noisy };

struct ObservabilityOptions {
  RankMode mode = RankMode::Exact;
  double relative_threshold = 1e-6;  // Noisy mode: sigma_i > threshold * sigma_max
};

struct ObservabilityReport {
  int rank_v = 0;
  int rank_n = 0;
  int rank_m = 0;
  Eigen::VectorXd singular_values_v;
  Eigen::VectorXd singular_values_n;
  Eigen::VectorXd singular_values_m;
  std::size_t measurements = 0;
  bool observable_redundant = false;
  bool observable_minimal = false;
};

/// Stacks V (body velocities), N (lines of sight) and M = V (.) N over every observation.
ObservabilityReport observability(std::span<const Epoch> epochs, const ObservabilityOptions& opts = {});

/// Same analysis on explicit 3xK velocity and line-of-sight matrices.
ObservabilityReport observability(const Eigen::Matrix3Xd& v, const Eigen::Matrix3Xd& n,
                                  const ObservabilityOptions& opts = {});

int numerical_rank(const Eigen::VectorXd& singular_values, std::size_t samples, const ObservabilityOptions& opts);

}  // namespace certalign
