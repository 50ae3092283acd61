#pragma once

#include <span>
#include <string>

#include "certalign/qcqp.hpp"
#include "certalign/sdp.hpp"

namespace certalign {

struct AlignOptions {
  bool redundant = true;
  /// Target accuracy of the SDP solve.
  double tol = 1e-12;
  /// A solve that stalls short of `tol` is still used if it reached this accuracy.
  double acceptable_tol = 1e-9;
  int max_iter = 100;
  /// Certified only if |lambda_1| / |lambda_2| of H is below this.
  double eig_ratio_threshold = 1e-6;
  WeightMode weight_mode = WeightMode::Unit;
};

/// KKT report for a candidate x and multipliers mu, with H = Q_bar + sum_i mu_i A_i.
struct Certificate {
  double h_min_eig = 0.0;
  double eig_ratio = 1.0;            // max(|lambda_1|, floor * ||H||) / |lambda_2|, sorted by magnitude
  double kkt_residual = 0.0;         // ||H x|| / (||H|| ||x||)
  double constraint_residual = 0.0;  // max_i |g_i(x)|
  bool kkt_passed = false;           // all four numerical tests pass
  bool certified = false;            // kkt_passed, and (inside align) geometry observable
  Eigen::VectorXd h_eigenvalues;     // ascending
};

struct AlignmentResult {
  Rotation rotation;
  ClockDrift clock_drift;
  double primal_cost = 0.0;
  double dual_value = 0.0;
  Certificate certificate;
  sdp::Status solver_status = sdp::Status::NumericalFailure;
  int solver_iterations = 0;
  double eig_ratio_x = 0.0;  // lambda_2 / lambda_1 of the relaxed primal X
  Eigen::VectorXd multipliers;
  bool observable = false;
  std::string warning;
  double wall_time_s = 0.0;
};

struct ExtractedSolution {
  Rotation rotation;
  ClockDrift clock_drift;
  double eig_ratio_x = 0.0;
  Vec10 x = Vec10::Zero();  // [vec(R); 1] after projection
};

/// `eig_floor` is the relative accuracy to which H's eigenvalues are known; |lambda_1| is
/// not taken to be smaller than eig_floor * ||H|| when forming the ratio.
Certificate certify(const Mat10& q_bar, const ConstraintSet& constraints, const Eigen::VectorXd& multipliers,
                    const Vec10& x, double eig_ratio_threshold, double eig_floor = 0.0);

/// Rank-one extraction from the relaxed primal. A singular rotation block (loose
/// relaxation) still maps to one of its nearest rotations. Throws Errc::RankDeficientX if
/// the top eigenvalue is <= 1e-12 and Errc::NumericalFailure if the homogeneous component
/// vanishes.
ExtractedSolution extract_solution(const Mat10& x_mat, const CostBlocks& blocks);

/// Builds the relaxation for a cost matrix and constraint set.
sdp::Problem relaxation(const Mat10& q_bar, const ConstraintSet& constraints);

/// assemble -> relax -> solve -> recover -> certify.
/// Throws Errc::EmptyBatch for empty input and Errc::SolverFailed when the SDP solver
/// reports Infeasible or stops above acceptable_tol. The eigenvalue floor of the
/// certificate is the accuracy the solver actually reached. Unobservable geometry is
/// reported through `warning` and forces certificate.certified = false.
AlignmentResult align(std::span<const Epoch> epochs, const AlignOptions& opts = {});

/// Same pipeline on pre-reduced measurements and an explicit observability verdict.
AlignmentResult align_measurements(std::span<const ReducedMeasurement> meas, bool observable,
                                   const AlignOptions& opts = {});

}  // namespace certalign
