#include "certalign/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <vector>

namespace certalign {

Certificate certify(const Mat10& q_bar, const ConstraintSet& constraints, const Eigen::VectorXd& multipliers,
                    const Vec10& x, double eig_ratio_threshold, double eig_floor) {
  if (multipliers.size() != static_cast<Eigen::Index>(constraints.size())) {
    throw Error(Errc::InvalidArgument, "multiplier count does not match constraint count");
  }
  Mat10 h = q_bar;
  for (std::size_t i = 0; i < constraints.size(); ++i) h += multipliers(static_cast<Eigen::Index>(i)) * constraints.constraints[i].a;
  h = 0.5 * (h + h.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Mat10> eig(h, Eigen::EigenvaluesOnly);
  Certificate cert;
  cert.h_eigenvalues = eig.eigenvalues();
  cert.h_min_eig = eig.eigenvalues()(0);

  std::vector<double> mags(10);
  for (int i = 0; i < 10; ++i) mags[i] = std::abs(eig.eigenvalues()(i));
  std::sort(mags.begin(), mags.end());
  const double h_norm = mags[9];
  const double smallest = std::max(mags[0], eig_floor * h_norm);
  cert.eig_ratio = mags[1] > 0.0 ? std::min(1.0, smallest / mags[1]) : 1.0;

  const double x_norm = x.norm();
  cert.kkt_residual = (h_norm > 0.0 && x_norm > 0.0) ? (h * x).norm() / (h_norm * x_norm) : 0.0;
  cert.constraint_residual = constraints.max_violation(x);

  cert.kkt_passed = cert.eig_ratio < eig_ratio_threshold && cert.kkt_residual < 1e-6 &&
                    cert.h_min_eig >= -1e-8 * h_norm && cert.constraint_residual < 1e-8;
  cert.certified = cert.kkt_passed;
  return cert;
}

namespace {

// Like project_to_so3, but a rank-deficient block still yields one of its nearest rotations.
Rotation nearest_rotation(const Mat3& m) {
  const Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (sv.minCoeff() > 1e-12 * std::max(1.0, sv.maxCoeff())) return project_to_so3(m);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return Rotation::from_matrix(svd.matrixU() * d * svd.matrixV().transpose());
}

}  // namespace

ExtractedSolution extract_solution(const Mat10& x_mat, const CostBlocks& blocks) {
  Eigen::SelfAdjointEigenSolver<Mat10> eig(0.5 * (x_mat + x_mat.transpose()));
  const double l1 = eig.eigenvalues()(9);
  const double l2 = eig.eigenvalues()(8);
  if (!(l1 > 1e-12)) throw Error(Errc::RankDeficientX, "relaxed primal has no dominant eigenvalue");
  Vec10 x = std::sqrt(l1) * eig.eigenvectors().col(9);
  if (std::abs(x(9)) <= 1e-9 * x.norm()) {
    throw Error(Errc::NumericalFailure, "homogeneous component of the extracted vector vanishes");
  }
  x /= x(9);

  ExtractedSolution out;
  out.rotation = nearest_rotation(unvec(x.head<9>()));
  out.x = homogenize(out.rotation);
  out.clock_drift = recover_clock_drift(blocks, out.x);
  out.eig_ratio_x = std::max(l2, 0.0) / l1;
  return out;
}

sdp::Problem relaxation(const Mat10& q_bar, const ConstraintSet& constraints) {
  sdp::Problem p;
  p.c = q_bar;
  p.constraints.reserve(constraints.size());
  for (const auto& c : constraints.constraints) p.constraints.push_back({c.a, c.d});
  return p;
}

AlignmentResult align_measurements(std::span<const ReducedMeasurement> meas, bool observable,
                                   const AlignOptions& opts) {
  if (!(opts.acceptable_tol >= opts.tol)) throw Error(Errc::InvalidArgument, "acceptable_tol must be >= tol");
  if (!(opts.eig_ratio_threshold > 0.0 && opts.eig_ratio_threshold < 1.0)) {
    throw Error(Errc::InvalidArgument, "eig_ratio_threshold must lie in (0, 1)");
  }
  const auto start = std::chrono::steady_clock::now();
  const CostAssembly cost = assemble_cost(meas);
  const ConstraintSet constraints = so3_constraints(opts.redundant);

  // The relaxation is solved on a unit-norm cost; multipliers and objective are scaled back.
  const double q_norm = cost.q_bar.norm();
  const double scale = q_norm > 0.0 ? q_norm : 1.0;
  sdp::Problem problem = relaxation(cost.q_bar / scale, constraints);

  sdp::Options sdp_opts;
  sdp_opts.tol = opts.tol;
  sdp_opts.max_iter = opts.max_iter;
  const sdp::Solution sol = sdp::solve(problem, sdp_opts);
  const double accuracy = sol.accuracy();
  if (sol.status == sdp::Status::Infeasible ||
      (sol.status != sdp::Status::Optimal && !(accuracy <= opts.acceptable_tol))) {
    throw Error(Errc::SolverFailed, std::string("SDP solver status ") + sdp::to_string(sol.status));
  }

  AlignmentResult res;
  res.solver_status = sol.status;
  res.solver_iterations = sol.iterations;
  res.observable = observable;

  const ExtractedSolution ext = extract_solution(sol.x, cost.blocks);
  res.rotation = ext.rotation;
  res.clock_drift = ext.clock_drift;
  res.eig_ratio_x = ext.eig_ratio_x;
  res.primal_cost = std::max(0.0, ext.x.dot(cost.q_bar * ext.x));

  // Lagrangian convention: H = Q_bar + sum mu_i A_i, mu = -scale * y.
  res.multipliers = -scale * sol.y;
  res.dual_value = 0.0;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    res.dual_value -= constraints.constraints[i].d * res.multipliers(static_cast<Eigen::Index>(i));
  }

  res.certificate = certify(cost.q_bar, constraints, res.multipliers, ext.x, opts.eig_ratio_threshold,
                            std::max(opts.tol, accuracy));
  if (sol.status != sdp::Status::Optimal) {
    res.warning = "SDP solver stopped at accuracy " + std::to_string(accuracy);
  }
  if (!observable) {
    res.certificate.certified = false;
    res.warning = opts.redundant ? "geometry fails the redundant-constraint observability ranks"
                                 : "geometry fails the minimal-constraint observability ranks";
  }
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

AlignmentResult align(std::span<const Epoch> epochs, const AlignOptions& opts) {
  for (const Epoch& e : epochs) validate_epoch(e);
  const auto meas = reduce_epochs(epochs, opts.weight_mode);
  if (meas.empty()) throw Error(Errc::EmptyBatch, "no measurements");
  const ObservabilityReport obs = observability(epochs);
  const bool observable = opts.redundant ? obs.observable_redundant : obs.observable_minimal;
  return align_measurements(meas, observable, opts);
}

}  // namespace certalign
