#include "certalign/baselines.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace certalign {

SpvSolution spv_velocity(const Epoch& epoch) {
  const auto k = static_cast<Eigen::Index>(epoch.observations.size());
  if (k < 4) {
    throw Error(Errc::InsufficientSatellites,
                "SPV needs at least 4 satellites, epoch has " + std::to_string(k));
  }
  Eigen::MatrixXd g(k, 4);
  Eigen::VectorXd d(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Observation& obs = epoch.observations[static_cast<std::size_t>(i)];
    const Vec3 n = line_of_sight(epoch.receiver_pos, obs.sat.pos);
    g.row(i) << n.transpose(), 1.0;
    d(i) = obs.doppler.wavelength_m * obs.doppler.doppler_hz + n.dot(obs.sat.vel);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(3) > 0.0) || sv(0) / sv(3) >= 1e8) {
    throw Error(Errc::DegenerateGeometry, "SPV design matrix is ill-conditioned");
  }
  const Eigen::Vector4d sol = svd.solve(d);
  SpvSolution out;
  out.velocity = sol.head<3>();
  out.clock_drift = sol(3);
  out.residual_norm = (g * sol - d).norm();
  out.dop = std::sqrt((g.transpose() * g).inverse().trace());
  return out;
}

Rotation voba_align(std::span<const Epoch> epochs) {
  std::vector<Vec3> body;
  std::vector<Vec3> ecef;
  for (const Epoch& e : epochs) {
    const SpvSolution spv = spv_velocity(e);
    body.push_back(e.body_velocity);
    ecef.push_back(spv.velocity);
  }
  if (body.size() < 2) throw Error(Errc::DegenerateVelocities, "need at least two epochs");
  Eigen::MatrixXd v(3, static_cast<Eigen::Index>(body.size()));
  for (std::size_t i = 0; i < body.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = body[i];
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(v).singularValues();
  if (!(sv(1) > 1e-9 * sv(0))) {
    throw Error(Errc::DegenerateVelocities, "body velocities span fewer than two dimensions");
  }

  Mat3 cross = Mat3::Zero();
  for (std::size_t i = 0; i < body.size(); ++i) cross += ecef[i] * body[i].transpose();
  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  Mat3 r = svd.matrixU() * d * svd.matrixV().transpose();
  return project_to_so3(r);
}

namespace {

double best_drift(const Rotation& r, std::span<const ReducedMeasurement> meas) {
  const Vec9 rv = vec(r.matrix());
  double num = 0.0;
  double den = 0.0;
  for (const auto& m : meas) {
    num += m.weight * (m.d_bar - m.m.dot(rv));
    den += m.weight;
  }
  return num / den;
}

}  // namespace

GnResult gn_align(std::span<const ReducedMeasurement> meas, const GnOptions& opts) {
  if (meas.empty()) throw Error(Errc::EmptyBatch, "no measurements");
  if (opts.max_iter < 1) throw Error(Errc::InvalidArgument, "max_iter must be positive");

  GnResult res;
  res.rotation = opts.initial_rotation;
  res.clock_drift = ClockDrift{best_drift(res.rotation, meas)};
  res.cost = doppler_cost(res.rotation, res.clock_drift, meas);

  std::array<Mat3, 3> generators{hat(Vec3::UnitX()), hat(Vec3::UnitY()), hat(Vec3::UnitZ())};
  bool lifted = false;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    if (res.cost <= opts.residual_tol) {
      res.converged = true;
      break;
    }
    Eigen::Matrix4d normal = Eigen::Matrix4d::Zero();
    Eigen::Vector4d grad = Eigen::Vector4d::Zero();
    const Vec9 rv = vec(res.rotation.matrix());
    std::array<Vec9, 3> dr;
    for (int k = 0; k < 3; ++k) dr[k] = vec(res.rotation.matrix() * generators[k]);
    for (const auto& m : meas) {
      Eigen::Vector4d j;
      j << m.m.dot(dr[0]), m.m.dot(dr[1]), m.m.dot(dr[2]), 1.0;
      const double z = m.m.dot(rv) + res.clock_drift.mps - m.d_bar;
      normal += m.weight * j * j.transpose();
      grad += m.weight * z * j;
    }

    auto singular = [](const Eigen::Matrix4d& a) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(a, Eigen::EigenvaluesOnly);
      const double lmax = eig.eigenvalues()(3);
      return !(eig.eigenvalues()(0) > 4.0 * std::numeric_limits<double>::epsilon() * lmax);
    };
    if (singular(normal)) {
      if (lifted) throw Error(Errc::SingularNormalEquations, "normal equations singular after damping");
      normal += 1e-12 * Eigen::Matrix4d::Identity();
      lifted = true;
      if (singular(normal)) throw Error(Errc::SingularNormalEquations, "normal equations singular after damping");
    }
    const Eigen::Vector4d step = -normal.ldlt().solve(grad);
    res.iterations = iter;

    // Backtracking keeps accepted iterates monotone in cost.
    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half, alpha *= 0.5) {
      const Rotation r_new = res.rotation * Rotation::exp(alpha * step.head<3>());
      const ClockDrift t_new{res.clock_drift.mps + alpha * step(3)};
      const double c_new = doppler_cost(r_new, t_new, meas);
      if (c_new < res.cost) {
        res.rotation = project_to_so3(r_new.matrix());
        res.clock_drift = t_new;
        res.cost = c_new;
        accepted = true;
        break;
      }
    }
    if (!accepted || alpha * step.norm() < opts.step_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

GnResult gn_align(std::span<const Epoch> epochs, const GnOptions& opts) {
  for (const Epoch& e : epochs) validate_epoch(e);
  const auto meas = reduce_epochs(epochs, opts.weight_mode);
  return gn_align(meas, opts);
}

}  // namespace certalign
