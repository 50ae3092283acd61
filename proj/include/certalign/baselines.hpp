#pragma once

#include <span>

#include "certalign/model.hpp"

namespace certalign {

/// Single point velocity from one epoch's Doppler measurements.
struct SpvSolution {
  Vec3 velocity = Vec3::Zero();  // ECEF, m/s
  double clock_drift = 0.0;      // m/s
  double residual_norm = 0.0;    // m/s
  double dop = 0.0;              // sqrt(trace((G^T G)^-1))
};

/// Least squares on rows [n_i^T, 1] [v; t] = d_bar_i.
/// Throws Errc::InsufficientSatellites (< 4 observations) or Errc::DegenerateGeometry
/// (design matrix condition number >= 1e8).
SpvSolution spv_velocity(const Epoch& epoch);

/// Velocity registration: R minimizing sum ||R v_w - v_e||^2 with v_e from SPV.
/// Propagates Errc::InsufficientSatellites from any epoch; throws Errc::DegenerateVelocities
/// when the body velocities span fewer than two dimensions.
Rotation voba_align(std::span<const Epoch> epochs);

struct GnOptions {
  Rotation initial_rotation;
  int max_iter = 50;
  double step_tol = 1e-10;
  double residual_tol = 1e-12;
  WeightMode weight_mode = WeightMode::Unit;
};

struct GnResult {
  Rotation rotation;
  ClockDrift clock_drift;
  bool converged = false;
  int iterations = 0;
  double cost = 0.0;
};

/// Gauss-Newton on SO(3) x R over the Doppler residuals, right-multiplicative
/// exponential-map updates. Local method: no optimality guarantee.
/// Throws Errc::SingularNormalEquations if the normal equations stay singular after
/// one diagonal lift of 1e-12.
GnResult gn_align(std::span<const Epoch> epochs, const GnOptions& opts);
GnResult gn_align(std::span<const ReducedMeasurement> meas, const GnOptions& opts);

}  // namespace certalign
