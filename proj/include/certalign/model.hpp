#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "certalign/geom.hpp"

namespace certalign {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Receiver clock drift expressed as an equivalent range rate (c * dt_r/dt), m/s.
struct ClockDrift {
  double mps = 0.0;
};

struct SatelliteState {
  std::string id;
  Vec3 pos = Vec3::Zero();  // ECEF, m
  Vec3 vel = Vec3::Zero();  // ECEF, m/s
};

struct RawDoppler {
  std::string sat_id;
  double doppler_hz = 0.0;
  double wavelength_m = 0.0;
  /// Measurement standard deviation (m/s); only used for inverse-variance weighting.
  double sigma_mps = 1.0;
};

struct Observation {
  RawDoppler doppler;
  SatelliteState sat;
};

struct Epoch {
  double time_s = 0.0;
  Vec3 receiver_pos = Vec3::Zero();   // ECEF, m
  Vec3 body_velocity = Vec3::Zero();  // w-frame, m/s
  std::vector<Observation> observations;
};

/// One Doppler observation reduced to the form  m^T vec(R) + t = d_bar.
struct ReducedMeasurement {
  Vec3 n = Vec3::Zero();  // unit line of sight, satellite -> receiver
  double d_bar = 0.0;     // lambda * D + n^T v_s, m/s
  Vec9 m = Vec9::Zero();  // v_w (x) n
  double weight = 1.0;
};

enum class WeightMode { Unit, InverseVariance };

/// Throws Errc::CoincidentPoints if the points are within 1 m.
Vec3 line_of_sight(const Vec3& receiver_pos, const Vec3& sat_pos);

/// Forward Doppler model: lambda * D = n^T (R v_w - v_s) + t + noise.
double synthesize_doppler(const Rotation& r_true, ClockDrift drift, const Vec3& receiver_pos,
                          const Vec3& body_velocity, const SatelliteState& sat, double wavelength_m,
                          double noise_sigma_mps, std::mt19937_64& rng);

ReducedMeasurement reduce(const RawDoppler& raw, const SatelliteState& sat, const Vec3& receiver_pos,
                          const Vec3& body_velocity);

/// Reduces every observation of every epoch, in order.
std::vector<ReducedMeasurement> reduce_epochs(std::span<const Epoch> epochs,
                                              WeightMode mode = WeightMode::Unit);

/// z = m^T vec(R) + t - d_bar (unweighted).
double residual(const Rotation& r, ClockDrift drift, const ReducedMeasurement& meas);

/// Weighted sum of squared residuals.
double doppler_cost(const Rotation& r, ClockDrift drift, std::span<const ReducedMeasurement> meas);

/// Checks per-epoch invariants (unique satellite ids, positive wavelengths, finite values).
void validate_epoch(const Epoch& epoch);

std::size_t observation_count(std::span<const Epoch> epochs);

}  // namespace certalign
