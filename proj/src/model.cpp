#include "certalign/model.hpp"

#include <cmath>
#include <set>

namespace certalign {

Vec3 line_of_sight(const Vec3& receiver_pos, const Vec3& sat_pos) {
  const Vec3 d = receiver_pos - sat_pos;
  const double range = d.norm();
  if (!(range > 1.0)) throw Error(Errc::CoincidentPoints, "receiver and satellite closer than 1 m");
  return d / range;
}

double synthesize_doppler(const Rotation& r_true, ClockDrift drift, const Vec3& receiver_pos,
                          const Vec3& body_velocity, const SatelliteState& sat, double wavelength_m,
                          double noise_sigma_mps, std::mt19937_64& rng) {
  if (noise_sigma_mps < 0.0) throw Error(Errc::InvalidArgument, "negative noise sigma");
  if (!(wavelength_m > 0.0)) throw Error(Errc::InvalidArgument, "wavelength must be positive");
  const Vec3 n = line_of_sight(receiver_pos, sat.pos);
  double range_rate = n.dot(r_true * body_velocity - sat.vel) + drift.mps;
  if (noise_sigma_mps > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma_mps);
    range_rate += noise(rng);
  }
  return range_rate / wavelength_m;
}

ReducedMeasurement reduce(const RawDoppler& raw, const SatelliteState& sat, const Vec3& receiver_pos,
                          const Vec3& body_velocity) {
  if (!(raw.wavelength_m > 0.0)) throw Error(Errc::InvalidArgument, "wavelength must be positive");
  ReducedMeasurement out;
  out.n = line_of_sight(receiver_pos, sat.pos);
  out.d_bar = raw.wavelength_m * raw.doppler_hz + out.n.dot(sat.vel);
  out.m = kron(body_velocity, out.n);
  return out;
}

std::vector<ReducedMeasurement> reduce_epochs(std::span<const Epoch> epochs, WeightMode mode) {
  std::vector<ReducedMeasurement> out;
  out.reserve(observation_count(epochs));
  for (const Epoch& e : epochs) {
    for (const Observation& obs : e.observations) {
      ReducedMeasurement m = reduce(obs.doppler, obs.sat, e.receiver_pos, e.body_velocity);
      if (mode == WeightMode::InverseVariance) {
        if (!(obs.doppler.sigma_mps > 0.0)) throw Error(Errc::InvalidArgument, "non-positive sigma");
        m.weight = 1.0 / (obs.doppler.sigma_mps * obs.doppler.sigma_mps);
      }
      out.push_back(m);
    }
  }
  return out;
}

double residual(const Rotation& r, ClockDrift drift, const ReducedMeasurement& meas) {
  return meas.m.dot(vec(r.matrix())) + drift.mps - meas.d_bar;
}

double doppler_cost(const Rotation& r, ClockDrift drift, std::span<const ReducedMeasurement> meas) {
  double cost = 0.0;
  for (const auto& m : meas) {
    const double z = residual(r, drift, m);
    cost += m.weight * z * z;
  }
  return cost;
}

void validate_epoch(const Epoch& epoch) {
  if (!std::isfinite(epoch.time_s) || !epoch.receiver_pos.allFinite() || !epoch.body_velocity.allFinite()) {
    throw Error(Errc::InvalidArgument, "non-finite epoch data");
  }
  std::set<std::string> ids;
  for (const Observation& obs : epoch.observations) {
    if (!ids.insert(obs.doppler.sat_id).second) {
      throw Error(Errc::InvalidArgument, "duplicate satellite id '" + obs.doppler.sat_id + "' in epoch");
    }
    if (!(obs.doppler.wavelength_m > 0.0)) throw Error(Errc::InvalidArgument, "wavelength must be positive");
    if (!std::isfinite(obs.doppler.doppler_hz) || !obs.sat.pos.allFinite() || !obs.sat.vel.allFinite()) {
      throw Error(Errc::InvalidArgument, "non-finite observation");
    }
  }
}

std::size_t observation_count(std::span<const Epoch> epochs) {
  std::size_t k = 0;
  for (const Epoch& e : epochs) k += e.observations.size();
  return k;
}

}  // namespace certalign
