#pragma once

#include <random>
#include <vector>

#include "certalign/model.hpp"

namespace certalign::testing {

// Epochs observing `sats` (fixed satellite states) from a receiver at `origin`, with
// noiseless Dopplers synthesized for the given body velocities.
inline std::vector<Epoch> make_epochs(const Rotation& r, ClockDrift drift, const Vec3& origin,
                                      const std::vector<Vec3>& body_velocities,
                                      const std::vector<SatelliteState>& sats, double noise = 0.0,
                                      std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  const double lambda = kSpeedOfLight / 1575.42e6;
  std::vector<Epoch> out;
  for (std::size_t k = 0; k < body_velocities.size(); ++k) {
    Epoch e;
    e.time_s = static_cast<double>(k);
    e.receiver_pos = origin;
    e.body_velocity = body_velocities[k];
    for (const auto& s : sats) {
      Observation obs;
      obs.sat = s;
      obs.doppler.sat_id = s.id;
      obs.doppler.wavelength_m = lambda;
      obs.doppler.doppler_hz = synthesize_doppler(r, drift, origin, e.body_velocity, s, lambda, noise, rng);
      e.observations.push_back(obs);
    }
    out.push_back(e);
  }
  return out;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

// Satellites at GPS radius in random directions above the receiver's horizon.
inline std::vector<SatelliteState> random_sats(std::mt19937_64& rng, const Vec3& origin, int count) {
  std::vector<SatelliteState> out;
  const Vec3 up = origin.normalized();
  while (static_cast<int>(out.size()) < count) {
    Vec3 dir = random_unit(rng);
    if (dir.dot(up) < 0.3) continue;
    SatelliteState s;
    s.id = "S" + std::to_string(out.size());
    s.pos = origin + 2.0e7 * dir;
    s.vel = 3000.0 * random_unit(rng).cross(dir).normalized();
    out.push_back(s);
  }
  return out;
}

inline const Vec3 kOrigin{4.0e6, 7.0e5, 4.9e6};

}  // namespace certalign::testing
