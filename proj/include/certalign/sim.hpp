#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "certalign/io.hpp"
#include "certalign/solver.hpp"

namespace certalign::sim {

inline constexpr double kEarthMu = 3.986004418e14;  // m^3/s^2

enum class Motion { Planar2D, Hill3D };

struct SimConfig {
  double interval_s = 1.0;
  double duration_s = 10.0;
  double carrier_freq_hz = 1575.42e6;
  double speed_mps = 3.0;
  double inclination_deg = 55.0;
  double elevation_mask_deg = 10.0;
  double orbit_radius_m = 26'560e3;
  int n_satellites = 5;
  Motion motion = Motion::Hill3D;
  double noise_sigma_mps = 0.0;
  std::uint64_t seed = 1;

  // Walker delta pattern T/P/F.
  int walker_planes = 6;
  int walker_sats_per_plane = 4;
  int walker_phasing = 1;
  /// Peak vertical speed of the Hill3D profile; horizontal speed absorbs the rest.
  double hill_vertical_mps = 1.0;
  double clock_drift_sigma_mps = 10.0;
};

/// Throws Errc::InvalidArgument when the configuration is unusable.
void validate(const SimConfig& cfg);
int epoch_count(const SimConfig& cfg);
double wavelength_m(const SimConfig& cfg);

nlohmann::json to_json(const SimConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
SimConfig config_from_json(const nlohmann::json& j);

struct TrajectorySample {
  double time_s = 0.0;
  Vec3 receiver_pos = Vec3::Zero();
  Vec3 body_velocity = Vec3::Zero();
};

/// Body velocities in the w-frame (body frame at the first epoch, +y forward) and
/// receiver positions integrated in ECEF from `origin` through `r_true`.
std::vector<TrajectorySample> trajectory(const SimConfig& cfg, const Vec3& origin, const Rotation& r_true);

struct OrbitSlot {
  std::string id;
  double raan_rad = 0.0;
  double phase_rad = 0.0;  // argument of latitude at t = 0
};

SatelliteState satellite_state(const SimConfig& cfg, const OrbitSlot& slot, double t);

/// Elevation of `sat` above the local horizon at `receiver`, degrees.
double elevation_deg(const Vec3& receiver, const Vec3& sat);

/// Draws a randomly offset Walker pattern and picks cfg.n_satellites satellites that stay
/// above the elevation mask at every sample. Result is indexed [epoch][satellite].
/// Throws Errc::NoVisibleSatellites after 1000 unsuccessful draws.
std::vector<std::vector<SatelliteState>> walker_constellation(const SimConfig& cfg,
                                                              std::span<const TrajectorySample> samples,
                                                              std::mt19937_64& rng);

struct GroundTruth {
  Rotation rotation;
  ClockDrift clock_drift;
  Vec3 origin = Vec3::Zero();
  std::vector<Epoch> epochs;
};

/// Fully determined by cfg (including cfg.seed).
GroundTruth generate_dataset(const SimConfig& cfg);

/// Ground truth without the epochs: {"rotation": 9 column-stacked values, "clock_drift_mps", "origin_ecef"}.
nlohmann::json truth_to_json(const GroundTruth& gt);
/// Inverse of truth_to_json; `epochs` stays empty. Throws Errc::InvalidArgument on bad content.
GroundTruth truth_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Monte Carlo harness
// ---------------------------------------------------------------------------

enum class Method { Sdp, Voba, Gn };
enum class GnInit { Truth, Identity, Random };

const char* to_string(Method m);

struct McOptions {
  std::vector<Method> methods{Method::Sdp};
  AlignOptions align;
  GnInit gn_init = GnInit::Truth;
  int threads = 0;  // 0: the OpenMP default; CERT_ALIGN_THREADS caps either
};

struct McReport {
  int runs = 0;
  double certified_rate = 0.0;  // SDP runs certified / runs
  std::map<std::string, io::ErrorStats> stats;
  std::vector<io::RunRecord> records;  // ordered by run, then method

  bool same_result(const McReport& other) const;
};

/// Seed of run `run` derived from the base seed (independent of scheduling).
std::uint64_t run_seed(std::uint64_t seed, int run);

/// Runs one method on `epochs`. Errors against `truth` are filled when it is given (yaw in
/// the ENU frame at truth->origin); otherwise they stay NaN. `init_seed` seeds the random
/// GN start. Never throws; failures are reported through the status field.
io::RunRecord run_method(Method method, std::span<const Epoch> epochs, const GroundTruth* truth,
                         const McOptions& opts, std::uint64_t init_seed);

/// One Monte Carlo run: fresh dataset, every requested method. Never throws; failures
/// are recorded in the status field.
std::vector<io::RunRecord> run_single(const SimConfig& cfg, int run, const McOptions& opts);

/// OpenMP-parallel over runs; merged in run order.
McReport monte_carlo(const SimConfig& cfg, int runs, const McOptions& opts);
/// Serial reference of monte_carlo; identical output.
McReport monte_carlo_serial(const SimConfig& cfg, int runs, const McOptions& opts);

/// Worker count: the explicit request, else the OpenMP default, capped by CERT_ALIGN_THREADS.
int worker_threads(int requested = 0);

}  // namespace certalign::sim
