#include "certalign/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include <omp.h>

#include "certalign/baselines.hpp"

namespace certalign::sim {

void validate(const SimConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::InvalidArgument, what);
  };
  require(cfg.interval_s > 0.0, "interval must be positive");
  require(cfg.duration_s >= cfg.interval_s, "duration must cover at least two epochs");
  require(cfg.carrier_freq_hz > 0.0, "carrier frequency must be positive");
  require(cfg.speed_mps > 0.0, "speed must be positive");
  require(cfg.orbit_radius_m > 6.4e6, "orbit radius must exceed the Earth radius");
  require(cfg.n_satellites >= 1, "need at least one satellite");
  require(cfg.n_satellites <= cfg.walker_planes * cfg.walker_sats_per_plane, "more satellites than the pattern holds");
  require(cfg.walker_planes >= 1 && cfg.walker_sats_per_plane >= 1, "empty Walker pattern");
  require(cfg.noise_sigma_mps >= 0.0, "noise sigma must be non-negative");
  require(cfg.clock_drift_sigma_mps >= 0.0, "clock drift sigma must be non-negative");
  require(cfg.hill_vertical_mps >= 0.0 && cfg.hill_vertical_mps < cfg.speed_mps,
          "hill vertical speed must lie in [0, speed)");
  require(cfg.elevation_mask_deg > -90.0 && cfg.elevation_mask_deg < 90.0, "elevation mask out of range");
}

int epoch_count(const SimConfig& cfg) {
  return static_cast<int>(std::floor(cfg.duration_s / cfg.interval_s + 1e-9)) + 1;
}

double wavelength_m(const SimConfig& cfg) { return kSpeedOfLight / cfg.carrier_freq_hz; }

nlohmann::json to_json(const SimConfig& c) {
  return {{"interval_s", c.interval_s},
          {"duration_s", c.duration_s},
          {"carrier_freq_hz", c.carrier_freq_hz},
          {"speed_mps", c.speed_mps},
          {"inclination_deg", c.inclination_deg},
          {"elevation_mask_deg", c.elevation_mask_deg},
          {"orbit_radius_m", c.orbit_radius_m},
          {"n_satellites", c.n_satellites},
          {"motion", c.motion == Motion::Planar2D ? "2d" : "3d"},
          {"noise_sigma_mps", c.noise_sigma_mps},
          {"seed", c.seed},
          {"walker_planes", c.walker_planes},
          {"walker_sats_per_plane", c.walker_sats_per_plane},
          {"walker_phasing", c.walker_phasing},
          {"hill_vertical_mps", c.hill_vertical_mps},
          {"clock_drift_sigma_mps", c.clock_drift_sigma_mps}};
}

SimConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "simulation config must be a JSON object");
  SimConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "interval_s") c.interval_s = value.get<double>();
    else if (key == "duration_s") c.duration_s = value.get<double>();
    else if (key == "carrier_freq_hz") c.carrier_freq_hz = value.get<double>();
    else if (key == "speed_mps") c.speed_mps = value.get<double>();
    else if (key == "inclination_deg") c.inclination_deg = value.get<double>();
    else if (key == "elevation_mask_deg") c.elevation_mask_deg = value.get<double>();
    else if (key == "orbit_radius_m") c.orbit_radius_m = value.get<double>();
    else if (key == "n_satellites") c.n_satellites = value.get<int>();
    else if (key == "noise_sigma_mps") c.noise_sigma_mps = value.get<double>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "walker_planes") c.walker_planes = value.get<int>();
    else if (key == "walker_sats_per_plane") c.walker_sats_per_plane = value.get<int>();
    else if (key == "walker_phasing") c.walker_phasing = value.get<int>();
    else if (key == "hill_vertical_mps") c.hill_vertical_mps = value.get<double>();
    else if (key == "clock_drift_sigma_mps") c.clock_drift_sigma_mps = value.get<double>();
    else if (key == "motion") {
      const auto m = value.get<std::string>();
      if (m == "2d") c.motion = Motion::Planar2D;
      else if (m == "3d") c.motion = Motion::Hill3D;
      else throw Error(Errc::InvalidArgument, "motion must be '2d' or '3d'");
    } else {
      throw Error(Errc::InvalidArgument, "unknown config key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

std::vector<TrajectorySample> trajectory(const SimConfig& cfg, const Vec3& origin, const Rotation& r_true) {
  validate(cfg);
  const int n = epoch_count(cfg);
  // One revolution over the window: radius = speed * duration / (2 pi).
  const double omega = 2.0 * kPi / cfg.duration_s;
  std::vector<TrajectorySample> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    auto& s = out[static_cast<std::size_t>(k)];
    s.time_s = k * cfg.interval_s;
    const double phase = omega * s.time_s;
    double vertical = 0.0;
    if (cfg.motion == Motion::Hill3D) vertical = cfg.hill_vertical_mps * std::sin(2.0 * phase);
    const double horizontal = std::sqrt(cfg.speed_mps * cfg.speed_mps - vertical * vertical);
    s.body_velocity = Vec3(-horizontal * std::sin(phase), horizontal * std::cos(phase), vertical);
  }
  out[0].receiver_pos = origin;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const double dt = out[k].time_s - out[k - 1].time_s;
    out[k].receiver_pos = out[k - 1].receiver_pos + r_true * (0.5 * dt * (out[k].body_velocity + out[k - 1].body_velocity));
  }
  return out;
}

SatelliteState satellite_state(const SimConfig& cfg, const OrbitSlot& slot, double t) {
  const double a = cfg.orbit_radius_m;
  const double omega = std::sqrt(kEarthMu / (a * a * a));
  const double inc = cfg.inclination_deg / kDegPerRad;
  const Vec3 p(std::cos(slot.raan_rad), std::sin(slot.raan_rad), 0.0);
  const Vec3 q(-std::sin(slot.raan_rad) * std::cos(inc), std::cos(slot.raan_rad) * std::cos(inc), std::sin(inc));
  const double u = slot.phase_rad + omega * t;
  SatelliteState s;
  s.id = slot.id;
  s.pos = a * (std::cos(u) * p + std::sin(u) * q);
  s.vel = a * omega * (-std::sin(u) * p + std::cos(u) * q);
  return s;
}

double elevation_deg(const Vec3& receiver, const Vec3& sat) {
  const Vec3 up = enu_basis(receiver).col(2);
  const Vec3 d = (sat - receiver).normalized();
  return std::asin(std::clamp(up.dot(d), -1.0, 1.0)) * kDegPerRad;
}

std::vector<std::vector<SatelliteState>> walker_constellation(const SimConfig& cfg,
                                                              std::span<const TrajectorySample> samples,
                                                              std::mt19937_64& rng) {
  validate(cfg);
  const int planes = cfg.walker_planes;
  const int per_plane = cfg.walker_sats_per_plane;
  const int total = planes * per_plane;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double raan0 = angle(rng);
    const double phase0 = angle(rng);
    std::vector<OrbitSlot> visible;
    for (int p = 0; p < planes; ++p) {
      for (int s = 0; s < per_plane; ++s) {
        OrbitSlot slot;
        char id[16];
        std::snprintf(id, sizeof(id), "G%02d", p * per_plane + s + 1);
        slot.id = id;
        slot.raan_rad = raan0 + 2.0 * kPi * p / planes;
        slot.phase_rad = phase0 + 2.0 * kPi * s / per_plane + 2.0 * kPi * cfg.walker_phasing * p / total;
        const bool always_up = std::all_of(samples.begin(), samples.end(), [&](const TrajectorySample& smp) {
          return elevation_deg(smp.receiver_pos, satellite_state(cfg, slot, smp.time_s).pos) >= cfg.elevation_mask_deg;
        });
        if (always_up) visible.push_back(slot);
      }
    }
    if (static_cast<int>(visible.size()) < cfg.n_satellites) continue;

    std::vector<std::size_t> order(visible.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }
    order.resize(static_cast<std::size_t>(cfg.n_satellites));
    std::sort(order.begin(), order.end());

    std::vector<std::vector<SatelliteState>> out(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      for (std::size_t idx : order) out[k].push_back(satellite_state(cfg, visible[idx], samples[k].time_s));
    }
    return out;
  }
  throw Error(Errc::NoVisibleSatellites, "could not place " + std::to_string(cfg.n_satellites) +
                                             " satellites above the elevation mask");
}

GroundTruth generate_dataset(const SimConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  GroundTruth gt;
  gt.rotation = random_rotation(rng);
  std::normal_distribution<double> drift(0.0, 1.0);
  gt.clock_drift = ClockDrift{cfg.clock_drift_sigma_mps * drift(rng)};

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double lat = std::asin(unit(rng));
  const double lon = kPi * unit(rng);
  gt.origin = geodetic_to_ecef(lat, lon, 0.0);

  const auto samples = trajectory(cfg, gt.origin, gt.rotation);
  const auto sats = walker_constellation(cfg, samples, rng);
  const double lambda = wavelength_m(cfg);

  gt.epochs.resize(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    Epoch& e = gt.epochs[k];
    e.time_s = samples[k].time_s;
    e.receiver_pos = samples[k].receiver_pos;
    e.body_velocity = samples[k].body_velocity;
    for (const SatelliteState& s : sats[k]) {
      Observation obs;
      obs.sat = s;
      obs.doppler.sat_id = s.id;
      obs.doppler.wavelength_m = lambda;
      obs.doppler.sigma_mps = cfg.noise_sigma_mps > 0.0 ? cfg.noise_sigma_mps : 1.0;
      obs.doppler.doppler_hz = synthesize_doppler(gt.rotation, gt.clock_drift, e.receiver_pos, e.body_velocity, s,
                                                  lambda, cfg.noise_sigma_mps, rng);
      e.observations.push_back(std::move(obs));
    }
  }
  return gt;
}

nlohmann::json truth_to_json(const GroundTruth& gt) {
  const Vec9 r = vec(gt.rotation.matrix());
  return {{"rotation", std::vector<double>(r.data(), r.data() + 9)},
          {"clock_drift_mps", gt.clock_drift.mps},
          {"origin_ecef", {gt.origin.x(), gt.origin.y(), gt.origin.z()}}};
}

GroundTruth truth_from_json(const nlohmann::json& j) {
  try {
    const auto r = j.at("rotation").get<std::vector<double>>();
    const auto o = j.at("origin_ecef").get<std::vector<double>>();
    if (r.size() != 9 || o.size() != 3) throw Error(Errc::InvalidArgument, "truth: wrong array length");
    GroundTruth gt;
    gt.rotation = Rotation::from_matrix(unvec(Eigen::Map<const Vec9>(r.data())));
    gt.clock_drift = ClockDrift{j.at("clock_drift_mps").get<double>()};
    gt.origin = Vec3(o[0], o[1], o[2]);
    return gt;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("truth: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

const char* to_string(Method m) {
  switch (m) {
    case Method::Sdp: return "sdp";
    case Method::Voba: return "voba";
    case Method::Gn: return "gn";
  }
  return "unknown";
}

bool McReport::same_result(const McReport& o) const {
  if (runs != o.runs || certified_rate != o.certified_rate || records.size() != o.records.size()) return false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].same_result(o.records[i])) return false;
  }
  return true;
}

std::uint64_t run_seed(std::uint64_t seed, int run) {
  // splitmix64 finalizer over (seed, run)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(run) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

void fill_errors(io::RunRecord& rec, const Rotation& est, const GroundTruth& gt) {
  rec.geodesic_error_deg = geodesic_angle_deg(est, gt.rotation);
  try {
    const Mat3 enu = enu_basis(gt.origin);
    rec.yaw_error_deg = wrap_deg(yaw_deg(est, enu) - yaw_deg(gt.rotation, enu));
  } catch (const Error&) {
    rec.yaw_error_deg = std::nan("");
  }
}

std::string status_for(const Error& e) {
  switch (e.code()) {
    case Errc::InsufficientSatellites: return "infeasible";
    case Errc::DegenerateGeometry:
    case Errc::DegenerateVelocities:
    case Errc::SingularNormalEquations:
    case Errc::NearSingular: return "degenerate";
    case Errc::SolverFailed:
    case Errc::RankDeficientX:
    case Errc::NumericalFailure: return "solver_failed";
    default: return "error";
  }
}

}  // namespace

io::RunRecord run_method(Method method, std::span<const Epoch> epochs, const GroundTruth* truth,
                         const McOptions& opts, std::uint64_t init_seed) {
  io::RunRecord rec;
  rec.method = to_string(method);
  rec.rotation.fill(std::nan(""));
  rec.clock_drift_mps = rec.yaw_error_deg = rec.geodesic_error_deg = std::nan("");
  rec.eig_ratio = rec.cost = rec.dual_value = std::nan("");
  rec.avg_satellites = io::mean_satellites(epochs);
  if (!epochs.empty()) {
    rec.window_start_s = epochs.front().time_s;
    rec.window_end_s = epochs.back().time_s;
  }

  auto fill = [&](const Rotation& est) {
    const Vec9 r = vec(est.matrix());
    std::copy(r.data(), r.data() + 9, rec.rotation.begin());
    if (truth) fill_errors(rec, est, *truth);
  };

  try {
    switch (method) {
      case Method::Sdp: {
        const AlignmentResult res = align(epochs, opts.align);
        fill(res.rotation);
        rec.clock_drift_mps = res.clock_drift.mps;
        rec.certified = res.certificate.certified;
        rec.eig_ratio = res.certificate.eig_ratio;
        rec.cost = res.primal_cost;
        rec.dual_value = res.dual_value;
        rec.wall_time_s = res.wall_time_s;
        break;
      }
      case Method::Voba: {
        const auto start = std::chrono::steady_clock::now();
        const Rotation r = voba_align(epochs);
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        fill(r);
        const CostAssembly cost = assemble_cost(reduce_epochs(epochs, opts.align.weight_mode));
        const Vec10 x = homogenize(r);
        rec.clock_drift_mps = recover_clock_drift(cost.blocks, x).mps;
        rec.cost = x.dot(cost.q_bar * x);
        break;
      }
      case Method::Gn: {
        GnOptions gn;
        gn.weight_mode = opts.align.weight_mode;
        if (opts.gn_init == GnInit::Truth) {
          if (!truth) throw Error(Errc::InvalidArgument, "GN truth initialization needs ground truth");
          gn.initial_rotation = truth->rotation;
        } else if (opts.gn_init == GnInit::Random) {
          std::mt19937_64 init_rng(init_seed);
          gn.initial_rotation = random_rotation(init_rng);
        }
        const auto start = std::chrono::steady_clock::now();
        const GnResult res = gn_align(epochs, gn);
        rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        fill(res.rotation);
        rec.clock_drift_mps = res.clock_drift.mps;
        rec.cost = res.cost;
        break;
      }
    }
  } catch (const Error& e) {
    rec.status = status_for(e);
  } catch (const std::exception&) {
    rec.status = "error";
  }
  return rec;
}

std::vector<io::RunRecord> run_single(const SimConfig& cfg, int run, const McOptions& opts) {
  SimConfig run_cfg = cfg;
  run_cfg.seed = run_seed(cfg.seed, run);
  std::vector<io::RunRecord> out;

  GroundTruth gt;
  bool generated = true;
  try {
    gt = generate_dataset(run_cfg);
  } catch (const std::exception&) {
    generated = false;
  }
  for (Method m : opts.methods) {
    io::RunRecord rec;
    if (generated) {
      rec = run_method(m, gt.epochs, &gt, opts, run_seed(run_cfg.seed, 7919));
    } else {
      rec = run_method(m, {}, nullptr, opts, 0);
      rec.status = "error";
    }
    rec.run = run;
    rec.window_start_s = 0.0;
    rec.window_end_s = cfg.duration_s;
    out.push_back(rec);
  }
  return out;
}

int worker_threads(int requested) {
  int n = requested > 0 ? requested : std::max(1, omp_get_max_threads());
  if (const char* env = std::getenv("CERT_ALIGN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

namespace {

McReport merge(int runs, std::vector<std::vector<io::RunRecord>>& per_run, const McOptions& opts) {
  McReport rep;
  rep.runs = runs;
  std::size_t certified = 0;
  for (auto& recs : per_run) {
    for (auto& r : recs) {
      if (r.method == "sdp" && r.certified) ++certified;
      rep.records.push_back(std::move(r));
    }
  }
  const bool has_sdp = std::find(opts.methods.begin(), opts.methods.end(), Method::Sdp) != opts.methods.end();
  rep.certified_rate = has_sdp && runs > 0 ? static_cast<double>(certified) / runs : 0.0;
  if (!rep.records.empty()) rep.stats = io::summarize(rep.records, io::ErrorMetric::Geodesic);
  return rep;
}

}  // namespace

McReport monte_carlo(const SimConfig& cfg, int runs, const McOptions& opts) {
  if (runs < 1) throw Error(Errc::InvalidArgument, "runs must be >= 1");
  validate(cfg);
  std::vector<std::vector<io::RunRecord>> per_run(static_cast<std::size_t>(runs));
  const int threads = worker_threads(opts.threads);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < runs; ++i) {
    per_run[static_cast<std::size_t>(i)] = run_single(cfg, i, opts);
  }
  return merge(runs, per_run, opts);
}

McReport monte_carlo_serial(const SimConfig& cfg, int runs, const McOptions& opts) {
  if (runs < 1) throw Error(Errc::InvalidArgument, "runs must be >= 1");
  validate(cfg);
  std::vector<std::vector<io::RunRecord>> per_run(static_cast<std::size_t>(runs));
  for (int i = 0; i < runs; ++i) per_run[static_cast<std::size_t>(i)] = run_single(cfg, i, opts);
  return merge(runs, per_run, opts);
}

}  // namespace certalign::sim
