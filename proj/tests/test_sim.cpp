#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "certalign/io.hpp"
#include "certalign/sim.hpp"

using namespace certalign;

TEST(Sim, DefaultsFollowTheProtocol) {
  const sim::SimConfig cfg;
  EXPECT_EQ(sim::epoch_count(cfg), 11);
  EXPECT_NEAR(sim::wavelength_m(cfg), 0.19029, 1e-5);
  EXPECT_DOUBLE_EQ(sim::wavelength_m(cfg), 299792458.0 / 1575.42e6);
}

TEST(Sim, ValidateRejectsBadConfigs) {
  sim::SimConfig cfg;
  cfg.n_satellites = 0;
  EXPECT_THROW(sim::validate(cfg), Error);
  cfg = {};
  cfg.interval_s = -1;
  EXPECT_THROW(sim::validate(cfg), Error);
  cfg = {};
  cfg.noise_sigma_mps = -0.1;
  EXPECT_THROW(sim::validate(cfg), Error);
}

TEST(Sim, ConfigJsonRoundTrip) {
  sim::SimConfig cfg;
  cfg.n_satellites = 3;
  cfg.motion = sim::Motion::Planar2D;
  cfg.noise_sigma_mps = 0.25;
  cfg.seed = 0xfeedfacecafebeefULL;
  const auto back = sim::config_from_json(sim::to_json(cfg));
  EXPECT_EQ(sim::to_json(back), sim::to_json(cfg));
  EXPECT_EQ(back.seed, cfg.seed);
  auto j = sim::to_json(cfg);
  j["bogus"] = 1;
  EXPECT_THROW(sim::config_from_json(j), Error);
  EXPECT_EQ(sim::config_from_json(nlohmann::json::object()).n_satellites, sim::SimConfig{}.n_satellites);
}

TEST(Sim, SatelliteOrbits) {
  sim::SimConfig cfg;
  const double speed = std::sqrt(sim::kEarthMu / cfg.orbit_radius_m);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  for (int i = 0; i < 50; ++i) {
    const sim::OrbitSlot slot{"G01", u(rng), u(rng)};
    for (double t : {0.0, 5.0, 3600.0}) {
      const SatelliteState s = sim::satellite_state(cfg, slot, t);
      EXPECT_NEAR(s.pos.norm(), 2.656e7, 1.0);
      EXPECT_NEAR(s.vel.norm(), speed, 1e-3);
      EXPECT_NEAR(s.pos.dot(s.vel), 0.0, 1e-3 * s.pos.norm());
    }
    // velocity consistent with the propagation
    const double h = 1e-3;
    const Vec3 fd = (sim::satellite_state(cfg, slot, 10 + h).pos - sim::satellite_state(cfg, slot, 10 - h).pos) / (2 * h);
    EXPECT_NEAR((fd - sim::satellite_state(cfg, slot, 10).vel).norm(), 0.0, 1e-3);
  }
}

TEST(Sim, ElevationMask) {
  const Vec3 rcv = geodetic_to_ecef(0.5, 0.1, 0);
  const Vec3 up = enu_basis(rcv).col(2);
  EXPECT_NEAR(sim::elevation_deg(rcv, rcv + 2e7 * up), 90.0, 1e-6);
  EXPECT_NEAR(sim::elevation_deg(rcv, rcv + 2e7 * (up + enu_basis(rcv).col(0)).normalized()), 45.0, 1e-6);
  EXPECT_LT(sim::elevation_deg(rcv, rcv - 2e7 * up), 0.0);

  sim::SimConfig cfg;
  cfg.n_satellites = 8;
  const auto gt = sim::generate_dataset(cfg);
  for (const Epoch& e : gt.epochs) {
    EXPECT_EQ(e.observations.size(), 8u);
    for (const auto& o : e.observations) EXPECT_GE(sim::elevation_deg(e.receiver_pos, o.sat.pos), cfg.elevation_mask_deg);
  }
}

TEST(Sim, TrajectorySpeedAndRank) {
  for (auto motion : {sim::Motion::Planar2D, sim::Motion::Hill3D}) {
    sim::SimConfig cfg;
    cfg.motion = motion;
    std::mt19937_64 rng(3);
    const auto samples = sim::trajectory(cfg, geodetic_to_ecef(0.9, 0.2, 10), random_rotation(rng));
    ASSERT_EQ(samples.size(), 11u);
    Eigen::Matrix3Xd v(3, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t k = 0; k < samples.size(); ++k) {
      EXPECT_NEAR(samples[k].body_velocity.norm(), 3.0, 1e-12);
      v.col(static_cast<Eigen::Index>(k)) = samples[k].body_velocity;
    }
    const auto sv = Eigen::JacobiSVD<Eigen::Matrix3Xd>(v).singularValues();
    const int rank = static_cast<int>((sv.array() > 1e-9 * sv(0)).count());
    EXPECT_EQ(rank, motion == sim::Motion::Planar2D ? 2 : 3);
  }
}

TEST(Sim, TrajectoryIntegratesPositions) {
  sim::SimConfig cfg;
  std::mt19937_64 rng(4);
  const Rotation r = random_rotation(rng);
  const Vec3 origin = geodetic_to_ecef(0.3, 1.0, 0);
  const auto samples = sim::trajectory(cfg, origin, r);
  EXPECT_EQ(samples.front().receiver_pos, origin);
  double farthest = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const Vec3 step = samples[k].receiver_pos - samples[k - 1].receiver_pos;
    const Vec3 trapezoid = r.matrix() * (0.5 * cfg.interval_s * (samples[k].body_velocity + samples[k - 1].body_velocity));
    EXPECT_NEAR((step - trapezoid).norm(), 0.0, 1e-6);
    farthest = std::max(farthest, (samples[k].receiver_pos - origin).norm());
  }
  // one closed loop: the receiver returns near its start
  EXPECT_GT(farthest, 5.0);
  EXPECT_LT((samples.back().receiver_pos - origin).norm(), 1.0);
}

TEST(Sim, DatasetIsDeterministicAndConsistent) {
  sim::SimConfig cfg;
  cfg.seed = 99;
  const auto a = sim::generate_dataset(cfg);
  const auto b = sim::generate_dataset(cfg);
  std::ostringstream sa, sb;
  io::write_epochs(sa, a.epochs);
  io::write_epochs(sb, b.epochs);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.rotation.matrix(), b.rotation.matrix());

  const auto meas = reduce_epochs(a.epochs);
  for (const auto& m : meas) EXPECT_NEAR(residual(a.rotation, a.clock_drift, m), 0.0, 1e-6);

  cfg.seed = 100;
  std::ostringstream sc;
  io::write_epochs(sc, sim::generate_dataset(cfg).epochs);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Sim, TruthJsonRoundTrip) {
  const auto gt = sim::generate_dataset({});
  const auto back = sim::truth_from_json(sim::truth_to_json(gt));
  EXPECT_EQ(back.rotation.matrix(), gt.rotation.matrix());
  EXPECT_EQ(back.clock_drift.mps, gt.clock_drift.mps);
  EXPECT_EQ(back.origin, gt.origin);
  EXPECT_THROW(sim::truth_from_json(nlohmann::json{{"rotation", {1, 2}}}), Error);
}

TEST(Sim, RunSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (int r = 0; r < 1000; ++r) seen.insert(sim::run_seed(1, r));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(sim::run_seed(1, 0), sim::run_seed(2, 0));
}

TEST(Sim, RunMethodStatuses) {
  sim::SimConfig cfg;
  cfg.n_satellites = 2;
  const auto gt = sim::generate_dataset(cfg);
  sim::McOptions opts;
  const auto voba = sim::run_method(sim::Method::Voba, gt.epochs, &gt, opts, 1);
  EXPECT_EQ(voba.status, "infeasible");
  EXPECT_TRUE(std::isnan(voba.geodesic_error_deg));
  const auto sdp = sim::run_method(sim::Method::Sdp, gt.epochs, &gt, opts, 1);
  EXPECT_EQ(sdp.status, "ok");
  EXPECT_EQ(sdp.method, "sdp");
  EXPECT_DOUBLE_EQ(sdp.avg_satellites, 2.0);
  opts.gn_init = sim::GnInit::Truth;
  EXPECT_EQ(sim::run_method(sim::Method::Gn, gt.epochs, nullptr, opts, 1).status, "error");
}

TEST(Sim, MonteCarloParallelMatchesSerial) {
  sim::SimConfig cfg;
  cfg.n_satellites = 3;
  cfg.noise_sigma_mps = 0.1;
  sim::McOptions opts;
  opts.methods = {sim::Method::Sdp, sim::Method::Voba, sim::Method::Gn};
  opts.gn_init = sim::GnInit::Random;
  const auto serial = sim::monte_carlo_serial(cfg, 24, opts);
  for (int threads : {1, 2, 4}) {
    opts.threads = threads;
    const auto par = sim::monte_carlo(cfg, 24, opts);
    EXPECT_TRUE(par.same_result(serial)) << threads << " threads";
  }
  ASSERT_EQ(serial.records.size(), 72u);
  for (std::size_t i = 0; i < serial.records.size(); ++i) EXPECT_EQ(serial.records[i].run, static_cast<int>(i / 3));
}

TEST(Sim, MonteCarloRates) {
  sim::SimConfig cfg;
  const auto rep = sim::monte_carlo(cfg, 20, {});
  EXPECT_EQ(rep.runs, 20);
  EXPECT_DOUBLE_EQ(rep.certified_rate, 1.0);
  EXPECT_EQ(rep.stats.at("sdp").count, 20u);
  cfg.n_satellites = 1;
  EXPECT_DOUBLE_EQ(sim::monte_carlo(cfg, 20, {}).certified_rate, 0.0);
}

TEST(Sim, WorkerThreadsFromEnvironment) {
  EXPECT_EQ(sim::worker_threads(3), 3);
  setenv("CERT_ALIGN_THREADS", "2", 1);
  EXPECT_EQ(sim::worker_threads(3), 2);
  EXPECT_EQ(sim::worker_threads(1), 1);
  EXPECT_LE(sim::worker_threads(), 2);
  unsetenv("CERT_ALIGN_THREADS");
  EXPECT_GE(sim::worker_threads(), 1);
}
