#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "certalign/model.hpp"
#include "certalign/qcqp.hpp"
#include "fixtures.hpp"

using namespace certalign;
using certalign::testing::random_unit;

TEST(Model, LineOfSight) {
  EXPECT_TRUE(line_of_sight(Vec3::Zero(), Vec3(2e7, 0, 0)).isApprox(Vec3(-1, 0, 0)));
  EXPECT_TRUE(line_of_sight(Vec3(1e7, 0, 0), Vec3(1e7, 1e7, 0)).isApprox(Vec3(0, -1, 0)));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vec3 a = 1e7 * random_unit(rng), b = 2e7 * random_unit(rng);
    EXPECT_TRUE(line_of_sight(a, b).isApprox(-line_of_sight(b, a), 1e-14));
  }
  EXPECT_THROW(line_of_sight(Vec3::Zero(), Vec3(0.5, 0, 0)), Error);
}

TEST(Model, SynthesizeDoppler) {
  std::mt19937_64 rng(1);
  SatelliteState sat{"G01", Vec3(2e7, 0, 0), Vec3::Zero()};
  EXPECT_EQ(synthesize_doppler(Rotation::identity(), {}, Vec3::Zero(), Vec3::Zero(), sat, 0.19, 0.0, rng), 0.0);
  // n = (-1,0,0), R v = (3,0,0): lambda D = -3 with lambda = 1
  EXPECT_NEAR(synthesize_doppler(Rotation::identity(), {}, Vec3::Zero(), Vec3(3, 0, 0), sat, 1.0, 0.0, rng), -3.0,
              1e-15);
}

TEST(Model, ReduceAndResidual) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const Rotation r = random_rotation(rng);
    const ClockDrift t{10.0 * g(rng)};
    const Vec3 pr = 6.4e6 * random_unit(rng);
    SatelliteState sat{"G02", 2.6e7 * random_unit(rng), 3e3 * random_unit(rng)};
    const Vec3 vw(g(rng), g(rng), g(rng));
    RawDoppler raw{"G02", 0.0, 0.19029};
    raw.doppler_hz = synthesize_doppler(r, t, pr, vw, sat, raw.wavelength_m, 0.0, rng);
    const ReducedMeasurement m = reduce(raw, sat, pr, vw);
    EXPECT_NEAR(m.m.dot(vec(r.matrix())), m.n.dot(r.matrix() * vw), 1e-12);
    EXPECT_NEAR(residual(r, t, m), 0.0, 1e-9);
    EXPECT_NEAR(residual(r, ClockDrift{t.mps + 1.0}, m) - residual(r, t, m), 1.0, 1e-9);
  }
}

TEST(Model, ReduceSpecialCases) {
  SatelliteState still{"G03", Vec3(2e7, 1e6, 0), Vec3::Zero()};
  RawDoppler raw{"G03", 12.5, 0.2};
  EXPECT_DOUBLE_EQ(reduce(raw, still, Vec3::Zero(), Vec3(1, 2, 3)).d_bar, 0.2 * 12.5);
  EXPECT_EQ(reduce(raw, still, Vec3::Zero(), Vec3::Zero()).m, Vec9::Zero());
}

TEST(Model, CostMatchesMarginalizedQuadratic) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<ReducedMeasurement> meas(12);
  for (auto& m : meas) {
    m.n = random_unit(rng);
    m.m = kron(Vec3(g(rng), g(rng), g(rng)), m.n);
    m.d_bar = g(rng);
  }
  const CostAssembly cost = assemble_cost(meas);
  const Rotation r = random_rotation(rng);
  const Vec10 x = homogenize(r);
  const ClockDrift t = recover_clock_drift(cost.blocks, x);
  EXPECT_NEAR(doppler_cost(r, t, meas), x.dot(cost.q_bar * x), 1e-10);
  EXPECT_NEAR(full_cost(cost.blocks, t.mps, x), doppler_cost(r, t, meas), 1e-10);
}

TEST(Model, InverseVarianceWeights) {
  std::mt19937_64 rng(5);
  auto sats = certalign::testing::random_sats(rng, certalign::testing::kOrigin, 3);
  auto epochs = certalign::testing::make_epochs(Rotation::identity(), {}, certalign::testing::kOrigin,
                                                {Vec3(1, 0, 0)}, sats);
  epochs[0].observations[1].doppler.sigma_mps = 0.5;
  const auto unit = reduce_epochs(epochs, WeightMode::Unit);
  const auto ivar = reduce_epochs(epochs, WeightMode::InverseVariance);
  EXPECT_EQ(unit[1].weight, 1.0);
  EXPECT_DOUBLE_EQ(ivar[1].weight, 4.0);
}

TEST(Model, ValidateEpoch) {
  Epoch e;
  Observation o;
  o.doppler = {"G01", 1.0, 0.19};
  o.sat = {"G01", Vec3(2e7, 0, 0), Vec3::Zero()};
  e.observations = {o, o};
  EXPECT_THROW(validate_epoch(e), Error);
  e.observations.pop_back();
  EXPECT_NO_THROW(validate_epoch(e));
  e.observations[0].doppler.wavelength_m = 0.0;
  EXPECT_THROW(validate_epoch(e), Error);
}
