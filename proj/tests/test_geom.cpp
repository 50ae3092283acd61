#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "certalign/geom.hpp"

using namespace certalign;

TEST(Geom, RotateVectorIdentityAndAxis) {
  const Vec3 v(1, 2, 3);
  EXPECT_TRUE(rotate_vector(Rotation::identity(), v).isApprox(v));
  const Vec3 r = rotate_vector(Rotation::about_z(kPi / 2), Vec3::UnitX());
  EXPECT_NEAR((r - Vec3::UnitY()).norm(), 0.0, 1e-15);
}

TEST(Geom, RotationPreservesNorm) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const Rotation r = random_rotation(rng);
    const Vec3 v(g(rng), g(rng), g(rng));
    EXPECT_NEAR(rotate_vector(r, v).norm(), v.norm(), 1e-12);
  }
}

TEST(Geom, VecIsColumnStacked) {
  Vec9 expected;
  expected << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  EXPECT_EQ(vec(Mat3::Identity()), expected);
  Mat3 m;
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  EXPECT_EQ(vec(m)(1), 4.0);
  EXPECT_EQ(vec(m)(3), 2.0);
  EXPECT_EQ(unvec(vec(m)), m);
}

TEST(Geom, KronVecIdentity) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const Rotation r = random_rotation(rng);
    const Vec3 v(g(rng), g(rng), g(rng));
    const Vec3 n(g(rng), g(rng), g(rng));
    EXPECT_NEAR(kron(v, n).dot(vec(r.matrix())), n.dot(r.matrix() * v), 1e-12);
  }
}

TEST(Geom, GeodesicAngle) {
  EXPECT_NEAR(geodesic_angle_deg(Rotation::identity(), Rotation::identity()), 0.0, 1e-12);
  EXPECT_NEAR(geodesic_angle_deg(Rotation::identity(), Rotation::about_z(kPi)), 180.0, 1e-9);
  EXPECT_NEAR(geodesic_angle_deg(Rotation::about_z(10 / kDegPerRad), Rotation::about_z(40 / kDegPerRad)), 30.0,
              1e-10);
  // small angles keep full relative precision
  EXPECT_NEAR(geodesic_angle_deg(Rotation::identity(), Rotation::about_x(1e-9)), 1e-9 * kDegPerRad, 1e-20);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const Rotation a = random_rotation(rng), b = random_rotation(rng);
    EXPECT_NEAR(geodesic_angle_deg(a, b), geodesic_angle_deg(b, a), 1e-9);
  }
}

TEST(Geom, Yaw) {
  const Vec3 origin = geodetic_to_ecef(0.9, 0.2, 30.0);
  const Mat3 enu = enu_basis(origin);
  // body (x right, y forward, z up) mapped straight onto ENU: forward points north
  const Rotation aligned = Rotation::from_matrix(enu);
  EXPECT_NEAR(yaw_deg(aligned, enu), 0.0, 1e-9);
  const Rotation up90 = Rotation::from_matrix(enu * Rotation::about_z(kPi / 2).matrix());
  EXPECT_NEAR(yaw_deg(up90, enu), 90.0, 1e-9);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-170, 170);
  for (int i = 0; i < 50; ++i) {
    const Rotation r = random_rotation(rng);
    const Vec3 fwd = r.matrix().col(1);
    if (std::abs(fwd.dot(enu.col(2))) > 0.99) continue;
    const double delta = u(rng);
    const Rotation up_rot = Rotation::from_matrix(enu * Rotation::about_z(delta / kDegPerRad).matrix() * enu.transpose());
    EXPECT_NEAR(wrap_deg(yaw_deg(up_rot * r, enu) - yaw_deg(r, enu)), delta, 1e-8);
  }
  EXPECT_THROW(yaw_deg(Rotation::from_matrix(enu * Rotation::about_x(kPi / 2).matrix()), enu), Error);
}

TEST(Geom, ProjectToSo3) {
  std::mt19937_64 rng(11);
  const Rotation r = random_rotation(rng);
  EXPECT_TRUE(project_to_so3(r.matrix()).matrix().isApprox(r.matrix(), 1e-14));
  EXPECT_TRUE(project_to_so3(2.5 * r.matrix()).matrix().isApprox(r.matrix(), 1e-14));
  EXPECT_THROW(project_to_so3(Mat3::Zero()), Error);
}

TEST(Geom, ProjectionBeatsRandomSampling) {
  std::mt19937_64 rng(13);
  const Mat3 m = Mat3::Random();
  const double best = (m - project_to_so3(m).matrix()).norm();
  for (int i = 0; i < 100000; ++i) {
    ASSERT_GE((m - random_rotation(rng).matrix()).norm(), best - 1e-12);
  }
}

TEST(Geom, FromMatrixChecks) {
  EXPECT_THROW(Rotation::from_matrix(-Mat3::Identity()), Error);
  EXPECT_THROW(Rotation::from_matrix(2.0 * Mat3::Identity()), Error);
  EXPECT_NO_THROW(Rotation::from_matrix(Rotation::about_y(0.3).matrix()));
  const Vec3 w(0.1, -0.4, 0.7);
  EXPECT_NEAR(geodesic_angle_deg(Rotation::identity(), Rotation::exp(w)), w.norm() * kDegPerRad, 1e-10);
}

TEST(Geom, RandomRotationIsUniformish) {
  // Haar measure: mean trace is 0
  std::mt19937_64 rng(17);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += random_rotation(rng).matrix().trace();
  EXPECT_NEAR(sum / n, 0.0, 0.05);
}

TEST(Geom, EnuBasis) {
  const Vec3 p = geodetic_to_ecef(0.0, 0.0, 0.0);
  EXPECT_NEAR(p.x(), 6378137.0, 1e-6);
  const Mat3 enu = enu_basis(p);
  EXPECT_TRUE(enu.col(0).isApprox(Vec3::UnitY()));
  EXPECT_TRUE(enu.col(1).isApprox(Vec3::UnitZ()));
  EXPECT_TRUE(enu.col(2).isApprox(Vec3::UnitX()));
}
