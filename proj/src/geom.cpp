#include "certalign/geom.hpp"

#include <algorithm>
#include <cmath>

namespace certalign {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::NearSingular: return "NearSingular";
    case Errc::VerticalForward: return "VerticalForward";
    case Errc::RankDeficientX: return "RankDeficientX";
    case Errc::NumericalFailure: return "NumericalFailure";
    case Errc::SolverFailed: return "SolverFailed";
    case Errc::InsufficientSatellites: return "InsufficientSatellites";
    case Errc::DegenerateGeometry: return "DegenerateGeometry";
    case Errc::DegenerateVelocities: return "DegenerateVelocities";
    case Errc::SingularNormalEquations: return "SingularNormalEquations";
    case Errc::NoVisibleSatellites: return "NoVisibleSatellites";
    case Errc::ParseError: return "ParseError";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  return (m.transpose() * m - Mat3::Identity()).norm() <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

Rotation Rotation::from_matrix(const Mat3& m) {
  if (!is_rotation(m)) throw Error(Errc::InvalidArgument, "matrix is not in SO(3)");
  return Rotation(m, Unchecked{});
}

Rotation Rotation::about_x(double a) {
  Mat3 m;
  m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return Rotation(m, Unchecked{});
}

Rotation Rotation::about_y(double a) {
  Mat3 m;
  m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return Rotation(m, Unchecked{});
}

Rotation Rotation::about_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return Rotation(m, Unchecked{});
}

Rotation Rotation::exp(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 k = hat(omega);
  Mat3 m;
  if (theta < 1e-8) {
    m = Mat3::Identity() + k + 0.5 * k * k;
  } else {
    m = Mat3::Identity() + std::sin(theta) / theta * k + (1.0 - std::cos(theta)) / (theta * theta) * k * k;
  }
  return Rotation(m, Unchecked{});
}

Vec3 rotate_vector(const Rotation& r, const Vec3& v) { return r * v; }

Vec9 vec(const Mat3& m) { return Eigen::Map<const Vec9>(m.data()); }

Mat3 unvec(const Vec9& r) { return Eigen::Map<const Mat3>(r.data()); }

Vec9 kron(const Vec3& a, const Vec3& b) {
  Vec9 out;
  for (int i = 0; i < 3; ++i) out.segment<3>(3 * i) = a[i] * b;
  return out;
}

Mat3 hat(const Vec3& w) {
  Mat3 k;
  k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return k;
}

double geodesic_angle_deg(const Rotation& a, const Rotation& b) {
  const Mat3 r = a.matrix().transpose() * b.matrix();
  const double c = (r.trace() - 1.0) / 2.0;
  const double s = 0.5 * Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)).norm();
  return std::atan2(s, c) * kDegPerRad;
}

double wrap_deg(double angle) {
  double a = std::fmod(angle, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double yaw_deg(const Rotation& r, const Mat3& enu) {
  const Vec3 forward = r * Vec3::UnitY();
  const Vec3 local = enu.transpose() * forward;
  const double horizontal = std::hypot(local.x(), local.y());
  if (horizontal <= 1e-9) throw Error(Errc::VerticalForward, "body forward axis is vertical");
  // Counter-clockwise from north: a left turn (towards west) is positive.
  const double yaw = std::atan2(-local.x(), local.y()) * kDegPerRad;
  return wrap_deg(yaw);
}

Rotation project_to_so3(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (!m.allFinite() || svd.singularValues()(2) <= 1e-12) {
    throw Error(Errc::NearSingular, "matrix too close to singular for SO(3) projection");
  }
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (u * v.transpose()).determinant() < 0 ? -1.0 : 1.0;
  return Rotation(u * d * v.transpose(), Rotation::Unchecked{});
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q.coeffs() << normal(rng), normal(rng), normal(rng), normal(rng);
  } while (q.norm() < 1e-6);
  q.normalize();
  return project_to_so3(q.toRotationMatrix());
}

namespace {
constexpr double kWgsA = 6378137.0;
constexpr double kWgsF = 1.0 / 298.257223563;
constexpr double kWgsE2 = kWgsF * (2.0 - kWgsF);
}  // namespace

Vec3 geodetic_to_ecef(double lat, double lon, double h) {
  const double n = kWgsA / std::sqrt(1.0 - kWgsE2 * std::sin(lat) * std::sin(lat));
  return {(n + h) * std::cos(lat) * std::cos(lon), (n + h) * std::cos(lat) * std::sin(lon),
          (n * (1.0 - kWgsE2) + h) * std::sin(lat)};
}

Mat3 enu_basis(const Vec3& p) {
  const double lon = std::atan2(p.y(), p.x());
  const double rho = std::hypot(p.x(), p.y());
  double lat = std::atan2(p.z(), rho * (1.0 - kWgsE2));
  for (int i = 0; i < 5; ++i) {
    const double n = kWgsA / std::sqrt(1.0 - kWgsE2 * std::sin(lat) * std::sin(lat));
    const double h = rho > 1e-9 ? rho / std::cos(lat) - n : std::abs(p.z()) - n * (1.0 - kWgsE2);
    lat = std::atan2(p.z(), rho * (1.0 - kWgsE2 * n / (n + h)));
  }
  Mat3 enu;
  enu.col(0) << -std::sin(lon), std::cos(lon), 0.0;
  enu.col(1) << -std::sin(lat) * std::cos(lon), -std::sin(lat) * std::sin(lon), std::cos(lat);
  enu.col(2) << std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat);
  return enu;
}

}  // namespace certalign
