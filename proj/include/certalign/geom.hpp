#pragma once

#include <random>

#include <Eigen/Dense>

#include "certalign/errors.hpp"

namespace certalign {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec10 = Eigen::Matrix<double, 10, 1>;
using Mat10 = Eigen::Matrix<double, 10, 10>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegPerRad = 180.0 / kPi;
inline constexpr double kRotationTol = 1e-9;

/// An element of SO(3). Construction from an arbitrary matrix is checked.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Throws Errc::InvalidArgument unless ||R^T R - I||_F <= 1e-9 and |det R - 1| <= 1e-9.
  static Rotation from_matrix(const Mat3& m);
  static Rotation identity() { return Rotation(); }
  static Rotation about_x(double angle_rad);
  static Rotation about_y(double angle_rad);
  static Rotation about_z(double angle_rad);
  /// Rodrigues exponential of an axis-angle vector.
  static Rotation exp(const Vec3& omega);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose(), Unchecked{}); }

  Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_, Unchecked{}); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}
  friend Rotation project_to_so3(const Mat3& m);

  Mat3 m_;
};

bool is_rotation(const Mat3& m, double tol = kRotationTol);

Vec3 rotate_vector(const Rotation& r, const Vec3& v);

/// Column-stacking vectorization: (R11, R21, R31, R12, ..., R33).
Vec9 vec(const Mat3& m);
Mat3 unvec(const Vec9& r);

/// Kronecker product a (x) b with a's index outermost.
Vec9 kron(const Vec3& a, const Vec3& b);

Mat3 hat(const Vec3& w);

/// Geodesic distance on SO(3) in degrees, in [0, 180].
double geodesic_angle_deg(const Rotation& a, const Rotation& b);

/// Heading of the rotated body-forward axis (+y, right-forward-up body convention),
/// counter-clockwise from north about up, in degrees within (-180, 180].
/// `enu` holds the east, north and up unit vectors (ECEF) as columns.
/// Throws Errc::VerticalForward when the forward axis is within 1e-9 of vertical.
double yaw_deg(const Rotation& r, const Mat3& enu);

/// Wraps an angle difference into (-180, 180].
double wrap_deg(double angle);

/// Nearest rotation in Frobenius norm. Throws Errc::NearSingular if sigma_min <= 1e-12.
Rotation project_to_so3(const Mat3& m);

/// Haar-uniform random rotation.
Rotation random_rotation(std::mt19937_64& rng);

// WGS-84 helpers used to build local ENU frames.
Vec3 geodetic_to_ecef(double lat_rad, double lon_rad, double height_m);
/// East, north, up (geodetic) unit vectors at an ECEF point, as columns.
Mat3 enu_basis(const Vec3& ecef);

}  // namespace certalign
