#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "splatrig/common.hpp"

namespace splatrig {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Quaternions are stored as (w, x, y, z).

inline Vec4 quat_identity() { return Vec4(1, 0, 0, 0); }

inline Vec4 quat_normalized(const Vec4& q) {
  const double n = q.norm();
  check(n > 0, "cannot normalize zero quaternion");
  return q / n;
}

/// Rotation matrix of a quaternion; the input is normalized first.
inline Mat3 quat_to_mat(const Vec4& q_in) {
  const Vec4 q = quat_normalized(q_in);
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Hamilton product a * b (apply b first, then a).
inline Vec4 quat_mul(const Vec4& a, const Vec4& b) {
  const double aw = a[0], ax = a[1], ay = a[2], az = a[3];
  const double bw = b[0], bx = b[1], by = b[2], bz = b[3];
  return Vec4(aw * bw - ax * bx - ay * by - az * bz,
              aw * bx + ax * bw + ay * bz - az * by,
              aw * by - ax * bz + ay * bw + az * bx,
              aw * bz + ax * by - ay * bx + az * bw);
}

/// Quaternion for a rotation of `angle` radians about a unit `axis`.
inline Vec4 quat_from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  check(n > 1e-12, "rotation axis must be nonzero");
  check(std::abs(n - 1.0) < 1e-6, "rotation axis must be unit length");
  const double half = 0.5 * angle;
  const double s = std::sin(half);
  return Vec4(std::cos(half), s * axis[0], s * axis[1], s * axis[2]);
}

inline Mat3 axis_angle_to_mat(const Vec3& axis, double angle) {
  return quat_to_mat(quat_from_axis_angle(axis, angle));
}

/// Contracts an adjoint dL/dR with the partials of quat_to_mat's
/// unit-quaternion polynomial, giving the formal gradient w.r.t. (w, x, y, z).
/// Callers project the result onto the sphere tangent at q; together with the
/// normalization in quat_to_mat this is the exact derivative of the
/// renormalizing rotation.
inline Vec4 quat_mat_backward(const Vec4& q, const Mat3& g) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Vec4 d;
  d[0] = 2 * (-z * g(0, 1) + y * g(0, 2) + z * g(1, 0) - x * g(1, 2) -
              y * g(2, 0) + x * g(2, 1));
  d[1] = 2 * (y * g(0, 1) + z * g(0, 2) + y * g(1, 0) - 2 * x * g(1, 1) -
              w * g(1, 2) + z * g(2, 0) + w * g(2, 1) - 2 * x * g(2, 2));
  d[2] = 2 * (-2 * y * g(0, 0) + x * g(0, 1) + w * g(0, 2) + x * g(1, 0) +
              z * g(1, 2) - w * g(2, 0) + z * g(2, 1) - 2 * y * g(2, 2));
  d[3] = 2 * (-2 * z * g(0, 0) - w * g(0, 1) + x * g(0, 2) + w * g(1, 0) -
              2 * z * g(1, 1) + y * g(1, 2) + x * g(2, 0) + y * g(2, 1));
  return d;
}

/// Pulls an ambient gradient back through q -> q/|q| : the tangent projection
/// (I - uu^T)/|q| at u = q/|q|. For unit q this is the plain projection.
inline Vec4 quat_tangent_project(const Vec4& q, const Vec4& grad) {
  const double n = q.norm();
  check(n > 0, "cannot project at zero quaternion");
  const Vec4 u = q / n;
  return (grad - u.dot(grad) * u) / n;
}

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

}  // namespace splatrig
