#include "splatrig/camera.hpp"

namespace splatrig {

Camera Camera::look_at(int w, int h, double fx, double fy, const Vec3& eye,
                       const Vec3& target, const Vec3& up_hint) {
  Vec3 forward = target - eye;
  check(forward.norm() > 1e-12, "look_at: eye and target coincide");
  forward.normalize();

  Vec3 up = up_hint;
  if (forward.cross(up).norm() < 1e-9) {
    up = std::abs(forward[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  }
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 down = forward.cross(right).normalized();

  Mat3 rot;
  rot.row(0) = right;
  rot.row(1) = down;
  rot.row(2) = forward;
  return Camera(w, h, fx, fy, 0.5 * w, 0.5 * h, rot, -rot * eye);
}

Camera Camera::look_at_fov(int w, int h, double fov_deg, const Vec3& eye,
                           const Vec3& target, const Vec3& up_hint) {
  check(fov_deg > 0 && fov_deg < 180, "look_at_fov: fov must be in (0, 180)");
  const double f = 0.5 * w / std::tan(0.5 * deg_to_rad(fov_deg));
  return look_at(w, h, f, f, eye, target, up_hint);
}

}  // namespace splatrig
