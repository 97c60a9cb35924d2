#include "splatrig/orbit.hpp"

namespace splatrig {

Camera orbit_camera(const OrbitConfig& cfg, const Vec3& target, int width,
                    int height, double fov_deg) {
  cfg.validate();
  const double az = deg_to_rad(cfg.angle);
  const Vec3 eye(target[0] + cfg.distance * std::cos(az),
                 target[1] + cfg.distance * std::sin(az), cfg.height);

  Vec3 forward = target - eye;
  forward[2] = 0.0;  // pitch is applied explicitly to the horizontal axis
  check(forward.norm() > 1e-12, "orbit_camera: camera is on the target axis");
  forward.normalize();

  const Vec3 right = forward.cross(Vec3(0, 0, 1)).normalized();
  const Mat3 pitch_rot = axis_angle_to_mat(right, deg_to_rad(cfg.pitch));
  const Vec3 dir = pitch_rot * forward;

  const double f = 0.5 * width / std::tan(0.5 * deg_to_rad(fov_deg));
  return Camera::look_at(width, height, f, f, eye, eye + dir);
}

std::vector<OrbitConfig> interpolate_poses(const OrbitConfig& a, const OrbitConfig& b,
                                           int n) {
  check(n >= 2, "interpolate_poses: need n >= 2");
  std::vector<OrbitConfig> out(n);
  for (int i = 0; i < n; ++i) {
    const double t = double(i) / double(n - 1);
    out[i].distance = a.distance + t * (b.distance - a.distance);
    out[i].height = a.height + t * (b.height - a.height);
    out[i].angle = a.angle + t * (b.angle - a.angle);
    out[i].pitch = a.pitch + t * (b.pitch - a.pitch);
  }
  out.front() = a;
  out.back() = b;
  return out;
}

std::vector<Camera> sphere_views(int n, double radius, int width, int height,
                                 double fov_deg) {
  check(n >= 1, "sphere_views: need n >= 1");
  check(radius > 0, "sphere_views: radius must be positive");
  const double f = 0.5 * width / std::tan(0.5 * deg_to_rad(fov_deg));
  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));

  std::vector<Camera> cams;
  cams.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec3 dir;
    if (n == 1) {
      dir = Vec3(0, 0, 1);
    } else {
      const double z = 1.0 - 2.0 * (i + 0.5) / double(n);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden_angle * i;
      dir = Vec3(r * std::cos(phi), r * std::sin(phi), z);
    }
    cams.push_back(Camera::look_at(width, height, f, f, radius * dir, Vec3::Zero()));
  }
  return cams;
}

}  // namespace splatrig
