#pragma once

#include <vector>

#include "splatrig/camera.hpp"

namespace splatrig {

/// Orbit pose around a target: azimuth `angle` (degrees) about +z at ground
/// distance `distance`, absolute camera height `height`, and a pitch applied
/// to the horizontal look-at direction (negative pitches down).
struct OrbitConfig {
  double distance = 5.0;
  double height = 1.1;
  double angle = 270.0;  // degrees
  double pitch = -10.0;  // degrees

  void validate() const { check(distance > 0, "orbit: distance must be positive"); }
};

Camera orbit_camera(const OrbitConfig& cfg, const Vec3& target, int width,
                    int height, double fov_deg);

/// Component-wise linear interpolation with both endpoints included; the
/// first pose equals `a` and the last equals `b` exactly.
std::vector<OrbitConfig> interpolate_poses(const OrbitConfig& a, const OrbitConfig& b,
                                           int n);

/// Deterministic Fibonacci-sphere viewpoints at `radius` looking at the
/// origin. n = 1 gives the +z pole by convention.
std::vector<Camera> sphere_views(int n, double radius, int width = 400,
                                 int height = 400, double fov_deg = 50.0);

}  // namespace splatrig
