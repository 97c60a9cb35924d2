#pragma once

#include <string>
#include <utility>
#include <vector>

#include "splatrig/articulate.hpp"
#include "splatrig/orbit.hpp"

namespace splatrig {

/// The desk-scale evaluation protocol: 8 single-change part states per
/// vehicle (two door openings, four steering fractions, two roll angles)
/// rendered from 40 camera poses interpolated between two orbit configs.
struct ProtocolConfig {
  OrbitConfig pose_a{5.0, 1.1, 270.0, -10.0};
  OrbitConfig pose_b{5.0, 1.5, 270.0, -20.0};
  int n_poses = 40;
  double door_angle = deg_to_rad(60.0);
  double max_steer = deg_to_rad(35.0);
  std::vector<double> steer_fractions{-1.0, -0.5, 0.5, 1.0};
  std::vector<double> roll_angles{deg_to_rad(120.0), deg_to_rad(240.0)};
  int image_width = 400;
  int image_height = 400;
  double fov_deg = 50.0;
};

/// The eight named states in fixed enumeration order.
std::vector<std::pair<std::string, PartState>> protocol_states(
    const ProtocolConfig& cfg);

std::vector<Camera> protocol_cameras(const ProtocolConfig& cfg, const Vec3& target);

}  // namespace splatrig
