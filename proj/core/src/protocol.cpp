#include "splatrig/protocol.hpp"

#include <cstdio>

namespace splatrig {

std::vector<std::pair<std::string, PartState>> protocol_states(
    const ProtocolConfig& cfg) {
  std::vector<std::pair<std::string, PartState>> states;
  PartState base;
  base.max_steer = cfg.max_steer;

  PartState s = base;
  s.door_fl = cfg.door_angle;
  states.emplace_back("door_fl", s);

  s = base;
  s.door_fr = cfg.door_angle;
  states.emplace_back("door_fr", s);

  for (double f : cfg.steer_fractions) {
    s = base;
    s.steer_fraction_fl = f;
    s.steer_fraction_fr = f;
    char name[32];
    std::snprintf(name, sizeof(name), "steer_%+04d", int(std::lround(f * 100)));
    states.emplace_back(name, s);
  }

  for (double roll : cfg.roll_angles) {
    s = base;
    s.roll_angle = roll;
    char name[32];
    std::snprintf(name, sizeof(name), "roll_%03d", int(std::lround(rad_to_deg(roll))));
    states.emplace_back(name, s);
  }
  return states;
}

std::vector<Camera> protocol_cameras(const ProtocolConfig& cfg, const Vec3& target) {
  const auto poses = interpolate_poses(cfg.pose_a, cfg.pose_b, cfg.n_poses);
  std::vector<Camera> cams;
  cams.reserve(poses.size());
  for (const OrbitConfig& p : poses)
    cams.push_back(orbit_camera(p, target, cfg.image_width, cfg.image_height,
                                cfg.fov_deg));
  return cams;
}

}  // namespace splatrig
