#pragma once

#include <string>

#include "splatrig/geometry.hpp"

namespace splatrig {

/// Motion parameters of the six movable parts: door hinge axes as their
/// ground-plane (x, y) position (the axis itself is vertical), wheel joints
/// as full 3D centers. Units are asset units.
struct KinematicParams {
  Vec2 hinge_fl = Vec2::Zero();
  Vec2 hinge_fr = Vec2::Zero();
  Vec3 joint_fl = Vec3::Zero();
  Vec3 joint_fr = Vec3::Zero();
  Vec3 joint_rl = Vec3::Zero();
  Vec3 joint_rr = Vec3::Zero();

  bool all_finite() const {
    return hinge_fl.allFinite() && hinge_fr.allFinite() && joint_fl.allFinite() &&
           joint_fr.allFinite() && joint_rl.allFinite() && joint_rr.allFinite();
  }

  /// Flat 16-vector (hinge_fl, hinge_fr, joint_fl, joint_fr, joint_rl,
  /// joint_rr); the regression head's target layout.
  Eigen::Matrix<double, 16, 1> to_vector() const;
  static KinematicParams from_vector(const Eigen::Matrix<double, 16, 1>& v);
};

/// One articulation command. Steer fractions multiply max_steer; the roll
/// angle applies to all four wheels.
struct PartState {
  double door_fl = 0;  // radians, positive opens outward
  double door_fr = 0;
  double steer_fraction_fl = 0;  // in [-1, 1]
  double steer_fraction_fr = 0;
  double roll_angle = 0;  // radians
  double max_steer = deg_to_rad(35.0);

  void validate() const {
    check(std::abs(steer_fraction_fl) <= 1 && std::abs(steer_fraction_fr) <= 1,
          "part state: steer fractions must be in [-1, 1]");
    check(is_finite(door_fl) && is_finite(door_fr) && is_finite(roll_angle) &&
              is_finite(max_steer),
          "part state: angles must be finite");
  }
};

KinematicParams load_kinematics_json(const std::string& path);
void save_kinematics_json(const KinematicParams& kin, const std::string& path);
std::string kinematics_to_json(const KinematicParams& kin);
KinematicParams kinematics_from_json(const std::string& text);

PartState load_part_state_json(const std::string& path);
void save_part_state_json(const PartState& state, const std::string& path);
std::string part_state_to_json(const PartState& state);
PartState part_state_from_json(const std::string& text);

}  // namespace splatrig
