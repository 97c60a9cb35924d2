#pragma once

#include <map>

#include "splatrig/asset.hpp"
#include "splatrig/kinematics.hpp"

namespace splatrig {

/// Axis conventions for articulation. Defaults: up +z, forward +x,
/// lateral +y (left). Door signs make a positive door angle open outward on
/// both sides; steering is positive toward +lateral.
struct VehicleFrame {
  Vec3 up = Vec3(0, 0, 1);
  Vec3 forward = Vec3(1, 0, 0);
  Vec3 lateral = Vec3(0, 1, 0);
  double door_sign_fl = 1.0;
  double door_sign_fr = -1.0;

  void validate() const {
    check(std::abs(up.norm() - 1) < 1e-6 && std::abs(forward.norm() - 1) < 1e-6 &&
              std::abs(lateral.norm() - 1) < 1e-6,
          "vehicle frame: axes must be unit length");
    check(std::abs(up.dot(forward)) < 1e-6 && std::abs(up.dot(lateral)) < 1e-6 &&
              std::abs(forward.dot(lateral)) < 1e-6,
          "vehicle frame: axes must be orthogonal");
  }
};

/// Rigidly rotates every Gaussian of a part about the line (pivot, axis):
/// means orbit the axis, orientations compose with the rotation, scales,
/// opacities and colors are untouched.
GaussianAsset rotate_part(const GaussianAsset& part, const Vec3& axis,
                          const Vec3& pivot, double angle);

GaussianAsset translate_part(const GaussianAsset& part, const Vec3& offset);

/// A posed vehicle plus the command and parameters that produced it.
struct ArticulatedAsset {
  GaussianAsset posed;
  PartState state;
  KinematicParams kin;
};

using PartMap = std::map<PartLabel, GaussianAsset>;

/// Splits an asset by its part labels into the seven-part map.
PartMap split_by_labels(const GaussianAsset& asset);

/// Applies a part state: doors swing about the vertical axis through their
/// hinge, front wheels steer about the vertical axis through their joint and
/// then all wheels roll about the (steering-dependent) lateral axis through
/// their joint. Parts are concatenated in canonical label order.
ArticulatedAsset apply_state(const PartMap& parts, const KinematicParams& kin,
                             const PartState& state,
                             const VehicleFrame& frame = VehicleFrame());

}  // namespace splatrig
