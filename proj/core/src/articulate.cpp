#include "splatrig/articulate.hpp"

namespace splatrig {

GaussianAsset rotate_part(const GaussianAsset& part, const Vec3& axis,
                          const Vec3& pivot, double angle) {
  const Vec4 q = quat_from_axis_angle(axis, angle);
  const Mat3 r = quat_to_mat(q);
  GaussianAsset out = part;
  for (Gaussian& g : out.gaussians) {
    g.mean = r * (g.mean - pivot) + pivot;
    g.rotation = quat_normalized(quat_mul(q, g.rotation));
  }
  return out;
}

GaussianAsset translate_part(const GaussianAsset& part, const Vec3& offset) {
  GaussianAsset out = part;
  for (Gaussian& g : out.gaussians) g.mean += offset;
  return out;
}

PartMap split_by_labels(const GaussianAsset& asset) {
  check(asset.part_labels.has_value(), "split_by_labels: asset has no part labels");
  PartMap parts;
  for (int l = 0; l < kNumPartLabels; ++l) {
    const PartLabel label = static_cast<PartLabel>(l);
    GaussianAsset part;
    if (asset.part_labels) part.part_labels.emplace();
    if (asset.cluster_ids) part.cluster_ids.emplace();
    for (size_t i = 0; i < asset.size(); ++i) {
      if ((*asset.part_labels)[i] != label) continue;
      part.gaussians.push_back(asset.gaussians[i]);
      if (part.part_labels) part.part_labels->push_back(label);
      if (asset.cluster_ids) part.cluster_ids->push_back((*asset.cluster_ids)[i]);
    }
    if (!part.empty()) parts[label] = std::move(part);
  }
  return parts;
}

namespace {

GaussianAsset pose_wheel(const GaussianAsset& wheel, const Vec3& joint,
                         double steer_angle, double roll_angle,
                         const VehicleFrame& frame) {
  GaussianAsset posed = wheel;
  Vec3 roll_axis = frame.lateral;
  if (steer_angle != 0.0) {
    posed = rotate_part(posed, frame.up, joint, steer_angle);
    // the roll axis steers with the wheel
    roll_axis = axis_angle_to_mat(frame.up, steer_angle) * roll_axis;
  }
  if (roll_angle != 0.0) posed = rotate_part(posed, roll_axis, joint, roll_angle);
  return posed;
}

}  // namespace

ArticulatedAsset apply_state(const PartMap& parts, const KinematicParams& kin,
                             const PartState& state, const VehicleFrame& frame) {
  frame.validate();
  state.validate();
  check(kin.all_finite(), "apply_state: non-finite kinematic parameters");
  for (int l = 0; l < kNumPartLabels; ++l) {
    const PartLabel label = static_cast<PartLabel>(l);
    if (!parts.count(label))
      throw InvalidArgument(std::string("apply_state: missing part ") +
                            part_label_name(label));
  }

  // hinge coordinates live in the (forward, lateral) ground plane; any point
  // on the vertical axis works as the pivot
  auto hinge_pivot = [&](const Vec2& hinge) {
    return (frame.forward * hinge[0] + frame.lateral * hinge[1]).eval();
  };

  PartMap posed;
  posed[PartLabel::Body] = parts.at(PartLabel::Body);
  posed[PartLabel::FrontLeftDoor] =
      state.door_fl == 0.0
          ? parts.at(PartLabel::FrontLeftDoor)
          : rotate_part(parts.at(PartLabel::FrontLeftDoor), frame.up,
                        hinge_pivot(kin.hinge_fl),
                        frame.door_sign_fl * state.door_fl);
  posed[PartLabel::FrontRightDoor] =
      state.door_fr == 0.0
          ? parts.at(PartLabel::FrontRightDoor)
          : rotate_part(parts.at(PartLabel::FrontRightDoor), frame.up,
                        hinge_pivot(kin.hinge_fr),
                        frame.door_sign_fr * state.door_fr);

  posed[PartLabel::WheelFL] =
      pose_wheel(parts.at(PartLabel::WheelFL), kin.joint_fl,
                 state.steer_fraction_fl * state.max_steer, state.roll_angle, frame);
  posed[PartLabel::WheelFR] =
      pose_wheel(parts.at(PartLabel::WheelFR), kin.joint_fr,
                 state.steer_fraction_fr * state.max_steer, state.roll_angle, frame);
  posed[PartLabel::WheelRL] = pose_wheel(parts.at(PartLabel::WheelRL), kin.joint_rl,
                                         0.0, state.roll_angle, frame);
  posed[PartLabel::WheelRR] = pose_wheel(parts.at(PartLabel::WheelRR), kin.joint_rr,
                                         0.0, state.roll_angle, frame);

  ArticulatedAsset out;
  out.state = state;
  out.kin = kin;
  out.posed.part_labels.emplace();
  bool any_clusters = false;
  for (const auto& [label, part] : posed) any_clusters |= part.cluster_ids.has_value();
  if (any_clusters) out.posed.cluster_ids.emplace();

  for (const auto& [label, part] : posed) {  // std::map iterates in label order
    for (size_t i = 0; i < part.size(); ++i) {
      out.posed.gaussians.push_back(part.gaussians[i]);
      out.posed.part_labels->push_back(label);
      if (out.posed.cluster_ids)
        out.posed.cluster_ids->push_back(
            part.cluster_ids ? (*part.cluster_ids)[i] : 0);
    }
  }
  return out;
}

}  // namespace splatrig
