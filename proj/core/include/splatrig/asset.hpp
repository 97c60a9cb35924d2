#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "splatrig/geometry.hpp"

namespace splatrig {

/// The seven semantic part labels. Body is everything that never moves; the
/// other six are the movable targets (two front doors, four wheels).
enum class PartLabel : uint8_t {
  Body = 0,
  FrontLeftDoor = 1,
  FrontRightDoor = 2,
  WheelFL = 3,
  WheelFR = 4,
  WheelRL = 5,
  WheelRR = 6,
};

inline constexpr int kNumPartLabels = 7;
inline constexpr std::array<PartLabel, 6> kMovableParts = {
    PartLabel::FrontLeftDoor, PartLabel::FrontRightDoor, PartLabel::WheelFL,
    PartLabel::WheelFR,       PartLabel::WheelRL,        PartLabel::WheelRR};

const char* part_label_name(PartLabel label);
PartLabel part_label_from_name(const std::string& name);

/// One anisotropic 3D Gaussian primitive. Scales are linear world units
/// (strictly positive), opacity is in [0,1], color is the view-independent
/// RGB in [0,1], rotation is a unit quaternion (w, x, y, z).
struct Gaussian {
  Vec3 mean = Vec3::Zero();
  Vec3 scale = Vec3::Ones();
  Vec4 rotation = quat_identity();
  double opacity = 1.0;
  Vec3 color = Vec3::Zero();
};

/// Ordered collection of Gaussians plus optional per-Gaussian annotations.
/// Values are immutable by convention after construction: transforms copy.
struct GaussianAsset {
  std::vector<Gaussian> gaussians;
  std::optional<std::vector<PartLabel>> part_labels;
  std::optional<std::vector<uint32_t>> cluster_ids;

  size_t size() const { return gaussians.size(); }
  bool empty() const { return gaussians.empty(); }
};

/// Throws if any Gaussian or annotation violates the asset invariants
/// (unit quaternions, positive scales, opacity/color ranges, annotation
/// lengths). `context` prefixes the error message.
void validate_asset(const GaussianAsset& asset, const std::string& context = "asset");

/// Point-cloud view of an asset: mean positions and view-independent colors,
/// in asset order.
struct ColoredPoint {
  Vec3 position;
  Vec3 color;
};
std::vector<ColoredPoint> to_point_cloud(const GaussianAsset& asset);

/// Keeps exactly the Gaussians whose index passes `keep`, in original order,
/// with annotations carried over. Throws if nothing matches.
GaussianAsset subset(const GaussianAsset& asset,
                     const std::function<bool(size_t)>& keep);

/// Convenience selectors; require the corresponding annotation.
GaussianAsset subset_by_label(const GaussianAsset& asset, PartLabel label);
GaussianAsset subset_by_clusters(const GaussianAsset& asset,
                                 const std::vector<uint32_t>& clusters);

/// Axis-aligned bounding box of the means.
struct Bounds {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
};
Bounds asset_bounds(const GaussianAsset& asset);

}  // namespace splatrig
