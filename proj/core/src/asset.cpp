#include "splatrig/asset.hpp"

#include <algorithm>
#include <unordered_set>

namespace splatrig {

namespace {
constexpr const char* kPartNames[kNumPartLabels] = {
    "body",     "front_left_door", "front_right_door", "wheel_fl",
    "wheel_fr", "wheel_rl",        "wheel_rr"};
}

const char* part_label_name(PartLabel label) {
  return kPartNames[static_cast<int>(label)];
}

PartLabel part_label_from_name(const std::string& name) {
  for (int i = 0; i < kNumPartLabels; ++i) {
    if (name == kPartNames[i]) return static_cast<PartLabel>(i);
  }
  throw InvalidArgument("unknown part label name: " + name);
}

void validate_asset(const GaussianAsset& asset, const std::string& context) {
  for (size_t i = 0; i < asset.gaussians.size(); ++i) {
    const Gaussian& g = asset.gaussians[i];
    const std::string at = context + ", gaussian " + std::to_string(i);
    for (int k = 0; k < 3; ++k) {
      if (!is_finite(g.mean[k])) throw InvalidArgument(at + ": non-finite mean");
      if (!is_finite(g.scale[k]) || g.scale[k] <= 0)
        throw InvalidArgument(at + ": scale must be positive and finite");
      if (!is_finite(g.color[k]) || g.color[k] < 0 || g.color[k] > 1)
        throw InvalidArgument(at + ": color must be in [0,1]");
    }
    if (!g.rotation.allFinite())
      throw InvalidArgument(at + ": non-finite rotation");
    if (std::abs(g.rotation.norm() - 1.0) > 1e-6)
      throw InvalidArgument(at + ": rotation quaternion is not unit length");
    if (!is_finite(g.opacity) || g.opacity < 0 || g.opacity > 1)
      throw InvalidArgument(at + ": opacity must be in [0,1]");
  }
  if (asset.part_labels && asset.part_labels->size() != asset.size())
    throw InvalidArgument(context + ": part_labels length mismatch");
  if (asset.cluster_ids && asset.cluster_ids->size() != asset.size())
    throw InvalidArgument(context + ": cluster_ids length mismatch");
}

std::vector<ColoredPoint> to_point_cloud(const GaussianAsset& asset) {
  check(!asset.empty(), "to_point_cloud: asset is empty");
  std::vector<ColoredPoint> points;
  points.reserve(asset.size());
  for (const Gaussian& g : asset.gaussians)
    points.push_back({g.mean, g.color});
  return points;
}

GaussianAsset subset(const GaussianAsset& asset,
                     const std::function<bool(size_t)>& keep) {
  GaussianAsset out;
  if (asset.part_labels) out.part_labels.emplace();
  if (asset.cluster_ids) out.cluster_ids.emplace();
  for (size_t i = 0; i < asset.size(); ++i) {
    if (!keep(i)) continue;
    out.gaussians.push_back(asset.gaussians[i]);
    if (asset.part_labels) out.part_labels->push_back((*asset.part_labels)[i]);
    if (asset.cluster_ids) out.cluster_ids->push_back((*asset.cluster_ids)[i]);
  }
  if (out.empty()) throw InvalidArgument("subset: predicate matched no gaussians");
  return out;
}

GaussianAsset subset_by_label(const GaussianAsset& asset, PartLabel label) {
  check(asset.part_labels.has_value(), "subset_by_label: asset has no part labels");
  const auto& labels = *asset.part_labels;
  try {
    return subset(asset, [&](size_t i) { return labels[i] == label; });
  } catch (const InvalidArgument&) {
    throw InvalidArgument(std::string("subset_by_label: no gaussians labeled ") +
                          part_label_name(label));
  }
}

GaussianAsset subset_by_clusters(const GaussianAsset& asset,
                                 const std::vector<uint32_t>& clusters) {
  check(asset.cluster_ids.has_value(), "subset_by_clusters: asset has no cluster ids");
  std::unordered_set<uint32_t> wanted(clusters.begin(), clusters.end());
  const auto& ids = *asset.cluster_ids;
  return subset(asset, [&](size_t i) { return wanted.count(ids[i]) > 0; });
}

Bounds asset_bounds(const GaussianAsset& asset) {
  check(!asset.empty(), "asset_bounds: asset is empty");
  Bounds b;
  b.lo = b.hi = asset.gaussians.front().mean;
  for (const Gaussian& g : asset.gaussians) {
    b.lo = b.lo.cwiseMin(g.mean);
    b.hi = b.hi.cwiseMax(g.mean);
  }
  return b;
}

}  // namespace splatrig
