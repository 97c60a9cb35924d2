#include "splatrig/align.hpp"

#include <algorithm>
#include <array>

namespace splatrig {

PartSelection align(const std::vector<uint32_t>& cluster_ids,
                    const std::vector<PartLabel>& predicted_labels,
                    double min_overlap) {
  check(cluster_ids.size() == predicted_labels.size(),
        "align: cluster_ids and predicted_labels length mismatch");
  check(!cluster_ids.empty(), "align: empty annotations");
  check(min_overlap > 0 && min_overlap <= 1, "align: min_overlap must be in (0,1]");

  // per-cluster label histograms, iterated in ascending cluster id so the
  // result is invariant to order-preserving relabelings
  std::map<uint32_t, std::array<size_t, kNumPartLabels>> histograms;
  std::map<uint32_t, size_t> sizes;
  for (size_t i = 0; i < cluster_ids.size(); ++i) {
    auto& hist = histograms.try_emplace(cluster_ids[i]).first->second;
    ++hist[static_cast<int>(predicted_labels[i])];
    ++sizes[cluster_ids[i]];
  }

  PartSelection sel;
  for (const auto& [cluster, hist] : histograms) {
    const size_t size = sizes[cluster];
    size_t best_count = 0;
    int best_label = -1;
    bool tied = false;
    for (PartLabel movable : kMovableParts) {
      const size_t count = hist[static_cast<int>(movable)];
      if (count > best_count) {
        best_count = count;
        best_label = static_cast<int>(movable);
        tied = false;
      } else if (count != 0 && count == best_count) {
        tied = true;  // equal fraction and count; lower ordinal already chosen
      }
    }
    if (best_label < 0) continue;
    const double ratio = double(best_count) / double(size);
    if (ratio < min_overlap) continue;
    const PartLabel label = static_cast<PartLabel>(best_label);
    sel.clusters[label].insert(cluster);
    sel.stats[label].push_back({cluster, best_count, size, ratio, tied});
  }

  for (PartLabel movable : kMovableParts)
    if (!sel.clusters.count(movable)) sel.missing_parts.push_back(movable);
  return sel;
}

PartMap extract_parts(const GaussianAsset& asset, const PartSelection& selection) {
  check(asset.cluster_ids.has_value(), "extract_parts: asset has no cluster ids");
  if (!selection.complete()) {
    std::string missing;
    for (PartLabel p : selection.missing_parts)
      missing += (missing.empty() ? "" : ", ") + std::string(part_label_name(p));
    throw InvalidArgument("extract_parts: no clusters for parts: " + missing);
  }

  // cluster -> part lookup
  std::map<uint32_t, PartLabel> owner;
  for (const auto& [label, clusters] : selection.clusters)
    for (uint32_t c : clusters) owner.emplace(c, label);

  PartMap parts;
  auto& ids = *asset.cluster_ids;
  auto append = [&](PartLabel label, size_t i) {
    GaussianAsset& part = parts[label];
    if (part.empty()) {
      part.part_labels.emplace();
      part.cluster_ids.emplace();
    }
    part.gaussians.push_back(asset.gaussians[i]);
    part.part_labels->push_back(label);
    part.cluster_ids->push_back(ids[i]);
  };

  for (size_t i = 0; i < asset.size(); ++i) {
    const auto it = owner.find(ids[i]);
    append(it == owner.end() ? PartLabel::Body : it->second, i);
  }
  for (PartLabel movable : kMovableParts)
    if (!parts.count(movable))
      throw InvalidArgument(std::string("extract_parts: selected clusters for ") +
                            part_label_name(movable) + " matched no gaussians");
  if (!parts.count(PartLabel::Body)) parts[PartLabel::Body] = GaussianAsset{};
  return parts;
}

}  // namespace splatrig
