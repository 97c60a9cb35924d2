#pragma once

#include <map>
#include <set>
#include <vector>

#include "splatrig/articulate.hpp"

namespace splatrig {

/// Result of matching external cluster assignments against predicted labels.
/// A cluster id appears under at most one part; parts without any cluster are
/// reported missing rather than dropped.
struct PartSelection {
  struct ClusterStats {
    uint32_t cluster_id;
    size_t matched_count;  // gaussians of the cluster carrying the chosen label
    size_t cluster_size;
    double overlap_ratio;
    bool low_confidence;  // top-two label fractions tied
  };

  std::map<PartLabel, std::set<uint32_t>> clusters;
  std::map<PartLabel, std::vector<ClusterStats>> stats;
  std::vector<PartLabel> missing_parts;

  bool complete() const { return missing_parts.empty(); }
};

/// Assigns each cluster to the movable label carried by the largest fraction
/// of its Gaussians, when that fraction reaches min_overlap. Fraction ties
/// resolve by higher absolute count, then lower label ordinal.
PartSelection align(const std::vector<uint32_t>& cluster_ids,
                    const std::vector<PartLabel>& predicted_labels,
                    double min_overlap = 0.5);

/// Splits the asset into the six selected parts plus the residual Body; the
/// seven assets partition the input exactly. Throws if any movable part has
/// no cluster, listing the missing parts.
PartMap extract_parts(const GaussianAsset& asset, const PartSelection& selection);

}  // namespace splatrig
