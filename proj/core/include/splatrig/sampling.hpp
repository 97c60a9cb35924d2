#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "splatrig/geometry.hpp"

namespace splatrig {

/// Unordered point set with optional per-point colors and integer labels.
struct PointSet {
  std::vector<Vec3> positions;
  std::optional<std::vector<Vec3>> colors;
  std::optional<std::vector<int>> labels;

  size_t size() const { return positions.size(); }

  void validate() const {
    check(!positions.empty(), "point set must be non-empty");
    for (const Vec3& p : positions)
      check(p.allFinite(), "point set has non-finite coordinates");
    if (colors) check(colors->size() == positions.size(), "colors length mismatch");
    if (labels) check(labels->size() == positions.size(), "labels length mismatch");
  }

  PointSet gather(const std::vector<uint32_t>& indices) const {
    PointSet out;
    out.positions.reserve(indices.size());
    if (colors) out.colors.emplace();
    if (labels) out.labels.emplace();
    for (uint32_t i : indices) {
      out.positions.push_back(positions[i]);
      if (colors) out.colors->push_back((*colors)[i]);
      if (labels) out.labels->push_back((*labels)[i]);
    }
    return out;
  }
};

/// Farthest point sampling: greedy max-min selection of m indices starting at
/// `start`. Each chosen index maximizes the minimum distance to the already
/// chosen set; ties break toward the lowest index.
std::vector<uint32_t> fps(const PointSet& points, size_t m, size_t start = 0);

/// For each center, up to max_k point indices within `radius`,
/// lowest-index-first. Centers with no point in range fall back to their
/// single nearest point, so groups are never empty.
std::vector<std::vector<uint32_t>> ball_query(const PointSet& points,
                                              const std::vector<Vec3>& centers,
                                              double radius, size_t max_k);

/// Like ball_query but keeps the max_k NEAREST points within the radius,
/// ordered by increasing distance (ties by lower index). Selection depends
/// only on geometry, not input order, on tie-free inputs.
std::vector<std::vector<uint32_t>> ball_query_nearest(
    const PointSet& points, const std::vector<Vec3>& centers, double radius,
    size_t max_k);

/// k nearest neighbors of `query` among `points`, ordered by increasing
/// distance (ties by lower index).
std::vector<uint32_t> knn(const PointSet& points, const Vec3& query, size_t k);

/// Majority label among the k nearest sampled points, per full point.
/// Majority ties break to the label of the single nearest sampled point.
std::vector<int> knn_propagate(const PointSet& sampled, const PointSet& full,
                               size_t k);

/// Index of the lexicographically smallest position (x, then y, then z, then
/// index). Order-canonical seed for grouping.
size_t lexicographic_min_index(const PointSet& points);

}  // namespace splatrig
