#include "splatrig/sampling.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace splatrig {

namespace {
inline double sq_dist(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}
}  // namespace

std::vector<uint32_t> fps(const PointSet& points, size_t m, size_t start) {
  points.validate();
  const size_t n = points.size();
  check(m >= 1 && m <= n, "fps: need 1 <= m <= point count");
  check(start < n, "fps: start index out of range");

  std::vector<uint32_t> chosen;
  chosen.reserve(m);
  chosen.push_back(static_cast<uint32_t>(start));

  // min squared distance from each point to the chosen set; coincident points
  // are excluded via the taken flag so indices never repeat
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  std::vector<uint8_t> taken(n, 0);
  taken[start] = 1;
  uint32_t last = chosen.back();
  for (size_t round = 1; round < m; ++round) {
    double best = -1.0;
    uint32_t best_i = 0;
    for (size_t i = 0; i < n; ++i) {
      const double d = sq_dist(points.positions[i], points.positions[last]);
      if (d < min_d[i]) min_d[i] = d;
      if (!taken[i] && min_d[i] > best) {
        best = min_d[i];
        best_i = static_cast<uint32_t>(i);
      }
    }
    chosen.push_back(best_i);
    taken[best_i] = 1;
    last = best_i;
  }
  return chosen;
}

std::vector<std::vector<uint32_t>> ball_query(const PointSet& points,
                                              const std::vector<Vec3>& centers,
                                              double radius, size_t max_k) {
  points.validate();
  check(radius > 0, "ball_query: radius must be positive");
  check(max_k >= 1, "ball_query: max_k must be >= 1");
  const double r2 = radius * radius;

  std::vector<std::vector<uint32_t>> groups(centers.size());
  for (size_t c = 0; c < centers.size(); ++c) {
    auto& group = groups[c];
    for (size_t i = 0; i < points.size() && group.size() < max_k; ++i) {
      if (sq_dist(points.positions[i], centers[c]) <= r2)
        group.push_back(static_cast<uint32_t>(i));
    }
    if (group.empty()) group = knn(points, centers[c], 1);
  }
  return groups;
}

std::vector<std::vector<uint32_t>> ball_query_nearest(
    const PointSet& points, const std::vector<Vec3>& centers, double radius,
    size_t max_k) {
  points.validate();
  check(radius > 0, "ball_query_nearest: radius must be positive");
  check(max_k >= 1, "ball_query_nearest: max_k must be >= 1");
  const double r2 = radius * radius;

  std::vector<std::vector<uint32_t>> groups(centers.size());
  std::vector<std::pair<double, uint32_t>> in_range;
  for (size_t c = 0; c < centers.size(); ++c) {
    in_range.clear();
    for (size_t i = 0; i < points.size(); ++i) {
      const double d = sq_dist(points.positions[i], centers[c]);
      if (d <= r2) in_range.emplace_back(d, static_cast<uint32_t>(i));
    }
    if (in_range.empty()) {
      groups[c] = knn(points, centers[c], 1);
      continue;
    }
    const size_t k = std::min(max_k, in_range.size());
    std::partial_sort(in_range.begin(), in_range.begin() + k, in_range.end());
    groups[c].reserve(k);
    for (size_t j = 0; j < k; ++j) groups[c].push_back(in_range[j].second);
  }
  return groups;
}

std::vector<uint32_t> knn(const PointSet& points, const Vec3& query, size_t k) {
  check(k >= 1 && k <= points.size(), "knn: need 1 <= k <= point count");
  std::vector<std::pair<double, uint32_t>> dist(points.size());
  for (size_t i = 0; i < points.size(); ++i)
    dist[i] = {sq_dist(points.positions[i], query), static_cast<uint32_t>(i)};
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<uint32_t> out(k);
  for (size_t j = 0; j < k; ++j) out[j] = dist[j].second;
  return out;
}

std::vector<int> knn_propagate(const PointSet& sampled, const PointSet& full,
                               size_t k) {
  sampled.validate();
  full.validate();
  check(sampled.labels.has_value(), "knn_propagate: sampled points need labels");
  check(k >= 1 && k <= sampled.size(), "knn_propagate: need 1 <= k <= sampled size");
  const auto& labels = *sampled.labels;

  std::vector<int> out(full.size());
  for (size_t i = 0; i < full.size(); ++i) {
    const auto nn = knn(sampled, full.positions[i], k);
    std::map<int, size_t> votes;
    for (uint32_t j : nn) ++votes[labels[j]];
    size_t best_count = 0;
    bool tied = false;
    int best_label = labels[nn[0]];
    for (const auto& [label, count] : votes) {
      if (count > best_count) {
        best_count = count;
        best_label = label;
        tied = false;
      } else if (count == best_count) {
        tied = true;
      }
    }
    // majority ties resolve to the label of the single nearest point
    out[i] = tied ? labels[nn[0]] : best_label;
  }
  return out;
}

size_t lexicographic_min_index(const PointSet& points) {
  check(!points.positions.empty(), "lexicographic_min_index: empty point set");
  size_t best = 0;
  for (size_t i = 1; i < points.size(); ++i) {
    const Vec3& a = points.positions[i];
    const Vec3& b = points.positions[best];
    if (a[0] != b[0] ? a[0] < b[0] : (a[1] != b[1] ? a[1] < b[1] : a[2] < b[2]))
      best = i;
  }
  return best;
}

}  // namespace splatrig
