#pragma once

#include <vector>

#include "splatrig/render.hpp"

namespace splatrig::detail {

/// Per-Gaussian screen-space projection (classic EWA: perspective Jacobian
/// linearized at the mean).
struct SplatProjection {
  bool valid = false;
  Vec3 p_cam = Vec3::Zero();
  Vec2 center = Vec2::Zero();   // projected mean, pixel coordinates
  Mat2 cov = Mat2::Zero();      // dilated 2D covariance
  Mat2 inv_cov = Mat2::Zero();
  double radius = 0;            // 3-sigma bounding radius in pixels
  Mat3 sigma_cam = Mat3::Zero();  // W Sigma W^T, kept for the backward pass
  Mat3 rot = Mat3::Identity();    // R(q), kept for the backward pass
};

std::vector<SplatProjection> project_splats(const GaussianAsset& asset,
                                            const Camera& camera);

/// Perspective-projection Jacobian at camera-space point p.
inline Eigen::Matrix<double, 2, 3> projection_jacobian(const Camera& cam,
                                                       const Vec3& p) {
  const double x = p[0], y = p[1], z = p[2];
  const double iz = 1.0 / z, iz2 = iz * iz;
  Eigen::Matrix<double, 2, 3> j;
  j << cam.fx * iz, 0, -cam.fx * x * iz2, 0, cam.fy * iz, -cam.fy * y * iz2;
  return j;
}

/// Tile lists: for every tile, the indices of splats whose 3-sigma bounding
/// box overlaps it, sorted front to back by (depth, index).
struct TileBins {
  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::vector<uint32_t>> splats;  // per tile, depth-sorted
};

TileBins bin_splats(const std::vector<SplatProjection>& proj, int width,
                    int height);

}  // namespace splatrig::detail
