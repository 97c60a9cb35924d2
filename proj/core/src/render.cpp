#include <algorithm>
#include <cmath>

#include "render_internal.hpp"
#include "splatrig/parallel.hpp"

namespace splatrig {

namespace detail {

std::vector<SplatProjection> project_splats(const GaussianAsset& asset,
                                            const Camera& camera) {
  std::vector<SplatProjection> proj(asset.size());
  const Mat3& w = camera.rotation;
  parallel_for(asset.size(), [&](size_t i) {
    const Gaussian& g = asset.gaussians[i];
    SplatProjection& sp = proj[i];
    sp.p_cam = camera.world_to_cam(g.mean);
    if (sp.p_cam[2] <= kNearClip) return;  // behind the near plane: skipped

    sp.rot = quat_to_mat(g.rotation);
    const Mat3 n = sp.rot * g.scale.asDiagonal();
    sp.sigma_cam = w * (n * n.transpose()) * w.transpose();

    const auto j = projection_jacobian(camera, sp.p_cam);
    sp.cov = j * sp.sigma_cam * j.transpose();
    sp.cov(0, 0) += kCovarianceDilation;
    sp.cov(1, 1) += kCovarianceDilation;

    const double det = sp.cov(0, 0) * sp.cov(1, 1) - sp.cov(0, 1) * sp.cov(1, 0);
    if (det <= 0) return;
    sp.inv_cov << sp.cov(1, 1) / det, -sp.cov(0, 1) / det, -sp.cov(1, 0) / det,
        sp.cov(0, 0) / det;

    sp.center[0] = camera.fx * sp.p_cam[0] / sp.p_cam[2] + camera.cx;
    sp.center[1] = camera.fy * sp.p_cam[1] / sp.p_cam[2] + camera.cy;

    const double mid = 0.5 * (sp.cov(0, 0) + sp.cov(1, 1));
    const double lam_max =
        mid + std::sqrt(std::max(0.0, mid * mid - det));
    sp.radius = 3.0 * std::sqrt(lam_max);
    sp.valid = true;
  });
  return proj;
}

TileBins bin_splats(const std::vector<SplatProjection>& proj, int width,
                    int height) {
  TileBins bins;
  bins.tiles_x = (width + kTileSize - 1) / kTileSize;
  bins.tiles_y = (height + kTileSize - 1) / kTileSize;
  bins.splats.assign(size_t(bins.tiles_x) * bins.tiles_y, {});

  for (uint32_t i = 0; i < proj.size(); ++i) {
    const SplatProjection& sp = proj[i];
    if (!sp.valid) continue;
    const double x0 = sp.center[0] - sp.radius, x1 = sp.center[0] + sp.radius;
    const double y0 = sp.center[1] - sp.radius, y1 = sp.center[1] + sp.radius;
    if (x1 < 0 || y1 < 0 || x0 > width || y0 > height) continue;
    const int tx0 = std::clamp(int(std::floor(x0 / kTileSize)), 0, bins.tiles_x - 1);
    const int tx1 = std::clamp(int(std::floor(x1 / kTileSize)), 0, bins.tiles_x - 1);
    const int ty0 = std::clamp(int(std::floor(y0 / kTileSize)), 0, bins.tiles_y - 1);
    const int ty1 = std::clamp(int(std::floor(y1 / kTileSize)), 0, bins.tiles_y - 1);
    for (int ty = ty0; ty <= ty1; ++ty)
      for (int tx = tx0; tx <= tx1; ++tx)
        bins.splats[size_t(ty) * bins.tiles_x + tx].push_back(i);
  }

  // front-to-back order within each tile; ties break by index so the order
  // is a pure function of the input
  parallel_for(bins.splats.size(), [&](size_t t) {
    auto& list = bins.splats[t];
    std::sort(list.begin(), list.end(), [&](uint32_t a, uint32_t b) {
      const double da = proj[a].p_cam[2], db = proj[b].p_cam[2];
      return da != db ? da < db : a < b;
    });
  });
  return bins;
}

}  // namespace detail

RenderOutput render(const GaussianAsset& asset, const Camera& camera,
                    GradMode mode) {
  check(!asset.empty(), "render: asset is empty");
  camera.validate();

  const int w = camera.width, h = camera.height;
  RenderOutput out;
  out.rgb = ImageRGB(h, w);
  out.alpha = ImageGray(h, w);
  out.has_contrib = (mode == GradMode::On);

  const auto proj = detail::project_splats(asset, camera);
  const auto bins = detail::bin_splats(proj, w, h);

  std::vector<std::vector<uint32_t>> pixel_contrib;
  if (out.has_contrib) pixel_contrib.resize(size_t(h) * w);

  parallel_for(bins.splats.size(), [&](size_t t) {
    const auto& list = bins.splats[t];
    if (list.empty()) return;
    const int tx = int(t) % bins.tiles_x, ty = int(t) / bins.tiles_x;
    const int r0 = ty * kTileSize, r1 = std::min(h, r0 + kTileSize);
    const int c0 = tx * kTileSize, c1 = std::min(w, c0 + kTileSize);

    for (int r = r0; r < r1; ++r) {
      for (int c = c0; c < c1; ++c) {
        const Vec2 pix(c + 0.5, r + 0.5);
        double transmittance = 1.0;
        double acc_a = 0.0;
        Vec3 acc_c = Vec3::Zero();
        std::vector<uint32_t>* contrib =
            out.has_contrib ? &pixel_contrib[size_t(r) * w + c] : nullptr;

        for (uint32_t idx : list) {
          const detail::SplatProjection& sp = proj[idx];
          const Vec2 d = pix - sp.center;
          const double rho = d.dot(sp.inv_cov * d);
          if (rho > kFootprintCutoffSq) continue;
          const double gauss = std::min(1.0, std::exp(-0.5 * rho));
          const double a =
              std::min(asset.gaussians[idx].opacity * gauss, kMaxSplatAlpha);
          if (a < kMinSplatAlpha) continue;

          acc_a += a * transmittance;
          acc_c += asset.gaussians[idx].color * (a * transmittance);
          if (contrib) contrib->push_back(idx);
          transmittance *= (1.0 - a);
          if (transmittance < kTransmittanceFloor) break;
        }

        out.alpha.at(r, c) = acc_a;
        if (acc_a > kAlphaDivisionFloor) {
          for (int ch = 0; ch < 3; ++ch) out.rgb.at(r, c, ch) = acc_c[ch] / acc_a;
        }
      }
    }
  });

  if (out.has_contrib) {
    out.contrib_offset.resize(size_t(h) * w + 1);
    out.contrib_offset[0] = 0;
    size_t total = 0;
    for (size_t p = 0; p < pixel_contrib.size(); ++p) {
      total += pixel_contrib[p].size();
      out.contrib_offset[p + 1] = static_cast<uint32_t>(total);
    }
    out.contrib_index.reserve(total);
    for (const auto& v : pixel_contrib)
      out.contrib_index.insert(out.contrib_index.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace splatrig
