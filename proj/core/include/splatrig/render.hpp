#pragma once

#include <map>

#include "splatrig/asset.hpp"
#include "splatrig/camera.hpp"
#include "splatrig/image.hpp"

namespace splatrig {

// Rasterizer constants. Footprints are cut at 3 sigma; per-splat
// contributions below 1/255 are dropped in the forward pass and treated as
// exactly zero in the backward pass so both sides agree.
inline constexpr double kNearClip = 1e-4;
inline constexpr double kFootprintCutoffSq = 9.0;  // (3 sigma)^2
inline constexpr double kMinSplatAlpha = 1.0 / 255.0;
inline constexpr double kMaxSplatAlpha = 1.0 - 1e-4;
inline constexpr double kTransmittanceFloor = 1e-4;
inline constexpr double kAlphaDivisionFloor = 1e-6;
inline constexpr double kCovarianceDilation = 0.3;  // pixels^2, on the diagonal
inline constexpr int kTileSize = 16;

/// Forward rasterization result. When gradient mode is on, the per-pixel
/// contributing-splat lists (in composited depth order) are retained for the
/// backward pass.
struct RenderOutput {
  ImageRGB rgb;
  ImageGray alpha;

  // CSR layout: contributors of pixel p are contrib_index[contrib_offset[p]
  // .. contrib_offset[p+1]).
  std::vector<uint32_t> contrib_offset;
  std::vector<uint32_t> contrib_index;
  bool has_contrib = false;
};

/// Per-Gaussian gradients of a scalar image loss w.r.t. geometry. Rotation
/// gradients live in the ambient quaternion space, projected onto the tangent
/// of the unit sphere. Opacity and color carry no gradients.
struct GeomGrad {
  std::vector<Vec3> d_mean;
  std::vector<Vec4> d_rotation;
  std::vector<Vec3> d_scale;

  explicit GeomGrad(size_t n = 0)
      : d_mean(n, Vec3::Zero()),
        d_rotation(n, Vec4::Zero()),
        d_scale(n, Vec3::Zero()) {}
  size_t size() const { return d_mean.size(); }
};

enum class GradMode { Off, On };

/// Deterministic software rasterization of an asset: EWA projection of each
/// Gaussian, per-tile depth sort, front-to-back alpha compositing. rgb is the
/// premultiplied composite divided by alpha where alpha > 1e-6 and zero
/// elsewhere. Identical inputs produce bit-identical images.
RenderOutput render(const GaussianAsset& asset, const Camera& camera,
                    GradMode mode = GradMode::Off);

/// Analytic gradients of the composited images w.r.t. every Gaussian's mean,
/// rotation and scale, given adjoints of rgb and alpha. `out` must come from
/// render(asset, camera, GradMode::On).
GeomGrad render_backward(const GaussianAsset& asset, const Camera& camera,
                         const RenderOutput& out, const ImageRGB& d_rgb,
                         const ImageGray& d_alpha);

/// Renders each movable part alone and thresholds its alpha at
/// `alpha_threshold`, producing the per-view binary masks the refinement
/// stage consumes. Keys are the movable PartLabels present in `labels`.
std::map<PartLabel, std::vector<Mask>> make_part_masks(
    const GaussianAsset& asset, const std::vector<PartLabel>& labels,
    const std::vector<Camera>& cameras, double alpha_threshold);

}  // namespace splatrig
