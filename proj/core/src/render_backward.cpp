#include <cmath>

#include "render_internal.hpp"
#include "splatrig/parallel.hpp"

namespace splatrig {

namespace {

// Per-Gaussian screen-space adjoints accumulated over pixels before the
// geometry chain runs once per Gaussian.
struct ScreenAdjoint {
  Vec2 d_center = Vec2::Zero();
  Mat2 d_cov = Mat2::Zero();
};

struct Contribution {
  uint32_t idx;
  double alpha;
  double gauss;
  double transmittance;  // before this splat
  bool clamped;
  Vec2 d;  // pixel - center
};

}  // namespace

GeomGrad render_backward(const GaussianAsset& asset, const Camera& camera,
                         const RenderOutput& out, const ImageRGB& d_rgb,
                         const ImageGray& d_alpha) {
  check(out.has_contrib, "render_backward: forward pass must run in gradient mode");
  check(d_rgb.height == camera.height && d_rgb.width == camera.width,
        "render_backward: d_rgb shape mismatch");
  check(d_alpha.height == camera.height && d_alpha.width == camera.width,
        "render_backward: d_alpha shape mismatch");
  check(out.alpha.height == camera.height && out.alpha.width == camera.width,
        "render_backward: forward output shape mismatch");

  const int w = camera.width, h = camera.height;
  const size_t n = asset.size();
  const auto proj = detail::project_splats(asset, camera);

  // Pixel sweep, parallel over row bands; per-band accumulators merge in band
  // order so the result does not depend on the thread count.
  const unsigned bands =
      std::max(1u, std::min(worker_count(), static_cast<unsigned>(h)));
  std::vector<std::vector<ScreenAdjoint>> band_acc(
      bands, std::vector<ScreenAdjoint>(n));

  parallel_for(bands, [&](size_t band) {
    auto& acc = band_acc[band];
    const int r0 = int(band * h / bands), r1 = int((band + 1) * h / bands);
    std::vector<Contribution> contribs;

    for (int r = r0; r < r1; ++r) {
      for (int c = 0; c < w; ++c) {
        const size_t p = size_t(r) * w + c;
        const uint32_t begin = out.contrib_offset[p], end = out.contrib_offset[p + 1];
        if (begin == end) continue;

        const double total_alpha = out.alpha.at(r, c);
        Vec3 dl_drgb(d_rgb.at(r, c, 0), d_rgb.at(r, c, 1), d_rgb.at(r, c, 2));
        double dl_da = d_alpha.at(r, c);
        Vec3 dl_dc = Vec3::Zero();  // adjoint of the premultiplied composite
        if (total_alpha > kAlphaDivisionFloor) {
          dl_dc = dl_drgb / total_alpha;
          for (int ch = 0; ch < 3; ++ch)
            dl_da -= out.rgb.at(r, c, ch) * dl_drgb[ch] / total_alpha;
        }
        if (dl_da == 0.0 && dl_dc[0] == 0.0 && dl_dc[1] == 0.0 && dl_dc[2] == 0.0)
          continue;

        // replay the forward composite for this pixel
        const Vec2 pix(c + 0.5, r + 0.5);
        contribs.clear();
        double transmittance = 1.0;
        for (uint32_t k = begin; k < end; ++k) {
          const uint32_t idx = out.contrib_index[k];
          const detail::SplatProjection& sp = proj[idx];
          const Vec2 d = pix - sp.center;
          const double rho = d.dot(sp.inv_cov * d);
          const double gauss = std::min(1.0, std::exp(-0.5 * rho));
          const double raw = asset.gaussians[idx].opacity * gauss;
          const double a = std::min(raw, kMaxSplatAlpha);
          contribs.push_back({idx, a, gauss, transmittance, raw > kMaxSplatAlpha, d});
          transmittance *= (1.0 - a);
        }

        // back-to-front suffix accumulation
        double suffix_a = 0.0;
        Vec3 suffix_c = Vec3::Zero();
        for (size_t k = contribs.size(); k-- > 0;) {
          const Contribution& ct = contribs[k];
          const Vec3& color = asset.gaussians[ct.idx].color;

          const double weight = ct.alpha * ct.transmittance;
          const double one_minus = 1.0 - ct.alpha;
          double dl_dalpha_k = dl_da * (ct.transmittance - suffix_a / one_minus);
          for (int ch = 0; ch < 3; ++ch)
            dl_dalpha_k +=
                dl_dc[ch] * (color[ch] * ct.transmittance - suffix_c[ch] / one_minus);

          suffix_a += weight;
          suffix_c += color * weight;

          if (ct.clamped) continue;  // clamped alpha: no geometry gradient
          const double dl_dgauss = dl_dalpha_k * asset.gaussians[ct.idx].opacity;
          const double dl_drho = -0.5 * ct.gauss * dl_dgauss;

          const detail::SplatProjection& sp = proj[ct.idx];
          const Vec2 icd = sp.inv_cov * ct.d;
          ScreenAdjoint& sa = acc[ct.idx];
          // d rho / d center = -2 inv_cov d ; d rho / d inv_cov = d d^T
          sa.d_center -= 2.0 * dl_drho * icd;
          // chain through the inverse: dL/dcov = -inv (dL/dinv) inv
          sa.d_cov -= dl_drho * (icd * icd.transpose());
        }
      }
    }
  });

  // merge bands in order
  std::vector<ScreenAdjoint> acc(n);
  for (const auto& band : band_acc)
    for (size_t i = 0; i < n; ++i) {
      acc[i].d_center += band[i].d_center;
      acc[i].d_cov += band[i].d_cov;
    }

  // per-Gaussian geometry chain
  GeomGrad grad(n);
  const Mat3& wcam = camera.rotation;
  parallel_for(n, [&](size_t i) {
    const detail::SplatProjection& sp = proj[i];
    if (!sp.valid) return;
    const ScreenAdjoint& sa = acc[i];
    if ((sa.d_center.array() == 0.0).all() && (sa.d_cov.array() == 0.0).all())
      return;

    const Gaussian& g = asset.gaussians[i];
    const auto j = detail::projection_jacobian(camera, sp.p_cam);

    // projection of the mean
    Vec3 d_pcam = j.transpose() * sa.d_center;

    // cov2d = J sigma_cam J^T + dilation
    const Mat2 gsym = sa.d_cov + sa.d_cov.transpose();
    const Mat3 d_sigma_cam = j.transpose() * sa.d_cov * j;
    const Eigen::Matrix<double, 2, 3> d_j = gsym * j * sp.sigma_cam;

    // J depends on the camera-space mean
    const double x = sp.p_cam[0], y = sp.p_cam[1], z = sp.p_cam[2];
    const double iz2 = 1.0 / (z * z), iz3 = iz2 / z;
    d_pcam[0] += d_j(0, 2) * (-camera.fx * iz2);
    d_pcam[1] += d_j(1, 2) * (-camera.fy * iz2);
    d_pcam[2] += d_j(0, 0) * (-camera.fx * iz2) + d_j(0, 2) * (2 * camera.fx * x * iz3) +
                 d_j(1, 1) * (-camera.fy * iz2) + d_j(1, 2) * (2 * camera.fy * y * iz3);

    grad.d_mean[i] = wcam.transpose() * d_pcam;

    // sigma_cam = W sigma W^T ; sigma = N N^T with N = R diag(s)
    const Mat3 d_sigma = wcam.transpose() * d_sigma_cam * wcam;
    const Mat3 nmat = sp.rot * g.scale.asDiagonal();
    const Mat3 d_n = (d_sigma + d_sigma.transpose()) * nmat;

    Mat3 d_rot;
    for (int rr = 0; rr < 3; ++rr)
      for (int cc = 0; cc < 3; ++cc) d_rot(rr, cc) = d_n(rr, cc) * g.scale[cc];
    for (int cc = 0; cc < 3; ++cc)
      grad.d_scale[i][cc] = d_n.col(cc).dot(sp.rot.col(cc));

    const Vec4 q_unit = quat_normalized(g.rotation);
    grad.d_rotation[i] =
        quat_tangent_project(g.rotation, quat_mat_backward(q_unit, d_rot));
  });

  return grad;
}

}  // namespace splatrig
