#include "splatrig/refine.hpp"

#include <chrono>

#include "splatrig/adam.hpp"
#include "splatrig/rng.hpp"

namespace splatrig {

namespace {

struct ViewLosses {
  double outside, photo, total;
};

ViewLosses eval_view(const GaussianAsset& part, const Camera& cam,
                     const Mask& mask, const ImageRGB& gt, double lambda) {
  const RenderOutput out = render(part, cam);
  ViewLosses v;
  v.outside = loss_outside(out.alpha, mask);
  v.photo = loss_photo(out.rgb, gt, mask);
  v.total = (1.0 - lambda) * v.photo + lambda * v.outside;
  return v;
}

}  // namespace

RefineResult refine(const GaussianAsset& part, const std::vector<Mask>& masks,
                    const std::vector<Camera>& cameras, const RefineConfig& config) {
  config.validate();
  check(!part.empty(), "refine: part is empty");
  check(!cameras.empty(), "refine: need at least one view");
  check(masks.size() == cameras.size(), "refine: masks must match cameras index-wise");

  const auto t_start = std::chrono::steady_clock::now();
  const size_t n = part.size();
  const double lambda = config.lambda_outside;

  // frozen ground truth: the unoptimized part, rendered once per view
  std::vector<ImageRGB> gt;
  gt.reserve(cameras.size());
  for (const Camera& cam : cameras) gt.push_back(render(part, cam).rgb);

  RefineResult result;
  result.part = part;
  RefineReport& report = result.report;
  report.lambda_outside = lambda;

  auto full_eval = [&](int iteration) {
    RefineReport::BatchRow row{iteration, 0, 0, 0};
    for (size_t v = 0; v < cameras.size(); ++v) {
      const ViewLosses l = eval_view(result.part, cameras[v], masks[v], gt[v], lambda);
      row.l_outside += l.outside;
      row.l_photo += l.photo;
      row.l_total += l.total;
    }
    const double inv = 1.0 / double(cameras.size());
    row.l_outside *= inv;
    row.l_photo *= inv;
    row.l_total *= inv;
    report.full_evals.push_back(row);
    return row;
  };

  for (size_t v = 0; v < cameras.size(); ++v)
    report.initial_per_view_total.push_back(
        eval_view(part, cameras[v], masks[v], gt[v], lambda).total);
  const double initial_total = full_eval(0).l_total;
  const double divergence_limit =
      config.divergence_factor * std::max(initial_total, 1e-12);

  const Bounds bounds = asset_bounds(part);
  const double extent = std::max(bounds.extent().norm(), 1e-3);
  const double lr_mean = config.lr_mean_factor * extent;

  Adam adam_mean(n * 3), adam_rot(n * 4), adam_scale(n * 3);
  std::vector<double> mean_buf(n * 3), rot_buf(n * 4), scale_buf(n * 3);
  std::vector<double> mean_grad(n * 3), rot_grad(n * 4), scale_grad(n * 3);

  Rng rng(config.seed);
  for (int iter = 1; iter <= config.iterations; ++iter) {
    const int v = static_cast<int>(rng.uniform_index(cameras.size()));
    const Camera& cam = cameras[v];

    const RenderOutput out = render(result.part, cam, GradMode::On);
    const double l_out = loss_outside(out.alpha, masks[v]);
    const double l_photo = loss_photo(out.rgb, gt[v], masks[v]);
    const double l_total = (1.0 - lambda) * l_photo + lambda * l_out;
    report.iterations.push_back({iter, v, l_out, l_photo, l_total});

    ImageGray d_alpha(cam.height, cam.width);
    ImageRGB d_rgb(cam.height, cam.width);
    loss_outside_backward(masks[v], lambda, &d_alpha);
    loss_photo_backward(out.rgb, gt[v], masks[v], 1.0 - lambda, &d_rgb);
    const GeomGrad grad = render_backward(result.part, cam, out, d_rgb, d_alpha);

    for (size_t i = 0; i < n; ++i) {
      Gaussian& g = result.part.gaussians[i];
      for (int k = 0; k < 3; ++k) {
        mean_buf[i * 3 + k] = g.mean[k];
        mean_grad[i * 3 + k] = grad.d_mean[i][k];
        scale_buf[i * 3 + k] = g.scale[k];
        scale_grad[i * 3 + k] = grad.d_scale[i][k];
      }
      for (int k = 0; k < 4; ++k) {
        rot_buf[i * 4 + k] = g.rotation[k];
        rot_grad[i * 4 + k] = grad.d_rotation[i][k];
      }
    }
    adam_mean.step(lr_mean, mean_buf.data(), mean_grad.data());
    adam_rot.step(config.lr_rotation, rot_buf.data(), rot_grad.data());
    adam_scale.step(config.lr_scale, scale_buf.data(), scale_grad.data());
    for (size_t i = 0; i < n; ++i) {
      Gaussian& g = result.part.gaussians[i];
      for (int k = 0; k < 3; ++k) {
        g.mean[k] = mean_buf[i * 3 + k];
        g.scale[k] = std::max(scale_buf[i * 3 + k], config.scale_floor);
      }
      g.rotation = quat_normalized(
          Vec4(rot_buf[i * 4], rot_buf[i * 4 + 1], rot_buf[i * 4 + 2], rot_buf[i * 4 + 3]));
    }

    const bool last = iter == config.iterations;
    if (iter % config.full_eval_interval == 0 || last) {
      const auto row = full_eval(iter);
      if (row.l_total > divergence_limit) {
        report.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                .count();
        throw RefineDivergence(
            "refine: diverged at iteration " + std::to_string(iter) + " (total " +
                std::to_string(row.l_total) + " > " + std::to_string(divergence_limit) + ")",
            report);
      }
    }
  }

  for (size_t v = 0; v < cameras.size(); ++v)
    report.final_per_view_total.push_back(
        eval_view(result.part, cameras[v], masks[v], gt[v], lambda).total);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace splatrig
