#include "doctest.h"
#include "splatrig/render.hpp"
#include "splatrig/rng.hpp"

using namespace splatrig;

namespace {

struct LossWeights {
  ImageRGB w_rgb;
  ImageGray w_alpha;
};

LossWeights random_weights(int h, int w, uint64_t seed) {
  Rng rng(seed);
  LossWeights lw{ImageRGB(h, w), ImageGray(h, w)};
  for (auto& v : lw.w_rgb.data) v = rng.uniform(-1, 1);
  for (auto& v : lw.w_alpha.data) v = rng.uniform(-1, 1);
  return lw;
}

double scalar_loss(const GaussianAsset& asset, const Camera& cam,
                   const LossWeights& lw) {
  const RenderOutput out = render(asset, cam);
  double loss = 0;
  for (size_t i = 0; i < out.rgb.data.size(); ++i)
    loss += lw.w_rgb.data[i] * out.rgb.data[i];
  for (size_t i = 0; i < out.alpha.data.size(); ++i)
    loss += lw.w_alpha.data[i] * out.alpha.data[i];
  return loss;
}

GeomGrad analytic_grad(const GaussianAsset& asset, const Camera& cam,
                       const LossWeights& lw) {
  const RenderOutput out = render(asset, cam, GradMode::On);
  return render_backward(asset, cam, out, lw.w_rgb, lw.w_alpha);
}

double rel_err(double analytic, double fd) {
  const double denom = std::max(std::abs(analytic), std::abs(fd));
  if (denom < 1e-10) return 0.0;
  return std::abs(analytic - fd) / denom;
}

GaussianAsset grad_fixture(int n, uint64_t seed) {
  Rng rng(seed);
  GaussianAsset asset;
  for (int i = 0; i < n; ++i) {
    Gaussian g;
    g.mean = Vec3(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(3.5, 5.5));
    g.scale = Vec3(rng.uniform(0.1, 0.35), rng.uniform(0.1, 0.35), rng.uniform(0.1, 0.35));
    g.rotation = quat_normalized(
        Vec4(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
    g.opacity = rng.uniform(0.25, 0.8);
    g.color = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
    asset.gaussians.push_back(g);
  }
  return asset;
}

// central differences with step 1e-4 relative, perturbing one coordinate
double max_fd_error(const GaussianAsset& asset, const Camera& cam,
                    const LossWeights& lw) {
  const GeomGrad grad = analytic_grad(asset, cam, lw);
  double worst = 0;
  for (size_t i = 0; i < asset.size(); ++i) {
    auto fd_param = [&](auto set_param, double value) {
      const double h = 1e-4 * std::max(std::abs(value), 1.0);
      GaussianAsset plus = asset, minus = asset;
      set_param(plus, value + h);
      set_param(minus, value - h);
      return (scalar_loss(plus, cam, lw) - scalar_loss(minus, cam, lw)) / (2 * h);
    };
    for (int k = 0; k < 3; ++k) {
      const double fd = fd_param(
          [&](GaussianAsset& a, double v) { a.gaussians[i].mean[k] = v; },
          asset.gaussians[i].mean[k]);
      worst = std::max(worst, rel_err(grad.d_mean[i][k], fd));
    }
    for (int k = 0; k < 3; ++k) {
      const double fd = fd_param(
          [&](GaussianAsset& a, double v) { a.gaussians[i].scale[k] = v; },
          asset.gaussians[i].scale[k]);
      worst = std::max(worst, rel_err(grad.d_scale[i][k], fd));
    }
    for (int k = 0; k < 4; ++k) {
      const double fd = fd_param(
          [&](GaussianAsset& a, double v) { a.gaussians[i].rotation[k] = v; },
          asset.gaussians[i].rotation[k]);
      worst = std::max(worst, rel_err(grad.d_rotation[i][k], fd));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("render_backward: zero adjoints give zero gradients") {
  const GaussianAsset asset = grad_fixture(3, 1);
  const Camera cam(16, 16, 16, 16, 8, 8, Mat3::Identity(), Vec3::Zero());
  const RenderOutput out = render(asset, cam, GradMode::On);
  const GeomGrad grad = render_backward(asset, cam, out, ImageRGB(16, 16),
                                        ImageGray(16, 16));
  for (size_t i = 0; i < asset.size(); ++i) {
    CHECK(grad.d_mean[i].norm() == 0.0);
    CHECK(grad.d_rotation[i].norm() == 0.0);
    CHECK(grad.d_scale[i].norm() == 0.0);
  }
}

TEST_CASE("render_backward: translation sign check") {
  // uniform positive alpha adjoint on the right half pulls the mean right
  GaussianAsset asset;
  Gaussian g;
  g.mean = Vec3(0, 0, 4);
  g.scale = Vec3::Constant(0.25);
  g.opacity = 0.8;
  g.color = Vec3(1, 1, 1);
  asset.gaussians.push_back(g);
  const Camera cam(16, 16, 16, 16, 8, 8, Mat3::Identity(), Vec3::Zero());

  ImageGray d_alpha(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 8; c < 16; ++c) d_alpha.at(r, c) = 1.0;
  const RenderOutput out = render(asset, cam, GradMode::On);
  const GeomGrad grad = render_backward(asset, cam, out, ImageRGB(16, 16), d_alpha);
  // loss grows as the footprint moves right, so d(loss)/d(mean_x) > 0
  CHECK(grad.d_mean[0][0] > 0.0);
}

TEST_CASE("render_backward: finite differences on a 5-gaussian 16x16 fixture") {
  const GaussianAsset asset = grad_fixture(5, 11);
  const Camera cam(16, 16, 16, 16, 8, 8, Mat3::Identity(), Vec3::Zero());
  const LossWeights lw = random_weights(16, 16, 21);
  const double worst = max_fd_error(asset, cam, lw);
  CHECK(worst < 1e-3);
}

TEST_CASE("render_backward: finite differences on a 12-gaussian 24x24 fixture") {
  const GaussianAsset asset = grad_fixture(12, 13);
  const Camera cam(24, 24, 24, 24, 12, 12, Mat3::Identity(), Vec3::Zero());
  const LossWeights lw = random_weights(24, 24, 23);
  const double worst = max_fd_error(asset, cam, lw);
  CHECK(worst < 1e-3);
}

TEST_CASE("render_backward: rotation gradients are tangent to the quaternion") {
  const GaussianAsset asset = grad_fixture(6, 17);
  const Camera cam(16, 16, 16, 16, 8, 8, Mat3::Identity(), Vec3::Zero());
  const LossWeights lw = random_weights(16, 16, 19);
  const GeomGrad grad = analytic_grad(asset, cam, lw);
  for (size_t i = 0; i < asset.size(); ++i) {
    CHECK(std::abs(grad.d_rotation[i].dot(asset.gaussians[i].rotation)) < 1e-5);
    CHECK(grad.d_mean[i].allFinite());
    CHECK(grad.d_scale[i].allFinite());
  }
}

TEST_CASE("render_backward: shape mismatch errors") {
  const GaussianAsset asset = grad_fixture(2, 29);
  const Camera cam(16, 16, 16, 16, 8, 8, Mat3::Identity(), Vec3::Zero());
  const RenderOutput out = render(asset, cam, GradMode::On);
  CHECK_THROWS_AS(render_backward(asset, cam, out, ImageRGB(8, 8), ImageGray(16, 16)),
                  InvalidArgument);
  const RenderOutput no_grad = render(asset, cam);
  CHECK_THROWS_AS(
      render_backward(asset, cam, no_grad, ImageRGB(16, 16), ImageGray(16, 16)),
      InvalidArgument);
}
