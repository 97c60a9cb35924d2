#pragma once

#include <vector>

#include "splatrig/camera.hpp"
#include "splatrig/losses.hpp"
#include "splatrig/render.hpp"

namespace splatrig {

struct RefineConfig {
  double lambda_outside = 0.5;
  int iterations = 500;
  // step sizes; the mean step scales with the part's bounding-box diagonal
  double lr_mean_factor = 1.6e-4;
  double lr_rotation = 1e-3;
  double lr_scale = 5e-3;
  double alpha_threshold = 0.5;  // used by callers when synthesizing masks
  int full_eval_interval = 50;
  uint64_t seed = 0;
  double divergence_factor = 10.0;
  double scale_floor = 1e-8;

  void validate() const {
    check(lambda_outside >= 0 && lambda_outside <= 1,
          "refine: lambda_outside must be in [0,1]");
    check(iterations >= 1, "refine: iterations must be >= 1");
  }
};

/// Loss trace of one refinement run. Per-iteration rows hold the single
/// sampled view's losses; full-batch rows average over all views.
struct RefineReport {
  struct IterRow {
    int iteration;
    int view;
    double l_outside;
    double l_photo;
    double l_total;
  };
  struct BatchRow {
    int iteration;
    double l_outside;
    double l_photo;
    double l_total;
  };
  std::vector<IterRow> iterations;
  std::vector<BatchRow> full_evals;
  std::vector<double> initial_per_view_total;
  std::vector<double> final_per_view_total;
  double wall_clock_seconds = 0;
  double lambda_outside = 0;
};

/// Raised when the full-batch total exceeds divergence_factor times its
/// initial value; carries the loss trace up to the abort point.
class RefineDivergence : public Error {
 public:
  RefineDivergence(const std::string& msg, RefineReport report)
      : Error(msg), report(std::move(report)) {}
  RefineReport report;
};

struct RefineResult {
  GaussianAsset part;
  RefineReport report;
};

/// Geometry-only part refinement: ground truth is rendered once from the
/// unoptimized part and frozen; each iteration samples one view, evaluates
/// (1 - lambda) * L_photo + lambda * L_outside and steps means, rotations and
/// scales through the rasterizer gradients. Opacity and color are untouched.
RefineResult refine(const GaussianAsset& part, const std::vector<Mask>& masks,
                    const std::vector<Camera>& cameras, const RefineConfig& config);

}  // namespace splatrig
