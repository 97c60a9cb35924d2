#pragma once

#include <map>
#include <string>
#include <vector>

#include "splatrig/image.hpp"

namespace splatrig {

/// PSNR over all channels of two 8-bit images (peak 255). Identical images
/// give +infinity.
double psnr(const Image8& a, const Image8& b);

/// Gaussian-windowed SSIM (11x11, sigma 1.5, K1 0.01, K2 0.03) on the
/// luminance channel; windows fully inside the image are averaged. Images
/// smaller than the window fall back to a single global window.
double ssim(const Image8& a, const Image8& b);

/// One compared render pair plus any externally supplied metrics.
struct EvalRow {
  std::string vehicle;
  std::string state;
  std::string view;
  double psnr_value = 0;
  double ssim_value = 0;
  std::map<std::string, double> extra;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double mean_psnr = 0;  // plain arithmetic means over rows
  double mean_ssim = 0;
  std::map<std::string, std::pair<double, double>> per_state;  // state -> (psnr, ssim)
  std::string config_echo;  // run configuration, verbatim

  void finalize();  // recompute means and the per-state breakdown
};

struct EvalPair {
  std::string vehicle, state, view;
  std::string generated_path;  // PNG
  std::string reference_path;  // PNG
};

/// Computes PSNR/SSIM per pair (sizes must match pair-wise).
EvalReport evaluate(const std::vector<EvalPair>& pairs,
                    const std::string& config_echo = "");

/// Compares every *.png in `generated_dir` against the same name in
/// `reference_dir`; relative paths become the view key.
EvalReport evaluate_dirs(const std::string& generated_dir,
                         const std::string& reference_dir,
                         const std::string& config_echo = "");

/// Merges an external per-pair metric CSV with columns
/// (vehicle, state, view, metric, value) into matching rows.
void merge_external_metrics(EvalReport* report, const std::string& csv_path);

void save_eval_report_json(const EvalReport& report, const std::string& path);
void save_eval_report_csv(const EvalReport& report, const std::string& path);

}  // namespace splatrig
