#pragma once

#include <optional>
#include <string>

#include "splatrig/align.hpp"
#include "splatrig/metrics.hpp"
#include "splatrig/protocol.hpp"
#include "splatrig/refine.hpp"

namespace splatrig {

/// Full-chain configuration: infer -> align -> refine -> articulate ->
/// render -> eval. Paths are resolved relative to the working directory.
struct PipelineConfig {
  std::string vehicle_id = "vehicle";
  std::string asset_path;
  std::string clusters_path;  // optional clusters.u32 sidecar
  std::string seg_weights_dir;
  std::string kin_weights_dir;

  // masks for refinement come from this labeled asset (stand-in for an
  // external 2D mask pipeline); empty = use the input asset itself
  std::string mask_asset_path;

  // evaluation reference: either a directory of pre-rendered images or a
  // clean labeled asset + kinematics to render internally
  std::string reference_renders_dir;
  std::string reference_asset_path;
  std::string reference_kin_path;
  std::string external_metrics_csv;  // merged into the eval report

  std::string out_dir;
  ProtocolConfig protocol;
  RefineConfig refine;
  bool refine_enabled = true;
  int mask_views = 24;
  int mask_image_size = 160;
  double min_overlap = 0.5;
  std::optional<Vec3> camera_target;  // default: reference/input bounds center
};

PipelineConfig pipeline_config_from_json(const std::string& text);
std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig load_pipeline_config(const std::string& path);

struct PipelineResult {
  std::vector<std::string> posed_paths;  // the 8 posed assets
  KinematicParams kin;
  PartSelection selection;
  EvalReport eval;
  bool evaluated = false;
};

/// Runs the full chain; stage failures raise Error with the stage name in
/// the message. Outputs land under cfg.out_dir (posed/, renders/, parts/,
/// reports).
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// Renders the 8-state x n-pose protocol for a part map: posed assets under
/// <out>/posed, images under <out>/renders/<state>/view_###.png.
std::vector<std::string> render_protocol(const PartMap& parts,
                                         const KinematicParams& kin,
                                         const ProtocolConfig& cfg,
                                         const Vec3& target,
                                         const std::string& out_dir);

/// Composite over black: pixel = rgb * alpha.
ImageRGB composite_over_black(const RenderOutput& out);

std::string refine_report_to_json(const RefineReport& report);

}  // namespace splatrig
