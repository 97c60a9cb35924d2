#include "splatrig/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "splatrig/image_io.hpp"
#include "splatrig/parallel.hpp"
#include "splatrig/ply_io.hpp"
#include "splatrig/train.hpp"

namespace splatrig {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// config json

namespace {

json refine_config_to_json(const RefineConfig& r) {
  return {{"lambda_outside", r.lambda_outside},
          {"iterations", r.iterations},
          {"lr_mean_factor", r.lr_mean_factor},
          {"lr_rotation", r.lr_rotation},
          {"lr_scale", r.lr_scale},
          {"alpha_threshold", r.alpha_threshold},
          {"full_eval_interval", r.full_eval_interval},
          {"seed", r.seed},
          {"divergence_factor", r.divergence_factor}};
}

RefineConfig refine_config_from_json(const json& j) {
  RefineConfig r;
  r.lambda_outside = j.value("lambda_outside", r.lambda_outside);
  r.iterations = j.value("iterations", r.iterations);
  r.lr_mean_factor = j.value("lr_mean_factor", r.lr_mean_factor);
  r.lr_rotation = j.value("lr_rotation", r.lr_rotation);
  r.lr_scale = j.value("lr_scale", r.lr_scale);
  r.alpha_threshold = j.value("alpha_threshold", r.alpha_threshold);
  r.full_eval_interval = j.value("full_eval_interval", r.full_eval_interval);
  r.seed = j.value("seed", r.seed);
  r.divergence_factor = j.value("divergence_factor", r.divergence_factor);
  return r;
}

json orbit_to_json(const OrbitConfig& o) {
  return {{"distance", o.distance},
          {"height", o.height},
          {"angle", o.angle},
          {"pitch", o.pitch}};
}

OrbitConfig orbit_from_json(const json& j) {
  OrbitConfig o;
  o.distance = j.value("distance", o.distance);
  o.height = j.value("height", o.height);
  o.angle = j.value("angle", o.angle);
  o.pitch = j.value("pitch", o.pitch);
  return o;
}

json protocol_to_json(const ProtocolConfig& p) {
  return {{"pose_a", orbit_to_json(p.pose_a)},
          {"pose_b", orbit_to_json(p.pose_b)},
          {"n_poses", p.n_poses},
          {"door_angle_deg", rad_to_deg(p.door_angle)},
          {"max_steer_deg", rad_to_deg(p.max_steer)},
          {"steer_fractions", p.steer_fractions},
          {"roll_angles_deg",
           {rad_to_deg(p.roll_angles.size() > 0 ? p.roll_angles[0] : 0),
            rad_to_deg(p.roll_angles.size() > 1 ? p.roll_angles[1] : 0)}},
          {"image_width", p.image_width},
          {"image_height", p.image_height},
          {"fov_deg", p.fov_deg}};
}

ProtocolConfig protocol_from_json(const json& j) {
  ProtocolConfig p;
  if (j.contains("pose_a")) p.pose_a = orbit_from_json(j["pose_a"]);
  if (j.contains("pose_b")) p.pose_b = orbit_from_json(j["pose_b"]);
  p.n_poses = j.value("n_poses", p.n_poses);
  if (j.contains("door_angle_deg"))
    p.door_angle = deg_to_rad(j["door_angle_deg"].get<double>());
  if (j.contains("max_steer_deg"))
    p.max_steer = deg_to_rad(j["max_steer_deg"].get<double>());
  if (j.contains("steer_fractions"))
    p.steer_fractions = j["steer_fractions"].get<std::vector<double>>();
  if (j.contains("roll_angles_deg")) {
    p.roll_angles.clear();
    for (const auto& v : j["roll_angles_deg"])
      p.roll_angles.push_back(deg_to_rad(v.get<double>()));
  }
  p.image_width = j.value("image_width", p.image_width);
  p.image_height = j.value("image_height", p.image_height);
  p.fov_deg = j.value("fov_deg", p.fov_deg);
  return p;
}

}  // namespace

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  json j;
  j["vehicle_id"] = cfg.vehicle_id;
  j["asset"] = cfg.asset_path;
  if (!cfg.clusters_path.empty()) j["clusters"] = cfg.clusters_path;
  j["seg_weights"] = cfg.seg_weights_dir;
  j["kin_weights"] = cfg.kin_weights_dir;
  if (!cfg.mask_asset_path.empty()) j["mask_asset"] = cfg.mask_asset_path;
  if (!cfg.reference_renders_dir.empty())
    j["reference_renders"] = cfg.reference_renders_dir;
  if (!cfg.reference_asset_path.empty())
    j["reference_asset"] = cfg.reference_asset_path;
  if (!cfg.reference_kin_path.empty()) j["reference_kin"] = cfg.reference_kin_path;
  if (!cfg.external_metrics_csv.empty())
    j["external_metrics"] = cfg.external_metrics_csv;
  j["out_dir"] = cfg.out_dir;
  j["protocol"] = protocol_to_json(cfg.protocol);
  j["refine"] = refine_config_to_json(cfg.refine);
  j["refine_enabled"] = cfg.refine_enabled;
  j["mask_views"] = cfg.mask_views;
  j["mask_image_size"] = cfg.mask_image_size;
  j["min_overlap"] = cfg.min_overlap;
  if (cfg.camera_target)
    j["camera_target"] = {(*cfg.camera_target)[0], (*cfg.camera_target)[1],
                          (*cfg.camera_target)[2]};
  return j.dump(2);
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed pipeline config: ") + e.what());
  }
  PipelineConfig cfg;
  cfg.vehicle_id = j.value("vehicle_id", cfg.vehicle_id);
  cfg.asset_path = j.at("asset").get<std::string>();
  cfg.clusters_path = j.value("clusters", "");
  cfg.seg_weights_dir = j.at("seg_weights").get<std::string>();
  cfg.kin_weights_dir = j.at("kin_weights").get<std::string>();
  cfg.mask_asset_path = j.value("mask_asset", "");
  cfg.reference_renders_dir = j.value("reference_renders", "");
  cfg.reference_asset_path = j.value("reference_asset", "");
  cfg.reference_kin_path = j.value("reference_kin", "");
  cfg.external_metrics_csv = j.value("external_metrics", "");
  cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("protocol")) cfg.protocol = protocol_from_json(j["protocol"]);
  if (j.contains("refine")) cfg.refine = refine_config_from_json(j["refine"]);
  cfg.refine_enabled = j.value("refine_enabled", cfg.refine_enabled);
  cfg.mask_views = j.value("mask_views", cfg.mask_views);
  cfg.mask_image_size = j.value("mask_image_size", cfg.mask_image_size);
  cfg.min_overlap = j.value("min_overlap", cfg.min_overlap);
  if (j.contains("camera_target")) {
    const auto& t = j["camera_target"];
    cfg.camera_target = Vec3(t[0].get<double>(), t[1].get<double>(),
                             t[2].get<double>());
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pipeline config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return pipeline_config_from_json(text);
}

// ---------------------------------------------------------------------------
// rendering helpers

ImageRGB composite_over_black(const RenderOutput& out) {
  ImageRGB img(out.rgb.height, out.rgb.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      const double a = out.alpha.at(r, c);
      for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = out.rgb.at(r, c, ch) * a;
    }
  return img;
}

std::vector<std::string> render_protocol(const PartMap& parts,
                                         const KinematicParams& kin,
                                         const ProtocolConfig& cfg,
                                         const Vec3& target,
                                         const std::string& out_dir) {
  fs::create_directories(out_dir + "/posed");
  const auto states = protocol_states(cfg);
  const auto cameras = protocol_cameras(cfg, target);

  std::vector<std::string> posed_paths;
  for (const auto& [name, state] : states) {
    const ArticulatedAsset posed = apply_state(parts, kin, state);
    const std::string ply_path = out_dir + "/posed/" + name + ".ply";
    save_asset(posed.posed, ply_path);
    posed_paths.push_back(ply_path);

    const std::string render_dir = out_dir + "/renders/" + name;
    fs::create_directories(render_dir);
    parallel_for(cameras.size(), [&](size_t v) {
      const RenderOutput out = render(posed.posed, cameras[v]);
      char view[32];
      std::snprintf(view, sizeof(view), "view_%03zu", v);
      const ImageRGB composite = composite_over_black(out);
      write_png(composite, render_dir + "/" + view + ".png");
      write_png(out.alpha, render_dir + "/" + view + "_alpha.png");
      write_f32(composite, render_dir + "/" + view + ".f32");
    });
  }
  return posed_paths;
}

// ---------------------------------------------------------------------------
// refine report json

std::string refine_report_to_json(const RefineReport& report) {
  json j;
  j["lambda_outside"] = report.lambda_outside;
  json iters = json::array();
  for (const auto& r : report.iterations)
    iters.push_back({{"iteration", r.iteration},
                     {"view", r.view},
                     {"l_outside", r.l_outside},
                     {"l_photo", r.l_photo},
                     {"l_total", r.l_total}});
  j["iterations"] = iters;
  json evals = json::array();
  for (const auto& r : report.full_evals)
    evals.push_back({{"iteration", r.iteration},
                     {"l_outside", r.l_outside},
                     {"l_photo", r.l_photo},
                     {"l_total", r.l_total}});
  j["full_evals"] = evals;
  j["initial_per_view_total"] = report.initial_per_view_total;
  j["final_per_view_total"] = report.final_per_view_total;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// the pipeline

namespace {

[[noreturn]] void stage_fail(const std::string& stage, const std::string& msg) {
  throw Error("pipeline stage '" + stage + "' failed: " + msg);
}

std::vector<uint32_t> load_clusters_u32(const std::string& path, size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open clusters sidecar: " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  check(bytes.size() == expected * 4,
        "clusters sidecar size mismatch: " + path);
  std::vector<uint32_t> ids(expected);
  std::memcpy(ids.data(), bytes.data(), bytes.size());
  return ids;
}

std::vector<Camera> sphere_cameras(int n, double radius, const Vec3& center, int size,
                                   double fov_deg) {
  const auto base = sphere_views(n, radius, size, size, fov_deg);
  std::vector<Camera> cams;
  cams.reserve(base.size());
  for (const Camera& c : base) {
    const Vec3 eye = c.position() + center;
    cams.push_back(Camera::look_at(size, size, c.fx, c.fy, eye, center));
  }
  return cams;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  check(!cfg.out_dir.empty(), "pipeline: out_dir is required");
  fs::create_directories(cfg.out_dir);
  PipelineResult result;

  // --- load ---------------------------------------------------------------
  GaussianAsset asset;
  try {
    asset = load_asset(cfg.asset_path);
    if (!cfg.clusters_path.empty())
      asset.cluster_ids = load_clusters_u32(cfg.clusters_path, asset.size());
    check(asset.cluster_ids.has_value(),
          "asset has no cluster_id column and no sidecar was given");
  } catch (const std::exception& e) {
    stage_fail("load", e.what());
  }

  // --- infer --------------------------------------------------------------
  std::vector<PartLabel> labels;
  try {
    SegNet seg_net(load_net_config(cfg.seg_weights_dir));
    load_weights(seg_net.parameters(), cfg.seg_weights_dir);
    labels = infer_labels(seg_net, asset);

    KinNet kin_net(load_net_config(cfg.kin_weights_dir));
    load_weights(kin_net.parameters(), cfg.kin_weights_dir);
    result.kin = infer_kinematics(kin_net, asset);

    std::ofstream lf(cfg.out_dir + "/labels.u8", std::ios::binary | std::ios::trunc);
    for (PartLabel l : labels) {
      const uint8_t v = static_cast<uint8_t>(l);
      lf.write(reinterpret_cast<const char*>(&v), 1);
    }
    save_kinematics_json(result.kin, cfg.out_dir + "/kin.json");
  } catch (const std::exception& e) {
    stage_fail("infer", e.what());
  }

  // --- align --------------------------------------------------------------
  PartMap parts;
  try {
    result.selection = align(*asset.cluster_ids, labels, cfg.min_overlap);
    parts = extract_parts(asset, result.selection);

    json sel;
    for (const auto& [label, clusters] : result.selection.clusters)
      sel["clusters"][part_label_name(label)] =
          std::vector<uint32_t>(clusters.begin(), clusters.end());
    for (const auto& [label, stats] : result.selection.stats) {
      json rows = json::array();
      for (const auto& s : stats)
        rows.push_back({{"cluster", s.cluster_id},
                        {"matched", s.matched_count},
                        {"size", s.cluster_size},
                        {"overlap", s.overlap_ratio},
                        {"low_confidence", s.low_confidence}});
      sel["stats"][part_label_name(label)] = rows;
    }
    std::ofstream sf(cfg.out_dir + "/selection.json", std::ios::trunc);
    sf << sel.dump(2) << "\n";
  } catch (const std::exception& e) {
    stage_fail("align", e.what());
  }

  // --- camera target ------------------------------------------------------
  GaussianAsset reference_asset;
  const bool have_reference_asset = !cfg.reference_asset_path.empty();
  if (have_reference_asset) {
    try {
      reference_asset = load_asset(cfg.reference_asset_path);
    } catch (const std::exception& e) {
      stage_fail("load", e.what());
    }
  }
  const Vec3 target = cfg.camera_target
                          ? *cfg.camera_target
                          : (have_reference_asset ? asset_bounds(reference_asset)
                                                  : asset_bounds(asset))
                                .center();

  // --- refine -------------------------------------------------------------
  if (cfg.refine_enabled) {
    try {
      GaussianAsset mask_source = asset;
      std::vector<PartLabel> mask_labels = labels;
      if (!cfg.mask_asset_path.empty()) {
        mask_source = load_asset(cfg.mask_asset_path);
        check(mask_source.part_labels.has_value(),
              "mask asset has no part_label column");
        mask_labels = *mask_source.part_labels;
      }
      const Bounds b = asset_bounds(mask_source);
      const double radius = 1.6 * b.extent().norm();
      const auto cams = sphere_cameras(cfg.mask_views, radius, b.center(),
                                       cfg.mask_image_size, 50.0);
      const auto masks = make_part_masks(mask_source, mask_labels, cams,
                                         cfg.refine.alpha_threshold);

      fs::create_directories(cfg.out_dir + "/parts");
      json timing;
      for (PartLabel part : kMovableParts) {
        // skip views where the part mask is empty (the photometric
        // denominator would vanish)
        std::vector<Mask> part_masks;
        std::vector<Camera> part_cams;
        for (size_t v = 0; v < cams.size(); ++v) {
          const Mask& m = masks.at(part)[v];
          bool any = false;
          for (uint8_t px : m.data)
            if (px) {
              any = true;
              break;
            }
          if (any) {
            part_masks.push_back(m);
            part_cams.push_back(cams[v]);
          }
        }
        check(!part_masks.empty(), std::string("no usable mask views for part ") +
                                       part_label_name(part));
        RefineResult refined = refine(parts.at(part), part_masks, part_cams,
                                      cfg.refine);
        const std::string name = part_label_name(part);
        save_asset(refined.part, cfg.out_dir + "/parts/" + name + ".ply");
        std::ofstream rf(cfg.out_dir + "/refine_report_" + name + ".json",
                         std::ios::trunc);
        rf << refine_report_to_json(refined.report) << "\n";
        timing[name] = refined.report.wall_clock_seconds;
        parts[part] = std::move(refined.part);
      }
      std::ofstream tf(cfg.out_dir + "/refine_timing.json", std::ios::trunc);
      tf << timing.dump(2) << "\n";
    } catch (const std::exception& e) {
      stage_fail("refine", e.what());
    }
  }

  // --- articulate + render ------------------------------------------------
  try {
    result.posed_paths =
        render_protocol(parts, result.kin, cfg.protocol, target, cfg.out_dir);
  } catch (const std::exception& e) {
    stage_fail("articulate/render", e.what());
  }

  // --- reference ----------------------------------------------------------
  std::string reference_dir = cfg.reference_renders_dir;
  if (reference_dir.empty() && have_reference_asset) {
    try {
      check(!cfg.reference_kin_path.empty(),
            "reference_asset requires reference_kin");
      const KinematicParams gt_kin = load_kinematics_json(cfg.reference_kin_path);
      const PartMap gt_parts = split_by_labels(reference_asset);
      reference_dir = cfg.out_dir + "/reference";
      render_protocol(gt_parts, gt_kin, cfg.protocol, target, reference_dir);
    } catch (const std::exception& e) {
      stage_fail("reference", e.what());
    }
  }

  // --- eval ---------------------------------------------------------------
  if (!reference_dir.empty()) {
    try {
      std::vector<EvalPair> pairs;
      const auto states = protocol_states(cfg.protocol);
      for (const auto& [name, state] : states) {
        for (int v = 0; v < cfg.protocol.n_poses; ++v) {
          char view[32];
          std::snprintf(view, sizeof(view), "view_%03d", v);
          pairs.push_back({cfg.vehicle_id, name, view,
                           cfg.out_dir + "/renders/" + name + "/" + view + ".png",
                           reference_dir + "/renders/" + name + "/" + view + ".png"});
        }
      }
      result.eval = evaluate(pairs, pipeline_config_to_json(cfg));
      if (!cfg.external_metrics_csv.empty())
        merge_external_metrics(&result.eval, cfg.external_metrics_csv);
      result.eval.finalize();
      result.evaluated = true;
      save_eval_report_json(result.eval, cfg.out_dir + "/eval_report.json");
      save_eval_report_csv(result.eval, cfg.out_dir + "/eval_report.csv");
    } catch (const std::exception& e) {
      stage_fail("eval", e.what());
    }
  }

  // --- summary ------------------------------------------------------------
  json summary;
  summary["vehicle_id"] = cfg.vehicle_id;
  summary["gaussians"] = asset.size();
  summary["posed_assets"] = result.posed_paths;
  summary["refine_enabled"] = cfg.refine_enabled;
  summary["evaluated"] = result.evaluated;
  if (result.evaluated) {
    summary["mean_psnr"] = std::isinf(result.eval.mean_psnr)
                               ? json("inf")
                               : json(result.eval.mean_psnr);
    summary["mean_ssim"] = result.eval.mean_ssim;
  }
  std::ofstream sf(cfg.out_dir + "/pipeline_report.json", std::ios::trunc);
  sf << summary.dump(2) << "\n";
  return result;
}

}  // namespace splatrig
