// splatrig command line: converts static Gaussian-splat vehicle assets into
// animatable ones and runs the evaluation harness around that conversion.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "splatrig/image_io.hpp"
#include "splatrig/pipeline.hpp"
#include "splatrig/ply_io.hpp"
#include "splatrig/synth.hpp"
#include "splatrig/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace splatrig;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed json in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

AugmentConfig augment_from_json(const json& j) {
  AugmentConfig a;
  a.enabled = j.value("enabled", a.enabled);
  a.scale_lo = j.value("scale_lo", a.scale_lo);
  a.scale_hi = j.value("scale_hi", a.scale_hi);
  a.shift_range = j.value("shift_range", a.shift_range);
  a.rotate_yaw = j.value("rotate_yaw", a.rotate_yaw);
  a.jitter_sigma = j.value("jitter_sigma", a.jitter_sigma);
  a.jitter_clip = j.value("jitter_clip", a.jitter_clip);
  return a;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig t;
  t.epochs = j.value("epochs", t.epochs);
  t.lr = j.value("lr", t.lr);
  t.seed = j.value("seed", t.seed);
  if (j.contains("augment")) t.augment = augment_from_json(j["augment"]);
  t.eval_interval = j.value("eval_interval", t.eval_interval);
  t.stop_threshold = j.value("stop_threshold", t.stop_threshold);
  t.threads = j.value("threads", t.threads);
  t.verbose = j.value("verbose", t.verbose);
  return t;
}

json curve_to_json(const TrainResult& result) {
  json curve = json::array();
  for (const EpochRecord& r : result.curve) {
    json row = {{"epoch", r.epoch}, {"loss", r.loss}};
    if (!std::isnan(r.metric)) row["metric"] = r.metric;
    curve.push_back(row);
  }
  return curve;
}

std::vector<PartLabel> load_labels_u8(const std::string& path, size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open labels: " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  check(bytes.size() == expected,
        "labels.u8 length mismatch: " + path + " has " +
            std::to_string(bytes.size()) + " bytes, asset has " +
            std::to_string(expected) + " gaussians");
  std::vector<PartLabel> labels;
  labels.reserve(bytes.size());
  for (char b : bytes) {
    const uint8_t v = static_cast<uint8_t>(b);
    check(v < kNumPartLabels, "label byte out of range in " + path);
    labels.push_back(static_cast<PartLabel>(v));
  }
  return labels;
}

void save_labels_u8(const std::vector<PartLabel>& labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (PartLabel l : labels) {
    const uint8_t v = static_cast<uint8_t>(l);
    out.write(reinterpret_cast<const char*>(&v), 1);
  }
}

// ---------------------------------------------------------------------------

int cmd_gen_data(const std::string& out_dir, const std::string& config_path) {
  SuiteConfig cfg;
  double floater_fraction = 0.0, floater_magnitude = 0.15;
  if (!config_path.empty()) {
    const json j = load_json_file(config_path);
    cfg.count = j.value("count", cfg.count);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.total_points = j.value("total_points", cfg.total_points);
    floater_fraction = j.value("floater_fraction", floater_fraction);
    floater_magnitude = j.value("floater_magnitude", floater_magnitude);
  }
  generate_suite(cfg, out_dir);

  json report{{"count", cfg.count},
              {"seed", cfg.seed},
              {"total_points", cfg.total_points},
              {"floater_fraction", floater_fraction}};
  json dirs = json::array();
  for (int i = 0; i < cfg.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "car_%03d", i);
    dirs.push_back(name);
    if (floater_fraction > 0) {
      const std::string dir = out_dir + "/" + name;
      const GaussianAsset clean = load_asset(dir + "/asset.ply");
      const GaussianAsset degraded =
          displace_fraction(clean, floater_fraction, floater_magnitude,
                            cfg.seed + 1000 + i);
      save_asset(degraded, dir + "/asset_floaters.ply");
    }
  }
  report["samples"] = dirs;
  write_json_file(report, out_dir + "/gen_data_report.json");
  std::printf("gen-data: wrote %d samples to %s\n", cfg.count, out_dir.c_str());
  return 0;
}

int cmd_train(bool seg, const std::string& dataset_dir, const std::string& out_dir,
              const std::string& config_path) {
  json j = config_path.empty() ? json::object() : load_json_file(config_path);
  TrainConfig cfg = train_config_from_json(j);
  NetConfig net_cfg;
  if (j.contains("net")) net_cfg = net_config_from_json(j["net"].dump());

  const auto dataset = load_dataset(dataset_dir);
  fs::create_directories(out_dir);

  TrainResult result;
  if (seg) {
    SegNet net(net_cfg);
    result = train_seg(&net, dataset, cfg);
    save_weights(net.parameters(), net_cfg, out_dir);
  } else {
    KinNet net(net_cfg);
    result = train_kin(&net, dataset, cfg);
    save_weights(net.parameters(), net_cfg, out_dir);
  }

  json report{{"epochs_run", result.epochs_run},
              {"final_metric", result.final_metric},
              {"curve", curve_to_json(result)}};
  if (!seg) report["final_hinge_error"] = result.final_hinge_error;
  write_json_file(report, out_dir + "/metrics.json");
  std::printf("%s: %d epochs, final metric %.4f\n", seg ? "train-seg" : "train-kin",
              result.epochs_run, result.final_metric);
  return 0;
}

int cmd_infer(const std::string& asset_path, const std::string& seg_weights,
              const std::string& out_labels, const std::string& kin_weights,
              const std::string& out_kin, const std::string& out_ply) {
  const GaussianAsset asset = load_asset(asset_path);

  SegNet seg_net(load_net_config(seg_weights));
  load_weights(seg_net.parameters(), seg_weights);
  const auto labels = infer_labels(seg_net, asset);
  save_labels_u8(labels, out_labels);

  json report;
  std::array<size_t, kNumPartLabels> counts{};
  for (PartLabel l : labels) ++counts[int(l)];
  for (int i = 0; i < kNumPartLabels; ++i)
    report["label_counts"][part_label_name(PartLabel(i))] = counts[i];

  if (!kin_weights.empty()) {
    KinNet kin_net(load_net_config(kin_weights));
    load_weights(kin_net.parameters(), kin_weights);
    const KinematicParams kin = infer_kinematics(kin_net, asset);
    const std::string kin_path =
        out_kin.empty() ? fs::path(out_labels).parent_path() / "kin.json" : out_kin;
    save_kinematics_json(kin, kin_path);
    report["kin"] = json::parse(kinematics_to_json(kin));
  }
  if (!out_ply.empty()) {
    GaussianAsset labeled = asset;
    labeled.part_labels = labels;
    save_asset(labeled, out_ply);
  }
  write_json_file(report, fs::path(out_labels).parent_path() / "infer_report.json");
  std::printf("infer: %zu labels written to %s\n", labels.size(), out_labels.c_str());
  return 0;
}

int cmd_align(const std::string& asset_path, const std::string& labels_path,
              const std::string& out_path, const std::string& clusters_path,
              double min_overlap) {
  GaussianAsset asset = load_asset(asset_path);
  const auto labels = load_labels_u8(labels_path, asset.size());
  if (!clusters_path.empty()) {
    std::ifstream in(clusters_path, std::ios::binary);
    if (!in) throw IoError("cannot open clusters: " + clusters_path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    check(bytes.size() == asset.size() * 4, "clusters.u32 size mismatch");
    std::vector<uint32_t> ids(asset.size());
    std::memcpy(ids.data(), bytes.data(), bytes.size());
    asset.cluster_ids = std::move(ids);
  }
  check(asset.cluster_ids.has_value(),
        "asset has no cluster_id column; pass --clusters");

  const PartSelection sel = align(*asset.cluster_ids, labels, min_overlap);
  json out;
  for (const auto& [label, clusters] : sel.clusters)
    out["clusters"][part_label_name(label)] =
        std::vector<uint32_t>(clusters.begin(), clusters.end());
  for (const auto& [label, stats] : sel.stats) {
    json rows = json::array();
    for (const auto& s : stats)
      rows.push_back({{"cluster", s.cluster_id},
                      {"matched", s.matched_count},
                      {"size", s.cluster_size},
                      {"overlap", s.overlap_ratio},
                      {"low_confidence", s.low_confidence}});
    out["stats"][part_label_name(label)] = rows;
  }
  json missing = json::array();
  for (PartLabel p : sel.missing_parts) missing.push_back(part_label_name(p));
  out["missing_parts"] = missing;
  write_json_file(out, out_path);
  std::printf("align: %zu parts matched, %zu missing\n", sel.clusters.size(),
              sel.missing_parts.size());
  return sel.missing_parts.empty() ? 0 : 2;
}

int cmd_refine(const std::string& asset_path, const std::string& out_dir,
               const std::string& config_path) {
  json j = config_path.empty() ? json::object() : load_json_file(config_path);
  RefineConfig cfg;
  if (j.contains("refine")) {
    const json& r = j["refine"];
    cfg.lambda_outside = r.value("lambda_outside", cfg.lambda_outside);
    cfg.iterations = r.value("iterations", cfg.iterations);
    cfg.lr_mean_factor = r.value("lr_mean_factor", cfg.lr_mean_factor);
    cfg.lr_rotation = r.value("lr_rotation", cfg.lr_rotation);
    cfg.lr_scale = r.value("lr_scale", cfg.lr_scale);
    cfg.alpha_threshold = r.value("alpha_threshold", cfg.alpha_threshold);
    cfg.seed = r.value("seed", cfg.seed);
  }
  const int views = j.value("views", 24);
  const int image_size = j.value("image_size", 160);
  const std::string mask_asset_path = j.value("mask_asset", std::string());
  const bool save_masks = j.value("save_masks", false);

  const GaussianAsset asset = load_asset(asset_path);
  check(asset.part_labels.has_value(), "refine: asset needs a part_label column");

  GaussianAsset mask_source = asset;
  if (!mask_asset_path.empty()) mask_source = load_asset(mask_asset_path);
  check(mask_source.part_labels.has_value(), "refine: mask asset needs part labels");

  const Bounds b = asset_bounds(mask_source);
  const double radius = 1.6 * b.extent().norm();
  std::vector<Camera> cams;
  for (const Camera& c : sphere_views(views, radius, image_size, image_size, 50.0)) {
    cams.push_back(Camera::look_at(image_size, image_size, c.fx, c.fy,
                                   c.position() + b.center(), b.center()));
  }
  const auto masks =
      make_part_masks(mask_source, *mask_source.part_labels, cams, cfg.alpha_threshold);

  fs::create_directories(out_dir + "/parts");
  json timing;
  for (PartLabel part : kMovableParts) {
    const std::string name = part_label_name(part);
    if (save_masks) {
      fs::create_directories(out_dir + "/masks/" + name);
      for (size_t v = 0; v < cams.size(); ++v) {
        char fn[32];
        std::snprintf(fn, sizeof(fn), "view_%03zu.png", v);
        write_png(masks.at(part)[v], out_dir + "/masks/" + name + "/" + fn);
      }
    }
    std::vector<Mask> part_masks;
    std::vector<Camera> part_cams;
    for (size_t v = 0; v < cams.size(); ++v) {
      bool any = false;
      for (uint8_t px : masks.at(part)[v].data)
        if (px) {
          any = true;
          break;
        }
      if (any) {
        part_masks.push_back(masks.at(part)[v]);
        part_cams.push_back(cams[v]);
      }
    }
    check(!part_masks.empty(), "refine: no usable mask views for " + name);

    const GaussianAsset part_asset = subset_by_label(asset, part);
    RefineResult refined = refine(part_asset, part_masks, part_cams, cfg);
    save_asset(refined.part, out_dir + "/parts/" + name + ".ply");
    std::ofstream rf(out_dir + "/refine_report_" + name + ".json", std::ios::trunc);
    rf << refine_report_to_json(refined.report) << "\n";
    timing[name] = refined.report.wall_clock_seconds;
    std::printf("refine: %s, L_total %.5f -> %.5f\n", name.c_str(),
                refined.report.full_evals.front().l_total,
                refined.report.full_evals.back().l_total);
  }
  write_json_file(timing, out_dir + "/refine_timing.json");
  return 0;
}

int cmd_articulate(const std::string& asset_path, const std::string& kin_path,
                   const std::string& state_path, const std::string& out_path,
                   bool protocol) {
  const GaussianAsset asset = load_asset(asset_path);
  check(asset.part_labels.has_value(), "articulate: asset needs a part_label column");
  const KinematicParams kin = load_kinematics_json(kin_path);
  const PartMap parts = split_by_labels(asset);

  if (protocol) {
    ProtocolConfig cfg;
    fs::create_directories(out_path);
    json report = json::array();
    for (const auto& [name, state] : protocol_states(cfg)) {
      const ArticulatedAsset posed = apply_state(parts, kin, state);
      const std::string path = out_path + "/" + name + ".ply";
      save_asset(posed.posed, path);
      report.push_back({{"state", name}, {"path", path}});
    }
    write_json_file(report, out_path + "/articulate_report.json");
    std::printf("articulate: wrote 8 protocol states to %s\n", out_path.c_str());
    return 0;
  }

  check(!state_path.empty(), "articulate: state.json required (or use --protocol)");
  const PartState state = load_part_state_json(state_path);
  const ArticulatedAsset posed = apply_state(parts, kin, state);
  save_asset(posed.posed, out_path);
  std::printf("articulate: wrote %s\n", out_path.c_str());
  return 0;
}

int cmd_render(const std::string& asset_path, const std::string& out_dir,
               const std::string& config_path) {
  json j = config_path.empty() ? json::object() : load_json_file(config_path);
  const GaussianAsset asset = load_asset(asset_path);

  const std::string mode = j.value("mode", "orbit");
  const int width = j.value("image_width", 400);
  const int height = j.value("image_height", 400);
  const double fov = j.value("fov_deg", 50.0);

  const Bounds b = asset_bounds(asset);
  Vec3 target = b.center();
  if (j.contains("target")) {
    const auto& t = j["target"];
    target = Vec3(t[0].get<double>(), t[1].get<double>(), t[2].get<double>());
  }

  std::vector<Camera> cams;
  if (mode == "orbit") {
    ProtocolConfig pc;
    pc.image_width = width;
    pc.image_height = height;
    pc.fov_deg = fov;
    if (j.contains("n_poses")) pc.n_poses = j["n_poses"].get<int>();
    cams = protocol_cameras(pc, target);
  } else if (mode == "sphere") {
    const int n = j.value("n_views", 24);
    const double radius = j.value("radius", 1.6 * b.extent().norm());
    for (const Camera& c : sphere_views(n, radius, width, height, fov))
      cams.push_back(Camera::look_at(width, height, c.fx, c.fy,
                                     c.position() + target, target));
  } else {
    throw InvalidArgument("render: unknown mode '" + mode + "'");
  }

  fs::create_directories(out_dir);
  parallel_for(cams.size(), [&](size_t v) {
    const RenderOutput out = render(asset, cams[v]);
    char name[32];
    std::snprintf(name, sizeof(name), "view_%03zu", v);
    const ImageRGB composite = composite_over_black(out);
    write_png(composite, out_dir + "/" + std::string(name) + ".png");
    write_png(out.alpha, out_dir + "/" + std::string(name) + "_alpha.png");
    write_f32(composite, out_dir + "/" + std::string(name) + ".f32");
  });
  json report{{"views", cams.size()}, {"mode", mode},
              {"image_width", width},  {"image_height", height}};
  write_json_file(report, out_dir + "/render_report.json");
  std::printf("render: %zu views to %s\n", cams.size(), out_dir.c_str());
  return 0;
}

int cmd_eval(const std::string& generated, const std::string& reference,
             const std::string& out_json, const std::string& out_csv,
             const std::string& extra_csv) {
  EvalReport report = evaluate_dirs(generated, reference);
  if (!extra_csv.empty()) {
    merge_external_metrics(&report, extra_csv);
    report.finalize();
  }
  save_eval_report_json(report, out_json);
  if (!out_csv.empty()) save_eval_report_csv(report, out_csv);
  std::printf("eval: %zu pairs, mean psnr %.3f, mean ssim %.4f\n",
              report.rows.size(), report.mean_psnr, report.mean_ssim);
  return 0;
}

int cmd_pipeline(const std::string& config_path) {
  const PipelineConfig cfg = load_pipeline_config(config_path);
  const PipelineResult result = run_pipeline(cfg);
  std::printf("pipeline: %zu posed assets under %s\n", result.posed_paths.size(),
              cfg.out_dir.c_str());
  if (result.evaluated)
    std::printf("pipeline: mean psnr %.3f, mean ssim %.4f\n",
                result.eval.mean_psnr, result.eval.mean_ssim);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"animatable Gaussian-splat vehicle toolkit"};
  app.require_subcommand(1);

  // gen-data
  std::string gen_out, gen_config;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic vehicle dataset");
  gen->add_option("out_dir", gen_out)->required();
  gen->add_option("--config", gen_config, "json config (count, seed, total_points)");

  // train-seg / train-kin
  std::string ts_data, ts_out, ts_config;
  auto* tseg = app.add_subcommand("train-seg", "train the part segmentation network");
  tseg->add_option("dataset_dir", ts_data)->required();
  tseg->add_option("weights_out", ts_out)->required();
  tseg->add_option("--config", ts_config);

  std::string tk_data, tk_out, tk_config;
  auto* tkin = app.add_subcommand("train-kin", "train the kinematics regression network");
  tkin->add_option("dataset_dir", tk_data)->required();
  tkin->add_option("weights_out", tk_out)->required();
  tkin->add_option("--config", tk_config);

  // infer
  std::string in_asset, in_weights, in_labels, in_kin_weights, in_kin_out, in_ply;
  auto* infer = app.add_subcommand("infer", "predict per-gaussian labels and kinematics");
  infer->add_option("asset", in_asset)->required();
  infer->add_option("seg_weights", in_weights)->required();
  infer->add_option("out_labels", in_labels)->required();
  infer->add_option("--kin-weights", in_kin_weights);
  infer->add_option("--out-kin", in_kin_out);
  infer->add_option("--out-ply", in_ply, "write the asset with predicted labels");

  // align
  std::string al_asset, al_labels, al_out, al_clusters;
  double al_overlap = 0.5;
  auto* align_cmd = app.add_subcommand("align", "match clusters to predicted part labels");
  align_cmd->add_option("asset", al_asset)->required();
  align_cmd->add_option("labels", al_labels)->required();
  align_cmd->add_option("out_selection", al_out)->required();
  align_cmd->add_option("--clusters", al_clusters, "clusters.u32 sidecar");
  align_cmd->add_option("--min-overlap", al_overlap);

  // refine
  std::string rf_asset, rf_out, rf_config;
  auto* refine_cmd = app.add_subcommand("refine", "mask-driven part geometry refinement");
  refine_cmd->add_option("asset", rf_asset)->required();
  refine_cmd->add_option("out_dir", rf_out)->required();
  refine_cmd->add_option("--config", rf_config);

  // articulate
  std::string ar_asset, ar_kin, ar_state, ar_out;
  bool ar_protocol = false;
  auto* art = app.add_subcommand("articulate", "pose a labeled asset");
  art->add_option("asset", ar_asset)->required();
  art->add_option("kin", ar_kin)->required();
  art->add_option("out", ar_out)->required();
  art->add_option("--state", ar_state, "part state json");
  art->add_flag("--protocol", ar_protocol, "write the 8 evaluation states");

  // render
  std::string rd_asset, rd_out, rd_config;
  auto* rnd = app.add_subcommand("render", "rasterize an asset from a camera path");
  rnd->add_option("asset", rd_asset)->required();
  rnd->add_option("out_dir", rd_out)->required();
  rnd->add_option("--config", rd_config);

  // eval
  std::string ev_gen, ev_ref, ev_json, ev_csv, ev_extra;
  auto* ev = app.add_subcommand("eval", "psnr/ssim between matched render sets");
  ev->add_option("generated_dir", ev_gen)->required();
  ev->add_option("reference_dir", ev_ref)->required();
  ev->add_option("out_json", ev_json)->required();
  ev->add_option("--csv", ev_csv);
  ev->add_option("--extra-metrics", ev_extra, "external per-pair metric csv");

  // pipeline
  std::string pl_config;
  auto* pl = app.add_subcommand("pipeline",
                                "infer -> align -> refine -> articulate -> render -> eval");
  pl->add_option("config", pl_config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen_out, gen_config);
    if (tseg->parsed()) return cmd_train(true, ts_data, ts_out, ts_config);
    if (tkin->parsed()) return cmd_train(false, tk_data, tk_out, tk_config);
    if (infer->parsed())
      return cmd_infer(in_asset, in_weights, in_labels, in_kin_weights, in_kin_out,
                       in_ply);
    if (align_cmd->parsed())
      return cmd_align(al_asset, al_labels, al_out, al_clusters, al_overlap);
    if (refine_cmd->parsed()) return cmd_refine(rf_asset, rf_out, rf_config);
    if (art->parsed())
      return cmd_articulate(ar_asset, ar_kin, ar_state, ar_out, ar_protocol);
    if (rnd->parsed()) return cmd_render(rd_asset, rd_out, rd_config);
    if (ev->parsed()) return cmd_eval(ev_gen, ev_ref, ev_json, ev_csv, ev_extra);
    if (pl->parsed()) return cmd_pipeline(pl_config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
