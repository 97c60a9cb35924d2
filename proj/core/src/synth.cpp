#include "splatrig/synth.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "splatrig/ply_io.hpp"

namespace splatrig {

using nlohmann::json;

void CarSpec::validate() const {
  check(body_extents.minCoeff() > 0 && wheel_radius > 0 && wheel_width > 0 &&
            wheelbase > 0 && track_width > 0 && door_length > 0 && door_height > 0 &&
            cabin_length > 0 && cabin_height > 0 && ground_clearance > 0,
        "car spec: all dimensions must be positive");
  check(total_points >= 1000, "car spec: need at least 1000 points");
  check(track_width / 2 + wheel_width / 2 < body_extents[1] / 2,
        "car spec: wheels wider than the body");
  // doors sit between the wheel arches
  const double door_front = hinge_x();
  const double door_rear = door_front - door_length;
  const double front_arch = wheelbase / 2.0 - wheel_radius;
  const double rear_arch = -wheelbase / 2.0 + wheel_radius;
  check(door_front < front_arch && door_rear > rear_arch,
        "car spec: door panel intersects a wheel arch");
  check(door_bottom + door_height < body_extents[2],
        "car spec: door taller than the body side");
}

KinematicParams CarSpec::kinematics() const {
  KinematicParams kin;
  kin.hinge_fl = hinge(+1);
  kin.hinge_fr = hinge(-1);
  kin.joint_fl = wheel_center(+1, +1);
  kin.joint_fr = wheel_center(+1, -1);
  kin.joint_rl = wheel_center(-1, +1);
  kin.joint_rr = wheel_center(-1, -1);
  return kin;
}

namespace {

// rectangle patch: origin + s*u_dir (s in [0, u_len]) + t*v_dir
struct Rect {
  Vec3 origin;
  Vec3 u_dir, v_dir;  // unit
  double u_len, v_len;
  double area() const { return u_len * v_len; }
  Vec3 sample(Rng& rng) const {
    return origin + u_dir * (rng.uniform() * u_len) + v_dir * (rng.uniform() * v_len);
  }
};

std::vector<Rect> box_faces(const Vec3& lo, const Vec3& hi, bool skip_bottom) {
  const Vec3 d = hi - lo;
  std::vector<Rect> faces;
  // +x / -x
  faces.push_back({Vec3(hi[0], lo[1], lo[2]), Vec3(0, 1, 0), Vec3(0, 0, 1), d[1], d[2]});
  faces.push_back({Vec3(lo[0], lo[1], lo[2]), Vec3(0, 1, 0), Vec3(0, 0, 1), d[1], d[2]});
  // +y / -y
  faces.push_back({Vec3(lo[0], hi[1], lo[2]), Vec3(1, 0, 0), Vec3(0, 0, 1), d[0], d[2]});
  faces.push_back({Vec3(lo[0], lo[1], lo[2]), Vec3(1, 0, 0), Vec3(0, 0, 1), d[0], d[2]});
  // +z
  faces.push_back({Vec3(lo[0], lo[1], hi[2]), Vec3(1, 0, 0), Vec3(0, 1, 0), d[0], d[1]});
  if (!skip_bottom)
    faces.push_back({Vec3(lo[0], lo[1], lo[2]), Vec3(1, 0, 0), Vec3(0, 1, 0), d[0], d[1]});
  return faces;
}

Vec3 sample_faces(const std::vector<Rect>& faces, Rng& rng) {
  double total = 0;
  for (const Rect& f : faces) total += f.area();
  double pick = rng.uniform() * total;
  for (const Rect& f : faces) {
    if (pick < f.area() || &f == &faces.back()) return f.sample(rng);
    pick -= f.area();
  }
  return faces.back().sample(rng);
}

double faces_area(const std::vector<Rect>& faces) {
  double total = 0;
  for (const Rect& f : faces) total += f.area();
  return total;
}

// cylinder with axis +y through `center`, half width w/2, radius r
Vec3 sample_cylinder(const Vec3& center, double radius, double width, Rng& rng) {
  const double lateral = 2 * M_PI * radius * width;
  const double cap = M_PI * radius * radius;
  const double pick = rng.uniform() * (lateral + 2 * cap);
  if (pick < lateral) {
    const double theta = rng.uniform() * 2 * M_PI;
    const double y = (rng.uniform() - 0.5) * width;
    return center + Vec3(radius * std::cos(theta), y, radius * std::sin(theta));
  }
  const double side = pick < lateral + cap ? 1.0 : -1.0;
  const double rr = radius * std::sqrt(rng.uniform());
  const double theta = rng.uniform() * 2 * M_PI;
  return center + Vec3(rr * std::cos(theta), side * width / 2.0, rr * std::sin(theta));
}

Vec3 jittered_color(const Vec3& base, double jitter, Rng& rng) {
  Vec3 c;
  for (int k = 0; k < 3; ++k)
    c[k] = std::clamp(base[k] + rng.uniform(-jitter, jitter), 0.0, 1.0);
  return c;
}

struct DoorCutout {
  double x0, x1, z0, z1;  // on the body side face, with seam margin
};

}  // namespace

GeneratedCar generate(const CarSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const double half_l = spec.body_extents[0] / 2.0;
  const double half_w = spec.body_extents[1] / 2.0;
  const double z0 = spec.ground_clearance;
  const double z1 = z0 + spec.body_extents[2];

  // door rectangle on the side faces (seam strip stays empty)
  const double door_front = spec.hinge_x();
  const double door_rear = door_front - spec.door_length;
  const double door_z0 = z0 + spec.door_bottom;
  const double door_z1 = door_z0 + spec.door_height;
  const DoorCutout cut{door_rear - spec.door_seam, door_front + spec.door_seam,
                       door_z0 - spec.door_seam, door_z1 + spec.door_seam};

  // body: lower box (side faces get the door cutout) + cabin box
  auto lower = box_faces(Vec3(-half_l, -half_w, z0), Vec3(half_l, half_w, z1), false);
  const double cab_hw = spec.cabin_width_ratio * half_w;
  auto cabin = box_faces(
      Vec3(spec.cabin_center_x - spec.cabin_length / 2, -cab_hw, z1),
      Vec3(spec.cabin_center_x + spec.cabin_length / 2, cab_hw, z1 + spec.cabin_height),
      true);

  auto in_cutout = [&](const Vec3& p) {
    return p[0] > cut.x0 && p[0] < cut.x1 && p[2] > cut.z0 && p[2] < cut.z1;
  };
  auto sample_body = [&](Rng& r) {
    const double lower_area = faces_area(lower);
    const double cabin_area = faces_area(cabin);
    for (;;) {
      Vec3 p;
      bool is_cabin;
      if (r.uniform() * (lower_area + cabin_area) < lower_area) {
        p = sample_faces(lower, r);
        is_cabin = false;
      } else {
        p = sample_faces(cabin, r);
        is_cabin = true;
      }
      // reject the door cutouts on the two side faces
      if (!is_cabin && std::abs(std::abs(p[1]) - half_w) < 1e-12 && in_cutout(p))
        continue;
      return std::make_pair(p, is_cabin);
    }
  };

  // door panels: thin boxes protruding slightly from the side
  auto door_box = [&](int side) {
    const double y_in = half_w - 0.005;
    const double y_out = half_w + spec.door_panel_offset;
    const Vec3 lo(door_rear, side > 0 ? y_in : -y_out, door_z0);
    const Vec3 hi(door_front, side > 0 ? y_out : -y_in, door_z1);
    return box_faces(lo, hi, false);
  };
  const auto door_l = door_box(+1), door_r = door_box(-1);

  // point budget
  const int n_total = spec.total_points;
  const int n_door = std::max(16, int(0.06 * n_total));
  const int n_wheel = std::max(16, int(0.07 * n_total));
  const int n_body = n_total - 2 * n_door - 4 * n_wheel;
  check(n_body > 0, "car spec: too few points for the body");

  GeneratedCar car;
  car.spec = spec;
  TrainSample& sample = car.sample;
  sample.id = "car";
  sample.cloud.colors.emplace();
  sample.kin = spec.kinematics();

  struct PendingPart {
    PartLabel label;
    double area;
    int count;
  };

  auto add_point = [&](const Vec3& p, const Vec3& color, PartLabel label) {
    sample.cloud.positions.push_back(p);
    sample.cloud.colors->push_back(color);
    sample.labels.push_back(label);
  };

  // body (cabin points take the cabin color)
  for (int i = 0; i < n_body; ++i) {
    const auto [p, is_cabin] = sample_body(rng);
    add_point(p,
              jittered_color(is_cabin ? spec.cabin_color : spec.body_color,
                             spec.color_jitter, rng),
              PartLabel::Body);
  }
  // doors
  for (int i = 0; i < n_door; ++i)
    add_point(sample_faces(door_l, rng),
              jittered_color(spec.door_color, spec.color_jitter, rng),
              PartLabel::FrontLeftDoor);
  for (int i = 0; i < n_door; ++i)
    add_point(sample_faces(door_r, rng),
              jittered_color(spec.door_color, spec.color_jitter, rng),
              PartLabel::FrontRightDoor);
  // wheels
  const std::array<std::pair<PartLabel, Vec3>, 4> wheels = {
      std::make_pair(PartLabel::WheelFL, spec.wheel_center(+1, +1)),
      std::make_pair(PartLabel::WheelFR, spec.wheel_center(+1, -1)),
      std::make_pair(PartLabel::WheelRL, spec.wheel_center(-1, +1)),
      std::make_pair(PartLabel::WheelRR, spec.wheel_center(-1, -1))};
  for (const auto& [label, center] : wheels)
    for (int i = 0; i < n_wheel; ++i)
      add_point(sample_cylinder(center, spec.wheel_radius, spec.wheel_width, rng),
                jittered_color(spec.wheel_color, spec.color_jitter, rng), label);

  validate_train_sample(sample);

  // Gaussian twin: isotropic splats with scale = local sample spacing
  const double body_area = faces_area(lower) + faces_area(cabin);
  const double door_area = faces_area(door_l);
  const double wheel_area = 2 * M_PI * spec.wheel_radius * spec.wheel_width +
                            2 * M_PI * spec.wheel_radius * spec.wheel_radius;
  auto spacing = [](double area, int count) { return std::sqrt(area / count); };
  std::array<double, kNumPartLabels> part_scale{};
  part_scale[int(PartLabel::Body)] = spacing(body_area, n_body);
  part_scale[int(PartLabel::FrontLeftDoor)] = spacing(door_area, n_door);
  part_scale[int(PartLabel::FrontRightDoor)] = spacing(door_area, n_door);
  for (const auto& [label, center] : wheels)
    part_scale[int(label)] = spacing(wheel_area, n_wheel);

  car.asset.part_labels.emplace();
  car.asset.cluster_ids.emplace();
  const Vec3 body_center(0, 0, (z0 + z1) / 2.0);
  for (size_t i = 0; i < sample.cloud.size(); ++i) {
    Gaussian g;
    g.mean = sample.cloud.positions[i];
    const PartLabel label = sample.labels[i];
    g.scale = Vec3::Constant(part_scale[int(label)]);
    g.opacity = 0.9;
    g.color = (*sample.cloud.colors)[i];
    car.asset.gaussians.push_back(g);
    car.asset.part_labels->push_back(label);
    if (label == PartLabel::Body) {
      const Vec3 rel = g.mean - body_center;
      const uint32_t octant = (rel[0] > 0 ? 1 : 0) | (rel[1] > 0 ? 2 : 0) |
                              (rel[2] > 0 ? 4 : 0);
      car.asset.cluster_ids->push_back(10 + octant);
    } else {
      car.asset.cluster_ids->push_back(static_cast<uint32_t>(label));
    }
  }
  return car;
}

TrainSample mirror_sample(const TrainSample& sample) {
  TrainSample out = sample;
  for (Vec3& p : out.cloud.positions) p[1] = -p[1];
  auto swap_label = [](PartLabel l) {
    switch (l) {
      case PartLabel::FrontLeftDoor: return PartLabel::FrontRightDoor;
      case PartLabel::FrontRightDoor: return PartLabel::FrontLeftDoor;
      case PartLabel::WheelFL: return PartLabel::WheelFR;
      case PartLabel::WheelFR: return PartLabel::WheelFL;
      case PartLabel::WheelRL: return PartLabel::WheelRR;
      case PartLabel::WheelRR: return PartLabel::WheelRL;
      default: return PartLabel::Body;
    }
  };
  for (PartLabel& l : out.labels) l = swap_label(l);

  auto flip2 = [](Vec2 v) { return Vec2(v[0], -v[1]); };
  auto flip3 = [](Vec3 v) { return Vec3(v[0], -v[1], v[2]); };
  const KinematicParams& k = sample.kin;
  out.kin.hinge_fl = flip2(k.hinge_fr);
  out.kin.hinge_fr = flip2(k.hinge_fl);
  out.kin.joint_fl = flip3(k.joint_fr);
  out.kin.joint_fr = flip3(k.joint_fl);
  out.kin.joint_rl = flip3(k.joint_rr);
  out.kin.joint_rr = flip3(k.joint_rl);
  return out;
}

GaussianAsset displace_fraction(const GaussianAsset& asset, double fraction,
                                double magnitude, uint64_t seed) {
  check(asset.part_labels.has_value(), "displace_fraction: asset has no part labels");
  check(fraction >= 0 && fraction <= 1, "displace_fraction: fraction must be in [0,1]");
  GaussianAsset out = asset;
  Rng rng(seed);

  for (PartLabel part : kMovableParts) {
    std::vector<size_t> idx;
    Vec3 centroid = Vec3::Zero();
    for (size_t i = 0; i < asset.size(); ++i) {
      if ((*asset.part_labels)[i] != part) continue;
      idx.push_back(i);
      centroid += asset.gaussians[i].mean;
    }
    if (idx.empty()) continue;
    centroid /= double(idx.size());

    const size_t n_move = static_cast<size_t>(fraction * double(idx.size()));
    for (size_t k = 0; k < n_move; ++k) {
      const size_t i = idx[rng.uniform_index(idx.size())];
      Vec3 dir = out.gaussians[i].mean - centroid;
      if (dir.norm() < 1e-9) dir = Vec3(0, 0, 1);
      dir.normalize();
      // outward push plus a random kick
      Vec3 kick(rng.normal(), rng.normal(), rng.normal());
      if (kick.norm() > 1e-9) kick.normalize();
      out.gaussians[i].mean += magnitude * (0.7 * dir + 0.3 * kick);
    }
  }
  return out;
}

std::vector<CarSpec> sample_specs(const SuiteConfig& cfg) {
  check(cfg.count >= 1, "suite: count must be >= 1");
  Rng rng(cfg.seed);
  std::vector<CarSpec> specs;
  for (int i = 0; i < cfg.count; ++i) {
    CarSpec s;
    s.body_extents = Vec3(rng.uniform(3.9, 4.7), rng.uniform(1.72, 1.95),
                          rng.uniform(0.68, 0.82));
    s.ground_clearance = rng.uniform(0.22, 0.3);
    s.cabin_length = rng.uniform(1.8, 2.3);
    s.cabin_height = rng.uniform(0.48, 0.62);
    s.cabin_center_x = rng.uniform(-0.5, -0.2);
    s.wheel_radius = rng.uniform(0.3, 0.37);
    s.wheel_width = rng.uniform(0.17, 0.23);
    s.wheelbase = rng.uniform(2.55, 2.95);
    s.track_width = rng.uniform(1.42, std::min(1.62, s.body_extents[1] - s.wheel_width - 0.06));
    s.door_length = rng.uniform(1.0, 1.25);
    s.door_height = rng.uniform(0.5, s.body_extents[2] - 0.12);
    s.door_bottom = rng.uniform(0.05, 0.1);
    s.hinge_offset = rng.uniform(0.18, 0.3);
    // body hue varies per car; wheels stay dark
    s.body_color = Vec3(rng.uniform(0.2, 0.85), rng.uniform(0.1, 0.7),
                        rng.uniform(0.1, 0.7));
    s.door_color = (s.body_color * 0.85).cwiseMax(0.0);
    s.total_points = cfg.total_points;
    s.seed = rng.next_u64();
    s.validate();
    specs.push_back(s);
  }
  return specs;
}

void generate_suite(const SuiteConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto specs = sample_specs(cfg);

  json manifest;
  manifest["seed"] = cfg.seed;
  manifest["count"] = cfg.count;
  json spec_list = json::array();

  for (size_t i = 0; i < specs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "car_%03zu", i);
    GeneratedCar car = generate(specs[i]);
    car.sample.id = name;
    const std::string dir = out_dir + "/" + name;
    save_train_sample(car.sample, dir);
    save_asset(car.asset, dir + "/asset.ply");

    const CarSpec& s = specs[i];
    spec_list.push_back(
        {{"id", name},
         {"body_extents", {s.body_extents[0], s.body_extents[1], s.body_extents[2]}},
         {"ground_clearance", s.ground_clearance},
         {"cabin_length", s.cabin_length},
         {"cabin_width_ratio", s.cabin_width_ratio},
         {"cabin_height", s.cabin_height},
         {"cabin_center_x", s.cabin_center_x},
         {"wheel_radius", s.wheel_radius},
         {"wheel_width", s.wheel_width},
         {"wheelbase", s.wheelbase},
         {"track_width", s.track_width},
         {"door_length", s.door_length},
         {"door_height", s.door_height},
         {"door_bottom", s.door_bottom},
         {"hinge_offset", s.hinge_offset},
         {"door_panel_offset", s.door_panel_offset},
         {"body_color", {s.body_color[0], s.body_color[1], s.body_color[2]}},
         {"total_points", s.total_points},
         {"seed", s.seed}});
  }
  manifest["specs"] = spec_list;

  std::ofstream mf(out_dir + "/manifest.json", std::ios::trunc);
  if (!mf) throw IoError("cannot write " + out_dir + "/manifest.json");
  mf << manifest.dump(2) << "\n";
}

}  // namespace splatrig
