#pragma once

#include <string>
#include <vector>

#include "splatrig/train.hpp"

namespace splatrig {

/// Parameters of one procedural vehicle. Canonical frame: +x forward,
/// +y left, +z up, ground plane z = 0. The car is built from a lower body
/// box with a cabin box on top, two door panels cut out of the sides, and
/// four wheel cylinders whose centers are the joint ground truth.
struct CarSpec {
  Vec3 body_extents = Vec3(4.2, 1.8, 0.75);  // lower box: length, width, height
  double ground_clearance = 0.25;            // body bottom z
  double cabin_length = 2.0;
  double cabin_width_ratio = 0.8;
  double cabin_height = 0.55;
  double cabin_center_x = -0.35;

  double wheel_radius = 0.33;
  double wheel_width = 0.2;
  double wheelbase = 2.7;
  double track_width = 1.5;

  double door_length = 1.1;
  double door_height = 0.58;
  double door_bottom = 0.08;        // above the body bottom
  double hinge_offset = 0.25;       // hinge x behind the front wheel arch
  double door_panel_offset = 0.025; // outward protrusion of the panel
  double door_seam = 0.02;          // gap strip around the door cutout

  Vec3 body_color = Vec3(0.62, 0.12, 0.12);
  Vec3 door_color = Vec3(0.55, 0.10, 0.10);
  Vec3 wheel_color = Vec3(0.12, 0.12, 0.12);
  Vec3 cabin_color = Vec3(0.22, 0.26, 0.32);
  double color_jitter = 0.02;

  int total_points = 20000;
  uint64_t seed = 1;

  void validate() const;

  // analytic ground truth
  double hinge_x() const { return wheelbase / 2.0 - wheel_radius - hinge_offset; }
  Vec2 hinge(int side) const {  // side: +1 left, -1 right
    return Vec2(hinge_x(), side * body_extents[1] / 2.0);
  }
  Vec3 wheel_center(int front, int side) const {
    return Vec3(front * wheelbase / 2.0, side * track_width / 2.0, wheel_radius);
  }
  KinematicParams kinematics() const;
};

struct GeneratedCar {
  TrainSample sample;
  GaussianAsset asset;  // one isotropic Gaussian per sampled point
  CarSpec spec;
};

/// Samples the car surfaces, labels every point, derives the analytic
/// kinematics and builds the Gaussian twin (scale = local sample spacing,
/// cluster ids: one cluster per movable part, body split spatially).
GeneratedCar generate(const CarSpec& spec);

/// Reflection across the x-z plane: left/right labels swap, hinge and joint
/// lateral coordinates flip sign.
TrainSample mirror_sample(const TrainSample& sample);

/// Displaces `fraction` of each movable part's Gaussians outward from the
/// part centroid by `magnitude` (floater injection for refinement fixtures).
GaussianAsset displace_fraction(const GaussianAsset& asset, double fraction,
                                double magnitude, uint64_t seed);

struct SuiteConfig {
  int count = 3;
  uint64_t seed = 1;
  int total_points = 20000;
};

std::vector<CarSpec> sample_specs(const SuiteConfig& cfg);

/// Writes the training dataset layout (points.ply, labels.u8, kin.json per
/// sample plus asset.ply) and a manifest recording every spec.
void generate_suite(const SuiteConfig& cfg, const std::string& out_dir);

}  // namespace splatrig
