#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "splatrig/synth.hpp"

using namespace splatrig;
namespace fs = std::filesystem;

namespace {

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("generate: deterministic for a fixed seed") {
  CarSpec spec;
  spec.total_points = 2500;
  spec.seed = 77;
  const GeneratedCar a = generate(spec);
  const GeneratedCar b = generate(spec);
  REQUIRE(a.sample.cloud.size() == b.sample.cloud.size());
  for (size_t i = 0; i < a.sample.cloud.size(); ++i) {
    CHECK(a.sample.cloud.positions[i] == b.sample.cloud.positions[i]);
    CHECK((*a.sample.cloud.colors)[i] == (*b.sample.cloud.colors)[i]);
  }
  CHECK(a.sample.labels == b.sample.labels);
}

TEST_CASE("generate: wheel joints equal the analytic cylinder centers") {
  CarSpec spec;
  spec.total_points = 2000;
  const GeneratedCar car = generate(spec);
  CHECK(car.sample.kin.joint_fl ==
        Vec3(spec.wheelbase / 2, spec.track_width / 2, spec.wheel_radius));
  CHECK(car.sample.kin.joint_rr ==
        Vec3(-spec.wheelbase / 2, -spec.track_width / 2, spec.wheel_radius));
  CHECK(car.sample.kin.hinge_fl[0] == spec.hinge_x());
  CHECK(car.sample.kin.hinge_fl[1] == spec.body_extents[1] / 2);
  CHECK(car.sample.kin.hinge_fr[1] == -spec.body_extents[1] / 2);
}

TEST_CASE("generate: all seven labels present, movable parts >= 16 points") {
  CarSpec spec;
  spec.total_points = 2000;
  const GeneratedCar car = generate(spec);
  std::array<size_t, kNumPartLabels> counts{};
  for (PartLabel l : car.sample.labels) ++counts[int(l)];
  for (int i = 0; i < kNumPartLabels; ++i) CHECK(counts[i] >= 16);
  CHECK_NOTHROW(validate_train_sample(car.sample));
}

TEST_CASE("generate: wheel points lie on the cylinder surface") {
  CarSpec spec;
  spec.total_points = 3000;
  const GeneratedCar car = generate(spec);
  const Vec3 center = car.sample.kin.joint_fl;
  for (size_t i = 0; i < car.sample.labels.size(); ++i) {
    if (car.sample.labels[i] != PartLabel::WheelFL) continue;
    const Vec3 rel = car.sample.cloud.positions[i] - center;
    const double radial = std::hypot(rel[0], rel[2]);
    CHECK(radial <= spec.wheel_radius + 1e-9);
    CHECK(std::abs(rel[1]) <= spec.wheel_width / 2 + 1e-9);
    // lateral surface points sit at the full radius, caps anywhere inside
    if (std::abs(std::abs(rel[1]) - spec.wheel_width / 2) > 1e-9)
      CHECK(radial == doctest::Approx(spec.wheel_radius));
  }
}

TEST_CASE("generate: gaussian twin mirrors the sampled cloud") {
  CarSpec spec;
  spec.total_points = 1500;
  const GeneratedCar car = generate(spec);
  REQUIRE(car.asset.size() == car.sample.cloud.size());
  REQUIRE(car.asset.part_labels.has_value());
  REQUIRE(car.asset.cluster_ids.has_value());
  for (size_t i = 0; i < car.asset.size(); ++i) {
    CHECK(car.asset.gaussians[i].mean == car.sample.cloud.positions[i]);
    CHECK((*car.asset.part_labels)[i] == car.sample.labels[i]);
    CHECK(car.asset.gaussians[i].scale.minCoeff() > 0);
  }
  CHECK_NOTHROW(validate_asset(car.asset));
  // movable parts map to one cluster each
  for (size_t i = 0; i < car.asset.size(); ++i) {
    const PartLabel l = car.sample.labels[i];
    if (l != PartLabel::Body)
      CHECK((*car.asset.cluster_ids)[i] == static_cast<uint32_t>(l));
  }
}

TEST_CASE("mirror_sample: involution and label swaps") {
  CarSpec spec;
  spec.total_points = 1500;
  const GeneratedCar car = generate(spec);
  const TrainSample mirrored = mirror_sample(car.sample);
  const TrainSample twice = mirror_sample(mirrored);

  for (size_t i = 0; i < car.sample.cloud.size(); ++i) {
    CHECK(twice.cloud.positions[i] == car.sample.cloud.positions[i]);
    CHECK(mirrored.cloud.positions[i][1] == -car.sample.cloud.positions[i][1]);
  }
  CHECK(twice.labels == car.sample.labels);

  // lateral coordinates flip, left/right identities swap
  CHECK(mirrored.kin.hinge_fl[0] == car.sample.kin.hinge_fr[0]);
  CHECK(mirrored.kin.hinge_fl[1] == -car.sample.kin.hinge_fr[1]);
  CHECK(mirrored.kin.joint_fl == Vec3(car.sample.kin.joint_fr[0],
                                      -car.sample.kin.joint_fr[1],
                                      car.sample.kin.joint_fr[2]));
  std::array<size_t, kNumPartLabels> before{}, after{};
  for (PartLabel l : car.sample.labels) ++before[int(l)];
  for (PartLabel l : mirrored.labels) ++after[int(l)];
  CHECK(before[int(PartLabel::FrontLeftDoor)] == after[int(PartLabel::FrontRightDoor)]);
  CHECK(before[int(PartLabel::WheelFL)] == after[int(PartLabel::WheelFR)]);
  CHECK(before[int(PartLabel::WheelRL)] == after[int(PartLabel::WheelRR)]);
  CHECK_NOTHROW(validate_train_sample(mirrored));
}

TEST_CASE("displace_fraction moves the requested share of part gaussians") {
  CarSpec spec;
  spec.total_points = 2000;
  const GeneratedCar car = generate(spec);
  const GaussianAsset moved = displace_fraction(car.asset, 0.1, 0.25, 5);
  REQUIRE(moved.size() == car.asset.size());

  size_t displaced = 0, movable_total = 0;
  for (size_t i = 0; i < moved.size(); ++i) {
    if ((*car.asset.part_labels)[i] == PartLabel::Body) {
      CHECK(moved.gaussians[i].mean == car.asset.gaussians[i].mean);
      continue;
    }
    ++movable_total;
    if ((moved.gaussians[i].mean - car.asset.gaussians[i].mean).norm() > 1e-12)
      ++displaced;
  }
  CHECK(displaced > 0);
  CHECK(displaced <= size_t(0.11 * double(movable_total)) + 6);
}

TEST_CASE("generate_suite: layout, manifest and byte determinism") {
  const std::string dir_a =
      (fs::temp_directory_path() / "splatrig_suite_a").string();
  const std::string dir_b =
      (fs::temp_directory_path() / "splatrig_suite_b").string();
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  SuiteConfig cfg;
  cfg.count = 3;
  cfg.seed = 11;
  cfg.total_points = 1600;
  generate_suite(cfg, dir_a);
  generate_suite(cfg, dir_b);

  CHECK(fs::exists(dir_a + "/manifest.json"));
  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "car_%03d", i);
    const std::string sample_dir = dir_a + "/" + name;
    for (const char* f : {"points.ply", "labels.u8", "kin.json", "asset.ply"})
      CHECK(fs::exists(sample_dir + "/" + f));
    // same seed -> identical bytes
    for (const char* f : {"points.ply", "labels.u8", "kin.json", "asset.ply"})
      CHECK(file_bytes(sample_dir + "/" + f) ==
            file_bytes(dir_b + "/" + name + "/" + f));
    CHECK_NOTHROW(validate_train_sample(load_train_sample(sample_dir)));
  }

  // suite loads as a dataset
  const auto dataset = load_dataset(dir_a);
  CHECK(dataset.size() == 3);
}

TEST_CASE("car spec validation") {
  CarSpec spec;
  SUBCASE("negative dimension") {
    spec.wheel_radius = -1;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  }
  SUBCASE("wheels wider than body") {
    spec.track_width = 2.5;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  }
  SUBCASE("door hitting the wheel arch") {
    spec.door_length = 3.0;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  }
}
