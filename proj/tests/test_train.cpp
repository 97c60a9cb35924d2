#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "splatrig/synth.hpp"
#include "splatrig/train.hpp"

using namespace splatrig;
namespace fs = std::filesystem;

namespace {

// micro net + small car keeps each training epoch in the millisecond range
NetConfig tiny_net() {
  NetConfig cfg = NetConfig::micro();
  cfg.input_points = 128;
  cfg.sa1 = {24, {{0.4, 4, {12, 16}}, {0.8, 8, {12, 16}}}, 24};
  cfg.sa2 = {8, {{0.8, 4, {16, 24}}, {1.6, 8, {16, 24}}}, 32};
  cfg.fp2_width = 24;
  cfg.fp1_width = 16;
  cfg.head_hidden = {24, 12};
  return cfg;
}

std::vector<TrainSample> tiny_dataset(int count) {
  std::vector<TrainSample> out;
  for (int i = 0; i < count; ++i) {
    CarSpec spec;
    spec.total_points = 1200;
    spec.seed = 100 + i;
    out.push_back(generate(spec).sample);
    out.back().id = "tiny_" + std::to_string(i);
  }
  return out;
}

}  // namespace

TEST_CASE("augmentation transforms points and targets consistently") {
  Rng rng(5);
  AugmentConfig cfg;
  const AugmentParams params = sample_augment_params(rng, cfg);
  CHECK(params.scale >= cfg.scale_lo);
  CHECK(params.scale <= cfg.scale_hi);

  CarSpec spec;
  spec.total_points = 1200;
  const GeneratedCar car = generate(spec);

  std::vector<Vec3> points = car.sample.cloud.positions;
  apply_augment_points(&points, params);
  const KinematicParams kin = apply_augment_kin(car.sample.kin, params);

  // recomputing the transform reproduces the augmented targets bit-exactly
  const Mat3 rot = augment_rotation(params);
  const Vec3 jfl = apply_augment_point(car.sample.kin.joint_fl, params, rot);
  CHECK(kin.joint_fl == jfl);
  const Vec3 hfl = apply_augment_point(
      Vec3(car.sample.kin.hinge_fl[0], car.sample.kin.hinge_fl[1], 0), params, rot);
  CHECK(kin.hinge_fl[0] == hfl[0]);
  CHECK(kin.hinge_fl[1] == hfl[1]);

  // points obey the same rigid-plus-scale map
  const Vec3 expected0 =
      rot * (params.scale * car.sample.cloud.positions[0]) + params.shift;
  CHECK(points[0] == expected0);
}

TEST_CASE("yaw rotation moves joints exactly with the cloud") {
  AugmentParams params;
  params.yaw = 1.3;
  params.scale = 1.0;
  params.shift = Vec3::Zero();
  const Mat3 rot = augment_rotation(params);
  KinematicParams kin;
  kin.joint_fl = Vec3(1.35, 0.75, 0.33);
  const KinematicParams out = apply_augment_kin(kin, params);
  CHECK(out.joint_fl == rot * kin.joint_fl);
}

TEST_CASE("jitter is bounded by the clip") {
  Rng rng(6);
  AugmentConfig cfg;
  cfg.jitter_sigma = 0.05;
  cfg.jitter_clip = 0.04;
  std::vector<Vec3> points(500, Vec3::Zero());
  apply_jitter(&points, rng, cfg);
  for (const Vec3& p : points) {
    CHECK(p.cwiseAbs().maxCoeff() <= 0.04 + 1e-12);
  }
}

TEST_CASE("train_seg: fixed seed reproduces the loss curve bit for bit") {
  const auto dataset = tiny_dataset(1);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.seed = 3;
  cfg.eval_interval = 2;

  SUBCASE("augmentation disabled") {
    cfg.augment.enabled = false;
    SegNet n1(tiny_net()), n2(tiny_net());
    const TrainResult a = train_seg(&n1, dataset, cfg);
    const TrainResult b = train_seg(&n2, dataset, cfg);
    REQUIRE(a.curve.size() == b.curve.size());
    for (size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].loss == b.curve[i].loss);
  }
  SUBCASE("augmentation enabled") {
    SegNet n1(tiny_net()), n2(tiny_net());
    const TrainResult a = train_seg(&n1, dataset, cfg);
    const TrainResult b = train_seg(&n2, dataset, cfg);
    for (size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].loss == b.curve[i].loss);
  }
}

TEST_CASE("train_seg: loss decreases on a tiny overfit") {
  const auto dataset = tiny_dataset(1);
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.seed = 4;
  cfg.augment.enabled = false;
  cfg.eval_interval = 40;
  SegNet net(tiny_net());
  const TrainResult result = train_seg(&net, dataset, cfg);
  CHECK(result.curve.back().loss < result.curve.front().loss);
  CHECK(result.final_metric > 0.3);  // well above the 1/7 chance level
}

TEST_CASE("train_kin: loss decreases and errors shrink on a tiny overfit") {
  const auto dataset = tiny_dataset(1);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.seed = 5;
  cfg.augment.enabled = false;
  cfg.eval_interval = 60;
  KinNet net(tiny_net());
  const KinErrors before = eval_kin_errors(net, dataset);
  const TrainResult result = train_kin(&net, dataset, cfg);
  CHECK(result.curve.back().loss < result.curve.front().loss);
  const KinErrors after = eval_kin_errors(net, dataset);
  CHECK(after.mean_joint_error < before.mean_joint_error);
}

TEST_CASE("train_seg: non-finite loss aborts with epoch and sample") {
  const auto dataset = tiny_dataset(1);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.lr = 1e14;  // guaranteed blow-up
  cfg.augment.enabled = false;
  try {
    SegNet net(tiny_net());
    train_seg(&net, dataset, cfg);
    WARN("training survived an absurd learning rate");
  } catch (const TrainAbort& e) {
    const std::string msg = e.what();
    CHECK(msg.find("epoch") != std::string::npos);
    CHECK(msg.find("tiny_0") != std::string::npos);
  }
}

TEST_CASE("train sample validation") {
  const auto dataset = tiny_dataset(1);
  TrainSample bad = dataset[0];
  SUBCASE("missing movable part points") {
    for (auto& l : bad.labels) l = PartLabel::Body;
    CHECK_THROWS_AS(validate_train_sample(bad), InvalidArgument);
  }
  SUBCASE("length mismatch") {
    bad.labels.pop_back();
    CHECK_THROWS_AS(validate_train_sample(bad), InvalidArgument);
  }
}

TEST_CASE("dataset io round trip") {
  const auto dataset = tiny_dataset(1);
  const std::string dir = (fs::temp_directory_path() / "splatrig_sample").string();
  fs::remove_all(dir);
  save_train_sample(dataset[0], dir);
  const TrainSample loaded = load_train_sample(dir);

  REQUIRE(loaded.cloud.size() == dataset[0].cloud.size());
  CHECK(loaded.labels == dataset[0].labels);
  CHECK(loaded.kin.joint_fl == dataset[0].kin.joint_fl);
  CHECK(loaded.kin.hinge_fr == dataset[0].kin.hinge_fr);
  for (size_t i = 0; i < loaded.cloud.size(); ++i) {
    // positions survive the float32 cast, colors the uint8 quantization
    CHECK((loaded.cloud.positions[i] - dataset[0].cloud.positions[i]).norm() < 1e-6);
    CHECK((((*loaded.cloud.colors)[i]) - (*dataset[0].cloud.colors)[i]).cwiseAbs().maxCoeff() <
          0.5 / 255.0 + 1e-9);
  }
}
