#include "doctest.h"
#include "splatrig/articulate.hpp"
#include "splatrig/rng.hpp"
#include "splatrig/synth.hpp"

using namespace splatrig;

namespace {

GeneratedCar test_car() {
  CarSpec spec;
  spec.total_points = 4000;
  spec.seed = 21;
  return generate(spec);
}

PartState random_state(Rng& rng) {
  PartState s;
  s.door_fl = rng.uniform(-1.2, 1.2);
  s.door_fr = rng.uniform(-1.2, 1.2);
  s.steer_fraction_fl = rng.uniform(-1, 1);
  s.steer_fraction_fr = rng.uniform(-1, 1);
  s.roll_angle = rng.uniform(0, 2 * M_PI);
  return s;
}

}  // namespace

TEST_CASE("rotate_part basics") {
  GaussianAsset part;
  Gaussian g;
  g.mean = Vec3(1, 0, 0);
  g.scale = Vec3(0.1, 0.2, 0.3);
  g.opacity = 0.7;
  g.color = Vec3(0.2, 0.4, 0.6);
  part.gaussians.push_back(g);

  SUBCASE("zero angle is the identity") {
    const GaussianAsset out = rotate_part(part, Vec3(0, 0, 1), Vec3::Zero(), 0.0);
    CHECK((out.gaussians[0].mean - g.mean).norm() < 1e-7);
    CHECK((out.gaussians[0].rotation - g.rotation).norm() < 1e-7);
  }
  SUBCASE("quarter turn about z maps +x to +y") {
    const GaussianAsset out =
        rotate_part(part, Vec3(0, 0, 1), Vec3::Zero(), M_PI / 2);
    CHECK((out.gaussians[0].mean - Vec3(0, 1, 0)).norm() < 1e-7);
  }
  SUBCASE("rotation composed with its inverse is the identity") {
    const GaussianAsset fwd = rotate_part(part, Vec3(0, 0, 1), Vec3(0.3, -0.2, 0), 0.8);
    const GaussianAsset back = rotate_part(fwd, Vec3(0, 0, 1), Vec3(0.3, -0.2, 0), -0.8);
    CHECK((back.gaussians[0].mean - g.mean).norm() < 1e-6);
    CHECK((back.gaussians[0].rotation - g.rotation).norm() < 1e-6);
  }
  SUBCASE("scale, opacity, color untouched") {
    const GaussianAsset out = rotate_part(part, Vec3(0, 1, 0), Vec3::Zero(), 1.1);
    CHECK(out.gaussians[0].scale == g.scale);
    CHECK(out.gaussians[0].opacity == g.opacity);
    CHECK(out.gaussians[0].color == g.color);
  }
  SUBCASE("zero axis errors") {
    CHECK_THROWS_AS(rotate_part(part, Vec3::Zero(), Vec3::Zero(), 0.5), Error);
  }
}

TEST_CASE("apply_state: zero state is the identity") {
  const GeneratedCar car = test_car();
  const PartMap parts = split_by_labels(car.asset);
  const ArticulatedAsset posed = apply_state(parts, car.sample.kin, PartState{});
  REQUIRE(posed.posed.size() == car.asset.size());

  // compare per part (concatenation reorders into canonical label order)
  const PartMap posed_parts = split_by_labels(posed.posed);
  for (const auto& [label, part] : parts) {
    const GaussianAsset& after = posed_parts.at(label);
    REQUIRE(after.size() == part.size());
    for (size_t i = 0; i < part.size(); ++i)
      CHECK((after.gaussians[i].mean - part.gaussians[i].mean).norm() < 1e-7);
  }
}

TEST_CASE("apply_state: 120 + 240 degree rolls compose to the identity") {
  const GeneratedCar car = test_car();
  const PartMap parts = split_by_labels(car.asset);
  PartState roll120, roll240;
  roll120.roll_angle = deg_to_rad(120.0);
  roll240.roll_angle = deg_to_rad(240.0);

  const ArticulatedAsset first = apply_state(parts, car.sample.kin, roll120);
  const PartMap mid = split_by_labels(first.posed);
  const ArticulatedAsset second = apply_state(mid, car.sample.kin, roll240);
  const PartMap done = split_by_labels(second.posed);

  for (const auto& [label, part] : parts) {
    const GaussianAsset& after = done.at(label);
    for (size_t i = 0; i < part.size(); ++i)
      CHECK((after.gaussians[i].mean - part.gaussians[i].mean).norm() < 1e-6);
  }
}

TEST_CASE("apply_state: steering preserves distance to the steering axis") {
  const GeneratedCar car = test_car();
  const PartMap parts = split_by_labels(car.asset);
  PartState s;
  s.steer_fraction_fl = 0.5;
  s.max_steer = M_PI / 3;  // steer angle pi/6
  const ArticulatedAsset posed = apply_state(parts, car.sample.kin, s);
  const PartMap after = split_by_labels(posed.posed);

  const Vec3 joint = car.sample.kin.joint_fl;
  const GaussianAsset& before_wheel = parts.at(PartLabel::WheelFL);
  const GaussianAsset& after_wheel = after.at(PartLabel::WheelFL);
  for (size_t i = 0; i < before_wheel.size(); ++i) {
    const auto axis_dist = [&](const Vec3& p) {
      const Vec3 rel = p - joint;
      return std::hypot(rel[0], rel[1]);  // distance to the vertical line
    };
    CHECK(std::abs(axis_dist(before_wheel.gaussians[i].mean) -
                   axis_dist(after_wheel.gaussians[i].mean)) < 1e-6);
  }
}

TEST_CASE("apply_state: rigidity, counts and unit quaternions over 50 states") {
  const GeneratedCar car = test_car();
  const PartMap parts = split_by_labels(car.asset);
  Rng rng(33);

  // sample a handful of gaussians per part for the pairwise check
  std::map<PartLabel, std::vector<size_t>> picks;
  for (const auto& [label, part] : parts) {
    std::vector<size_t> idx;
    for (int k = 0; k < 12; ++k) idx.push_back(rng.uniform_index(part.size()));
    picks[label] = idx;
  }

  for (int trial = 0; trial < 50; ++trial) {
    const PartState s = random_state(rng);
    const ArticulatedAsset posed = apply_state(parts, car.sample.kin, s);
    REQUIRE(posed.posed.size() == car.asset.size());
    const PartMap after = split_by_labels(posed.posed);

    for (const auto& [label, part] : parts) {
      const auto& idx = picks[label];
      const GaussianAsset& now = after.at(label);
      for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = a + 1; b < idx.size(); ++b) {
          const double before =
              (part.gaussians[idx[a]].mean - part.gaussians[idx[b]].mean).norm();
          const double after_d =
              (now.gaussians[idx[a]].mean - now.gaussians[idx[b]].mean).norm();
          CHECK(std::abs(before - after_d) < 1e-6);
        }
      for (size_t i = 0; i < now.size(); ++i)
        CHECK(std::abs(now.gaussians[i].rotation.norm() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("apply_state: hinge-line points stay fixed under door rotation") {
  const GeneratedCar car = test_car();
  PartMap parts = split_by_labels(car.asset);

  // plant a gaussian exactly on the hinge axis
  Gaussian on_hinge;
  on_hinge.mean = Vec3(car.sample.kin.hinge_fl[0], car.sample.kin.hinge_fl[1], 0.63);
  parts[PartLabel::FrontLeftDoor].gaussians.push_back(on_hinge);
  parts[PartLabel::FrontLeftDoor].part_labels->push_back(PartLabel::FrontLeftDoor);
  parts[PartLabel::FrontLeftDoor].cluster_ids->push_back(1);

  PartState s;
  s.door_fl = deg_to_rad(60.0);
  const ArticulatedAsset posed = apply_state(parts, car.sample.kin, s);
  const PartMap after = split_by_labels(posed.posed);
  const GaussianAsset& door = after.at(PartLabel::FrontLeftDoor);
  CHECK((door.gaussians.back().mean - on_hinge.mean).norm() < 1e-7);
}

TEST_CASE("apply_state: rolling about the steered axis equals conjugation") {
  const GeneratedCar car = test_car();
  const PartMap parts = split_by_labels(car.asset);
  const GaussianAsset& wheel = parts.at(PartLabel::WheelFL);
  const Vec3 joint = car.sample.kin.joint_fl;
  const double steer = 0.4, roll = 1.1;

  // the articulation path: steer, then roll about the steered lateral axis
  PartState s;
  s.steer_fraction_fl = steer / s.max_steer;
  s.roll_angle = roll;
  REQUIRE(std::abs(s.steer_fraction_fl) <= 1.0);
  const ArticulatedAsset posed = apply_state(parts, car.sample.kin, s);
  const GaussianAsset direct =
      split_by_labels(posed.posed).at(PartLabel::WheelFL);

  // conjugation route: rotate(steer) . roll_nominal . rotate(steer)^-1,
  // applied after the steering transform
  const GaussianAsset steered = rotate_part(wheel, Vec3(0, 0, 1), joint, steer);
  GaussianAsset conj = rotate_part(steered, Vec3(0, 0, 1), joint, -steer);
  conj = rotate_part(conj, Vec3(0, 1, 0), joint, roll);
  conj = rotate_part(conj, Vec3(0, 0, 1), joint, steer);

  REQUIRE(direct.size() == conj.size());
  for (size_t i = 0; i < direct.size(); ++i)
    CHECK((direct.gaussians[i].mean - conj.gaussians[i].mean).norm() < 1e-6);
}

TEST_CASE("apply_state: error paths") {
  const GeneratedCar car = test_car();
  PartMap parts = split_by_labels(car.asset);
  SUBCASE("missing part") {
    parts.erase(PartLabel::WheelRR);
    CHECK_THROWS_AS(apply_state(parts, car.sample.kin, PartState{}), InvalidArgument);
  }
  SUBCASE("non-finite kinematics") {
    KinematicParams bad = car.sample.kin;
    bad.joint_fl[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(apply_state(parts, bad, PartState{}), InvalidArgument);
  }
  SUBCASE("steer fraction out of range") {
    PartState s;
    s.steer_fraction_fl = 1.5;
    CHECK_THROWS_AS(apply_state(parts, car.sample.kin, s), InvalidArgument);
  }
}
