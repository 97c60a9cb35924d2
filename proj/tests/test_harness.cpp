#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "splatrig/image_io.hpp"
#include "splatrig/metrics.hpp"
#include "splatrig/orbit.hpp"
#include "splatrig/protocol.hpp"

using namespace splatrig;
namespace fs = std::filesystem;

TEST_CASE("orbit_camera: published first configuration") {
  const OrbitConfig cfg{5.0, 1.1, 270.0, -10.0};
  const Vec3 target(0, 0, 0.6);
  const Camera cam = orbit_camera(cfg, target, 64, 64, 50.0);
  const Vec3 pos = cam.position();
  // azimuth 270 deg: straight down -y from the target, z is absolute height
  CHECK(pos[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pos[1] == doctest::Approx(-5.0));
  CHECK(pos[2] == doctest::Approx(1.1));
  CHECK(std::hypot(pos[0] - target[0], pos[1] - target[1]) == doctest::Approx(5.0));
}

TEST_CASE("orbit_camera: zero pitch at target height looks horizontally") {
  const OrbitConfig cfg{4.0, 0.8, 45.0, 0.0};
  const Camera cam = orbit_camera(cfg, Vec3(0, 0, 0.8), 64, 64, 50.0);
  // optical axis = third row of the rotation; z component vanishes
  CHECK(std::abs(cam.rotation(2, 2)) < 1e-6);
}

TEST_CASE("orbit_camera: azimuths 180 degrees apart mirror through the target") {
  const Vec3 target(1.0, -2.0, 0.5);
  const OrbitConfig a{5.0, 1.3, 30.0, -5.0};
  OrbitConfig b = a;
  b.angle = a.angle + 180.0;
  const Vec3 pa = orbit_camera(a, target, 32, 32, 50).position();
  const Vec3 pb = orbit_camera(b, target, 32, 32, 50).position();
  CHECK(std::abs(0.5 * (pa[0] + pb[0]) - target[0]) < 1e-6);
  CHECK(std::abs(0.5 * (pa[1] + pb[1]) - target[1]) < 1e-6);
}

TEST_CASE("interpolate_poses: endpoints and midpoint") {
  const OrbitConfig a{5.0, 1.1, 270.0, -10.0};
  const OrbitConfig b{5.0, 1.5, 270.0, -20.0};
  const auto poses = interpolate_poses(a, b, 40);
  REQUIRE(poses.size() == 40);
  CHECK(poses.front().distance == a.distance);
  CHECK(poses.front().height == a.height);
  CHECK(poses.front().angle == a.angle);
  CHECK(poses.front().pitch == a.pitch);
  CHECK(poses.back().height == b.height);
  CHECK(poses.back().pitch == b.pitch);
  // index 20 of 40: height = 1.1 + (20/39) * 0.4
  CHECK(poses[20].height == doctest::Approx(1.1 + 20.0 / 39.0 * 0.4).epsilon(1e-12));

  const auto same = interpolate_poses(a, a, 7);
  for (const auto& p : same) {
    CHECK(p.height == a.height);
    CHECK(p.pitch == a.pitch);
  }
  CHECK_THROWS_AS(interpolate_poses(a, b, 1), InvalidArgument);
}

TEST_CASE("sphere_views: counts, pole convention, antipodal coverage") {
  CHECK(sphere_views(400, 3.0).size() == 400);

  const auto single = sphere_views(1, 2.0);
  CHECK((single[0].position() - Vec3(0, 0, 2)).norm() < 1e-9);

  for (int n : {16, 64, 400}) {
    const auto cams = sphere_views(n, 1.0);
    double best = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double cosang = cams[i].position().normalized().dot(
            cams[j].position().normalized());
        best = std::max(best, std::acos(std::clamp(cosang, -1.0, 1.0)));
      }
    CHECK(best >= deg_to_rad(155.0));  // an antipodal pair within 25 degrees
  }
}

TEST_CASE("psnr: closed-form cases") {
  Image8 black{2, 2, 3, std::vector<uint8_t>(12, 0)};
  Image8 white{2, 2, 3, std::vector<uint8_t>(12, 255)};
  CHECK(psnr(black, white) == 0.0);  // mse = 255^2
  CHECK(std::isinf(psnr(black, black)));
  Image8 off = black;
  off.data[0] = 16;
  CHECK(psnr(black, off) > 0.0);
  CHECK_THROWS_AS(psnr(black, Image8{1, 2, 3, std::vector<uint8_t>(6, 0)}),
                  InvalidArgument);
}

TEST_CASE("ssim: identical images give exactly one") {
  Image8 img{16, 16, 1, {}};
  img.data.resize(256);
  for (int i = 0; i < 256; ++i) img.data[i] = uint8_t((i * 37) % 256);
  CHECK(ssim(img, img) == 1.0);

  Image8 other = img;
  for (auto& v : other.data) v = uint8_t(255 - v);
  const double s = ssim(img, other);
  CHECK(s >= -1.0);
  CHECK(s < 1.0);
}

TEST_CASE("evaluate: means equal the arithmetic row means") {
  const auto dir = fs::temp_directory_path() / "splatrig_eval";
  fs::remove_all(dir);
  fs::create_directories(dir / "gen");
  fs::create_directories(dir / "ref");

  ImageGray a(8, 8, 0.5), b(8, 8, 0.25), c(8, 8, 0.75);
  write_png(a, (dir / "gen/one.png").string());
  write_png(b, (dir / "gen/two.png").string());
  write_png(c, (dir / "ref/one.png").string());
  write_png(a, (dir / "ref/two.png").string());

  const EvalReport report =
      evaluate_dirs((dir / "gen").string(), (dir / "ref").string());
  REQUIRE(report.rows.size() == 2);
  CHECK(report.mean_psnr ==
        doctest::Approx(0.5 * (report.rows[0].psnr_value + report.rows[1].psnr_value)));
  CHECK(report.mean_ssim ==
        doctest::Approx(0.5 * (report.rows[0].ssim_value + report.rows[1].ssim_value)));
}

TEST_CASE("evaluate: external metric merge and report i/o") {
  const auto dir = fs::temp_directory_path() / "splatrig_eval2";
  fs::remove_all(dir);
  fs::create_directories(dir / "gen");
  fs::create_directories(dir / "ref");
  ImageGray img(8, 8, 0.5);
  write_png(img, (dir / "gen/v.png").string());
  write_png(img, (dir / "ref/v.png").string());

  EvalReport report = evaluate_dirs((dir / "gen").string(), (dir / "ref").string());
  // identical pair: psnr +inf sentinel, ssim 1
  CHECK(std::isinf(report.rows[0].psnr_value));
  CHECK(report.rows[0].ssim_value == 1.0);

  const std::string csv = (dir / "extra.csv").string();
  std::ofstream(csv) << "vehicle,state,view,metric,value\n,,v.png,lpips,0.125\n";
  merge_external_metrics(&report, csv);
  CHECK(report.rows[0].extra.at("lpips") == 0.125);

  const std::string json_path = (dir / "report.json").string();
  save_eval_report_json(report, json_path);
  save_eval_report_csv(report, (dir / "report.csv").string());

  // deterministic bytes on rewrite
  std::ifstream f1(json_path);
  const std::string first((std::istreambuf_iterator<char>(f1)),
                          std::istreambuf_iterator<char>());
  save_eval_report_json(report, json_path);
  std::ifstream f2(json_path);
  const std::string second((std::istreambuf_iterator<char>(f2)),
                           std::istreambuf_iterator<char>());
  CHECK(first == second);
  CHECK(first.find("\"inf\"") != std::string::npos);
}

TEST_CASE("protocol: exactly eight states matching the published values") {
  const ProtocolConfig cfg;
  const auto states = protocol_states(cfg);
  REQUIRE(states.size() == 8);
  CHECK(states[0].first == "door_fl");
  CHECK(states[0].second.door_fl == cfg.door_angle);
  CHECK(states[1].first == "door_fr");
  CHECK(states[2].second.steer_fraction_fl == -1.0);
  CHECK(states[3].second.steer_fraction_fl == -0.5);
  CHECK(states[4].second.steer_fraction_fl == 0.5);
  CHECK(states[5].second.steer_fraction_fl == 1.0);
  CHECK(states[6].second.roll_angle == deg_to_rad(120.0));
  CHECK(states[7].second.roll_angle == deg_to_rad(240.0));
  // single-change states: door states leave wheels alone and vice versa
  CHECK(states[0].second.steer_fraction_fl == 0.0);
  CHECK(states[0].second.roll_angle == 0.0);
  CHECK(states[6].second.door_fl == 0.0);
}

TEST_CASE("protocol: 40 cameras, endpoints equal the two published configs") {
  const ProtocolConfig cfg;
  CHECK(cfg.pose_a.distance == 5.0);
  CHECK(cfg.pose_a.height == 1.1);
  CHECK(cfg.pose_a.angle == 270.0);
  CHECK(cfg.pose_a.pitch == -10.0);
  CHECK(cfg.pose_b.height == 1.5);
  CHECK(cfg.pose_b.pitch == -20.0);

  const auto cams = protocol_cameras(cfg, Vec3(0, 0, 0.5));
  CHECK(cams.size() == 40);

  const auto poses = interpolate_poses(cfg.pose_a, cfg.pose_b, cfg.n_poses);
  CHECK(poses.front().height == 1.1);
  CHECK(poses.back().height == 1.5);
  CHECK(poses.front().pitch == -10.0);
  CHECK(poses.back().pitch == -20.0);
}
