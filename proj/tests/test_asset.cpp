#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "splatrig/asset.hpp"
#include "splatrig/ply_io.hpp"
#include "splatrig/rng.hpp"

using namespace splatrig;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "splatrig_test_asset";
  fs::create_directories(dir);
  return (dir / name).string();
}

void append_f32(std::string& s, float v) {
  s.append(reinterpret_cast<const char*>(&v), 4);
}

// hand-built splat PLY, independent of save_asset
std::string write_fixture_ply(const std::string& name,
                              const std::vector<std::array<float, 14>>& vertices) {
  std::string body;
  for (const auto& v : vertices)
    for (float f : v) append_f32(body, f);
  std::string header =
      "ply\nformat binary_little_endian 1.0\nelement vertex " +
      std::to_string(vertices.size()) + "\n";
  for (const char* p : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "opacity",
                        "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2",
                        "rot_3"})
    header += std::string("property float ") + p + "\n";
  header += "end_header\n";
  const std::string path = temp_path(name);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << header << body;
  return path;
}

GaussianAsset random_asset(size_t n, uint64_t seed, bool labels, bool clusters) {
  Rng rng(seed);
  GaussianAsset asset;
  if (labels) asset.part_labels.emplace();
  if (clusters) asset.cluster_ids.emplace();
  for (size_t i = 0; i < n; ++i) {
    Gaussian g;
    g.mean = Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    g.scale = Vec3(rng.uniform(0.01, 2), rng.uniform(0.01, 2), rng.uniform(0.01, 2));
    g.rotation = quat_normalized(
        Vec4(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
    g.opacity = rng.uniform(0.05, 0.95);
    g.color = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
    asset.gaussians.push_back(g);
    if (labels)
      asset.part_labels->push_back(static_cast<PartLabel>(rng.uniform_index(7)));
    if (clusters)
      asset.cluster_ids->push_back(static_cast<uint32_t>(rng.uniform_index(9)));
  }
  return asset;
}

}  // namespace

TEST_CASE("load: identity transforms") {
  // rot (1,0,0,0), log-scale 0 -> scale 1, opacity logit 0 -> 0.5, dc 0 -> 0.5
  const auto path = write_fixture_ply(
      "identity.ply", {{1.f, 2.f, 3.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 1.f, 0.f,
                        0.f, 0.f}});
  const GaussianAsset asset = load_asset(path);
  REQUIRE(asset.size() == 1);
  const Gaussian& g = asset.gaussians[0];
  CHECK(g.mean.isApprox(Vec3(1, 2, 3)));
  CHECK(g.scale.isApprox(Vec3(1, 1, 1)));
  CHECK(g.opacity == doctest::Approx(0.5));
  CHECK(g.color.isApprox(Vec3(0.5, 0.5, 0.5)));
  CHECK(g.rotation.isApprox(Vec4(1, 0, 0, 0)));
}

TEST_CASE("load: dc color transform") {
  const float dc = 1.25f;
  const auto path = write_fixture_ply(
      "dc.ply",
      {{0.f, 0.f, 0.f, dc, -dc, 0.f, 0.f, 0.f, 0.f, 0.f, 1.f, 0.f, 0.f, 0.f}});
  const GaussianAsset asset = load_asset(path);
  CHECK(asset.gaussians[0].color[0] ==
        doctest::Approx(0.5 + double(dc) * 0.28209479177387814));
  CHECK(asset.gaussians[0].color[1] ==
        doctest::Approx(std::max(0.0, 0.5 - double(dc) * 0.28209479177387814)));
}

TEST_CASE("load: rotation renormalized") {
  const auto path = write_fixture_ply(
      "rot.ply",
      {{0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 2.f, 0.f, 2.f, 0.f}});
  const GaussianAsset asset = load_asset(path);
  CHECK(asset.gaussians[0].rotation.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("save/load round trip within 1e-6 per field") {
  for (uint64_t seed : {1u, 2u, 3u}) {
    const GaussianAsset a = random_asset(64, seed, seed % 2 == 0, seed % 3 == 0);
    const auto path = temp_path("roundtrip.ply");
    save_asset(a, path);
    const GaussianAsset b = load_asset(path);
    REQUIRE(b.size() == a.size());
    double max_diff = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      max_diff = std::max(max_diff,
                          (a.gaussians[i].mean - b.gaussians[i].mean).cwiseAbs().maxCoeff());
      max_diff = std::max(max_diff, (a.gaussians[i].scale - b.gaussians[i].scale)
                                        .cwiseAbs()
                                        .maxCoeff());
      max_diff = std::max(max_diff, (a.gaussians[i].rotation - b.gaussians[i].rotation)
                                        .cwiseAbs()
                                        .maxCoeff());
      max_diff = std::max(max_diff,
                          std::abs(a.gaussians[i].opacity - b.gaussians[i].opacity));
      max_diff = std::max(max_diff, (a.gaussians[i].color - b.gaussians[i].color)
                                        .cwiseAbs()
                                        .maxCoeff());
    }
    CHECK(max_diff < 1e-6);
    CHECK(b.part_labels.has_value() == a.part_labels.has_value());
    CHECK(b.cluster_ids.has_value() == a.cluster_ids.has_value());
    if (a.part_labels) CHECK(*b.part_labels == *a.part_labels);
    if (a.cluster_ids) CHECK(*b.cluster_ids == *a.cluster_ids);
  }
}

TEST_CASE("save: file size is header plus fixed records") {
  const GaussianAsset a = random_asset(100, 9, true, true);
  const auto path = temp_path("sized.ply");
  save_asset(a, path);

  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  const auto header_end = content.find("end_header\n");
  REQUIRE(header_end != std::string::npos);
  const size_t header_size = header_end + std::strlen("end_header\n");
  const size_t record = 14 * 4 + 1 + 4;  // floats + part_label + cluster_id
  CHECK(content.size() == header_size + 100 * record);
}

TEST_CASE("save: part_label column present when labels set") {
  const GaussianAsset a = random_asset(4, 5, true, false);
  const auto path = temp_path("labeled.ply");
  save_asset(a, path);
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content.find("property uchar part_label") != std::string::npos);
  CHECK(content.find("property uint cluster_id") == std::string::npos);
}

TEST_CASE("load errors") {
  SUBCASE("non-finite value names the vertex") {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const auto path = write_fixture_ply(
        "nan.ply", {{0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 1.f, 0.f, 0.f, 0.f},
                    {nan, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 1.f, 0.f, 0.f, 0.f}});
    try {
      load_asset(path);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("vertex 1") != std::string::npos);
    }
  }
  SUBCASE("missing attribute") {
    const std::string path = temp_path("missing.ply");
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
        << "property float x\nproperty float y\nproperty float z\nend_header\n";
    out.write("\0\0\0\0\0\0\0\0\0\0\0\0", 12);
    out.close();
    CHECK_THROWS_AS(load_asset(path), IoError);
  }
  SUBCASE("truncated data") {
    auto full = write_fixture_ply(
        "trunc_src.ply",
        {{0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 1.f, 0.f, 0.f, 0.f}});
    std::ifstream in(full, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    const std::string path = temp_path("trunc.ply");
    std::ofstream out(path, std::ios::binary);
    out << content.substr(0, content.size() - 8);
    out.close();
    CHECK_THROWS_AS(load_asset(path), IoError);
  }
  SUBCASE("not a ply") {
    const std::string path = temp_path("garbage.ply");
    std::ofstream(path) << "definitely not a ply";
    CHECK_THROWS_AS(load_asset(path), IoError);
  }
}

TEST_CASE("load: unknown attributes are skipped with a warning") {
  // fixture with an extra nx column between z and f_dc_0
  std::string header =
      "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
      "property float x\nproperty float y\nproperty float z\nproperty float nx\n";
  for (const char* p : {"f_dc_0", "f_dc_1", "f_dc_2", "opacity", "scale_0",
                        "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"})
    header += std::string("property float ") + p + "\n";
  header += "end_header\n";
  std::string body;
  const float values[15] = {1, 2, 3, 9, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0};
  for (float v : values) append_f32(body, v);
  const std::string path = temp_path("extra.ply");
  std::ofstream(path, std::ios::binary) << header << body;

  std::vector<std::string> warnings;
  const GaussianAsset asset = load_asset(path, &warnings);
  CHECK(asset.gaussians[0].mean.isApprox(Vec3(1, 2, 3)));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("nx") != std::string::npos);
}

TEST_CASE("to_point_cloud preserves order and length") {
  const GaussianAsset a = random_asset(5, 11, false, false);
  const auto points = to_point_cloud(a);
  REQUIRE(points.size() == 5);
  for (size_t i = 0; i < 5; ++i) {
    CHECK(points[i].position == a.gaussians[i].mean);
    CHECK(points[i].color == a.gaussians[i].color);
  }
  CHECK_THROWS_AS(to_point_cloud(GaussianAsset{}), Error);
}

TEST_CASE("subset") {
  GaussianAsset a = random_asset(10, 13, true, false);
  (*a.part_labels)[0] = PartLabel::Body;
  (*a.part_labels)[1] = PartLabel::WheelFL;

  SUBCASE("single label") {
    for (auto& l : *a.part_labels) l = PartLabel::Body;
    (*a.part_labels)[1] = PartLabel::WheelFL;
    const GaussianAsset wheel = subset_by_label(a, PartLabel::WheelFL);
    CHECK(wheel.size() == 1);
    CHECK(wheel.gaussians[0].mean == a.gaussians[1].mean);
  }
  SUBCASE("identity") {
    for (auto& l : *a.part_labels) l = PartLabel::Body;
    const GaussianAsset all = subset_by_label(a, PartLabel::Body);
    CHECK(all.size() == a.size());
  }
  SUBCASE("missing label errors") {
    for (auto& l : *a.part_labels) l = PartLabel::Body;
    CHECK_THROWS_AS(subset_by_label(a, PartLabel::WheelRR), InvalidArgument);
  }
  SUBCASE("partition property") {
    const auto is_body = [&](size_t i) {
      return (*a.part_labels)[i] == PartLabel::Body;
    };
    size_t body_count = 0;
    for (size_t i = 0; i < a.size(); ++i) body_count += is_body(i) ? 1 : 0;
    if (body_count == 0 || body_count == a.size()) return;
    const GaussianAsset yes = subset(a, is_body);
    const GaussianAsset no = subset(a, [&](size_t i) { return !is_body(i); });
    CHECK(yes.size() + no.size() == a.size());
    // order preserved within each side
    size_t yi = 0, ni = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      if (is_body(i))
        CHECK(yes.gaussians[yi++].mean == a.gaussians[i].mean);
      else
        CHECK(no.gaussians[ni++].mean == a.gaussians[i].mean);
    }
  }
}

TEST_CASE("validate_asset rejects bad values") {
  GaussianAsset a = random_asset(2, 17, false, false);
  SUBCASE("bad scale") {
    a.gaussians[1].scale[0] = 0;
    CHECK_THROWS_AS(validate_asset(a), InvalidArgument);
  }
  SUBCASE("non-unit quaternion") {
    a.gaussians[0].rotation *= 2.0;
    CHECK_THROWS_AS(validate_asset(a), InvalidArgument);
  }
  SUBCASE("opacity out of range") {
    a.gaussians[0].opacity = 1.5;
    CHECK_THROWS_AS(validate_asset(a), InvalidArgument);
  }
  SUBCASE("annotation length mismatch") {
    a.part_labels = std::vector<PartLabel>{PartLabel::Body};
    CHECK_THROWS_AS(validate_asset(a), InvalidArgument);
  }
}
