#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "splatrig/train.hpp"

namespace splatrig {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "dataset i/o assumes a little-endian host");

namespace {

void write_points_ply(const PointSet& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << cloud.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  for (size_t i = 0; i < cloud.size(); ++i) {
    float xyz[3] = {static_cast<float>(cloud.positions[i][0]),
                    static_cast<float>(cloud.positions[i][1]),
                    static_cast<float>(cloud.positions[i][2])};
    out.write(reinterpret_cast<const char*>(xyz), 12);
    uint8_t rgb[3] = {0, 0, 0};
    if (cloud.colors)
      for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<uint8_t>(
            std::lround(std::clamp((*cloud.colors)[i][c], 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(rgb), 3);
  }
  if (!out) throw IoError("write failed for " + path);
}

PointSet read_points_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.substr(0, 3) != "ply") throw IoError(path + " is not a PLY file");

  size_t count = 0;
  std::vector<std::pair<std::string, std::string>> props;  // (type, name)
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word == "element") {
      std::string name;
      ls >> name >> count;
      if (name != "vertex") throw IoError(path + ": unsupported element " + name);
    } else if (word == "property") {
      std::string type, name;
      ls >> type >> name;
      props.emplace_back(type, name);
    }
  }
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"float", "x"},   {"float", "y"},     {"float", "z"},
      {"uchar", "red"}, {"uchar", "green"}, {"uchar", "blue"}};
  if (props != expected) throw IoError(path + ": unexpected point cloud schema");

  PointSet cloud;
  cloud.colors.emplace();
  cloud.positions.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    char rec[15];
    in.read(rec, 15);
    if (!in) throw IoError(path + ": truncated at vertex " + std::to_string(i));
    float xyz[3];
    std::memcpy(xyz, rec, 12);
    cloud.positions.emplace_back(xyz[0], xyz[1], xyz[2]);
    cloud.colors->emplace_back(uint8_t(rec[12]) / 255.0, uint8_t(rec[13]) / 255.0,
                               uint8_t(rec[14]) / 255.0);
  }
  return cloud;
}

}  // namespace

void save_train_sample(const TrainSample& sample, const std::string& dir) {
  validate_train_sample(sample);
  fs::create_directories(dir);
  write_points_ply(sample.cloud, dir + "/points.ply");

  std::ofstream lf(dir + "/labels.u8", std::ios::binary | std::ios::trunc);
  if (!lf) throw IoError("cannot write " + dir + "/labels.u8");
  for (PartLabel l : sample.labels) {
    const uint8_t v = static_cast<uint8_t>(l);
    lf.write(reinterpret_cast<const char*>(&v), 1);
  }

  save_kinematics_json(sample.kin, dir + "/kin.json");
}

TrainSample load_train_sample(const std::string& dir) {
  TrainSample sample;
  sample.id = fs::path(dir).filename().string();
  sample.cloud = read_points_ply(dir + "/points.ply");

  std::ifstream lf(dir + "/labels.u8", std::ios::binary);
  if (!lf) throw IoError("missing " + dir + "/labels.u8");
  std::vector<char> bytes((std::istreambuf_iterator<char>(lf)),
                          std::istreambuf_iterator<char>());
  check(bytes.size() == sample.cloud.size(),
        dir + ": labels.u8 length does not match points.ply");
  sample.labels.reserve(bytes.size());
  for (char b : bytes) {
    const uint8_t v = static_cast<uint8_t>(b);
    check(v < kNumPartLabels, dir + ": label byte out of range");
    sample.labels.push_back(static_cast<PartLabel>(v));
  }

  sample.kin = load_kinematics_json(dir + "/kin.json");
  validate_train_sample(sample);
  return sample;
}

std::vector<TrainSample> load_dataset(const std::string& dir) {
  check(fs::is_directory(dir), "dataset directory not found: " + dir);
  std::vector<std::string> subdirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) subdirs.push_back(entry.path().string());
  std::sort(subdirs.begin(), subdirs.end());
  check(!subdirs.empty(), "dataset directory has no sample subdirectories: " + dir);

  std::vector<TrainSample> samples;
  samples.reserve(subdirs.size());
  for (const std::string& sub : subdirs) samples.push_back(load_train_sample(sub));
  return samples;
}

}  // namespace splatrig
