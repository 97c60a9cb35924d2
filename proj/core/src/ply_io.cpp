#include "splatrig/ply_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace splatrig {

static_assert(std::endian::native == std::endian::little,
              "binary PLY i/o assumes a little-endian host");

namespace {

struct PlyProperty {
  std::string name;
  std::string type;
  size_t size = 0;    // bytes
  size_t offset = 0;  // byte offset within a vertex record
};

size_t ply_type_size(const std::string& type) {
  if (type == "char" || type == "int8" || type == "uchar" || type == "uint8")
    return 1;
  if (type == "short" || type == "int16" || type == "ushort" || type == "uint16")
    return 2;
  if (type == "int" || type == "int32" || type == "uint" || type == "uint32" ||
      type == "float" || type == "float32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  throw IoError("ply: unsupported property type '" + type + "'");
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) {
  constexpr double eps = 1e-12;
  p = std::min(std::max(p, eps), 1.0 - eps);
  return std::log(p / (1.0 - p));
}

template <typename T>
void append_raw(std::string& buf, T v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

GaussianAsset load_asset(const std::string& path,
                         std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("ply: cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply")
    throw IoError("ply: " + path + " is not a PLY file");

  size_t vertex_count = 0;
  bool in_vertex_element = false;
  bool seen_format = false;
  std::vector<PlyProperty> props;
  size_t record_size = 0;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "comment" || word.empty()) continue;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "binary_little_endian")
        throw IoError("ply: only binary_little_endian is supported, got '" + fmt + "'");
      seen_format = true;
    } else if (word == "element") {
      std::string name;
      size_t count = 0;
      ls >> name >> count;
      if (name == "vertex") {
        vertex_count = count;
        in_vertex_element = true;
      } else {
        if (count != 0)
          throw IoError("ply: unsupported element '" + name + "'");
        in_vertex_element = false;
      }
    } else if (word == "property") {
      if (!in_vertex_element) continue;
      std::string type;
      ls >> type;
      if (type == "list") throw IoError("ply: list properties are not supported");
      std::string name;
      ls >> name;
      PlyProperty p{name, type, ply_type_size(type), record_size};
      record_size += p.size;
      props.push_back(p);
    } else if (word == "end_header") {
      break;
    } else {
      throw IoError("ply: malformed header line '" + line + "'");
    }
  }
  if (!seen_format) throw IoError("ply: missing format line");
  if (vertex_count == 0) throw IoError("ply: no vertex element");

  auto find_prop = [&](const std::string& name) -> const PlyProperty* {
    for (const auto& p : props)
      if (p.name == name) return &p;
    return nullptr;
  };
  auto require_float = [&](const std::string& name) -> const PlyProperty& {
    const PlyProperty* p = find_prop(name);
    if (!p) throw IoError("ply: missing required attribute '" + name + "'");
    if (p->type != "float" && p->type != "float32")
      throw IoError("ply: attribute '" + name + "' must be float32");
    return *p;
  };

  static const char* kRequired[] = {"x",       "y",       "z",      "f_dc_0",
                                    "f_dc_1",  "f_dc_2",  "opacity", "scale_0",
                                    "scale_1", "scale_2", "rot_0",  "rot_1",
                                    "rot_2",   "rot_3"};
  std::vector<size_t> required_off;
  for (const char* name : kRequired) required_off.push_back(require_float(name).offset);

  const PlyProperty* label_prop = find_prop("part_label");
  if (label_prop && label_prop->type != "uchar" && label_prop->type != "uint8")
    throw IoError("ply: part_label must be uchar");
  const PlyProperty* cluster_prop = find_prop("cluster_id");
  if (cluster_prop && cluster_prop->type != "uint" && cluster_prop->type != "uint32")
    throw IoError("ply: cluster_id must be uint32");

  if (warnings) {
    std::string skipped;
    for (const auto& p : props) {
      bool known = p.name == "part_label" || p.name == "cluster_id";
      for (const char* name : kRequired) known = known || p.name == name;
      if (!known) skipped += (skipped.empty() ? "" : ", ") + p.name;
    }
    if (!skipped.empty())
      warnings->push_back("ply: skipping attributes (" + skipped +
                          "); only the DC color band is modeled");
  }

  std::vector<char> record(record_size);
  GaussianAsset asset;
  asset.gaussians.reserve(vertex_count);
  if (label_prop) asset.part_labels.emplace();
  if (cluster_prop) asset.cluster_ids.emplace();

  auto read_f32 = [&](size_t off) {
    float v;
    std::memcpy(&v, record.data() + off, 4);
    return v;
  };

  for (size_t i = 0; i < vertex_count; ++i) {
    in.read(record.data(), static_cast<std::streamsize>(record_size));
    if (!in)
      throw IoError("ply: truncated file, expected " + std::to_string(vertex_count) +
                    " vertices but data ends at vertex " + std::to_string(i));
    double raw[14];
    for (int k = 0; k < 14; ++k) {
      raw[k] = read_f32(required_off[k]);
      if (!is_finite(raw[k]))
        throw IoError("ply: non-finite value in attribute '" +
                      std::string(kRequired[k]) + "' at vertex " + std::to_string(i));
    }
    Gaussian g;
    g.mean = Vec3(raw[0], raw[1], raw[2]);
    for (int c = 0; c < 3; ++c)
      g.color[c] = std::clamp(0.5 + raw[3 + c] * kShDcFactor, 0.0, 1.0);
    g.opacity = logistic(raw[6]);
    g.scale = Vec3(std::exp(raw[7]), std::exp(raw[8]), std::exp(raw[9]));
    g.rotation = Vec4(raw[10], raw[11], raw[12], raw[13]);
    const double norm = g.rotation.norm();
    if (norm < 1e-8)
      throw IoError("ply: zero rotation quaternion at vertex " + std::to_string(i));
    g.rotation /= norm;
    asset.gaussians.push_back(g);

    if (label_prop) {
      uint8_t v;
      std::memcpy(&v, record.data() + label_prop->offset, 1);
      if (v >= kNumPartLabels)
        throw IoError("ply: part_label " + std::to_string(int(v)) +
                      " out of range at vertex " + std::to_string(i));
      asset.part_labels->push_back(static_cast<PartLabel>(v));
    }
    if (cluster_prop) {
      uint32_t v;
      std::memcpy(&v, record.data() + cluster_prop->offset, 4);
      asset.cluster_ids->push_back(v);
    }
  }
  validate_asset(asset, "ply: " + path);
  return asset;
}

void save_asset(const GaussianAsset& asset, const std::string& path) {
  validate_asset(asset, "save_asset");

  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\n"
         << "element vertex " << asset.size() << "\n";
  static const char* kFloatProps[] = {"x",       "y",       "z",      "f_dc_0",
                                      "f_dc_1",  "f_dc_2",  "opacity", "scale_0",
                                      "scale_1", "scale_2", "rot_0",  "rot_1",
                                      "rot_2",   "rot_3"};
  for (const char* name : kFloatProps) header << "property float " << name << "\n";
  if (asset.part_labels) header << "property uchar part_label\n";
  if (asset.cluster_ids) header << "property uint cluster_id\n";
  header << "end_header\n";

  std::string body;
  const size_t record_size =
      14 * 4 + (asset.part_labels ? 1 : 0) + (asset.cluster_ids ? 4 : 0);
  body.reserve(asset.size() * record_size);
  for (size_t i = 0; i < asset.size(); ++i) {
    const Gaussian& g = asset.gaussians[i];
    for (int k = 0; k < 3; ++k) append_raw(body, static_cast<float>(g.mean[k]));
    for (int c = 0; c < 3; ++c)
      append_raw(body, static_cast<float>((g.color[c] - 0.5) / kShDcFactor));
    append_raw(body, static_cast<float>(logit(g.opacity)));
    for (int k = 0; k < 3; ++k)
      append_raw(body, static_cast<float>(std::log(g.scale[k])));
    for (int k = 0; k < 4; ++k)
      append_raw(body, static_cast<float>(g.rotation[k]));
    if (asset.part_labels)
      append_raw(body, static_cast<uint8_t>((*asset.part_labels)[i]));
    if (asset.cluster_ids) append_raw(body, (*asset.cluster_ids)[i]);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("ply: cannot write " + path);
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("ply: write failed for " + path);
}

}  // namespace splatrig
