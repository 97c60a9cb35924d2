#include "splatrig/kinematics.hpp"

#include <fstream>

#include "json.hpp"

namespace splatrig {

using nlohmann::json;

Eigen::Matrix<double, 16, 1> KinematicParams::to_vector() const {
  Eigen::Matrix<double, 16, 1> v;
  v << hinge_fl[0], hinge_fl[1], hinge_fr[0], hinge_fr[1], joint_fl[0], joint_fl[1],
      joint_fl[2], joint_fr[0], joint_fr[1], joint_fr[2], joint_rl[0], joint_rl[1],
      joint_rl[2], joint_rr[0], joint_rr[1], joint_rr[2];
  return v;
}

KinematicParams KinematicParams::from_vector(const Eigen::Matrix<double, 16, 1>& v) {
  KinematicParams k;
  k.hinge_fl = Vec2(v[0], v[1]);
  k.hinge_fr = Vec2(v[2], v[3]);
  k.joint_fl = Vec3(v[4], v[5], v[6]);
  k.joint_fr = Vec3(v[7], v[8], v[9]);
  k.joint_rl = Vec3(v[10], v[11], v[12]);
  k.joint_rr = Vec3(v[13], v[14], v[15]);
  return k;
}

namespace {

json vec_to_json(const Vec2& v) { return json::array({v[0], v[1]}); }
json vec_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec2 json_to_vec2(const json& j, const std::string& key) {
  check(j.is_array() && j.size() == 2, "kin json: " + key + " must be a 2-array");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

Vec3 json_to_vec3(const json& j, const std::string& key) {
  check(j.is_array() && j.size() == 3, "kin json: " + key + " must be a 3-array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed json in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace

std::string kinematics_to_json(const KinematicParams& kin) {
  json j;
  j["hinge_fl"] = vec_to_json(kin.hinge_fl);
  j["hinge_fr"] = vec_to_json(kin.hinge_fr);
  j["joint_fl"] = vec_to_json(kin.joint_fl);
  j["joint_fr"] = vec_to_json(kin.joint_fr);
  j["joint_rl"] = vec_to_json(kin.joint_rl);
  j["joint_rr"] = vec_to_json(kin.joint_rr);
  return j.dump(2);
}

KinematicParams kinematics_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed kinematics json: ") + e.what());
  }
  KinematicParams k;
  k.hinge_fl = json_to_vec2(j.at("hinge_fl"), "hinge_fl");
  k.hinge_fr = json_to_vec2(j.at("hinge_fr"), "hinge_fr");
  k.joint_fl = json_to_vec3(j.at("joint_fl"), "joint_fl");
  k.joint_fr = json_to_vec3(j.at("joint_fr"), "joint_fr");
  k.joint_rl = json_to_vec3(j.at("joint_rl"), "joint_rl");
  k.joint_rr = json_to_vec3(j.at("joint_rr"), "joint_rr");
  check(k.all_finite(), "kinematics json: non-finite values");
  return k;
}

KinematicParams load_kinematics_json(const std::string& path) {
  return kinematics_from_json(parse_file(path).dump());
}

void save_kinematics_json(const KinematicParams& kin, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << kinematics_to_json(kin) << "\n";
}

std::string part_state_to_json(const PartState& state) {
  json j;
  j["door_fl"] = state.door_fl;
  j["door_fr"] = state.door_fr;
  j["steer_fraction_fl"] = state.steer_fraction_fl;
  j["steer_fraction_fr"] = state.steer_fraction_fr;
  j["roll_angle"] = state.roll_angle;
  j["max_steer"] = state.max_steer;
  return j.dump(2);
}

PartState part_state_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed part state json: ") + e.what());
  }
  PartState s;
  s.door_fl = j.value("door_fl", 0.0);
  s.door_fr = j.value("door_fr", 0.0);
  s.steer_fraction_fl = j.value("steer_fraction_fl", 0.0);
  s.steer_fraction_fr = j.value("steer_fraction_fr", 0.0);
  s.roll_angle = j.value("roll_angle", 0.0);
  s.max_steer = j.value("max_steer", deg_to_rad(35.0));
  s.validate();
  return s;
}

PartState load_part_state_json(const std::string& path) {
  return part_state_from_json(parse_file(path).dump());
}

void save_part_state_json(const PartState& state, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << part_state_to_json(state) << "\n";
}

}  // namespace splatrig
