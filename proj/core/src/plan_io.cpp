#include "graspkit/plan_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace graspkit {

using json = nlohmann::ordered_json;

namespace {

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

json rot_json(const Rotation3& r) {
  const Mat3& m = r.matrix();
  json out = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) out.push_back(m(i, c));
  }
  return out;
}

Rotation3 rot_from(const json& j) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) m(i, c) = j.at(3 * i + c).get<double>();
  }
  return Rotation3(m);
}

std::string posture_name(PostureLabel p) {
  switch (p) {
    case PostureLabel::NonGraspable: return "NG";
    case PostureLabel::MediumWrap: return "MW";
    case PostureLabel::Tripod: return "T";
  }
  return "NG";
}

PostureLabel posture_from(const std::string& s) {
  if (s == "NG") return PostureLabel::NonGraspable;
  if (s == "MW") return PostureLabel::MediumWrap;
  if (s == "T") return PostureLabel::Tripod;
  throw ParseError("unknown posture label: " + s);
}

}  // namespace

std::string workspace_config_hash(const WorkspaceConfig& cfg) {
  std::ostringstream ss;
  ss.precision(17);
  ss << cfg.table_height << '|' << cfg.inclination_threshold << '|'
     << cfg.min_side_grasp_z << '|' << cfg.approach_offset << '|'
     << cfg.travel_distance << '|' << cfg.palm_to_fingertip << '|'
     << cfg.wrist_to_fingertip << '|' << cfg.lift_side << '|' << cfg.lift_top << '|'
     << cfg.side_wrist_extension << '|' << cfg.success_current_ma << '|'
     << cfg.success_hold_s << '|' << cfg.success_min_motors_mw << '|'
     << cfg.success_min_motors_tripod << '|' << cfg.idle_position.transpose() << '|'
     << cfg.reach_radius << '|' << cfg.finger_spacing << '|' << cfg.palm_standoff
     << '|' << cfg.path_clearance << '|' << cfg.contact_margin;
  const std::string s = ss.str();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void save_plan(const GraspPlan& plan, const WorkspaceConfig& cfg,
               const std::filesystem::path& path) {
  json j;
  j["vertex"] = vec3_json(plan.candidate.vertex);
  j["normal"] = vec3_json(plan.candidate.normal);
  j["confidence"] = plan.candidate.confidence;
  j["posture"] = posture_name(plan.candidate.posture);
  j["approach"] = to_string(plan.approach);
  j["gamma_rad"] = plan.gamma;
  j["compensation"] = vec3_json(plan.compensation);
  j["wrist_frame"] = {{"rotation_row_major", rot_json(plan.wrist_frame)},
                      {"origin", vec3_json(plan.waypoints[2].position)}};
  json wps = json::array();
  for (const Waypoint& wp : plan.waypoints) {
    wps.push_back({{"position", vec3_json(wp.position)},
                   {"orientation_row_major", rot_json(wp.orientation)}});
  }
  j["waypoints"] = wps;
  j["grasp_type"] = posture_name(plan.grasp_type);
  j["lift"] = vec3_json(plan.lift);
  j["side_wrist_extended"] = plan.side_wrist_extended;
  j["thumb_palmar_abducted"] = plan.thumb_palmar_abducted;
  j["config_hash"] = workspace_config_hash(cfg);

  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << j.dump(2) << "\n";
}

GraspPlan load_plan(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path.string());
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ParseError("bad plan json: " + std::string(e.what()));
  }

  GraspPlan plan;
  plan.candidate.vertex = vec3_from(j.at("vertex"));
  plan.candidate.normal = vec3_from(j.at("normal"));
  plan.candidate.confidence = j.at("confidence").get<double>();
  plan.candidate.posture = posture_from(j.at("posture").get<std::string>());
  plan.approach = j.at("approach").get<std::string>() == "top" ? ApproachType::Top
                                                               : ApproachType::Side;
  plan.gamma = j.at("gamma_rad").get<double>();
  plan.compensation = vec3_from(j.at("compensation"));
  plan.wrist_frame = rot_from(j.at("wrist_frame").at("rotation_row_major"));
  const json& wps = j.at("waypoints");
  if (wps.size() != 3) throw ParseError("plan must have exactly 3 waypoints");
  for (std::size_t i = 0; i < 3; ++i) {
    plan.waypoints[i] = Waypoint{vec3_from(wps[i].at("position")),
                                 rot_from(wps[i].at("orientation_row_major"))};
  }
  plan.grasp_type = posture_from(j.at("grasp_type").get<std::string>());
  plan.lift = vec3_from(j.at("lift"));
  plan.side_wrist_extended = j.value("side_wrist_extended", false);
  plan.thumb_palmar_abducted = j.value("thumb_palmar_abducted", false);
  return plan;
}

}  // namespace graspkit
