#include "graspkit/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "graspkit/bvh.hpp"
#include "graspkit/geometry.hpp"
#include "graspkit/kdtree.hpp"

namespace graspkit {

void WorkspaceConfig::validate() const {
  for (double v : {min_side_grasp_z, approach_offset, travel_distance,
                   palm_to_fingertip, wrist_to_fingertip, lift_side, lift_top,
                   reach_radius, finger_spacing, palm_standoff, path_clearance,
                   contact_margin}) {
    if (!(v > 0.0)) throw InvalidParams("workspace: lengths must be positive");
  }
  if (std::abs(travel_distance - (approach_offset + palm_to_fingertip)) > 1e-12) {
    throw InvalidParams("workspace: travel_distance must equal approach_offset + palm_to_fingertip");
  }
  if (inclination_threshold <= 0 || inclination_threshold >= kPi / 2) {
    throw InvalidParams("workspace: inclination threshold out of range");
  }
}

std::string to_string(ApproachType a) {
  return a == ApproachType::Side ? "side" : "top";
}

SelectionCriterion criterion_from_string(const std::string& s) {
  if (s == "confidence") return SelectionCriterion::MaxConfidence;
  if (s == "arbitrary") return SelectionCriterion::Arbitrary;
  throw InvalidParams("unknown selection criterion: " + s);
}

std::string to_string(SelectionCriterion c) {
  return c == SelectionCriterion::MaxConfidence ? "confidence" : "arbitrary";
}

std::string to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::Unreachable: return "unreachable";
    case FailureReason::TableCollision: return "table_collision";
    case FailureReason::PathCollision: return "path_collision";
    case FailureReason::InsufficientContact: return "insufficient_contact";
    case FailureReason::NoContact: return "no_contact";
  }
  return "none";
}

std::vector<GraspCandidate> filter_candidates(const TriMesh& mesh_base,
                                              const WorkspaceConfig& cfg) {
  if (!mesh_base.has_normals() || !mesh_base.has_postures() || !mesh_base.has_confidence()) {
    throw InvalidParams("filter_candidates: mesh needs normals, labels, and confidence");
  }
  std::vector<GraspCandidate> out;
  for (std::size_t i = 0; i < mesh_base.vertices.size(); ++i) {
    const Vec3& n = mesh_base.normals[i];
    // First octant of the base frame, boundary included, zero excluded.
    if (n.x() < 0 || n.y() < 0 || n.z() < 0) continue;
    if (n.x() <= 0 && n.y() <= 0 && n.z() <= 0) continue;
    if (mesh_base.postures[i] == PostureLabel::NonGraspable) continue;
    if (n.z() < std::sin(cfg.inclination_threshold)) {
      // Prospective side approach: the 45 mm table clearance gate.
      if (mesh_base.vertices[i].z() < cfg.table_height + cfg.min_side_grasp_z) continue;
    }
    out.push_back({mesh_base.vertices[i], n, mesh_base.confidence[i],
                   mesh_base.postures[i]});
  }
  if (out.empty()) throw NoGraspableVertex("filter_candidates: no usable vertex");
  return out;
}

std::vector<std::size_t> rank_candidates(const std::vector<GraspCandidate>& cands,
                                         SelectionCriterion criterion,
                                         std::uint64_t seed) {
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (criterion == SelectionCriterion::MaxConfidence) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cands[a].confidence > cands[b].confidence;
    });
  } else {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

GraspCandidate select_candidate(const std::vector<GraspCandidate>& cands,
                                SelectionCriterion criterion, std::uint64_t seed) {
  if (cands.empty()) throw NoGraspableVertex("select_candidate: empty candidate list");
  return cands[rank_candidates(cands, criterion, seed).front()];
}

ApproachType classify_approach(const Vec3& unit_normal, const WorkspaceConfig& cfg) {
  // inclination = arcsin(n_z) >= threshold, compared in sine space so the
  // boundary is exact (Top is inclusive at the threshold).
  return unit_normal.z() >= std::sin(cfg.inclination_threshold) ? ApproachType::Top
                                                                : ApproachType::Side;
}

Rotation3 wrist_frame(const Vec3& unit_normal, ApproachType approach) {
  const Vec3 x = -unit_normal;  // distal axis opposes the vertex normal
  const Vec3 z_base = Vec3::UnitZ();
  Mat3 m;
  if (approach == ApproachType::Side) {
    Vec3 y = z_base - z_base.dot(x) * x;  // ulnar axis: base Z in the coronal plane
    const double ny = y.norm();
    if (ny < 1e-9) {
      throw DegenerateNormal("wrist_frame: side approach with vertical normal");
    }
    y /= ny;
    m.col(0) = x;
    m.col(1) = y;
    m.col(2) = x.cross(y);
  } else {
    Vec3 z = z_base - z_base.dot(x) * x;  // palmar axis: base Z in the sagittal plane
    double nz = z.norm();
    if (nz < 1e-9) {
      // Distal parallel to base Z: fall back to the projected -X axis.
      z = -Vec3::UnitX() + Vec3::UnitX().dot(x) * x;
      nz = z.norm();
    }
    z /= nz;
    m.col(0) = x;
    m.col(1) = z.cross(x);
    m.col(2) = z;
  }
  return Rotation3(m);
}

Vec3 compensation(double gamma, double l, const Vec3& travel_unit) {
  if (gamma < -1e-12 || gamma > kPi / 2 + 1e-12) {
    throw InvalidParams("compensation: gamma outside [0, pi/2]");
  }
  if (l <= 0) throw InvalidParams("compensation: l must be positive");
  const double d_ex = l * (1.0 - std::cos(gamma));
  const double d_z = l * std::sin(gamma);
  const Vec3 e = horizontal_projection(UnitVec3(travel_unit));
  const double en = e.norm();
  if (en < 1e-9) {
    if (d_ex > 1e-15) {
      throw DegenerateAxis("compensation: vertical axis with nonzero leveling");
    }
    return Vec3::Zero();
  }
  return d_ex * (e / en) + d_z * Vec3(0, 0, -1);
}

GraspPlan plan_grasp(const GraspCandidate& cand, const WorkspaceConfig& cfg) {
  cfg.validate();
  if (cand.posture == PostureLabel::NonGraspable) {
    throw InvalidParams("plan_grasp: candidate labeled non-graspable");
  }
  const Vec3 n = cand.normal.normalized();

  GraspPlan plan;
  plan.candidate = cand;
  plan.gamma = std::asin(std::clamp(std::abs(n.z()), 0.0, 1.0));
  plan.approach = classify_approach(n, cfg);
  plan.wrist_frame = wrist_frame(n, plan.approach);
  plan.compensation = compensation(plan.gamma, cfg.wrist_to_fingertip, -n);

  const Vec3 approach_pt = cand.vertex + cfg.approach_offset * n;
  const Vec3 grasp_pt = approach_pt - cfg.travel_distance * n + plan.compensation;
  plan.waypoints = {Waypoint{cfg.idle_position, plan.wrist_frame},
                    Waypoint{approach_pt, plan.wrist_frame},
                    Waypoint{grasp_pt, plan.wrist_frame}};
  plan.grasp_type = cand.posture;
  plan.lift = Vec3(0, 0, plan.approach == ApproachType::Side ? cfg.lift_side
                                                             : cfg.lift_top);
  if (plan.approach == ApproachType::Side) {
    plan.side_wrist_extended = true;
    plan.thumb_palmar_abducted = true;
  }
  return plan;
}

namespace {

// Horizontally leveled hand frame used for the closure-geometry checks;
// models the wrist abduction/extension that keeps the relevant hand plane
// parallel to the table.
Rotation3 leveled_hand_frame(const GraspPlan& plan) {
  const Vec3 n = plan.candidate.normal.normalized();
  Vec3 x = horizontal_projection(UnitVec3(-n));
  if (x.norm() < 1e-9) x = -Vec3::UnitX();  // matches the wrist-frame fallback
  x.normalize();
  Mat3 m;
  if (plan.approach == ApproachType::Side) {
    const Vec3 y = Vec3::UnitZ();
    m.col(0) = x;
    m.col(1) = y;
    m.col(2) = x.cross(y);
  } else {
    const Vec3 z = -Vec3::UnitZ();  // palm facing the table
    m.col(0) = x;
    m.col(1) = z.cross(x);
    m.col(2) = z;
  }
  return Rotation3(m);
}

bool segment_clear(const TriangleBvh& bvh, const KdTree3& surface, const Vec3& a,
                   const Vec3& b, double clearance, double skip_tail) {
  const Vec3 d = b - a;
  const double len = d.norm();
  if (len < 1e-9) return true;
  const double checked = std::max(0.0, len - skip_tail);
  if (checked <= 0.0) return true;
  // Exact penetration test along the checked stretch.
  if (bvh.any_hit(a, d / len, 1e-9, checked)) return false;
  // Soft clearance against the sampled surface.
  const int steps = std::max(2, static_cast<int>(std::ceil(checked / 0.005)));
  for (int s = 0; s <= steps; ++s) {
    const Vec3 p = a + (checked * s / steps) * (d / len);
    const auto [idx, sq] = surface.nearest(p);
    if (sq < clearance * clearance) return false;
  }
  return true;
}

}  // namespace

SimResult simulate_grasp(const GraspPlan& plan, const TriMesh& object_base,
                         const WorkspaceConfig& cfg) {
  SimResult res;
  const Vec3 n = plan.candidate.normal.normalized();

  // Reachability: a workspace sphere stands in for arm kinematics.
  for (const Waypoint& wp : plan.waypoints) {
    if (wp.position.norm() > cfg.reach_radius) {
      res.reason = FailureReason::Unreachable;
      return res;
    }
  }

  // Physical palm centers: the hand trails the commanded fingertips by the
  // palm length; at the grasp waypoint the compensation term is a
  // commanded-frame correction, so it is removed to recover the palm pose.
  const Vec3 palm_idle = plan.waypoints[0].position + cfg.palm_to_fingertip * n;
  const Vec3 palm_approach = plan.waypoints[1].position + cfg.palm_to_fingertip * n;
  const Vec3 palm_grasp =
      plan.waypoints[2].position + cfg.palm_to_fingertip * n - plan.compensation;

  for (const Vec3& palm : {palm_idle, palm_approach, palm_grasp}) {
    if (palm.z() < cfg.table_height) {
      res.reason = FailureReason::TableCollision;
      return res;
    }
  }

  if (object_base.triangles.empty()) {
    res.reason = FailureReason::NoContact;
    return res;
  }
  const TriangleBvh bvh(object_base);
  const KdTree3 surface(object_base.vertices);

  if (!segment_clear(bvh, surface, palm_idle, palm_approach, cfg.path_clearance,
                     cfg.contact_margin) ||
      !segment_clear(bvh, surface, palm_approach, palm_grasp, cfg.path_clearance,
                     cfg.contact_margin)) {
    res.reason = FailureReason::PathCollision;
    return res;
  }

  // Closure: finger rays in the leveled hand frame, mirroring the
  // motor-current contact rule.
  const Rotation3 hand = leveled_hand_frame(plan);
  const Vec3 distal = hand.col(0), ulnar = hand.col(1), palmar = hand.col(2);
  const double range = cfg.palm_standoff + cfg.palm_to_fingertip;

  std::vector<std::pair<Vec3, Vec3>> rays;  // origin, direction
  if (plan.grasp_type == PostureLabel::MediumWrap) {
    for (int f : {-2, -1, 1, 2}) {
      rays.emplace_back(palm_grasp + f * cfg.finger_spacing * ulnar -
                            cfg.palm_standoff * distal,
                        distal);
    }
    rays.emplace_back(palm_grasp - cfg.palm_standoff * palmar, palmar);
  } else {
    for (int f : {-1, 1}) {  // index and middle
      rays.emplace_back(palm_grasp + f * cfg.finger_spacing * ulnar -
                            cfg.palm_standoff * distal,
                        distal);
    }
    rays.emplace_back(palm_grasp - cfg.palm_standoff * palmar, palmar);
  }

  for (const auto& [origin, dir] : rays) {
    if (bvh.first_hit(origin, dir, 1e-9, range)) res.contact_rays++;
  }

  const int required = plan.grasp_type == PostureLabel::MediumWrap
                           ? cfg.success_min_motors_mw
                           : cfg.success_min_motors_tripod;
  if (res.contact_rays == 0) {
    res.reason = FailureReason::NoContact;
  } else if (res.contact_rays < required) {
    res.reason = FailureReason::InsufficientContact;
  } else {
    res.feasible = true;
    res.reason = FailureReason::None;
  }
  return res;
}

}  // namespace graspkit
