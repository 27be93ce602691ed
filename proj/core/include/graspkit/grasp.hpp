#pragma once

#include <array>
#include <string>
#include <vector>

#include "graspkit/mesh.hpp"

namespace graspkit {

// Physical constants of the workspace and hand, meters/radians. Defaults
// follow the reference setup: grasp approach arithmetic 50 + 100 = 150 mm,
// 45 deg inclination threshold, 45 mm side-grasp table clearance, 100/200 mm
// lifts, and the recorded (not simulated) motor-current success rule.
struct WorkspaceConfig {
  double table_height = 0.193;
  double inclination_threshold = kPi / 4.0;  // Top at or above this
  double min_side_grasp_z = 0.045;                // above the table
  double approach_offset = 0.050;
  double travel_distance = 0.150;
  double palm_to_fingertip = 0.100;
  double wrist_to_fingertip = 0.180;  // l, flat configuration
  double lift_side = 0.100;
  double lift_top = 0.200;
  double side_wrist_extension = kPi / 4.0;

  // Physical success rule, recorded for reporting only.
  double success_current_ma = 400.0;
  double success_hold_s = 4.0;
  int success_min_motors_mw = 4;
  int success_min_motors_tripod = 3;

  // Feasibility simulator geometry.
  Vec3 idle_position{-0.3, 0.4, 0.6};
  double reach_radius = 0.855;
  double finger_spacing = 0.020;  // ulnar finger-ray offsets at 1x and 2x
  double palm_standoff = 0.010;   // ray origin backoff from the palm plane
  double path_clearance = 0.005;
  double contact_margin = 0.015;  // unchecked tail of the approach path

  void validate() const;
};

enum class ApproachType { Side, Top };
enum class SelectionCriterion { MaxConfidence, Arbitrary };

std::string to_string(ApproachType a);
SelectionCriterion criterion_from_string(const std::string& s);
std::string to_string(SelectionCriterion c);

struct GraspCandidate {
  Vec3 vertex;             // robot base frame
  Vec3 normal;             // outward unit normal
  double confidence = 0;
  PostureLabel posture = PostureLabel::MediumWrap;
};

struct Waypoint {
  Vec3 position;        // commanded EE (fingertips, flat configuration)
  Rotation3 orientation;  // wrist frame
};

struct GraspPlan {
  GraspCandidate candidate;
  ApproachType approach = ApproachType::Side;
  Rotation3 wrist_frame;  // columns: distal, ulnar, palmar
  double gamma = 0;       // inclination of the vertex normal to the XY plane
  Vec3 compensation{0, 0, 0};
  std::array<Waypoint, 3> waypoints;  // idle, approach, grasp
  PostureLabel grasp_type = PostureLabel::MediumWrap;
  Vec3 lift{0, 0, 0};
  // Fixed pre-grasp settings recorded for side approaches.
  bool side_wrist_extended = false;
  bool thumb_palmar_abducted = false;
};

enum class FailureReason {
  None,
  Unreachable,
  TableCollision,
  PathCollision,
  InsufficientContact,
  NoContact,
};

std::string to_string(FailureReason r);

struct SimResult {
  bool feasible = false;
  FailureReason reason = FailureReason::None;
  int contact_rays = 0;
};

// Candidate filter: keeps labeled, first-octant-normal vertices
// (every component >= 0, at least one > 0); prospective side approaches
// must additionally clear the side-grasp height gate.
std::vector<GraspCandidate> filter_candidates(const TriMesh& mesh_base,
                                              const WorkspaceConfig& cfg);

// Highest confidence (ties to the lowest index) or a seeded uniform pick.
GraspCandidate select_candidate(const std::vector<GraspCandidate>& cands,
                                SelectionCriterion criterion,
                                std::uint64_t seed = 0);

// Candidate indices in deterministic preference order for the criterion.
std::vector<std::size_t> rank_candidates(const std::vector<GraspCandidate>& cands,
                                         SelectionCriterion criterion,
                                         std::uint64_t seed = 0);

// Top when the normal's inclination against the XY plane reaches the
// threshold (inclusive), Side otherwise.
ApproachType classify_approach(const Vec3& unit_normal, const WorkspaceConfig& cfg);

// Flat-configuration wrist frame for a vertex normal: distal axis opposes
// the normal; the base Z axis lies in the coronal plane for side approaches
// and in the sagittal plane for top approaches.
Rotation3 wrist_frame(const Vec3& unit_normal, ApproachType approach);

// Compensation displacement for leveling the wrist by gamma: l(1-cos g)
// along the horizontal projection of the (travel-direction) axis n plus
// l sin(g) straight down.
Vec3 compensation(double gamma, double l, const Vec3& travel_unit);

// Full plan: approach point 50 mm out along the normal, travel 150 mm
// against it with compensation applied, wrist frame, lift by approach type.
GraspPlan plan_grasp(const GraspCandidate& cand, const WorkspaceConfig& cfg);

// Kinematic feasibility: reachability, table clearance of the palm centers,
// collision-free palm path, and a finger-ray closure check standing in for
// the motor-current rule (>=4 of 5 rays for MW, 3 of 3 for tripod).
SimResult simulate_grasp(const GraspPlan& plan, const TriMesh& object_base,
                         const WorkspaceConfig& cfg);

}  // namespace graspkit
