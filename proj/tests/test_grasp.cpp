#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "graspkit/grasp.hpp"
#include "graspkit/shapes.hpp"
#include "graspkit/plan_io.hpp"

using namespace graspkit;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

// Labeled, confident single-vertex mesh helper for the filter tests.
TriMesh mesh_with_vertices(const std::vector<Vec3>& verts,
                           const std::vector<Vec3>& normals,
                           const std::vector<PostureLabel>& labels) {
  TriMesh m;
  m.vertices = verts;
  m.normals = normals;
  m.postures = labels;
  m.confidence.assign(verts.size(), 1.0f);
  return m;
}

// Closed vertical cylinder standing on the table.
TriMesh table_cylinder(double radius, double height, const Vec3& base_center,
                       int sectors = 96, int rings = 40) {
  TriMesh m;
  for (int r = 0; r <= rings; ++r) {
    const double z = base_center.z() + height * r / rings;
    for (int s = 0; s < sectors; ++s) {
      const double th = 2.0 * kPi * s / sectors;
      m.vertices.emplace_back(base_center.x() + radius * std::cos(th),
                              base_center.y() + radius * std::sin(th), z);
    }
  }
  auto at = [&](int r, int s) {
    return static_cast<std::uint32_t>(r * sectors + (s % sectors));
  };
  for (int r = 0; r < rings; ++r) {
    for (int s = 0; s < sectors; ++s) {
      m.triangles.push_back({at(r, s), at(r + 1, s), at(r + 1, s + 1)});
      m.triangles.push_back({at(r, s), at(r + 1, s + 1), at(r, s + 1)});
    }
  }
  const auto bot = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.push_back(base_center);
  const auto top = bot + 1;
  m.vertices.push_back(base_center + Vec3(0, 0, height));
  for (int s = 0; s < sectors; ++s) {
    m.triangles.push_back({bot, at(0, s + 1), at(0, s)});
    m.triangles.push_back({top, at(rings, s), at(rings, s + 1)});
  }
  return m;
}

}  // namespace

TEST_CASE("workspace defaults satisfy the approach arithmetic") {
  WorkspaceConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.travel_distance == doctest::Approx(cfg.approach_offset + cfg.palm_to_fingertip));
  cfg.travel_distance = 0.2;
  CHECK_THROWS_AS(cfg.validate(), InvalidParams);
}

TEST_CASE("filter_candidates") {
  WorkspaceConfig cfg;
  SUBCASE("normals outside the first octant are rejected") {
    const TriMesh m = mesh_with_vertices(
        {Vec3(-0.4, 0.4, 0.4), Vec3(-0.4, 0.4, 0.41)},
        {Vec3(-1, 0, 0), Vec3(-1, 0, 0)},
        {PostureLabel::MediumWrap, PostureLabel::MediumWrap});
    CHECK_THROWS_AS((void)filter_candidates(m, cfg), NoGraspableVertex);
  }
  SUBCASE("side-grasp z gate: 44 mm above the table excluded, 46 mm included") {
    const double table = cfg.table_height;
    const TriMesh m = mesh_with_vertices(
        {Vec3(-0.4, 0.4, table + 0.044), Vec3(-0.4, 0.4, table + 0.046)},
        {Vec3(1, 0, 0), Vec3(1, 0, 0)},
        {PostureLabel::MediumWrap, PostureLabel::MediumWrap});
    const auto cands = filter_candidates(m, cfg);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].vertex.z() == doctest::Approx(table + 0.046));
  }
  SUBCASE("top-approach candidates bypass the z gate") {
    const TriMesh m = mesh_with_vertices({Vec3(-0.4, 0.4, cfg.table_height + 0.01)},
                                         {Vec3(0, 0, 1)}, {PostureLabel::Tripod});
    CHECK(filter_candidates(m, cfg).size() == 1);
  }
  SUBCASE("non-graspable labels are rejected") {
    const TriMesh m = mesh_with_vertices({Vec3(-0.4, 0.4, 0.4)}, {Vec3(1, 0, 0)},
                                         {PostureLabel::NonGraspable});
    CHECK_THROWS_AS((void)filter_candidates(m, cfg), NoGraspableVertex);
  }
  SUBCASE("axis-aligned boundary normals stay usable") {
    const TriMesh m = mesh_with_vertices({Vec3(-0.4, 0.4, 0.4)}, {Vec3(0, 1, 0)},
                                         {PostureLabel::MediumWrap});
    CHECK(filter_candidates(m, cfg).size() == 1);
  }
}

TEST_CASE("select_candidate") {
  std::vector<GraspCandidate> cands;
  for (double conf : {0.1, 0.9, 0.9}) {
    cands.push_back({Vec3(0, 0, 0), Vec3(1, 0, 0), conf, PostureLabel::MediumWrap});
  }
  SUBCASE("argmax with index tie-break") {
    const GraspCandidate pick = select_candidate(cands, SelectionCriterion::MaxConfidence);
    CHECK(pick.confidence == doctest::Approx(0.9));
    // Ties resolve to the lowest index (the first 0.9 entry).
    const auto order = rank_candidates(cands, SelectionCriterion::MaxConfidence);
    CHECK(order.front() == 1);
  }
  SUBCASE("single candidate under both criteria") {
    const std::vector<GraspCandidate> one(cands.begin(), cands.begin() + 1);
    CHECK(select_candidate(one, SelectionCriterion::MaxConfidence).confidence ==
          doctest::Approx(0.1));
    CHECK(select_candidate(one, SelectionCriterion::Arbitrary, 7).confidence ==
          doctest::Approx(0.1));
  }
  SUBCASE("arbitrary selection is deterministic in the seed") {
    const auto a = rank_candidates(cands, SelectionCriterion::Arbitrary, 7);
    const auto b = rank_candidates(cands, SelectionCriterion::Arbitrary, 7);
    CHECK(a == b);
  }
  SUBCASE("argmax invariant under positive rescaling") {
    std::vector<GraspCandidate> scaled = cands;
    for (auto& c : scaled) c.confidence *= 13.7;
    CHECK(rank_candidates(cands, SelectionCriterion::MaxConfidence).front() ==
          rank_candidates(scaled, SelectionCriterion::MaxConfidence).front());
  }
}

TEST_CASE("classify_approach") {
  WorkspaceConfig cfg;
  CHECK(classify_approach(Vec3(0, 0, 1), cfg) == ApproachType::Top);
  const double s = std::sqrt(2.0) / 2.0;
  CHECK(classify_approach(Vec3(s, s, 0), cfg) == ApproachType::Side);
  SUBCASE("45 degrees is inclusively Top") {
    const Vec3 n(std::cos(kPi / 4), 0.0, std::sin(kPi / 4));
    CHECK(classify_approach(n.normalized(), cfg) == ApproachType::Top);
  }
  SUBCASE("monotone in n_z") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
      const double nz1 = u(rng), nz2 = u(rng);
      const double lo = std::min(nz1, nz2), hi = std::max(nz1, nz2);
      auto mk = [](double nz) {
        const double h = std::sqrt(std::max(0.0, 1.0 - nz * nz));
        return Vec3(h, 0, nz);
      };
      if (classify_approach(mk(lo), cfg) == ApproachType::Top) {
        REQUIRE(classify_approach(mk(hi), cfg) == ApproachType::Top);
      }
    }
  }
}

TEST_CASE("wrist_frame") {
  SUBCASE("worked side example") {
    const Rotation3 r = wrist_frame(Vec3(-1, 0, 0), ApproachType::Side);
    CHECK((r.col(0) - Vec3(1, 0, 0)).norm() < 1e-12);
    CHECK((r.col(1) - Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK((r.col(2) - Vec3(0, -1, 0)).norm() < 1e-12);
    CHECK(std::abs(Vec3::UnitZ().dot(r.col(2))) < 1e-12);  // base Z in coronal plane
  }
  SUBCASE("orthonormal right-handed over random normals, with plane membership") {
    std::mt19937_64 rng(6);
    int side_checked = 0, top_checked = 0;
    while (side_checked < 500 || top_checked < 500) {
      const Vec3 n = random_unit(rng);
      const Vec3 x_expected = -n;
      if (std::abs(n.z()) < 0.99 && side_checked < 500) {
        const Rotation3 r = wrist_frame(n, ApproachType::Side);
        const Mat3 m = r.matrix();
        REQUIRE((m.transpose() * m - Mat3::Identity()).norm() < 1e-9);
        REQUIRE(m.determinant() == doctest::Approx(1.0).epsilon(1e-9));
        REQUIRE((r.col(0) - x_expected).norm() < 1e-9);
        REQUIRE(std::abs(Vec3::UnitZ().dot(r.col(2))) < 1e-9);
        ++side_checked;
      }
      if (std::abs(n.z()) < 0.99 && top_checked < 500) {
        const Rotation3 r = wrist_frame(n, ApproachType::Top);
        REQUIRE((r.col(0) - x_expected).norm() < 1e-9);
        REQUIRE(std::abs(Vec3::UnitZ().dot(r.col(1))) < 1e-9);
        ++top_checked;
      }
    }
  }
  SUBCASE("side approach with a vertical normal is degenerate") {
    CHECK_THROWS_AS((void)wrist_frame(Vec3(0, 0, 1), ApproachType::Side),
                    DegenerateNormal);
  }
  SUBCASE("top fallback for a vertical normal is deterministic") {
    const Rotation3 a = wrist_frame(Vec3(0, 0, 1), ApproachType::Top);
    const Rotation3 b = wrist_frame(Vec3(0, 0, 1), ApproachType::Top);
    CHECK((a.col(0) - Vec3(0, 0, -1)).norm() < 1e-12);
    CHECK((a.col(2) - Vec3(-1, 0, 0)).norm() < 1e-12);  // projected -X fallback
    CHECK(a.matrix() == b.matrix());
  }
}

TEST_CASE("compensation") {
  SUBCASE("zero leveling angle gives zero compensation") {
    CHECK(compensation(0.0, 0.18, Vec3(-1, 0, 0)).norm() == 0.0);
    CHECK(compensation(0.0, 0.18, Vec3(0, 0, -1)).norm() == 0.0);
  }
  SUBCASE("worked right-angle example") {
    const Vec3 c = compensation(kPi / 2, 0.18, Vec3(-1, 0, 0));
    CHECK((c - Vec3(-0.18, 0, -0.18)).norm() < 1e-12);
  }
  SUBCASE("worked 60-degree example") {
    const Vec3 c = compensation(kPi / 3, 0.18, Vec3(-1, 0, 0));
    CHECK(c.head<2>().norm() == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(-c.z() == doctest::Approx(0.18 * std::sqrt(3.0) / 2.0).epsilon(1e-12));
    CHECK(c.norm() == doctest::Approx(0.18).epsilon(1e-12));  // 2 l sin(pi/6)
  }
  SUBCASE("norm identity over random inputs") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ug(0.0, kPi / 2);
    std::uniform_real_distribution<double> ul(0.05, 0.5);
    for (int i = 0; i < 2000; ++i) {
      const double gamma = ug(rng), l = ul(rng);
      Vec3 n = random_unit(rng);
      if (std::abs(n.z()) > 0.999 && gamma > 1e-9) continue;
      const Vec3 c = compensation(gamma, l, n);
      REQUIRE(c.norm() == doctest::Approx(2.0 * l * std::sin(gamma / 2)).epsilon(1e-9));
    }
  }
  SUBCASE("vertical axis with nonzero leveling is a degenerate axis") {
    CHECK_THROWS_AS((void)compensation(kPi / 4, 0.18, Vec3(0, 0, -1)), DegenerateAxis);
  }
}

TEST_CASE("plan_grasp") {
  WorkspaceConfig cfg;
  SUBCASE("worked horizontal-normal example") {
    const GraspCandidate cand{Vec3(-0.40, 0.30, 0.12), Vec3(1, 0, 0), 0.5,
                              PostureLabel::MediumWrap};
    const GraspPlan plan = plan_grasp(cand, cfg);
    CHECK(plan.gamma == doctest::Approx(0.0));
    CHECK(plan.approach == ApproachType::Side);
    CHECK((plan.waypoints[1].position - Vec3(-0.35, 0.30, 0.12)).norm() < 1e-12);
    CHECK((plan.waypoints[2].position - Vec3(-0.50, 0.30, 0.12)).norm() < 1e-12);
    CHECK(plan.compensation.norm() == 0.0);
    CHECK(plan.lift == Vec3(0, 0, cfg.lift_side));
    CHECK(plan.side_wrist_extended);
    CHECK(plan.thumb_palmar_abducted);
  }
  SUBCASE("top candidate lifts 200 mm") {
    const GraspCandidate cand{Vec3(-0.40, 0.30, 0.35), Vec3(0.5, 0.1, 0.86).normalized(),
                              0.5, PostureLabel::Tripod};
    const GraspPlan plan = plan_grasp(cand, cfg);
    CHECK(plan.approach == ApproachType::Top);
    CHECK(plan.lift == Vec3(0, 0, 0.200));
    CHECK_FALSE(plan.side_wrist_extended);
  }
  SUBCASE("waypoint recurrence holds exactly") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int i = 0; i < 500; ++i) {
      Vec3 n = random_unit(rng);
      n.x() = std::abs(n.x());
      n.y() = std::abs(n.y());
      n.z() = std::abs(n.z());
      if (n.z() > 0.999) continue;
      const GraspCandidate cand{Vec3(u(rng), u(rng), std::abs(u(rng)) + 0.25), n, 0.5,
                                PostureLabel::MediumWrap};
      const GraspPlan plan = plan_grasp(cand, cfg);
      const Vec3 n_unit = cand.normal.normalized();
      const Vec3 residual = plan.waypoints[2].position - plan.waypoints[1].position +
                            cfg.travel_distance * n_unit - plan.compensation;
      REQUIRE(residual.lpNorm<Eigen::Infinity>() < 1e-15);
      REQUIRE(plan.waypoints.size() == 3);
      REQUIRE((plan.waypoints[0].position - cfg.idle_position).norm() == 0.0);
    }
  }
}

TEST_CASE("simulate_grasp") {
  WorkspaceConfig cfg;
  const Vec3 base(-0.40, 0.40, cfg.table_height);
  const TriMesh cylinder = table_cylinder(0.040, 0.20, base);

  SUBCASE("side medium wrap at mid-height is feasible") {
    const Vec3 v = base + Vec3(0.040, 0.0, 0.10);
    const GraspCandidate cand{v, Vec3(1, 0, 0), 0.9, PostureLabel::MediumWrap};
    const GraspPlan plan = plan_grasp(cand, cfg);
    const SimResult res = simulate_grasp(plan, cylinder, cfg);
    CHECK(res.feasible);
    CHECK(res.contact_rays >= 4);
  }
  SUBCASE("palm below the table collides") {
    const Vec3 v(-0.40, 0.40, cfg.table_height - 0.01);
    const GraspCandidate cand{v, Vec3(1, 0, 0), 0.9, PostureLabel::MediumWrap};
    const GraspPlan plan = plan_grasp(cand, cfg);
    const SimResult res = simulate_grasp(plan, cylinder, cfg);
    CHECK_FALSE(res.feasible);
    CHECK(res.reason == FailureReason::TableCollision);
  }
  SUBCASE("object removed from the scene gives NoContact") {
    TriMesh far_away = cylinder;
    for (Vec3& v : far_away.vertices) v += Vec3(0.0, 2.0, 0.0);
    const Vec3 v = base + Vec3(0.040, 0.0, 0.10);
    const GraspCandidate cand{v, Vec3(1, 0, 0), 0.9, PostureLabel::MediumWrap};
    const GraspPlan plan = plan_grasp(cand, cfg);
    const SimResult res = simulate_grasp(plan, far_away, cfg);
    CHECK_FALSE(res.feasible);
    CHECK(res.reason == FailureReason::NoContact);
    CHECK(res.contact_rays == 0);
  }
  SUBCASE("approach through the body is a path collision") {
    // Outward +X normal attached to the -X side: the palm path crosses the
    // cylinder before reaching the vertex.
    const Vec3 v = base + Vec3(-0.040, 0.0, 0.10);
    const GraspCandidate cand{v, Vec3(1, 0, 0), 0.9, PostureLabel::MediumWrap};
    const GraspPlan plan = plan_grasp(cand, cfg);
    const SimResult res = simulate_grasp(plan, cylinder, cfg);
    CHECK_FALSE(res.feasible);
    CHECK(res.reason == FailureReason::PathCollision);
  }
  SUBCASE("waypoints beyond the reach sphere are unreachable") {
    const Vec3 v(-0.9, 0.9, 0.4);
    const GraspCandidate cand{v, Vec3(1, 0, 0), 0.9, PostureLabel::MediumWrap};
    const GraspPlan plan = plan_grasp(cand, cfg);
    const SimResult res = simulate_grasp(plan, cylinder, cfg);
    CHECK_FALSE(res.feasible);
    CHECK(res.reason == FailureReason::Unreachable);
  }
  SUBCASE("tripod closure on a vessel rim") {
    // Tripod at the chamfered rim of a generated cup: pick a real rim vertex
    // with an up-tilted (Top, non-vertical) normal.
    TriMesh cup = generate_object(Category::Cup, default_params(Category::Cup), 21);
    const Aabb box = bounding_box(cup);
    SimilarityPose pose;
    pose.translation = Vec3(-0.40, 0.40, cfg.table_height - box.lo.z());
    cup = transformed(cup, pose);
    compute_vertex_normals(cup);
    const double top_z = bounding_box(cup).hi.z();
    int pick = -1;
    for (std::size_t i = 0; i < cup.vertices.size(); ++i) {
      const Vec3& n = cup.normals[i];
      if (cup.vertices[i].z() > top_z - 0.004 && n.x() > 0.2 && n.y() >= 0.0 &&
          n.z() > 0.72 && n.z() < 0.95) {
        pick = static_cast<int>(i);
        break;
      }
    }
    REQUIRE(pick >= 0);
    const GraspCandidate cand{cup.vertices[pick], cup.normals[pick], 0.9,
                              PostureLabel::Tripod};
    const GraspPlan plan = plan_grasp(cand, cfg);
    CHECK(plan.approach == ApproachType::Top);
    const SimResult res = simulate_grasp(plan, cup, cfg);
    CHECK(res.feasible);
    CHECK(res.contact_rays == 3);
  }
}

TEST_CASE("plan json roundtrip and config hash") {
  WorkspaceConfig cfg;
  const GraspCandidate cand{Vec3(-0.40, 0.30, 0.30), Vec3(0.8, 0.1, 0.2).normalized(),
                            0.7, PostureLabel::MediumWrap};
  const GraspPlan plan = plan_grasp(cand, cfg);
  const auto dir = std::filesystem::temp_directory_path() / "graspkit_plan_io";
  std::filesystem::create_directories(dir);
  save_plan(plan, cfg, dir / "plan.json");
  const GraspPlan back = load_plan(dir / "plan.json");
  CHECK((back.candidate.vertex - plan.candidate.vertex).norm() < 1e-15);
  CHECK(back.approach == plan.approach);
  CHECK(back.gamma == doctest::Approx(plan.gamma).epsilon(1e-15));
  CHECK((back.compensation - plan.compensation).norm() < 1e-15);
  CHECK(back.grasp_type == plan.grasp_type);
  for (int i = 0; i < 3; ++i) {
    CHECK((back.waypoints[i].position - plan.waypoints[i].position).norm() < 1e-15);
  }

  SUBCASE("hash tracks the configuration") {
    WorkspaceConfig other = cfg;
    other.lift_top = 0.25;
    CHECK(workspace_config_hash(cfg) == workspace_config_hash(WorkspaceConfig{}));
    CHECK(workspace_config_hash(cfg) != workspace_config_hash(other));
  }
}
