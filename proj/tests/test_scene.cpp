#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "graspkit/mesh_io.hpp"
#include "graspkit/scene.hpp"
#include "graspkit/shapes.hpp"
#include "support/oracles.hpp"

using namespace graspkit;

namespace {

TriMesh make_sphere(double radius, int rings = 64, int sectors = 128) {
  TriMesh m;
  for (int r = 1; r < rings; ++r) {
    const double phi = kPi * r / rings;
    for (int s = 0; s < sectors; ++s) {
      const double th = 2.0 * kPi * s / sectors;
      m.vertices.emplace_back(radius * std::sin(phi) * std::cos(th),
                              radius * std::sin(phi) * std::sin(th),
                              radius * std::cos(phi));
    }
  }
  const auto top = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.emplace_back(0, 0, radius);
  const auto bot = top + 1;
  m.vertices.emplace_back(0, 0, -radius);
  auto at = [&](int r, int s) {
    return static_cast<std::uint32_t>((r - 1) * sectors + (s % sectors));
  };
  for (int s = 0; s < sectors; ++s) {
    m.triangles.push_back({top, at(1, s), at(1, s + 1)});
    m.triangles.push_back({bot, at(rings - 1, s + 1), at(rings - 1, s)});
  }
  for (int r = 1; r + 1 < rings; ++r) {
    for (int s = 0; s < sectors; ++s) {
      m.triangles.push_back({at(r, s), at(r + 1, s), at(r + 1, s + 1)});
      m.triangles.push_back({at(r, s), at(r + 1, s + 1), at(r, s + 1)});
    }
  }
  return m;
}

CameraIntrinsics test_intrinsics() {
  CameraIntrinsics intr;
  intr.fx = intr.fy = 500.0;
  intr.cx = 320.0;
  intr.cy = 240.0;
  intr.width = 640;
  intr.height = 480;
  return intr;
}

}  // namespace

TEST_CASE("render_depth: unit sphere 2 m ahead gives center depth 1") {
  const TriMesh sphere = make_sphere(1.0, 128, 256);
  SimilarityPose pose;  // identity: sphere stays at the origin
  const Frame cam = camera_frame(Vec3(-2.0, 0, 0), 0.0, 0.0);
  const auto [depth, mask] = render_depth(sphere, pose, cam, test_intrinsics());
  CHECK(mask.at(320, 240) == 1);
  CHECK(depth.at(320, 240) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("render_depth: mesh behind the camera gives empty output") {
  const TriMesh sphere = make_sphere(0.5);
  SimilarityPose pose;
  pose.translation = Vec3(5.0, 0, 0);
  const Frame cam = camera_frame(Vec3(8.0, 0, 0), 0.0, 0.0);  // looking +X, sphere behind
  const auto [depth, mask] = render_depth(sphere, pose, cam, test_intrinsics());
  CHECK(std::all_of(depth.depth.begin(), depth.depth.end(),
                    [](float d) { return d == 0.0f; }));
  CHECK(std::all_of(mask.values.begin(), mask.values.end(),
                    [](std::uint8_t v) { return v == 0; }));
}

TEST_CASE("render_depth: deterministic across calls and mask matches depth") {
  const TriMesh cup = generate_object(Category::Cup, default_params(Category::Cup), 3);
  SimilarityPose pose;
  pose.rotation = Rotation3::about_z(0.8);
  pose.translation = Vec3(-0.45, 0.5, 0.25);
  const Frame cam = camera_frame(Vec3(-1.15, 0.5, 0.588), 0.0, deg_to_rad(30.0));
  const auto [d1, m1] = render_depth(cup, pose, cam, test_intrinsics());
  const auto [d2, m2] = render_depth(cup, pose, cam, test_intrinsics());
  CHECK(d1.depth == d2.depth);
  CHECK(m1.values == m2.values);
  for (std::size_t i = 0; i < d1.depth.size(); ++i) {
    REQUIRE((d1.depth[i] > 0.0f) == (m1.values[i] == 1));
  }
  CHECK(std::count(m1.values.begin(), m1.values.end(), 1) > 200);
}

TEST_CASE("render_depth: rendered depth matches analytic ray-sphere distance") {
  const double R = 0.8;
  const TriMesh sphere = make_sphere(R, 256, 512);
  SimilarityPose pose;
  const Vec3 cam_pos(-3.0, 0, 0);
  const Frame cam = camera_frame(cam_pos, 0.0, 0.0);
  const CameraIntrinsics intr = test_intrinsics();
  const auto [depth, mask] = render_depth(sphere, pose, cam, intr);

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> du(0, intr.width - 1), dv(0, intr.height - 1);
  int checked = 0;
  const Mat3 axes = cam.axes.matrix();
  while (checked < 100) {
    const int u = du(rng), v = dv(rng);
    if (!mask.at(u, v)) continue;
    const Vec3 dir = axes * Vec3((u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0);
    const double a = dir.squaredNorm();
    const double b = 2.0 * cam_pos.dot(dir);
    const double c = cam_pos.squaredNorm() - R * R;
    const double disc = b * b - 4 * a * c;
    REQUIRE(disc > 0.0);
    const double t = (-b - std::sqrt(disc)) / (2 * a);
    REQUIRE(depth.at(u, v) == doctest::Approx(t).epsilon(2e-3));
    ++checked;
  }
}

TEST_CASE("backproject pinhole formula") {
  const CameraIntrinsics intr = test_intrinsics();
  DepthImage depth;
  depth.width = intr.width;
  depth.height = intr.height;
  depth.depth.assign(static_cast<std::size_t>(intr.width) * intr.height, 0.0f);
  SegmentationMask mask;
  mask.width = intr.width;
  mask.height = intr.height;
  mask.values.assign(depth.depth.size(), 0);

  SUBCASE("principal point maps to the optical axis") {
    depth.at(320, 240) = 1.0f;
    mask.at(320, 240) = 1;
    const PointCloud cloud = backproject(depth, mask, intr);
    REQUIRE(cloud.points.size() == 1);
    CHECK((cloud.points[0] - Vec3(0, 0, 1)).norm() < 1e-9);
  }
  SUBCASE("off-axis pixel follows (u-cx)/fx * d") {
    CameraIntrinsics wide = intr;
    wide.width = 1024;
    depth.width = 1024;
    depth.depth.assign(static_cast<std::size_t>(1024) * 480, 0.0f);
    mask.width = 1024;
    mask.values.assign(static_cast<std::size_t>(1024) * 480, 0);
    depth.at(820, 240) = 2.0f;
    mask.at(820, 240) = 1;
    const PointCloud cloud = backproject(depth, mask, wide);
    REQUIRE(cloud.points.size() == 1);
    CHECK((cloud.points[0] - Vec3(2, 0, 2)).norm() < 1e-9);
  }
  SUBCASE("masked zero-depth pixels are skipped; none left is an error") {
    mask.at(10, 10) = 1;  // depth stays 0
    CHECK_THROWS_AS(backproject(depth, mask, intr), EmptyForeground);
  }
}

TEST_CASE("backprojection/projection roundtrip within half a pixel") {
  const TriMesh cup = generate_object(Category::Cup, default_params(Category::Cup), 9);
  SimilarityPose pose;
  pose.translation = Vec3(-0.45, 0.5, 0.25);
  const Frame cam = camera_frame(Vec3(-1.15, 0.5, 0.588), 0.0, deg_to_rad(30.0));
  const CameraIntrinsics intr = test_intrinsics();
  const auto [depth, mask] = render_depth(cup, pose, cam, intr);
  PixelCoords pixels;
  const PointCloud cloud = backproject(depth, mask, intr, &pixels);
  REQUIRE(cloud.points.size() == pixels.uv.size());
  REQUIRE(!cloud.points.empty());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto uv = project_point(cloud.points[i], intr);
    REQUIRE(uv.has_value());
    CHECK(std::abs(uv->first - pixels.uv[i].first) <= 0.5);
    CHECK(std::abs(uv->second - pixels.uv[i].second) <= 0.5);
  }
}

TEST_CASE("generate_object") {
  SUBCASE("cup has genus 1 and stays in its declared bounds") {
    const ShapeParams p = default_params(Category::Cup);
    const TriMesh cup = generate_object(Category::Cup, p, 0);
    CHECK(test::total_genus(cup) == 1);
    const Aabb declared = declared_bounds(Category::Cup, p);
    const Aabb actual = bounding_box(cup);
    CHECK((actual.lo.array() >= declared.lo.array() - 1e-9).all());
    CHECK((actual.hi.array() <= declared.hi.array() + 1e-9).all());
  }
  SUBCASE("bodies are closed surfaces") {
    CHECK(test::is_closed_mesh(generate_object(Category::Bottle,
                                               default_params(Category::Bottle), 1)));
    CHECK(test::is_closed_mesh(generate_object(Category::Bowl,
                                               default_params(Category::Bowl), 2)));
    CHECK(test::is_closed_mesh(generate_object(Category::Cup,
                                               default_params(Category::Cup), 3)));
  }
  SUBCASE("bowl is symmetric under 180-degree rotation") {
    ShapeParams p = randomized_params(Category::Bowl, 77);
    const TriMesh bowl = generate_object(Category::Bowl, p, 77);
    TriMesh rotated = bowl;
    const Rotation3 rz = Rotation3::about_z(kPi);
    for (Vec3& v : rotated.vertices) v = rz * v;
    double d1 = 0;
    for (const Vec3& v : rotated.vertices) {
      d1 += std::sqrt(test::brute_nearest(bowl.vertices, v).second);
    }
    d1 /= static_cast<double>(rotated.vertices.size());
    CHECK(d1 < 1e-3);
  }
  SUBCASE("deterministic in seed") {
    const ShapeParams p = randomized_params(Category::Cup, 4);
    const TriMesh a = generate_object(Category::Cup, p, 4);
    const TriMesh b = generate_object(Category::Cup, p, 4);
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
      REQUIRE(a.vertices[i] == b.vertices[i]);
    }
    CHECK(a.triangles == b.triangles);
  }
  SUBCASE("out-of-range parameters rejected") {
    ShapeParams p = default_params(Category::Cup);
    p.radius = 0.2;
    CHECK_THROWS_AS((void)generate_object(Category::Cup, p, 0), InvalidParams);
  }
  SUBCASE("empty mesh rejected by the renderer") {
    TriMesh empty;
    CHECK_THROWS_AS((void)render_depth(empty, SimilarityPose{},
                                       camera_frame(Vec3(0, 0, 1), 0, 0),
                                       test_intrinsics()),
                    EmptyMesh);
  }
}

TEST_CASE("mesh io roundtrips") {
  TriMesh cup = generate_object(Category::Cup, default_params(Category::Cup), 6);
  compute_vertex_normals(cup);
  cup.confidence.assign(cup.vertices.size(), 0.25f);
  cup.postures.assign(cup.vertices.size(), PostureLabel::MediumWrap);

  const auto dir = std::filesystem::temp_directory_path() / "graspkit_scene_io";
  std::filesystem::create_directories(dir);

  SUBCASE("binary ply") {
    save_ply(cup, dir / "cup.ply");
    const TriMesh back = load_ply(dir / "cup.ply");
    REQUIRE(back.vertices.size() == cup.vertices.size());
    REQUIRE(back.triangles == cup.triangles);
    CHECK(back.has_normals());
    CHECK(back.has_confidence());
    CHECK(back.has_postures());
    for (std::size_t i = 0; i < back.vertices.size(); ++i) {
      REQUIRE((back.vertices[i] - cup.vertices[i]).norm() < 1e-6);
    }
  }
  SUBCASE("ascii ply") {
    save_ply(cup, dir / "cup_ascii.ply", PlyEncoding::Ascii);
    const TriMesh back = load_ply(dir / "cup_ascii.ply");
    REQUIRE(back.vertices.size() == cup.vertices.size());
    CHECK(back.triangles == cup.triangles);
  }
  SUBCASE("obj") {
    save_obj(cup, dir / "cup.obj");
    const TriMesh back = load_obj(dir / "cup.obj");
    REQUIRE(back.vertices.size() == cup.vertices.size());
    CHECK(back.triangles == cup.triangles);
    for (std::size_t i = 0; i < back.vertices.size(); ++i) {
      REQUIRE((back.vertices[i] - cup.vertices[i]).norm() < 1e-8);
    }
  }
}
