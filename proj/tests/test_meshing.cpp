#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "graspkit/kdtree.hpp"
#include "graspkit/mc_tables.hpp"
#include "graspkit/mise.hpp"
#include "support/oracles.hpp"

using namespace graspkit;

TEST_CASE("marching-cubes tables are self-consistent") {
  for (int idx = 0; idx < 256; ++idx) {
    // The edge mask is fully determined by which corners sit below iso.
    std::uint16_t expected = 0;
    for (int e = 0; e < 12; ++e) {
      const bool a = (idx >> mc::kEdgeCorners[e][0]) & 1;
      const bool b = (idx >> mc::kEdgeCorners[e][1]) & 1;
      if (a != b) expected |= static_cast<std::uint16_t>(1 << e);
    }
    REQUIRE(mc::kEdgeTable[idx] == expected);

    // Triangles reference exactly the crossed edges, in groups of three.
    int count = 0;
    for (int t = 0; t < 16 && mc::kTriTable[idx][t] != -1; ++t, ++count) {
      const int e = mc::kTriTable[idx][t];
      REQUIRE(e >= 0);
      REQUIRE(e < 12);
      REQUIRE(((expected >> e) & 1) == 1);
    }
    REQUIRE(count % 3 == 0);
  }
}

TEST_CASE("extract_mesh_mise: empty field raises EmptySurface") {
  const OccupancyGrid g = test::grid_from_function(
      32, Vec3(-0.5, -0.5, -0.5), 1.0 / 32, [](const Vec3&) { return 0.0; });
  CHECK_THROWS_AS((void)extract_mesh_mise(g), EmptySurface);
}

TEST_CASE("extract_mesh_mise: sphere vertices lie within a voxel of the surface") {
  const double r = 0.25;
  const OccupancyGrid g = test::smoothed_sphere_grid(64, Vec3(0, 0, 0), r);
  const TriMesh mesh = extract_mesh_mise(g, 0.5, 32, 2);
  REQUIRE(mesh.vertices.size() > 1000);
  for (const Vec3& v : mesh.vertices) {
    REQUIRE(std::abs(v.norm() - r) <= g.voxel_size);
  }
  CHECK(test::is_closed_mesh(mesh));
}

TEST_CASE("extract_mesh_mise: triangles wound toward lower occupancy") {
  const OccupancyGrid g = test::smoothed_sphere_grid(64, Vec3(0, 0, 0), 0.25);
  const TriMesh mesh = extract_mesh_mise(g);
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    REQUIRE((b - a).cross(c - a).dot((a + b + c) / 3.0) > 0.0);
  }
}

TEST_CASE("extract_mesh_mise equals dense marching cubes") {
  for (std::uint64_t seed : {101u, 102u, 103u}) {
    const OccupancyGrid g = test::random_blob_grid(64, seed);
    const TriMesh mise = extract_mesh_mise(g, 0.5, 16, 2);
    const TriMesh dense = test::dense_marching_cubes(g, 0.5, 64);
    REQUIRE(mise.triangles.size() == dense.triangles.size());
    REQUIRE(mise.vertices.size() == dense.vertices.size());
    REQUIRE(test::vertex_sets_match(mise.vertices, dense.vertices, 1e-6));
  }
}

TEST_CASE("extract_mesh_mise: welded vertices are unique beyond tolerance") {
  const OccupancyGrid g = test::random_blob_grid(64, 7);
  const TriMesh mesh = extract_mesh_mise(g, 0.5, 16, 1);
  const KdTree3 tree(mesh.vertices);
  for (std::size_t i = 0; i < mesh.vertices.size(); i += 7) {
    const auto nn = tree.knearest(mesh.vertices[i], 2);
    REQUIRE(nn.size() == 2);
    REQUIRE(std::sqrt(nn[1].second) > 1e-7);
  }
}

TEST_CASE("iso monotonicity: higher iso never increases enclosed volume") {
  const OccupancyGrid g = test::smoothed_sphere_grid(64, Vec3(0.02, -0.03, 0.01), 0.27);
  const double v_low = signed_volume(extract_mesh_mise(g, 0.4, 32, 1));
  const double v_high = signed_volume(extract_mesh_mise(g, 0.6, 32, 1));
  CHECK(v_high <= v_low + 1e-12);
  CHECK(v_low > 0.0);
}

namespace {

// Axis-aligned cube surface with subdivided faces, welded edges.
TriMesh subdivided_cube(int n) {
  TriMesh m;
  std::map<std::tuple<int, int, int>, std::uint32_t> index;
  auto vertex = [&](int x, int y, int z) {
    const auto key = std::make_tuple(x, y, z);
    const auto it = index.find(key);
    if (it != index.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.emplace_back(static_cast<double>(x) / n, static_cast<double>(y) / n,
                            static_cast<double>(z) / n);
    index.emplace(key, id);
    return id;
  };
  // For each face, emit quads with outward winding.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto quad = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
      };
      quad(vertex(i, j, 0), vertex(i, j + 1, 0), vertex(i + 1, j + 1, 0),
           vertex(i + 1, j, 0));  // z=0, normal -Z
      quad(vertex(i, j, n), vertex(i + 1, j, n), vertex(i + 1, j + 1, n),
           vertex(i, j + 1, n));  // z=1, normal +Z
      quad(vertex(i, 0, j), vertex(i + 1, 0, j), vertex(i + 1, 0, j + 1),
           vertex(i, 0, j + 1));  // y=0, normal -Y
      quad(vertex(i, n, j), vertex(i, n, j + 1), vertex(i + 1, n, j + 1),
           vertex(i + 1, n, j));  // y=1, normal +Y
      quad(vertex(0, i, j), vertex(0, i, j + 1), vertex(0, i + 1, j + 1),
           vertex(0, i + 1, j));  // x=0, normal -X
      quad(vertex(n, i, j), vertex(n, i + 1, j), vertex(n, i + 1, j + 1),
           vertex(n, i, j + 1));  // x=1, normal +X
    }
  }
  return m;
}

}  // namespace

TEST_CASE("vertex_normals: flat cube faces get the face axis") {
  TriMesh cube = subdivided_cube(6);
  compute_vertex_normals(cube);
  int interior_checked = 0;
  for (std::size_t i = 0; i < cube.vertices.size(); ++i) {
    const Vec3& v = cube.vertices[i];
    // Interior of a face: exactly one coordinate on the boundary.
    int on_boundary = 0;
    int axis = -1;
    double sign = 0;
    for (int k = 0; k < 3; ++k) {
      if (v[k] == 0.0 || v[k] == 1.0) {
        ++on_boundary;
        axis = k;
        sign = v[k] == 0.0 ? -1.0 : 1.0;
      }
    }
    if (on_boundary != 1) continue;
    Vec3 expected = Vec3::Zero();
    expected[axis] = sign;
    REQUIRE((cube.normals[i] - expected).norm() < 1e-9);
    ++interior_checked;
  }
  CHECK(interior_checked > 50);
}

TEST_CASE("vertex_normals: tessellated sphere within 2 degrees of radial") {
  const OccupancyGrid g = test::smoothed_sphere_grid(64, Vec3(0, 0, 0), 0.25);
  TriMesh mesh = extract_mesh_mise(g);
  compute_vertex_normals(mesh);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 radial = mesh.vertices[i].normalized();
    const double cosang = std::clamp(mesh.normals[i].dot(radial), -1.0, 1.0);
    REQUIRE(std::acos(cosang) < deg_to_rad(2.0));
  }
}

TEST_CASE("vertex_normals: flipping windings negates all normals") {
  const OccupancyGrid g = test::smoothed_sphere_grid(32, Vec3(0, 0, 0), 0.25);
  TriMesh mesh = extract_mesh_mise(g, 0.5, 16, 1);
  TriMesh flipped = mesh;
  for (auto& t : flipped.triangles) std::swap(t[1], t[2]);
  compute_vertex_normals(mesh);
  compute_vertex_normals(flipped);
  for (std::size_t i = 0; i < mesh.normals.size(); ++i) {
    REQUIRE((mesh.normals[i] + flipped.normals[i]).norm() < 1e-12);
  }
}

TEST_CASE("vertex_normals: vertex with only degenerate triangles is an error") {
  TriMesh bad;
  bad.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 0, 0)};
  bad.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(compute_vertex_normals(bad), DegenerateVertex);
}
