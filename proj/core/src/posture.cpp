#include "graspkit/posture.hpp"

#include <algorithm>
#include <cmath>

#include "graspkit/kdtree.hpp"
#include "graspkit/mesh_io.hpp"

namespace graspkit {

namespace {

// Region labeling happens in the generator frame (revolution axis x=y=0,
// base at z=0) with the generating parameters known analytically.
PostureLabel label_cup_vertex(const Vec3& g, const ShapeParams& p) {
  const double r = std::hypot(g.x(), g.y());
  if (r > p.radius + 0.001) return PostureLabel::MediumWrap;  // handle
  if (g.z() > p.height - 0.012) return PostureLabel::Tripod;  // rim band
  if (g.z() < 0.002) return PostureLabel::NonGraspable;       // underside
  if (r < p.radius - 0.5 * p.wall_thickness) return PostureLabel::NonGraspable;
  return PostureLabel::MediumWrap;  // outer body wall
}

PostureLabel label_bottle_vertex(const Vec3& g, const ShapeParams& p) {
  if (g.z() > 0.93 * p.height) return PostureLabel::Tripod;  // cap region
  if (g.z() < 0.002) return PostureLabel::NonGraspable;      // underside
  return PostureLabel::MediumWrap;
}

PostureLabel label_bowl_vertex(const Vec3& g, const ShapeParams& p) {
  const double r = std::hypot(g.x(), g.y());
  if (g.z() > p.height - 0.010) return PostureLabel::Tripod;  // rim band
  if (g.z() < 0.002) return PostureLabel::NonGraspable;       // base
  const double t = std::clamp(g.z() / p.height, 0.0, 1.0);
  const double r_base = 0.42 * p.radius;
  const double r_outer = r_base + (p.radius - r_base) * std::sin(0.5 * kPi * t);
  if (r < r_outer - 0.5 * p.wall_thickness) return PostureLabel::NonGraspable;  // interior
  return PostureLabel::MediumWrap;
}

}  // namespace

LabeledCanonicalMesh make_reference(Category category) {
  ShapeParams params = default_params(category);
  params.target_edge = 0.0025;  // reference resolution
  params.profile_noise = 0.0;

  Vec3 shift = Vec3::Zero();
  TriMesh mesh = generate_object(category, params, 42, &shift);

  mesh.postures.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 g = mesh.vertices[i] + shift;  // back to generator coordinates
    switch (category) {
      case Category::Cup: mesh.postures[i] = label_cup_vertex(g, params); break;
      case Category::Bottle: mesh.postures[i] = label_bottle_vertex(g, params); break;
      case Category::Bowl: mesh.postures[i] = label_bowl_vertex(g, params); break;
    }
  }

  const double s = canonical_scale(mesh);
  for (Vec3& v : mesh.vertices) v *= s;

  return LabeledCanonicalMesh{std::move(mesh), category};
}

void transfer_postures(TriMesh& target, const LabeledCanonicalMesh& reference,
                       int k) {
  if (k < 1) throw InvalidParams("transfer_postures: k must be >= 1");
  if (target.vertices.empty()) throw EmptyMesh("transfer_postures: empty target");
  if (!reference.mesh.has_postures()) {
    throw MissingLabels("transfer_postures: reference is not fully labeled");
  }
  if (intersection_over_union(bounding_box(target), bounding_box(reference.mesh)) < 0.10) {
    throw FrameMismatch("transfer_postures: target does not overlap the canonical reference");
  }

  const KdTree3 tree(reference.mesh.vertices);
  target.postures.resize(target.vertices.size());
  for (std::size_t i = 0; i < target.vertices.size(); ++i) {
    const auto nn = tree.knearest(target.vertices[i], static_cast<std::size_t>(k));
    int counts[3] = {0, 0, 0};
    for (const auto& [idx, sq] : nn) {
      counts[static_cast<int>(reference.mesh.postures[idx])]++;
    }
    int best = 0;
    bool tie = false;
    for (int l = 1; l < 3; ++l) {
      if (counts[l] > counts[best]) {
        best = l;
        tie = false;
      } else if (counts[l] == counts[best]) {
        tie = true;
      }
    }
    target.postures[i] = tie ? reference.mesh.postures[nn.front().first]
                             : static_cast<PostureLabel>(best);
  }
}

void save_labeled_reference(const LabeledCanonicalMesh& ref,
                            const std::filesystem::path& path) {
  if (!ref.mesh.has_postures()) {
    throw MissingLabels("save_labeled_reference: mesh is not fully labeled");
  }
  save_ply(ref.mesh, path);
}

LabeledCanonicalMesh load_labeled_reference(const std::filesystem::path& path) {
  TriMesh mesh = load_ply(path);
  if (mesh.vertices.empty()) throw ParseError("labeled reference is empty: " + path.string());
  if (!mesh.has_postures()) {
    throw MissingLabels("labeled reference lacks complete posture labels: " + path.string());
  }
  // Category from filename stem prefix, e.g. cup_reference.ply.
  const std::string stem = path.stem().string();
  Category cat = Category::Cup;
  if (stem.rfind("bottle", 0) == 0) cat = Category::Bottle;
  else if (stem.rfind("bowl", 0) == 0) cat = Category::Bowl;
  return LabeledCanonicalMesh{std::move(mesh), cat};
}

}  // namespace graspkit
