#pragma once

#include <filesystem>

#include "graspkit/mesh.hpp"
#include "graspkit/shapes.hpp"

namespace graspkit {

// One hand-labeled canonical instance per category; the source of the
// per-vertex grasping-posture knowledge that gets transferred to novel
// instances of the same category.
struct LabeledCanonicalMesh {
  TriMesh mesh;  // canonical frame, fully labeled
  Category category = Category::Cup;
};

// Builds the shipped reference for a category: a finely tessellated default
// instance, canonically scaled, labeled by region (bodies medium-wrap, cup
// rim / bottle cap tripod, bowl rim tripod, interiors and undersides
// non-graspable, cup handle medium-wrap).
LabeledCanonicalMesh make_reference(Category category);

// Label transfer: each target vertex takes the majority label among its k
// nearest reference vertices (ties resolved by the single nearest
// neighbor). Target must already be canonical; a bounding-box overlap below
// 10% IoU against the reference is rejected as a frame mismatch.
void transfer_postures(TriMesh& target, const LabeledCanonicalMesh& reference,
                       int k = 5);

// PLY round-trip for labeled references (uchar `posture` per vertex).
void save_labeled_reference(const LabeledCanonicalMesh& ref,
                            const std::filesystem::path& path);
LabeledCanonicalMesh load_labeled_reference(const std::filesystem::path& path);

}  // namespace graspkit
