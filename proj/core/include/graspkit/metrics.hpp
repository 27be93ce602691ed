#pragma once

#include <cstdint>

#include "graspkit/mesh.hpp"

namespace graspkit {

struct SampledSurface {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // unit, one per point
};

// Shape accuracy metrics. Chamfer-L1 follows the convention the evaluation
// protocol is defined against: the mean of the two directed mean Euclidean
// nearest-neighbor distances (not a per-axis L1 norm). Lengths are in the
// units of the input surfaces (canonical units in the pipeline).
struct ShapeMetrics {
  double accuracy = 0;            // mean over pred of distance to nearest gt
  double completeness = 0;        // mean over gt of distance to nearest pred
  double chamfer_l1 = 0;          // (accuracy + completeness) / 2
  double normal_consistency = 0;  // mean |n . n_nearest|, both directions
};

// Area-weighted uniform surface sampling with barycentric positions and the
// owning triangle's normal. Deterministic in seed.
SampledSurface sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

// Exact nearest-neighbor metrics between two sampled surfaces.
ShapeMetrics shape_metrics(const SampledSurface& pred, const SampledSurface& gt);

}  // namespace graspkit
