#pragma once

#include <cstdint>
#include <string>

#include "graspkit/mesh.hpp"

namespace graspkit {

enum class Category { Cup, Bottle, Bowl };

std::string to_string(Category c);
Category category_from_string(const std::string& s);

// Procedural object parameters, meters. Each category uses the subset that
// applies to it; validate() enforces the documented ranges.
struct ShapeParams {
  double radius = 0.045;          // cup/bottle body radius, bowl rim radius
  double height = 0.105;
  double wall_thickness = 0.004;  // cup/bowl
  double base_thickness = 0.005;
  // cup handle (full torus fused into the wall)
  double handle_radius = 0.028;       // major radius
  double handle_tube_radius = 0.007;  // tube radius
  // bottle
  double neck_radius = 0.016;
  // tessellation and instance variation
  double target_edge = 0.004;     // approximate triangle side
  double profile_noise = 0.0;     // relative radial jitter amplitude, z-dependent

  void validate(Category category) const;
};

ShapeParams default_params(Category category);

// Uniform draw within the documented per-category ranges; small profile
// noise is enabled so instances differ in more than scale.
ShapeParams randomized_params(Category category, std::uint64_t seed);

// Watertight surface-of-revolution body (cups gain a torus handle fused
// through the wall). Object frame: surface centroid at the origin, up = +Z.
// Deterministic in (category, params, seed); seed drives the profile noise.
// `applied_shift`, when given, receives the centroid that was subtracted
// (vertex + shift recovers generator coordinates with the base at z = 0).
TriMesh generate_object(Category category, const ShapeParams& params,
                        std::uint64_t seed, Vec3* applied_shift = nullptr);

// Conservative object-frame bounds implied by the parameters; every
// generated vertex lies inside.
Aabb declared_bounds(Category category, const ShapeParams& params);

// Scale putting the mesh into the canonical unit region: 1 / bbox diagonal.
double canonical_scale(const TriMesh& mesh);

}  // namespace graspkit
