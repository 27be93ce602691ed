#include "graspkit/shapes.hpp"

#include <cmath>
#include <random>

namespace graspkit {

std::string to_string(Category c) {
  switch (c) {
    case Category::Cup: return "cup";
    case Category::Bottle: return "bottle";
    case Category::Bowl: return "bowl";
  }
  return "cup";
}

Category category_from_string(const std::string& s) {
  if (s == "cup") return Category::Cup;
  if (s == "bottle") return Category::Bottle;
  if (s == "bowl") return Category::Bowl;
  throw InvalidParams("unknown category: " + s);
}

void ShapeParams::validate(Category category) const {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  bool ok = in(wall_thickness, 0.002, 0.010) && in(base_thickness, 0.002, 0.012) &&
            in(target_edge, 0.0015, 0.012) && in(profile_noise, 0.0, 0.05);
  switch (category) {
    case Category::Cup:
      ok = ok && in(radius, 0.030, 0.060) && in(height, 0.080, 0.130) &&
           in(handle_radius, 0.020, 0.036) && in(handle_tube_radius, 0.005, 0.009);
      break;
    case Category::Bottle:
      ok = ok && in(radius, 0.025, 0.045) && in(height, 0.160, 0.260) &&
           in(neck_radius, 0.011, 0.020) && neck_radius < radius;
      break;
    case Category::Bowl:
      ok = ok && in(radius, 0.060, 0.100) && in(height, 0.040, 0.080);
      break;
  }
  if (!ok) throw InvalidParams("shape parameters outside documented ranges for " +
                               to_string(category));
}

ShapeParams default_params(Category category) {
  ShapeParams p;
  switch (category) {
    case Category::Cup:
      break;  // struct defaults are the cup defaults
    case Category::Bottle:
      p.radius = 0.034;
      p.height = 0.210;
      p.neck_radius = 0.016;
      break;
    case Category::Bowl:
      p.radius = 0.080;
      p.height = 0.055;
      p.wall_thickness = 0.005;
      break;
  }
  return p;
}

ShapeParams randomized_params(Category category, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  ShapeParams p = default_params(category);
  switch (category) {
    case Category::Cup:
      p.radius = uni(0.033, 0.057);
      p.height = uni(0.085, 0.125);
      p.wall_thickness = uni(0.0032, 0.0055);
      p.handle_radius = uni(0.022, 0.033);
      p.handle_tube_radius = uni(0.0055, 0.0085);
      break;
    case Category::Bottle:
      p.radius = uni(0.027, 0.043);
      p.height = uni(0.170, 0.250);
      p.neck_radius = uni(0.012, 0.019);
      break;
    case Category::Bowl:
      p.radius = uni(0.064, 0.096);
      p.height = uni(0.042, 0.075);
      p.wall_thickness = uni(0.004, 0.007);
      break;
  }
  p.profile_noise = uni(0.004, 0.012);
  return p;
}

namespace {

struct ProfilePoint {
  double r, z;
  bool jitter;  // whether z-dependent radial noise applies
};

// Smooth z-dependent radial modulation; rotationally symmetric by design so
// seeded instances stay solids of revolution.
struct ProfileNoise {
  double amplitude = 0.0;
  double f1 = 0, f2 = 0, p1 = 0, p2 = 0;

  ProfileNoise(double amp, double height, std::uint64_t seed) : amplitude(amp) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> freq(1.0, 3.0);
    f1 = freq(rng) * 2.0 * kPi / height;
    f2 = freq(rng) * 2.0 * kPi / height;
    p1 = phase(rng);
    p2 = phase(rng);
  }
  double operator()(double z) const {
    if (amplitude == 0.0) return 0.0;
    return amplitude * 0.5 * (std::sin(f1 * z + p1) + std::sin(f2 * z + p2));
  }
};

// Inserts intermediate samples so no profile edge exceeds max_len.
std::vector<ProfilePoint> densify(const std::vector<ProfilePoint>& pts, double max_len) {
  std::vector<ProfilePoint> out;
  out.push_back(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    const double len = std::hypot(b.r - a.r, b.z - a.z);
    const int n = std::max(1, static_cast<int>(std::ceil(len / max_len)));
    for (int k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      out.push_back({a.r + t * (b.r - a.r), a.z + t * (b.z - a.z),
                     a.jitter && b.jitter});
    }
  }
  return out;
}

// Revolves a profile polyline (must start and end on the axis, r = 0) into a
// closed triangle mesh with m azimuthal segments. Shared seam vertices keep
// the result watertight.
void revolve(const std::vector<ProfilePoint>& profile, int m,
             const ProfileNoise& noise, TriMesh& mesh) {
  const std::size_t np = profile.size();
  std::vector<std::vector<std::uint32_t>> ring(np);
  for (std::size_t i = 0; i < np; ++i) {
    const double r = profile[i].r * (1.0 + (profile[i].jitter ? noise(profile[i].z) : 0.0));
    if (profile[i].r <= 1e-12) {
      ring[i].assign(1, static_cast<std::uint32_t>(mesh.vertices.size()));
      mesh.vertices.emplace_back(0.0, 0.0, profile[i].z);
      continue;
    }
    ring[i].resize(m);
    for (int j = 0; j < m; ++j) {
      const double a = 2.0 * kPi * j / m;
      ring[i][j] = static_cast<std::uint32_t>(mesh.vertices.size());
      mesh.vertices.emplace_back(r * std::cos(a), r * std::sin(a), profile[i].z);
    }
  }
  // Winding chosen so the closed surface ends up outward-oriented
  // (positive signed volume) for profiles traversed bottom-outer-top-inner.
  for (std::size_t i = 0; i + 1 < np; ++i) {
    const auto& lo = ring[i];
    const auto& hi = ring[i + 1];
    if (lo.size() == 1 && hi.size() == 1) continue;
    if (lo.size() == 1) {
      for (int j = 0; j < m; ++j) {
        mesh.triangles.push_back({lo[0], hi[(j + 1) % m], hi[j]});
      }
    } else if (hi.size() == 1) {
      for (int j = 0; j < m; ++j) {
        mesh.triangles.push_back({lo[j], lo[(j + 1) % m], hi[0]});
      }
    } else {
      for (int j = 0; j < m; ++j) {
        const int jn = (j + 1) % m;
        mesh.triangles.push_back({lo[j], hi[jn], hi[j]});
        mesh.triangles.push_back({lo[j], lo[jn], hi[jn]});
      }
    }
  }
}

// Full torus with its ring in the XZ plane (axis along Y), fused through the
// cup wall to form a handle.
void add_torus(const Vec3& center, double major, double tube, double max_edge,
               TriMesh& mesh) {
  const int nu = std::max(24, static_cast<int>(std::ceil(2.0 * kPi * major / max_edge)));
  const int nv = std::max(12, static_cast<int>(std::ceil(2.0 * kPi * tube / max_edge)));
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  for (int i = 0; i < nu; ++i) {
    const double th = 2.0 * kPi * i / nu;
    const Vec3 ring_dir(std::cos(th), 0.0, std::sin(th));
    for (int j = 0; j < nv; ++j) {
      const double ph = 2.0 * kPi * j / nv;
      mesh.vertices.push_back(center + (major + tube * std::cos(ph)) * ring_dir +
                              Vec3(0.0, tube * std::sin(ph), 0.0));
    }
  }
  for (int i = 0; i < nu; ++i) {
    const int in = (i + 1) % nu;
    for (int j = 0; j < nv; ++j) {
      const int jn = (j + 1) % nv;
      const std::uint32_t a = base + i * nv + j;
      const std::uint32_t b = base + in * nv + j;
      const std::uint32_t c = base + in * nv + jn;
      const std::uint32_t d = base + i * nv + jn;
      mesh.triangles.push_back({a, c, b});
      mesh.triangles.push_back({a, d, c});
    }
  }
}

std::vector<ProfilePoint> cup_profile(const ShapeParams& p) {
  const double R = p.radius, H = p.height;
  const double w = p.wall_thickness, bt = p.base_thickness;
  const double ch = std::min(0.002, w * 0.45);  // rim/base chamfer
  const double Ri = R - w;
  return {
      {0.0, 0.0, false},
      {R - ch, 0.0, false},
      {R, ch, true},
      {R, H - ch, true},
      {R - ch * 0.5, H, false},
      {Ri + ch * 0.5, H, false},
      {Ri, H - ch, true},
      {Ri, bt + ch, true},
      {Ri - ch, bt, false},
      {0.0, bt, false},
  };
}

std::vector<ProfilePoint> bottle_profile(const ShapeParams& p) {
  const double R = p.radius, H = p.height, Rn = p.neck_radius;
  const double z_shoulder = 0.62 * H;
  const double z_neck = 0.80 * H;
  const double cap = 0.055 * H;
  std::vector<ProfilePoint> prof;
  prof.push_back({0.0, 0.0, false});
  prof.push_back({R - 0.003, 0.0, false});
  prof.push_back({R, 0.004, true});
  prof.push_back({R, z_shoulder, true});
  // Rounded shoulder sampled as a cosine blend down to the neck radius.
  const int n_sh = 6;
  for (int k = 1; k <= n_sh; ++k) {
    const double t = static_cast<double>(k) / n_sh;
    const double z = z_shoulder + t * (z_neck - z_shoulder);
    const double r = Rn + (R - Rn) * 0.5 * (1.0 + std::cos(kPi * t));
    prof.push_back({r, z, true});
  }
  prof.push_back({Rn, H - cap, false});
  prof.push_back({Rn + 0.0015, H - cap, false});  // cap lip
  prof.push_back({Rn + 0.0015, H - 0.001, false});
  prof.push_back({Rn * 0.85, H, false});
  prof.push_back({0.0, H, false});
  return prof;
}

std::vector<ProfilePoint> bowl_profile(const ShapeParams& p) {
  const double R = p.radius, H = p.height;
  const double w = p.wall_thickness, bt = p.base_thickness;
  const double r_base = 0.42 * R;
  std::vector<ProfilePoint> prof;
  prof.push_back({0.0, 0.0, false});
  prof.push_back({r_base, 0.0, false});
  // Outer flare: circular-ish blend from the base edge to the rim.
  const int n_wall = 8;
  for (int k = 1; k <= n_wall; ++k) {
    const double t = static_cast<double>(k) / n_wall;
    const double z = t * H;
    const double r = r_base + (R - r_base) * std::sin(0.5 * kPi * t);
    prof.push_back({r, z, true});
  }
  prof.push_back({R - w, H, false});  // rim top (flat annulus)
  // Inner surface mirrors the flare at wall-thickness offset.
  for (int k = n_wall - 1; k >= 1; --k) {
    const double t = static_cast<double>(k) / n_wall;
    const double z = bt + t * (H - bt);
    const double r = std::max(0.0, r_base + (R - r_base) * std::sin(0.5 * kPi * t) - w);
    prof.push_back({r, z, true});
  }
  prof.push_back({0.0, bt, false});
  return prof;
}

}  // namespace

TriMesh generate_object(Category category, const ShapeParams& params,
                        std::uint64_t seed, Vec3* applied_shift) {
  params.validate(category);
  const ProfileNoise noise(params.profile_noise, params.height, seed);

  std::vector<ProfilePoint> profile;
  switch (category) {
    case Category::Cup: profile = cup_profile(params); break;
    case Category::Bottle: profile = bottle_profile(params); break;
    case Category::Bowl: profile = bowl_profile(params); break;
  }
  profile = densify(profile, params.target_edge);

  const double mean_r = std::max(params.radius * 0.8, 0.001);
  const int m = std::max(32, static_cast<int>(std::ceil(2.0 * kPi * mean_r /
                                                        params.target_edge)));
  const int m_even = m + (m % 2);  // even segment count keeps 180-deg symmetry

  TriMesh mesh;
  revolve(profile, m_even, noise, mesh);

  if (category == Category::Cup) {
    const double embed = 0.5 * params.handle_tube_radius + 0.0025;
    const Vec3 center(params.radius + params.handle_radius - embed, 0.0,
                      0.5 * params.height);
    add_torus(center, params.handle_radius, params.handle_tube_radius,
              params.target_edge, mesh);
  }

  // Canonical object frame: surface centroid at the origin, up stays +Z.
  const Vec3 centroid = surface_centroid(mesh);
  for (Vec3& v : mesh.vertices) v -= centroid;
  if (applied_shift) *applied_shift = centroid;
  return mesh;
}

Aabb declared_bounds(Category category, const ShapeParams& params) {
  const double slack = 1.0 + params.profile_noise;
  double rx = params.radius * slack, ry = params.radius * slack;
  if (category == Category::Cup) {
    rx += 2.0 * params.handle_radius + params.handle_tube_radius;
  }
  Aabb box;
  box.lo = Vec3(-rx, -ry, -params.height);
  box.hi = Vec3(rx, ry, params.height);
  return box;
}

double canonical_scale(const TriMesh& mesh) {
  const double diag = bounding_box(mesh).diagonal();
  if (diag <= 1e-12) throw EmptyMesh("canonical_scale: degenerate mesh");
  return 1.0 / diag;
}

}  // namespace graspkit
