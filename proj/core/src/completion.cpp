#include "graspkit/completion.hpp"

#include <algorithm>
#include <cmath>

namespace graspkit {

CompletionStrategy strategy_from_string(const std::string& s) {
  if (s == "revolution") return CompletionStrategy::RevolutionPrior;
  if (s == "mirror") return CompletionStrategy::MirrorPrior;
  if (s == "partial") return CompletionStrategy::PartialOnly;
  throw UnknownStrategy("unknown completion strategy: " + s);
}

std::string to_string(CompletionStrategy s) {
  switch (s) {
    case CompletionStrategy::RevolutionPrior: return "revolution";
    case CompletionStrategy::MirrorPrior: return "mirror";
    case CompletionStrategy::PartialOnly: return "partial";
  }
  return "partial";
}

namespace {

OccupancyGrid make_empty_like(const TsdfVolume& tsdf) {
  OccupancyGrid g;
  g.resolution = tsdf.spec.resolution;
  g.origin = tsdf.spec.origin;
  g.voxel_size = tsdf.spec.voxel_size;
  g.values.assign(tsdf.spec.cell_count(), 0.0f);
  return g;
}

// Observed occupied evidence: inside the truncation band on the solid side.
bool occupied_evidence(const TsdfVolume& t, std::size_t at) {
  return t.observed[at] != 0 && t.values[at] <= 0.0f;
}

// Reflection about the canonical X-Z plane; voxel centers are symmetric
// about y = 0 for the default grid, so this is an index flip.
void union_mirror_y(OccupancyGrid& g) {
  const int n = g.resolution;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (g.value(i, j, k) > 0.5f) g.value(i, n - 1 - j, k) = 1.0f;
      }
    }
  }
}

void revolution_prior(const TsdfVolume& tsdf, const Completer& c, OccupancyGrid& out) {
  const int n = tsdf.spec.resolution;
  const double voxel = tsdf.spec.voxel_size;
  const double bin_w = std::max(1e-9, c.radial_bin_fraction * voxel);
  // Radius measured from the canonical +Z axis (x = y = 0).
  const auto radius_of = [&](int i, int j) {
    const Vec3 ctr = tsdf.spec.center(i, j, 0);
    return std::hypot(ctr.x(), ctr.y());
  };
  const double max_radius = radius_of(0, 0) + voxel;
  const int n_bins = static_cast<int>(std::ceil(max_radius / bin_w)) + 1;

  // Gather evidence radii per height row.
  std::vector<std::vector<double>> row_radii(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (occupied_evidence(tsdf, tsdf.spec.index(i, j, k))) {
          row_radii[k].push_back(radius_of(i, j));
        }
      }
    }
  }

  // Robust per-row body radius (90th percentile) so a handle cannot widen
  // the revolved body.
  std::vector<double> body_radius(n, 0.0);
  for (int k = 0; k < n; ++k) {
    auto& rr = row_radii[k];
    if (rr.empty()) continue;
    std::sort(rr.begin(), rr.end());
    const std::size_t q = std::min(rr.size() - 1,
                                   static_cast<std::size_t>(0.9 * static_cast<double>(rr.size())));
    body_radius[k] = rr[q] + 0.5 * voxel;
  }

  // Presence histogram over (radius bin, height row); off-body residual
  // voxels go to the handle set instead.
  std::vector<std::vector<std::uint8_t>> hist(n, std::vector<std::uint8_t>(n_bins, 0));
  std::vector<std::size_t> handle_voxels;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t at = tsdf.spec.index(i, j, k);
        if (!occupied_evidence(tsdf, at)) continue;
        const double r = radius_of(i, j);
        if (body_radius[k] > 0.0 && r > c.handle_radius_factor * body_radius[k]) {
          handle_voxels.push_back(at);
          continue;
        }
        hist[k][std::min(n_bins - 1, static_cast<int>(r / bin_w))] = 1;
      }
    }
  }

  // Morphological closing along the radius per row.
  const int half = std::max(1, static_cast<int>(std::lround(c.closing_voxels / c.radial_bin_fraction)));
  std::vector<std::uint8_t> tmp(n_bins);
  for (int k = 0; k < n; ++k) {
    auto& row = hist[k];
    // dilate
    std::fill(tmp.begin(), tmp.end(), 0);
    for (int b = 0; b < n_bins; ++b) {
      if (!row[b]) continue;
      for (int d = -half; d <= half; ++d) {
        const int bb = b + d;
        if (bb >= 0 && bb < n_bins) tmp[bb] = 1;
      }
    }
    // erode
    for (int b = 0; b < n_bins; ++b) {
      bool all = true;
      for (int d = -half; d <= half && all; ++d) {
        const int bb = b + d;
        all = bb < 0 || bb >= n_bins || tmp[bb];
      }
      row[b] = all ? 1 : 0;
    }
  }

  // Fill the profile interior: everywhere for closed solids of revolution
  // (bottles), base rows only for open vessels.
  int lowest = -1;
  for (int k = 0; k < n && lowest < 0; ++k) {
    if (std::any_of(hist[k].begin(), hist[k].end(), [](std::uint8_t b) { return b != 0; })) {
      lowest = k;
    }
  }
  if (lowest >= 0) {
    for (int k = lowest; k < n; ++k) {
      auto& row = hist[k];
      int outer = -1;
      for (int b = n_bins - 1; b >= 0; --b) {
        if (row[b]) { outer = b; break; }
      }
      if (outer < 0) continue;
      const bool solid = c.category == Category::Bottle;
      if (solid || k < lowest + c.base_fill_rows) {
        std::fill(row.begin(), row.begin() + outer + 1, std::uint8_t{1});
      }
    }
  }

  // Sweep the histogram back to the lattice.
  for (int k = 0; k < n; ++k) {
    const auto& row = hist[k];
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int b = std::min(n_bins - 1, static_cast<int>(radius_of(i, j) / bin_w));
        if (row[b]) out.value(i, j, k) = 1.0f;
      }
    }
  }

  // Handles: keep the residual evidence and its mirror image.
  if (!handle_voxels.empty()) {
    OccupancyGrid handles = make_empty_like(tsdf);
    for (std::size_t at : handle_voxels) handles.values[at] = 1.0f;
    union_mirror_y(handles);
    for (std::size_t at = 0; at < out.values.size(); ++at) {
      if (handles.values[at] > 0.5f) out.values[at] = 1.0f;
    }
  }
}

}  // namespace

OccupancyGrid complete_binary(const TsdfVolume& tsdf, const Completer& completer) {
  OccupancyGrid out = make_empty_like(tsdf);
  switch (completer.strategy) {
    case CompletionStrategy::PartialOnly: {
      for (std::size_t at = 0; at < out.values.size(); ++at) {
        if (occupied_evidence(tsdf, at)) out.values[at] = 1.0f;
      }
      break;
    }
    case CompletionStrategy::MirrorPrior: {
      for (std::size_t at = 0; at < out.values.size(); ++at) {
        if (occupied_evidence(tsdf, at)) out.values[at] = 1.0f;
      }
      union_mirror_y(out);
      break;
    }
    case CompletionStrategy::RevolutionPrior: {
      revolution_prior(tsdf, completer, out);
      break;
    }
    default:
      throw UnknownStrategy("complete: unregistered strategy");
  }
  return out;
}

OccupancyGrid complete(const TsdfVolume& tsdf, const Completer& completer) {
  OccupancyGrid binary = complete_binary(tsdf, completer);
  const int n = binary.resolution;
  OccupancyGrid out = binary;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        int cnt = 0;
        for (int dk = -1; dk <= 1; ++dk) {
          for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
              const int ii = i + di, jj = j + dj, kk = k + dk;
              if (ii < 0 || jj < 0 || kk < 0 || ii >= n || jj >= n || kk >= n) continue;
              acc += binary.value(ii, jj, kk);
              ++cnt;
            }
          }
        }
        out.value(i, j, k) = static_cast<float>(std::clamp(acc / cnt, 0.0, 1.0));
      }
    }
  }
  return out;
}

double sample_trilinear(const OccupancyGrid& grid, const Vec3& p) {
  const int n = grid.resolution;
  const Vec3 u = (p - grid.origin) / grid.voxel_size - Vec3::Constant(0.5);
  constexpr double tol = 1e-9;
  for (int k = 0; k < 3; ++k) {
    if (u[k] < -tol || u[k] > n - 1 + tol) {
      throw OutOfBounds("sample_trilinear: query outside interpolable box");
    }
  }
  const int i0 = std::clamp(static_cast<int>(std::floor(u.x())), 0, n - 2);
  const int j0 = std::clamp(static_cast<int>(std::floor(u.y())), 0, n - 2);
  const int k0 = std::clamp(static_cast<int>(std::floor(u.z())), 0, n - 2);
  const double fx = u.x() - i0, fy = u.y() - j0, fz = u.z() - k0;
  auto v = [&](int di, int dj, int dk) {
    return static_cast<double>(grid.value(i0 + di, j0 + dj, k0 + dk));
  };
  const double c00 = v(0, 0, 0) * (1 - fx) + v(1, 0, 0) * fx;
  const double c10 = v(0, 1, 0) * (1 - fx) + v(1, 1, 0) * fx;
  const double c01 = v(0, 0, 1) * (1 - fx) + v(1, 0, 1) * fx;
  const double c11 = v(0, 1, 1) * (1 - fx) + v(1, 1, 1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

double vertex_confidence(const OccupancyGrid& grid, const Vec3& v) {
  const double h = 0.5 * grid.voxel_size;
  Vec3 g;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 lo = v, hi = v;
    lo[axis] -= h;
    hi[axis] += h;
    g[axis] = (sample_trilinear(grid, hi) - sample_trilinear(grid, lo)) / (2.0 * h);
  }
  return g.norm();
}

}  // namespace graspkit
