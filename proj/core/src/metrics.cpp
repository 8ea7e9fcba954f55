#include "segreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "segreg/error.hpp"
#include "segreg/interpolation.hpp"
#include "segreg/prealign.hpp"

namespace segreg {

double dice_binary(const Volume& p, const Volume& g) {
  if (!same_geometry(p.grid, g.grid)) throw InvalidArgument("dice_binary: inputs are on different grids");
  std::size_t both = 0;
  std::size_t np = 0;
  std::size_t ng = 0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const bool a = p.values[i] > 0.5;
    const bool b = g.values[i] > 0.5;
    np += a;
    ng += b;
    both += a && b;
  }
  if (np + ng == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(np + ng);
}

RegionBounds region_bounds(const Volume& mask) {
  const Grid& g = mask.grid;
  int z_min = g.dims[2];
  int z_max = -1;
  for (int k = 0; k < g.dims[2]; ++k) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int i = 0; i < g.dims[0]; ++i) {
        if (mask.at(i, j, k) > 0.5) {
          z_min = std::min(z_min, k);
          z_max = std::max(z_max, k);
        }
      }
    }
  }
  if (z_max < 0) throw InvalidArgument("region_bounds: mask is empty");
  const int n = z_max - z_min + 1;
  return {z_min, z_max, z_min + n / 3, z_min + (2 * n) / 3};
}

RegionSplit split_by_bounds(const Volume& mask, const RegionBounds& bounds) {
  const Grid& g = mask.grid;
  RegionSplit r{Volume(g, VolumeKind::binary_mask), Volume(g, VolumeKind::binary_mask),
                Volume(g, VolumeKind::binary_mask)};
  for (int k = 0; k < g.dims[2]; ++k) {
    Volume& part = k < bounds.cut1 ? r.base : (k < bounds.cut2 ? r.mid : r.apex);
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int i = 0; i < g.dims[0]; ++i) {
        part.at(i, j, k) = mask.at(i, j, k) > 0.5 ? 1.0 : 0.0;
      }
    }
  }
  return r;
}

RegionSplit region_split(const Volume& mask) { return split_by_bounds(mask, region_bounds(mask)); }

double tre(const LandmarkSet& moving, const LandmarkSet& fixed, const DisplacementField& ddf) {
  std::map<std::string, const Volume*> fixed_by_id;
  for (const Landmark& lm : fixed) {
    if (!fixed_by_id.emplace(lm.id, &lm.mask).second) {
      throw InvalidArgument("tre: duplicate fixed landmark id '" + lm.id + "'");
    }
  }
  if (moving.size() != fixed.size()) throw InvalidArgument("tre: landmark sets have different sizes");
  if (moving.empty()) throw InvalidArgument("tre: no landmarks");
  std::map<std::string, bool> seen;
  double acc = 0.0;
  for (const Landmark& lm : moving) {
    const auto it = fixed_by_id.find(lm.id);
    if (it == fixed_by_id.end()) throw InvalidArgument("tre: moving landmark '" + lm.id + "' has no fixed pair");
    if (!seen.emplace(lm.id, true).second) throw InvalidArgument("tre: duplicate moving landmark id '" + lm.id + "'");
    const Volume warped = warp(lm.mask, ddf);
    if (!(warped.sum() > 0.0)) {
      throw InvalidArgument("tre: landmark '" + lm.id + "' has zero mass after warping");
    }
    acc += norm(center_of_mass(warped) - center_of_mass(*it->second));
  }
  return acc / static_cast<double>(moving.size());
}

std::vector<double> jacobian_determinant(const DisplacementField& ddf) {
  const Grid& g = ddf.grid;
  for (int a = 0; a < 3; ++a) {
    if (g.dims[a] < 3) throw InvalidArgument("jacobian: every axis needs at least 3 voxels");
  }
  const std::ptrdiff_t step[3] = {1, g.dims[0], static_cast<std::ptrdiff_t>(g.dims[0]) * g.dims[1]};
  std::vector<double> det(g.size(), 1.0);
  for (int k = 1; k < g.dims[2] - 1; ++k) {
    for (int j = 1; j < g.dims[1] - 1; ++j) {
      for (int i = 1; i < g.dims[0] - 1; ++i) {
        const auto v = static_cast<std::ptrdiff_t>(g.index(i, j, k));
        double m[3][3];
        for (int a = 0; a < 3; ++a) {
          const Vec3& up = ddf.vectors[static_cast<std::size_t>(v + step[a])];
          const Vec3& dn = ddf.vectors[static_cast<std::size_t>(v - step[a])];
          for (int c = 0; c < 3; ++c) m[c][a] = (up[c] - dn[c]) / (2.0 * g.spacing[a]) + (c == a ? 1.0 : 0.0);
        }
        det[static_cast<std::size_t>(v)] = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                                           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                                           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
      }
    }
  }
  return det;
}

JacobianStats jacobian_grad_stat(const DisplacementField& ddf) {
  const Grid& g = ddf.grid;
  const std::vector<double> det = jacobian_determinant(ddf);
  const std::ptrdiff_t step[3] = {1, g.dims[0], static_cast<std::ptrdiff_t>(g.dims[0]) * g.dims[1]};

  JacobianStats stats;
  std::size_t interior = 0;
  std::size_t folded = 0;
  for (int k = 1; k < g.dims[2] - 1; ++k) {
    for (int j = 1; j < g.dims[1] - 1; ++j) {
      for (int i = 1; i < g.dims[0] - 1; ++i) {
        ++interior;
        if (det[g.index(i, j, k)] <= 0.0) ++folded;
      }
    }
  }
  stats.folding_fraction = static_cast<double>(folded) / static_cast<double>(interior);

  double acc = 0.0;
  std::size_t count = 0;
  for (int k = 2; k < g.dims[2] - 2; ++k) {
    for (int j = 2; j < g.dims[1] - 2; ++j) {
      for (int i = 2; i < g.dims[0] - 2; ++i) {
        const auto v = static_cast<std::ptrdiff_t>(g.index(i, j, k));
        double sq = 0.0;
        for (int a = 0; a < 3; ++a) {
          const double d = (det[static_cast<std::size_t>(v + step[a])] - det[static_cast<std::size_t>(v - step[a])]) /
                           (2.0 * g.spacing[a]);
          sq += d * d;
        }
        acc += std::sqrt(sq);
        ++count;
      }
    }
  }
  stats.jac_grad = count > 0 ? acc / static_cast<double>(count) : 0.0;
  return stats;
}

MetricsReport evaluate_registration(const Volume& moving_mask, const Volume& fixed_mask,
                                    const DisplacementField& ddf, const LandmarkSet* moving_landmarks,
                                    const LandmarkSet* fixed_landmarks) {
  MetricsReport m;
  const Volume warped = binarize(warp(moving_mask, ddf));
  m.dsc_whole = dice_binary(warped, fixed_mask);
  const RegionBounds bounds = region_bounds(fixed_mask);
  const RegionSplit w = split_by_bounds(warped, bounds);
  const RegionSplit f = split_by_bounds(fixed_mask, bounds);
  m.dsc_base = dice_binary(w.base, f.base);
  m.dsc_mid = dice_binary(w.mid, f.mid);
  m.dsc_apex = dice_binary(w.apex, f.apex);
  if (moving_landmarks != nullptr && fixed_landmarks != nullptr && !moving_landmarks->empty()) {
    m.tre_mm = tre(*moving_landmarks, *fixed_landmarks, ddf);
  }
  const JacobianStats j = jacobian_grad_stat(ddf);
  m.jac_grad = j.jac_grad;
  m.folding_fraction = j.folding_fraction;
  return m;
}

}  // namespace segreg
