#pragma once

#include <span>
#include <vector>

#include "segreg/grid.hpp"

namespace segreg {

inline constexpr int kDefaultPyramidLevels = 5;

/// Grid of level `level` (0 = coarsest) in an `levels`-deep dyadic pyramid
/// over `base`: extents ceil(dims / 2^s), spacing * 2^s, same origin, with
/// s = levels - 1 - level.
Grid pyramid_level_grid(const Grid& base, int levels, int level);

/// Multi-resolution displacement parameterization. Level fields are summed
/// coarse to fine after trilinear upsampling; all values are in mm so no
/// rescaling happens between levels.
struct DdfPyramid {
  Grid base_grid;
  std::vector<DisplacementField> levels;  // coarsest first

  static DdfPyramid zeros(const Grid& base, int levels = kDefaultPyramidLevels);

  int depth() const { return static_cast<int>(levels.size()); }
};

/// Throws InvalidArgument unless every level sits on pyramid_level_grid().
void validate(const DdfPyramid& pyramid);

/// Trilinear resampling of each component onto `target`. Throws
/// InvalidArgument if `target` is coarser than the source on any axis.
DisplacementField upsample_ddf(const DisplacementField& coarse, const Grid& target);

/// Transpose of upsample_ddf: scatters per-voxel gradients on `target`
/// back onto the `coarse` grid.
std::vector<Vec3> upsample_ddf_adjoint(const Grid& coarse, const Grid& target,
                                       std::span<const Vec3> upstream);

/// Full-resolution displacement on pyramid.base_grid.
DisplacementField compose_pyramid(const DdfPyramid& pyramid);

/// Gradient of a scalar with respect to every level field, given its
/// gradient `upstream` with respect to the composed field. Result is
/// indexed like pyramid.levels.
std::vector<std::vector<Vec3>> compose_pyramid_grad(const DdfPyramid& pyramid,
                                                    std::span<const Vec3> upstream);

}  // namespace segreg
