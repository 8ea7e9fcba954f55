#pragma once

#include "segreg/grid.hpp"
#include "segreg/interpolation.hpp"

namespace segreg {

inline constexpr Index3 kDefaultTargetDims{96, 96, 80};
inline constexpr double kDefaultTargetSpacing = 0.88;

/// Value-weighted mean of voxel-center world positions. Throws
/// InvalidArgument for intensity/SDM volumes and for zero total mass.
Vec3 center_of_mass(const Volume& mask);

/// Cropping grid of the given size centered on `reference`'s world center.
Grid centered_target_grid(const Grid& reference, Index3 dims, Vec3 spacing);

/// Resamples `volume` onto `target` after shifting it by `translation`
/// (out(x) = volume(x - translation)). Binary masks are binarized at 0.5.
Volume translate_and_resample(const Volume& volume, const Vec3& translation, const Grid& target);

struct PrealignResult {
  Vec3 translation{};
  Volume moving_out;
  Volume moving_mask_out;
  Volume fixed_out;
  Volume fixed_mask_out;
};

/// Translation-only coarse alignment: moves the moving mask's center of
/// mass onto the center of a target grid that is itself centered on the
/// fixed grid, then resamples all four volumes onto that target grid.
PrealignResult coarse_align(const Volume& moving, const Volume& moving_mask, const Volume& fixed,
                            const Volume& fixed_mask, Index3 target_dims = kDefaultTargetDims,
                            Vec3 target_spacing = {kDefaultTargetSpacing, kDefaultTargetSpacing,
                                                   kDefaultTargetSpacing});

}  // namespace segreg
