#pragma once

#include <span>
#include <vector>

#include "segreg/grid.hpp"

namespace segreg {

/// Normalized sampled Gaussian exp(-k^2 / 2 sigma^2), k = -r..r with
/// r = ceil(3 sigma). sigma is in voxels and must be > 0.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur. sigma == 0 returns the input unchanged. Near the
/// borders the truncated kernel is renormalized, so constants are preserved.
/// Output kind is soft_mask for mask inputs, otherwise unchanged.
/// Throws InvalidArgument for negative sigma.
Volume gaussian_smooth(const Volume& volume, double sigma);

/// Same filter on a raw array laid out on `grid`.
std::vector<double> gaussian_smooth(const Grid& grid, std::span<const double> values, double sigma);

/// Exact transpose of the filter above (it is not self-adjoint because of
/// the border renormalization).
std::vector<double> gaussian_smooth_adjoint(const Grid& grid, std::span<const double> upstream,
                                            double sigma);

}  // namespace segreg
