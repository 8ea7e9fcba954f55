#pragma once

#include "segreg/grid.hpp"

namespace segreg {

/// Exact Euclidean signed distance map in mm. Each voxel gets the distance
/// from its center to the nearest voxel center of the opposite class,
/// negated inside the foreground (so no voxel is ever 0). Uses a separable
/// lower-envelope transform that honors anisotropic spacing.
///
/// Throws InvalidArgument unless `mask` is binary with at least one
/// foreground and one background voxel.
Volume signed_distance_map(const Volume& mask);

/// Squared Euclidean distance (mm^2) from every voxel center to the nearest
/// voxel center where `is_site` is true; +inf everywhere if there are none.
std::vector<double> squared_distance_transform(const Grid& grid, const std::vector<bool>& is_site);

}  // namespace segreg
