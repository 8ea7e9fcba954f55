#pragma once

#include <span>

#include "segreg/grid.hpp"

namespace segreg {

/// Percentile with linear interpolation between order statistics
/// (rank = p/100 * (n - 1)). p in (0, 100].
double percentile(std::span<const double> values, double p);

/// clamp(v / q, 0, 1) with q the `pct` percentile of all voxels; an all-zero
/// (q == 0) volume maps to zeros. Throws InvalidArgument for negative
/// intensities or pct outside (0, 100].
Volume normalize_intensity(const Volume& volume, double pct = 99.0);

}  // namespace segreg
