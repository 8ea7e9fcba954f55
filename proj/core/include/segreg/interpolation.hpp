#pragma once

#include <span>
#include <vector>

#include "segreg/grid.hpp"

namespace segreg {

enum class Interpolation { trilinear, nearest };

/// Trilinear interpolation of the 8 voxel centers around `point`.
/// Continuous indices outside [0, dim - 1] are clamped per axis first, so
/// out-of-bounds queries return edge values. Throws NumericalError for a
/// non-finite point.
double trilinear_sample(const Volume& volume, const Vec3& point);

/// Spatial gradient (per mm) of the trilinear interpolant at `point`.
/// The derivative is zero along any axis where the query is clamped or the
/// grid has a single voxel.
Vec3 trilinear_gradient(const Volume& volume, const Vec3& point);

/// Backward warp: out(v) = sample(volume, world(v) + ddf(v)) on ddf.grid.
/// Binary masks come back as soft masks; other kinds are kept.
Volume warp(const Volume& volume, const DisplacementField& ddf);

/// Reverse-mode derivative of sum_v upstream(v) * warp(volume, ddf)(v)
/// with respect to every ddf(v).
std::vector<Vec3> warp_grad(const Volume& volume, const DisplacementField& ddf,
                            std::span<const double> upstream);

/// Samples `volume` at every voxel center of `target`. Binary masks
/// resampled trilinearly are re-binarized at 0.5 and stay binary.
Volume resample_to_grid(const Volume& volume, const Grid& target, Interpolation method);

/// value >= threshold -> 1, else 0; result kind is binary_mask.
Volume binarize(const Volume& volume, double threshold = 0.5);

}  // namespace segreg
