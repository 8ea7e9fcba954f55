#include "segreg/interpolation.hpp"

#include <cmath>
#include <string>

#include "segreg/error.hpp"
#include "stencil.hpp"

namespace segreg {

namespace {

void require_finite(const Vec3& p) {
  if (!(std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2]))) {
    throw NumericalError("trilinear_sample: non-finite sample point");
  }
}

double apply(const detail::Stencil& s, const std::vector<double>& values) {
  double out = 0.0;
  for (int c = 0; c < 8; ++c) out += s.weight[c] * values[s.index[c]];
  return out;
}

Vec3 spatial_gradient(const detail::Stencil& s, const Volume& volume) {
  double corner[8];
  for (int c = 0; c < 8; ++c) corner[c] = volume.values[s.index[c]];
  Vec3 g = detail::stencil_index_gradient(s, corner);
  for (int a = 0; a < 3; ++a) g[a] /= volume.grid.spacing[a];
  return g;
}

VolumeKind warped_kind(VolumeKind kind) {
  return kind == VolumeKind::binary_mask ? VolumeKind::soft_mask : kind;
}

}  // namespace

double trilinear_sample(const Volume& volume, const Vec3& point) {
  require_finite(point);
  return apply(detail::make_stencil(volume.grid, volume.grid.continuous_index(point)), volume.values);
}

Vec3 trilinear_gradient(const Volume& volume, const Vec3& point) {
  require_finite(point);
  return spatial_gradient(detail::make_stencil(volume.grid, volume.grid.continuous_index(point)), volume);
}

Volume warp(const Volume& volume, const DisplacementField& ddf) {
  validate(ddf);
  Volume out(ddf.grid, warped_kind(volume.kind));
  const Grid& g = ddf.grid;
  const detail::IndexMap map(g, volume.grid);
  detail::for_each_voxel(g, [&](const Index3& ijk, std::size_t flat) {
    const Vec3 c = map(ijk, ddf.vectors[flat]);
    out.values[flat] = apply(detail::make_stencil(volume.grid, c), volume.values);
  });
  if (out.kind == VolumeKind::soft_mask) {
    // Convex weights keep the range; clip rounding noise.
    for (double& x : out.values) x = x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
  }
  return out;
}

std::vector<Vec3> warp_grad(const Volume& volume, const DisplacementField& ddf, std::span<const double> upstream) {
  validate(ddf);
  if (upstream.size() != ddf.grid.size()) {
    throw InvalidArgument("warp_grad: upstream has " + std::to_string(upstream.size()) +
                          " entries, expected " + std::to_string(ddf.grid.size()));
  }
  std::vector<Vec3> grad(ddf.grid.size(), Vec3{0.0, 0.0, 0.0});
  const Grid& g = ddf.grid;
  const detail::IndexMap map(g, volume.grid);
  detail::for_each_voxel(g, [&](const Index3& ijk, std::size_t flat) {
    const double up = upstream[flat];
    if (up == 0.0) return;
    const Vec3 c = map(ijk, ddf.vectors[flat]);
    const Vec3 dg = spatial_gradient(detail::make_stencil(volume.grid, c), volume);
    grad[flat] = up * dg;
  });
  return grad;
}

Volume resample_to_grid(const Volume& volume, const Grid& target, Interpolation method) {
  validate(target);
  Volume out(target, volume.kind);
  const Grid& src = volume.grid;
  const detail::IndexMap map(target, src);
  detail::for_each_voxel(target, [&](const Index3& ijk, std::size_t flat) {
    const Vec3 c = map(ijk);
    if (method == Interpolation::trilinear) {
      out.values[flat] = apply(detail::make_stencil(src, c), volume.values);
    } else {
      int idx[3];
      for (int a = 0; a < 3; ++a) {
        double r = std::floor(c[a] + 0.5);
        if (r < 0.0) r = 0.0;
        if (r > src.dims[a] - 1) r = src.dims[a] - 1;
        idx[a] = static_cast<int>(r);
      }
      out.values[flat] = volume.at(idx[0], idx[1], idx[2]);
    }
  });
  if (volume.kind == VolumeKind::binary_mask && method == Interpolation::trilinear) {
    return binarize(out);
  }
  return out;
}

Volume binarize(const Volume& volume, double threshold) {
  Volume out(volume.grid, VolumeKind::binary_mask);
  for (std::size_t i = 0; i < volume.values.size(); ++i) {
    out.values[i] = volume.values[i] >= threshold ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace segreg
