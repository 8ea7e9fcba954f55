#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "parallel.hpp"

#include "segreg/grid.hpp"

namespace segreg::detail {

// Interpolation cell along one axis. `active` is false when the query was
// clamped or the axis is degenerate; the interpolant is flat there.
struct AxisCell {
  int lo = 0;
  int hi = 0;
  double frac = 0.0;
  bool active = false;
};

inline AxisCell axis_cell(double c, int n) {
  if (n == 1) return {};
  AxisCell cell;
  cell.active = c >= 0.0 && c <= static_cast<double>(n - 1);
  if (c < 0.0) c = 0.0;
  if (c > n - 1) c = n - 1;
  int lo = static_cast<int>(std::floor(c));
  if (lo > n - 2) lo = n - 2;
  cell.lo = lo;
  cell.hi = lo + 1;
  cell.frac = c - lo;
  return cell;
}

// Eight corner indices and weights; corner bit 0 selects x.hi, bit 1 y.hi,
// bit 2 z.hi.
struct Stencil {
  AxisCell cell[3];
  std::size_t index[8];
  double weight[8];
};

inline void fill_stencil(const Grid& grid, Stencil& s) {
  const double fx = s.cell[0].frac;
  const double fy = s.cell[1].frac;
  const double fz = s.cell[2].frac;
  const double wx[2] = {1.0 - fx, fx};
  const double wy[2] = {1.0 - fy, fy};
  const double wz[2] = {1.0 - fz, fz};
  const int ix[2] = {s.cell[0].lo, s.cell[0].hi};
  const int iy[2] = {s.cell[1].lo, s.cell[1].hi};
  const int iz[2] = {s.cell[2].lo, s.cell[2].hi};
  for (int c = 0; c < 8; ++c) {
    const int bx = c & 1;
    const int by = (c >> 1) & 1;
    const int bz = (c >> 2) & 1;
    s.index[c] = grid.index(ix[bx], iy[by], iz[bz]);
    s.weight[c] = wx[bx] * wy[by] * wz[bz];
  }
}

inline Stencil make_stencil(const Grid& grid, const Vec3& continuous) {
  Stencil s;
  for (int a = 0; a < 3; ++a) s.cell[a] = axis_cell(continuous[a], grid.dims[a]);
  fill_stencil(grid, s);
  return s;
}

// d(interpolant)/d(continuous index) given the 8 corner values.
inline Vec3 stencil_index_gradient(const Stencil& s, const double* corner) {
  const double fx = s.cell[0].frac;
  const double fy = s.cell[1].frac;
  const double fz = s.cell[2].frac;
  const double wx[2] = {1.0 - fx, fx};
  const double wy[2] = {1.0 - fy, fy};
  const double wz[2] = {1.0 - fz, fz};
  // Corner index c = bx + 2 by + 4 bz. Differencing before weighting keeps
  // constant data at an exact zero gradient.
  const double* v = corner;
  Vec3 g;
  g[0] = wy[0] * wz[0] * (v[1] - v[0]) + wy[1] * wz[0] * (v[3] - v[2]) + wy[0] * wz[1] * (v[5] - v[4]) +
         wy[1] * wz[1] * (v[7] - v[6]);
  g[1] = wx[0] * wz[0] * (v[2] - v[0]) + wx[1] * wz[0] * (v[3] - v[1]) + wx[0] * wz[1] * (v[6] - v[4]) +
         wx[1] * wz[1] * (v[7] - v[5]);
  g[2] = wx[0] * wy[0] * (v[4] - v[0]) + wx[1] * wy[0] * (v[5] - v[1]) + wx[0] * wy[1] * (v[6] - v[2]) +
         wx[1] * wy[1] * (v[7] - v[3]);
  for (int a = 0; a < 3; ++a) {
    if (!s.cell[a].active) g[a] = 0.0;
  }
  return g;
}

// Maps voxel indices of a destination grid (plus an optional mm offset) to
// continuous indices of a source grid without a round trip through world
// coordinates, so identical grids map integer indices to themselves exactly.
struct IndexMap {
  Vec3 offset;
  Vec3 ratio;
  Vec3 spacing;

  IndexMap(const Grid& destination, const Grid& source) {
    for (int a = 0; a < 3; ++a) {
      offset[a] = (destination.origin[a] - source.origin[a]) / source.spacing[a];
      ratio[a] = destination.spacing[a] / source.spacing[a];
      spacing[a] = source.spacing[a];
    }
  }

  Vec3 operator()(const Index3& ijk) const {
    return {offset[0] + ijk[0] * ratio[0], offset[1] + ijk[1] * ratio[1], offset[2] + ijk[2] * ratio[2]};
  }

  Vec3 operator()(const Index3& ijk, const Vec3& displacement_mm) const {
    return {offset[0] + ijk[0] * ratio[0] + displacement_mm[0] / spacing[0],
            offset[1] + ijk[1] * ratio[1] + displacement_mm[1] / spacing[1],
            offset[2] + ijk[2] * ratio[2] + displacement_mm[2] / spacing[2]};
  }
};

// Calls f(ijk, flat) for every voxel, z slices in parallel.
template <class F>
void for_each_voxel(const Grid& grid, F&& f) {
  const int nx = grid.dims[0];
  const int ny = grid.dims[1];
  const int nz = grid.dims[2];
  SEGREG_PARALLEL_FOR
  for (int k = 0; k < nz; ++k) {
    std::size_t flat = static_cast<std::size_t>(k) * ny * nx;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i, ++flat) f(Index3{i, j, k}, flat);
    }
  }
}

// Per-axis interpolation cells for a displacement-free resampling; the
// trilinear weights factor across axes.
struct SeparableCells {
  std::vector<AxisCell> axis[3];

  SeparableCells(const Grid& destination, const Grid& source) {
    const IndexMap map(destination, source);
    for (int a = 0; a < 3; ++a) {
      axis[a].resize(static_cast<std::size_t>(destination.dims[a]));
      for (int i = 0; i < destination.dims[a]; ++i) {
        axis[a][static_cast<std::size_t>(i)] = axis_cell(map.offset[a] + i * map.ratio[a], source.dims[a]);
      }
    }
  }

  Stencil stencil(const Grid& source, const Index3& ijk) const {
    Stencil s;
    for (int a = 0; a < 3; ++a) s.cell[a] = axis[a][static_cast<std::size_t>(ijk[a])];
    fill_stencil(source, s);
    return s;
  }
};

}  // namespace segreg::detail
