#include "segreg/sdm.hpp"

#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "segreg/error.hpp"

namespace segreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas f(q) + (h (p - q))^2 along one line
// (Felzenszwalb & Huttenlocher). Infinite samples contribute no parabola.
void transform_line(const double* f, double* out, int n, double h, int* sites, double* bounds) {
  const double h2 = h * h;
  int count = 0;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double fq = f[q] + h2 * q * q;
    while (count > 0) {
      const int p = sites[count - 1];
      const double s = (fq - (f[p] + h2 * p * p)) / (2.0 * h2 * (q - p));
      if (s > bounds[count - 1]) {
        bounds[count] = s;
        break;
      }
      --count;
    }
    if (count == 0) bounds[0] = -kInf;
    sites[count] = q;
    ++count;
  }
  if (count == 0) {
    for (int p = 0; p < n; ++p) out[p] = kInf;
    return;
  }
  bounds[count] = kInf;
  int k = 0;
  for (int p = 0; p < n; ++p) {
    while (bounds[k + 1] < p) ++k;
    const int q = sites[k];
    const double d = h * (p - q);
    out[p] = f[q] + d * d;
  }
}

void transform_axis(std::vector<double>& data, const Grid& grid, int axis) {
  const int n = grid.dims[axis];
  const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? static_cast<std::size_t>(grid.dims[0])
                                                        : static_cast<std::size_t>(grid.dims[0]) * grid.dims[1]);
  const int a1 = axis == 0 ? 1 : 0;
  const int a2 = axis == 2 ? 1 : 2;
  const int n1 = grid.dims[a1];
  const int n2 = grid.dims[a2];
  const double h = grid.spacing[axis];
  const auto lines = static_cast<std::ptrdiff_t>(n1) * n2;
  SEGREG_PARALLEL_FOR
  for (std::ptrdiff_t line = 0; line < lines; ++line) {
    std::vector<double> f(static_cast<std::size_t>(n));
    std::vector<double> out(static_cast<std::size_t>(n));
    std::vector<int> sites(static_cast<std::size_t>(n));
    std::vector<double> bounds(static_cast<std::size_t>(n) + 1);
    Index3 ijk{0, 0, 0};
    ijk[a1] = static_cast<int>(line % n1);
    ijk[a2] = static_cast<int>(line / n1);
    const std::size_t start = grid.index(ijk[0], ijk[1], ijk[2]);
    for (int p = 0; p < n; ++p) f[static_cast<std::size_t>(p)] = data[start + stride * static_cast<std::size_t>(p)];
    transform_line(f.data(), out.data(), n, h, sites.data(), bounds.data());
    for (int p = 0; p < n; ++p) data[start + stride * static_cast<std::size_t>(p)] = out[static_cast<std::size_t>(p)];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const Grid& grid, const std::vector<bool>& is_site) {
  if (is_site.size() != grid.size()) {
    throw InvalidArgument("squared_distance_transform: site mask does not match grid");
  }
  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = is_site[i] ? 0.0 : kInf;
  for (int axis = 0; axis < 3; ++axis) transform_axis(d, grid, axis);
  return d;
}

Volume signed_distance_map(const Volume& mask) {
  if (mask.kind != VolumeKind::binary_mask) {
    throw InvalidArgument(std::string("signed_distance_map: expected a binary mask, got ") + to_string(mask.kind));
  }
  validate(mask);
  const std::size_t n = mask.values.size();
  std::vector<bool> fg(n);
  std::vector<bool> bg(n);
  std::size_t fg_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    fg[i] = mask.values[i] == 1.0;
    bg[i] = !fg[i];
    fg_count += fg[i] ? 1 : 0;
  }
  if (fg_count == 0) throw InvalidArgument("signed_distance_map: mask has no foreground voxel");
  if (fg_count == n) throw InvalidArgument("signed_distance_map: mask has no background voxel");

  const std::vector<double> to_fg = squared_distance_transform(mask.grid, fg);
  const std::vector<double> to_bg = squared_distance_transform(mask.grid, bg);
  Volume out(mask.grid, VolumeKind::sdm_mm);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = fg[i] ? -std::sqrt(to_bg[i]) : std::sqrt(to_fg[i]);
  }
  return out;
}

}  // namespace segreg
