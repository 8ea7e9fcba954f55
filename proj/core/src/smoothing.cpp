#include "segreg/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "segreg/error.hpp"

namespace segreg {

namespace {

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("gaussian_smooth: sigma must be a finite value >= 0, got " + std::to_string(sigma));
  }
}

enum class Pass { forward, adjoint };

// One 1D pass along `axis`. The forward filter is
//   y[i] = sum_k w[k] x[i + k] / Z(i),   Z(i) = sum of in-bounds w[k],
// and its transpose is the unnormalized filter applied to x / Z.
// The volume is viewed as [outer][n][inner] with inner contiguous, so each
// output row is a weighted sum of whole input rows.
void filter_axis(std::vector<double>& data, std::vector<double>& scratch, const Grid& grid, int axis,
                 const std::vector<double>& kernel, Pass pass) {
  const int n = grid.dims[axis];
  const int r = static_cast<int>(kernel.size() / 2);
  std::size_t inner = 1;
  for (int a = 0; a < axis; ++a) inner *= static_cast<std::size_t>(grid.dims[a]);
  const std::size_t outer = data.size() / (inner * static_cast<std::size_t>(n));

  std::vector<double> inv_norm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double z = 0.0;
    for (int k = -r; k <= r; ++k) {
      if (i + k >= 0 && i + k < n) z += kernel[static_cast<std::size_t>(k + r)];
    }
    inv_norm[static_cast<std::size_t>(i)] = 1.0 / z;
  }
  // coef(i, j) for |i - j| <= r, stored row-major with width 2r + 1.
  const int width = 2 * r + 1;
  std::vector<double> coef(static_cast<std::size_t>(n) * width, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - r); j <= std::min(n - 1, i + r); ++j) {
      const double w = kernel[static_cast<std::size_t>(j - i + r)];
      coef[static_cast<std::size_t>(i) * width + (j - i + r)] =
          pass == Pass::forward ? w * inv_norm[static_cast<std::size_t>(i)] : w * inv_norm[static_cast<std::size_t>(j)];
    }
  }

  scratch.assign(data.begin(), data.end());
  const std::size_t block = inner * static_cast<std::size_t>(n);

  if (inner == 1) {
    const auto lines = static_cast<std::ptrdiff_t>(outer);
    SEGREG_PARALLEL_FOR
    for (std::ptrdiff_t line = 0; line < lines; ++line) {
      const double* in = scratch.data() + static_cast<std::size_t>(line) * block;
      double* out = data.data() + static_cast<std::size_t>(line) * block;
      for (int i = 0; i < n; ++i) {
        const int j0 = std::max(0, i - r);
        const int j1 = std::min(n - 1, i + r);
        const double* c = coef.data() + static_cast<std::size_t>(i) * width + (r - i);
        double acc = 0.0;
        for (int j = j0; j <= j1; ++j) acc += c[j] * in[j];
        out[i] = acc;
      }
    }
    return;
  }

  const auto rows = static_cast<std::ptrdiff_t>(outer) * n;
  SEGREG_PARALLEL_FOR
  for (std::ptrdiff_t row = 0; row < rows; ++row) {
    const auto o = static_cast<std::size_t>(row / n);
    const int i = static_cast<int>(row % n);
    const double* in = scratch.data() + o * block;
    double* out = data.data() + o * block + static_cast<std::size_t>(i) * inner;
    const int j0 = std::max(0, i - r);
    const int j1 = std::min(n - 1, i + r);
    const double* c = coef.data() + static_cast<std::size_t>(i) * width + (r - i);
    for (std::size_t x = 0; x < inner; ++x) out[x] = 0.0;
    for (int j = j0; j <= j1; ++j) {
      const double w = c[j];
      const double* src = in + static_cast<std::size_t>(j) * inner;
      for (std::size_t x = 0; x < inner; ++x) out[x] += w * src[x];
    }
  }
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma) {
  check_sigma(sigma);
  if (sigma == 0.0) throw InvalidArgument("gaussian_kernel: sigma must be > 0");
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> w(static_cast<std::size_t>(2 * r + 1));
  double total = 0.0;
  for (int k = -r; k <= r; ++k) {
    const double x = std::exp(-0.5 * (k * k) / (sigma * sigma));
    w[static_cast<std::size_t>(k + r)] = x;
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> gaussian_smooth(const Grid& grid, std::span<const double> values, double sigma) {
  check_sigma(sigma);
  if (values.size() != grid.size()) throw InvalidArgument("gaussian_smooth: value count does not match grid");
  std::vector<double> out(values.begin(), values.end());
  if (sigma == 0.0) return out;
  const std::vector<double> kernel = gaussian_kernel(sigma);
  std::vector<double> scratch;
  for (int axis = 0; axis < 3; ++axis) filter_axis(out, scratch, grid, axis, kernel, Pass::forward);
  return out;
}

std::vector<double> gaussian_smooth_adjoint(const Grid& grid, std::span<const double> upstream, double sigma) {
  check_sigma(sigma);
  if (upstream.size() != grid.size()) {
    throw InvalidArgument("gaussian_smooth_adjoint: value count does not match grid");
  }
  std::vector<double> out(upstream.begin(), upstream.end());
  if (sigma == 0.0) return out;
  const std::vector<double> kernel = gaussian_kernel(sigma);
  std::vector<double> scratch;
  for (int axis = 2; axis >= 0; --axis) filter_axis(out, scratch, grid, axis, kernel, Pass::adjoint);
  return out;
}

Volume gaussian_smooth(const Volume& volume, double sigma) {
  check_sigma(sigma);
  if (sigma == 0.0) return volume;
  const bool is_mask = volume.kind == VolumeKind::binary_mask || volume.kind == VolumeKind::soft_mask;
  return Volume(volume.grid, is_mask ? VolumeKind::soft_mask : volume.kind,
                gaussian_smooth(volume.grid, volume.values, sigma));
}

}  // namespace segreg
