#include "segreg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "segreg/error.hpp"

namespace segreg {

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw InvalidArgument("percentile: no values");
  if (!(p > 0.0 && p <= 100.0)) throw InvalidArgument("percentile: p must lie in (0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Volume normalize_intensity(const Volume& volume, double pct) {
  for (double v : volume.values) {
    if (!(v >= 0.0)) throw InvalidArgument("normalize_intensity: intensities must be finite and >= 0");
  }
  const double q = percentile(volume.values, pct);
  Volume out(volume.grid, VolumeKind::intensity);
  if (q == 0.0) return out;
  for (std::size_t i = 0; i < volume.values.size(); ++i) {
    out.values[i] = std::clamp(volume.values[i] / q, 0.0, 1.0);
  }
  return out;
}

}  // namespace segreg
