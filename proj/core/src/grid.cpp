#include "segreg/grid.hpp"

#include <cmath>
#include <string>

#include "segreg/error.hpp"

namespace segreg {

Grid::Grid(Index3 dims_in, Vec3 spacing_in, Vec3 origin_in)
    : dims(dims_in), spacing(spacing_in), origin(origin_in) {
  validate(*this);
}

Index3 Grid::unravel(std::size_t flat) const {
  const auto nx = static_cast<std::size_t>(dims[0]);
  const auto ny = static_cast<std::size_t>(dims[1]);
  const auto i = static_cast<int>(flat % nx);
  flat /= nx;
  return {i, static_cast<int>(flat % ny), static_cast<int>(flat / ny)};
}

Vec3 Grid::world(std::size_t flat) const {
  const Index3 ijk = unravel(flat);
  return world(ijk[0], ijk[1], ijk[2]);
}

Vec3 Grid::continuous_index(const Vec3& point) const {
  return {(point[0] - origin[0]) / spacing[0], (point[1] - origin[1]) / spacing[1],
          (point[2] - origin[2]) / spacing[2]};
}

Vec3 Grid::center() const {
  return {origin[0] + 0.5 * (dims[0] - 1) * spacing[0], origin[1] + 0.5 * (dims[1] - 1) * spacing[1],
          origin[2] + 0.5 * (dims[2] - 1) * spacing[2]};
}

Vec3 Grid::extent() const {
  return {dims[0] * spacing[0], dims[1] * spacing[1], dims[2] * spacing[2]};
}

void validate(const Grid& grid) {
  for (int a = 0; a < 3; ++a) {
    if (grid.dims[a] < 1) {
      throw InvalidArgument("grid: dimension " + std::to_string(a) + " must be >= 1, got " +
                            std::to_string(grid.dims[a]));
    }
    if (!(std::isfinite(grid.spacing[a]) && grid.spacing[a] > 0.0)) {
      throw InvalidArgument("grid: spacing " + std::to_string(a) + " must be positive and finite");
    }
    if (!std::isfinite(grid.origin[a])) {
      throw InvalidArgument("grid: origin must be finite");
    }
  }
}

bool same_geometry(const Grid& a, const Grid& b) {
  constexpr double tol = 1e-9;
  for (int i = 0; i < 3; ++i) {
    if (a.dims[i] != b.dims[i]) return false;
    if (std::abs(a.spacing[i] - b.spacing[i]) > tol) return false;
    if (std::abs(a.origin[i] - b.origin[i]) > tol) return false;
  }
  return true;
}

const char* to_string(VolumeKind kind) {
  switch (kind) {
    case VolumeKind::intensity:
      return "intensity";
    case VolumeKind::soft_mask:
      return "soft-mask";
    case VolumeKind::binary_mask:
      return "binary-mask";
    case VolumeKind::sdm_mm:
      return "sdm-mm";
  }
  return "unknown";
}

Volume::Volume(Grid grid_in, VolumeKind kind_in, double fill)
    : grid(grid_in), kind(kind_in), values(grid_in.size(), fill) {}

Volume::Volume(Grid grid_in, VolumeKind kind_in, std::vector<double> values_in)
    : grid(grid_in), kind(kind_in), values(std::move(values_in)) {
  if (values.size() != grid.size()) {
    throw InvalidArgument("volume: " + std::to_string(values.size()) + " values for a grid of " +
                          std::to_string(grid.size()) + " voxels");
  }
}

double Volume::sum() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

void validate(const Volume& volume) {
  validate(volume.grid);
  if (volume.values.size() != volume.grid.size()) {
    throw InvalidArgument("volume: value count does not match grid");
  }
  for (double v : volume.values) {
    if (!std::isfinite(v)) throw NumericalError("volume: non-finite value");
    if (volume.kind == VolumeKind::binary_mask && v != 0.0 && v != 1.0) {
      throw InvalidArgument("volume: binary mask holds a value outside {0, 1}");
    }
    if (volume.kind == VolumeKind::soft_mask && (v < 0.0 || v > 1.0)) {
      throw InvalidArgument("volume: soft mask holds a value outside [0, 1]");
    }
  }
}

DisplacementField::DisplacementField(Grid grid_in, Vec3 fill) : grid(grid_in), vectors(grid_in.size(), fill) {}

DisplacementField::DisplacementField(Grid grid_in, std::vector<Vec3> vectors_in)
    : grid(grid_in), vectors(std::move(vectors_in)) {
  if (vectors.size() != grid.size()) {
    throw InvalidArgument("displacement field: vector count does not match grid");
  }
}

DisplacementField& DisplacementField::operator+=(const DisplacementField& other) {
  if (!same_geometry(grid, other.grid)) {
    throw InvalidArgument("displacement field: cannot add fields on different grids");
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) vectors[i] = vectors[i] + other.vectors[i];
  return *this;
}

void validate(const DisplacementField& field) {
  validate(field.grid);
  if (field.vectors.size() != field.grid.size()) {
    throw InvalidArgument("displacement field: vector count does not match grid");
  }
  for (const Vec3& u : field.vectors) {
    if (!(std::isfinite(u[0]) && std::isfinite(u[1]) && std::isfinite(u[2]))) {
      throw NumericalError("displacement field: non-finite component");
    }
  }
}

static_assert(sizeof(Vec3) == 3 * sizeof(double));

std::span<double> flat_view(std::vector<Vec3>& vectors) {
  return {vectors.empty() ? nullptr : vectors.front().data(), 3 * vectors.size()};
}

std::span<const double> flat_view(const std::vector<Vec3>& vectors) {
  return {vectors.empty() ? nullptr : vectors.front().data(), 3 * vectors.size()};
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

}  // namespace segreg
