#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace segreg {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Axis-aligned voxel lattice. Values live at voxel centers and
/// world(i, j, k) = origin + (i, j, k) * spacing, all in millimeters.
struct Grid {
  Index3 dims{1, 1, 1};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};

  Grid() = default;
  /// Throws InvalidArgument when a dimension is < 1 or a spacing is not a
  /// positive finite number.
  Grid(Index3 dims, Vec3 spacing, Vec3 origin = {0.0, 0.0, 0.0});

  std::size_t size() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }

  // x fastest.
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(k));
  }

  Index3 unravel(std::size_t flat) const;

  Vec3 world(int i, int j, int k) const {
    return {origin[0] + i * spacing[0], origin[1] + j * spacing[1], origin[2] + k * spacing[2]};
  }
  Vec3 world(std::size_t flat) const;

  /// Fractional voxel index of a world point (no clamping).
  Vec3 continuous_index(const Vec3& point) const;

  /// World position of the geometric center of the voxel-center lattice.
  Vec3 center() const;

  /// Physical size dims * spacing.
  Vec3 extent() const;

  bool operator==(const Grid&) const = default;
};

/// Throws InvalidArgument if `grid` breaks the Grid invariants.
void validate(const Grid& grid);

/// Grids match when dims agree exactly and spacing/origin agree to 1e-9 mm.
bool same_geometry(const Grid& a, const Grid& b);

enum class VolumeKind { intensity, soft_mask, binary_mask, sdm_mm };

const char* to_string(VolumeKind kind);

/// Scalar field on a grid. Images, masks and signed distance maps all use
/// this type and are told apart by `kind`.
struct Volume {
  Grid grid;
  VolumeKind kind = VolumeKind::intensity;
  std::vector<double> values;

  Volume() = default;
  Volume(Grid grid, VolumeKind kind, double fill = 0.0);
  Volume(Grid grid, VolumeKind kind, std::vector<double> values);

  double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }

  double sum() const;
};

/// Checks the size and value-range invariants implied by `kind`.
void validate(const Volume& volume);

/// Per-voxel displacement in millimeters. The transform it encodes maps a
/// fixed-grid voxel center x to the moving-image point x + u(x).
struct DisplacementField {
  Grid grid;
  std::vector<Vec3> vectors;

  DisplacementField() = default;
  explicit DisplacementField(Grid grid, Vec3 fill = {0.0, 0.0, 0.0});
  DisplacementField(Grid grid, std::vector<Vec3> vectors);

  Vec3& at(int i, int j, int k) { return vectors[grid.index(i, j, k)]; }
  const Vec3& at(int i, int j, int k) const { return vectors[grid.index(i, j, k)]; }

  DisplacementField& operator+=(const DisplacementField& other);
};

/// Throws InvalidArgument on size mismatch and NumericalError on
/// non-finite components.
void validate(const DisplacementField& field);

// Views of a Vec3 array as 3n contiguous doubles.
std::span<double> flat_view(std::vector<Vec3>& vectors);
std::span<const double> flat_view(const std::vector<Vec3>& vectors);

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double norm(const Vec3& v);

}  // namespace segreg
