#pragma once

#include <array>
#include <cstdint>

#include "segreg/grid.hpp"
#include "segreg/metrics.hpp"

namespace segreg {

using Mat3 = std::array<Vec3, 3>;  // row-major

inline constexpr Mat3 kIdentity3{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

struct PhantomSpec {
  Index3 dims{96, 96, 80};
  Vec3 spacing{0.88, 0.88, 0.88};
  Vec3 semi_axes{28.0, 24.0, 21.0};  // mm
  // Deterministic affine part about the grid center: u_aff(x) = (A - I)(x - c) + t.
  Mat3 affine = kIdentity3;
  Vec3 translation{0.0, 0.0, 0.0};
  // Seeded perturbations added on top of `affine` / `translation`.
  double affine_jitter = 0.03;
  double translation_jitter_mm = 2.0;
  int bump_count = 4;
  double bump_amplitude = 4.0;  // mm
  double bump_sigma = 10.0;     // mm
  int landmark_count = 3;
  double landmark_radius = 2.5;  // mm
  std::uint64_t seed = 0;
};

void validate(const PhantomSpec& spec);

struct PhantomPair {
  Volume fixed_mask;
  Volume moving_mask;
  DisplacementField true_ddf;
  LandmarkSet moving_landmarks;
  LandmarkSet fixed_landmarks;
};

/// Builds an ellipsoid fixed mask and a smooth invertible displacement
/// (seeded affine + Gaussian bumps). The moving mask is rendered so that
/// moving(x + u(x)) = fixed(x), i.e. true_ddf is exactly the field a
/// registration of moving onto fixed should find. Landmark balls are placed
/// inside the gland and deformed the same way.
///
/// If the field folds, the bump amplitude is scaled by 0.7 and generation
/// retried; NumericalError after 10 attempts.
PhantomPair generate_phantom(const PhantomSpec& spec);

}  // namespace segreg
