#include <doctest.h>

#include <algorithm>

#include "segreg/error.hpp"
#include "segreg/interpolation.hpp"
#include "segreg/metrics.hpp"
#include "segreg/phantom.hpp"
#include "segreg/prealign.hpp"

using namespace segreg;

namespace {

PhantomSpec small_spec() {
  PhantomSpec s;
  s.dims = {40, 36, 32};
  s.spacing = {1.0, 1.0, 1.0};
  s.semi_axes = {12.0, 10.0, 9.0};
  s.affine_jitter = 0.0;
  s.translation_jitter_mm = 0.0;
  s.bump_count = 0;
  s.landmark_count = 2;
  return s;
}

}  // namespace

TEST_CASE("identity phantom") {
  const PhantomPair p = generate_phantom(small_spec());
  CHECK(p.moving_mask.values == p.fixed_mask.values);
  for (const Vec3& v : p.true_ddf.vectors) CHECK(v == Vec3{0.0, 0.0, 0.0});
  CHECK(p.fixed_mask.kind == VolumeKind::binary_mask);
  REQUIRE(p.fixed_landmarks.size() == 2);
  CHECK(p.fixed_landmarks[0].id == p.moving_landmarks[0].id);
}

TEST_CASE("pure translation") {
  PhantomSpec s = small_spec();
  s.translation = {2.0, -3.0, 1.0};
  const PhantomPair p = generate_phantom(s);
  for (const Vec3& v : p.true_ddf.vectors) CHECK(norm(v - s.translation) < 1e-12);
  const Vec3 d = center_of_mass(p.moving_mask) - center_of_mass(p.fixed_mask);
  for (int a = 0; a < 3; ++a) CHECK(d[a] == doctest::Approx(s.translation[a]).epsilon(1e-9));
}

TEST_CASE("default spec invariants") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    PhantomSpec s;
    s.seed = seed;
    const PhantomPair p = generate_phantom(s);
    CHECK(dice_binary(binarize(warp(p.moving_mask, p.true_ddf)), p.fixed_mask) > 0.99);
    CHECK(jacobian_grad_stat(p.true_ddf).folding_fraction == 0.0);
    const double voxel = s.spacing[0];
    CHECK(tre(p.moving_landmarks, p.fixed_landmarks, p.true_ddf) < 0.5 * voxel);
    CHECK(p.moving_mask.values != p.fixed_mask.values);
  }
}

TEST_CASE("deterministic per seed") {
  PhantomSpec s = small_spec();
  s.bump_count = 3;
  s.bump_amplitude = 2.0;
  s.affine_jitter = 0.02;
  s.translation_jitter_mm = 1.0;
  s.seed = 42;
  const PhantomPair a = generate_phantom(s);
  const PhantomPair b = generate_phantom(s);
  CHECK(a.true_ddf.vectors == b.true_ddf.vectors);
  CHECK(a.moving_mask.values == b.moving_mask.values);
  CHECK(a.moving_landmarks[1].mask.values == b.moving_landmarks[1].mask.values);
  s.seed = 43;
  CHECK(generate_phantom(s).true_ddf.vectors != a.true_ddf.vectors);
}

TEST_CASE("folding fields are damped or rejected") {
  PhantomSpec s = small_spec();
  s.bump_count = 6;
  s.bump_sigma = 3.0;
  s.bump_amplitude = 12.0;
  s.landmark_count = 0;
  const PhantomPair p = generate_phantom(s);
  CHECK(jacobian_grad_stat(p.true_ddf).folding_fraction == 0.0);
  double largest = 0.0;
  for (const Vec3& v : p.true_ddf.vectors) largest = std::max(largest, norm(v));
  // Undamped bumps reach at least half the amplitude at their centres.
  CHECK(largest < 0.5 * s.bump_amplitude);

  s.bump_amplitude = 1e5;
  CHECK_THROWS_AS(generate_phantom(s), NumericalError);
}

TEST_CASE("invalid specs") {
  PhantomSpec s = small_spec();
  s.semi_axes = {30.0, 10.0, 9.0};
  CHECK_THROWS_AS(generate_phantom(s), InvalidArgument);
  s = small_spec();
  s.bump_amplitude = -1.0;
  CHECK_THROWS_AS(generate_phantom(s), InvalidArgument);
  s = small_spec();
  s.dims = {2, 30, 30};
  CHECK_THROWS_AS(generate_phantom(s), InvalidArgument);
  s = small_spec();
  s.landmark_radius = 0.2;
  CHECK_THROWS_AS(generate_phantom(s), InvalidArgument);
}
