#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "segreg/error.hpp"
#include "segreg/interpolation.hpp"

using namespace segreg;

TEST_CASE("grid geometry") {
  const Grid g({4, 5, 6}, {0.5, 1.0, 2.0}, {10.0, -3.0, 1.0});
  CHECK(g.size() == 120);
  CHECK(g.index(1, 2, 3) == 1 + 4 * (2 + 5 * 3));
  const Index3 ijk = g.unravel(g.index(3, 4, 5));
  CHECK(ijk == Index3{3, 4, 5});
  CHECK(g.world(2, 0, 1) == Vec3{11.0, -3.0, 3.0});
  const Vec3 c = g.continuous_index(g.world(1, 2, 3));
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(2.0));
  CHECK(c[2] == doctest::Approx(3.0));
  CHECK(g.center()[2] == doctest::Approx(1.0 + 2.5 * 2.0));

  CHECK_THROWS_AS(Grid({0, 1, 1}, {1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(Grid({1, 1, 1}, {1, 0, 1}), InvalidArgument);
  CHECK_THROWS_AS(Grid({1, 1, 1}, {1, 1, -2}), InvalidArgument);
}

TEST_CASE("volume and field validation") {
  const Grid g({2, 2, 2}, {1, 1, 1});
  Volume bad(g, VolumeKind::binary_mask);
  bad.values[3] = 0.5;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  Volume soft(g, VolumeKind::soft_mask);
  soft.values[0] = 1.5;
  CHECK_THROWS_AS(validate(soft), InvalidArgument);
  CHECK_THROWS_AS(Volume(g, VolumeKind::intensity, std::vector<double>(7)), InvalidArgument);
  DisplacementField f(g);
  f.vectors[1][2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(f), NumericalError);
}

TEST_CASE("trilinear_sample") {
  const Grid g({5, 1, 1}, {2.0, 1.0, 1.0});
  Volume ramp(g, VolumeKind::intensity);
  for (int i = 0; i < 5; ++i) ramp.at(i, 0, 0) = 10.0 * i;

  SUBCASE("voxel centre returns stored value") {
    for (int i = 0; i < 5; ++i) CHECK(trilinear_sample(ramp, g.world(i, 0, 0)) == ramp.at(i, 0, 0));
  }
  SUBCASE("midpoint on a ramp") { CHECK(trilinear_sample(ramp, {1.0, 0.0, 0.0}) == doctest::Approx(5.0)); }
  SUBCASE("clamped far outside") {
    CHECK(trilinear_sample(ramp, {8.0 + 100.0, 0.0, 0.0}) == 40.0);
    CHECK(trilinear_sample(ramp, {-100.0, 3.0, -7.0}) == 0.0);
  }
  SUBCASE("non-finite point") {
    CHECK_THROWS_AS(trilinear_sample(ramp, {std::nan(""), 0.0, 0.0}), NumericalError);
    CHECK_THROWS_AS(trilinear_sample(ramp, {0.0, std::numeric_limits<double>::infinity(), 0.0}), NumericalError);
  }
}

TEST_CASE("trilinear_sample is linear in the values and clamps per axis") {
  std::mt19937_64 rng(7);
  const Grid g({6, 5, 4}, {1.0, 0.7, 1.3}, {-2.0, 1.0, 0.5});
  const Volume a = oracle::random_volume(g, rng);
  const Volume b = oracle::random_volume(g, rng);
  std::uniform_real_distribution<double> u(-6.0, 12.0);
  for (int t = 0; t < 200; ++t) {
    const Vec3 p{u(rng), u(rng), u(rng)};
    Volume mix(g, VolumeKind::intensity);
    for (std::size_t i = 0; i < g.size(); ++i) mix.values[i] = 2.5 * a.values[i] - 0.75 * b.values[i];
    CHECK(trilinear_sample(mix, p) ==
          doctest::Approx(2.5 * trilinear_sample(a, p) - 0.75 * trilinear_sample(b, p)).epsilon(1e-12));

    Vec3 clamped = p;
    const Vec3 c = g.continuous_index(p);
    for (int ax = 0; ax < 3; ++ax) {
      const double ci = std::clamp(c[ax], 0.0, static_cast<double>(g.dims[ax] - 1));
      clamped[ax] = g.origin[ax] + ci * g.spacing[ax];
    }
    CHECK(trilinear_sample(a, p) == doctest::Approx(trilinear_sample(a, clamped)).epsilon(1e-12));
  }
}

TEST_CASE("warp") {
  std::mt19937_64 rng(11);
  const Grid g({7, 6, 5}, {1.5, 1.0, 2.0}, {3.0, 0.0, -1.0});
  const Volume v = oracle::random_volume(g, rng);

  SUBCASE("zero field is the identity, exactly") {
    const Volume w = warp(v, DisplacementField(g));
    CHECK(w.values == v.values);
    CHECK(w.kind == VolumeKind::intensity);
  }
  SUBCASE("one-voxel shift matches an index shift") {
    const Volume w = warp(v, DisplacementField(g, {g.spacing[0], 0.0, 0.0}));
    for (int k = 0; k < g.dims[2]; ++k) {
      for (int j = 0; j < g.dims[1]; ++j) {
        for (int i = 0; i < g.dims[0]; ++i) {
          const int src = std::min(i + 1, g.dims[0] - 1);
          CHECK(w.at(i, j, k) == doctest::Approx(v.at(src, j, k)).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("half-voxel shift on a ramp") {
    Volume ramp(g, VolumeKind::intensity);
    for (int k = 0; k < g.dims[2]; ++k)
      for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i) ramp.at(i, j, k) = 4.0 * i;
    const Volume w = warp(ramp, DisplacementField(g, {g.spacing[0] / 2, 0.0, 0.0}));
    for (int i = 0; i < g.dims[0] - 1; ++i) CHECK(w.at(i, 2, 2) == doctest::Approx(4.0 * i + 2.0));
  }
  SUBCASE("binary masks come back soft") {
    Volume m = oracle::random_mask(g, rng, 0.4);
    const Volume w = warp(m, oracle::random_field(g, rng, 1.0));
    CHECK(w.kind == VolumeKind::soft_mask);
    for (double x : w.values) CHECK((x >= 0.0 && x <= 1.0));
  }
  SUBCASE("source volume on another grid") {
    const Grid fine({14, 12, 10}, {0.75, 0.5, 1.0}, {3.0, 0.0, -1.0});
    Volume lin(fine, VolumeKind::intensity);
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const Vec3 w = fine.world(i);
      lin.values[i] = 2.0 * w[0] - w[1] + 0.5 * w[2];
    }
    const DisplacementField d(g, {0.3, 0.2, 0.1});
    const Volume w = warp(lin, d);
    for (int k = 0; k < g.dims[2] - 1; ++k) {
      for (int j = 0; j < g.dims[1] - 1; ++j) {
        for (int i = 0; i < g.dims[0] - 1; ++i) {
          const Vec3 p = g.world(i, j, k) + Vec3{0.3, 0.2, 0.1};
          CHECK(w.at(i, j, k) == doctest::Approx(2.0 * p[0] - p[1] + 0.5 * p[2]).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("non-finite field") {
    DisplacementField d(g);
    d.vectors[5][0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(warp(v, d), NumericalError);
  }
}

TEST_CASE("warp_grad") {
  std::mt19937_64 rng(3);
  const Grid g({8, 8, 8}, {1.0, 1.2, 0.8});

  SUBCASE("zero upstream and constant volume") {
    const Volume v = oracle::random_volume(g, rng);
    const DisplacementField d = oracle::random_field(g, rng, 2.0);
    const std::vector<double> zero(g.size(), 0.0);
    for (const Vec3& x : warp_grad(v, d, zero)) CHECK(x == Vec3{0.0, 0.0, 0.0});
    const Volume c(g, VolumeKind::intensity, 3.0);
    std::vector<double> up(g.size());
    for (double& x : up) x = std::uniform_real_distribution<double>(-1, 1)(rng);
    for (const Vec3& x : warp_grad(c, d, up)) CHECK(x == Vec3{0.0, 0.0, 0.0});
  }

  SUBCASE("matches finite differences away from cell boundaries") {
    const double h = 1e-4;
    int checked = 0;
    for (int trial = 0; trial < 5; ++trial) {
      const Volume v = oracle::random_volume(g, rng);
      DisplacementField d = oracle::random_field(g, rng, 1.5);
      std::vector<double> up(g.size());
      for (double& x : up) x = std::uniform_real_distribution<double>(-1, 1)(rng);
      const std::vector<Vec3> an = warp_grad(v, d, up);
      auto objective = [&](const DisplacementField& f) {
        const Volume w = warp(v, f);
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += up[i] * w.values[i];
        return s;
      };
      for (std::size_t vox = 0; vox < g.size(); vox += 7) {
        const Vec3 c = g.continuous_index(g.world(vox) + d.vectors[vox]);
        const double margin = 2.0 * h / std::min({g.spacing[0], g.spacing[1], g.spacing[2]});
        if (oracle::near_cell_boundary(c, g.dims, margin)) continue;
        for (int a = 0; a < 3; ++a) {
          DisplacementField p = d, m = d;
          p.vectors[vox][a] += h;
          m.vectors[vox][a] -= h;
          const double fd = (objective(p) - objective(m)) / (2 * h);
          CHECK(oracle::rel_error(fd, an[vox][a], 1e-8) < 1e-5);
          ++checked;
        }
      }
    }
    CHECK(checked > 100);
  }

  SUBCASE("size mismatch") {
    const Volume v = oracle::random_volume(g, rng);
    CHECK_THROWS_AS(warp_grad(v, DisplacementField(g), std::vector<double>(5)), InvalidArgument);
  }
}

TEST_CASE("resample_to_grid") {
  std::mt19937_64 rng(5);
  const Grid g({5, 4, 3}, {2.0, 2.0, 2.0});
  const Volume v = oracle::random_volume(g, rng);
  CHECK(resample_to_grid(v, g, Interpolation::trilinear).values == v.values);
  CHECK(resample_to_grid(v, g, Interpolation::nearest).values == v.values);

  SUBCASE("2 mm to 1 mm on a ramp") {
    Volume ramp(g, VolumeKind::intensity);
    for (std::size_t i = 0; i < g.size(); ++i) ramp.values[i] = 3.0 * g.unravel(i)[0] + 1.0;
    const Grid fine({9, 7, 5}, {1.0, 1.0, 1.0});
    const Volume r = resample_to_grid(ramp, fine, Interpolation::trilinear);
    for (int i = 1; i < 9; i += 2) {
      CHECK(r.at(i, 2, 2) == doctest::Approx(0.5 * (ramp.at(i / 2, 1, 1) + ramp.at(i / 2 + 1, 1, 1))));
    }
  }
  SUBCASE("binary mask stays binary") {
    const Grid src({12, 12, 12}, {1.0, 1.0, 1.0});
    const Volume b = oracle::ball(src, {5.5, 5.5, 5.5}, 4.0);
    const Volume r = resample_to_grid(b, Grid({17, 17, 17}, {0.7, 0.7, 0.7}), Interpolation::trilinear);
    CHECK(r.kind == VolumeKind::binary_mask);
    for (double x : r.values) CHECK((x == 0.0 || x == 1.0));
  }
}

TEST_CASE("binarize threshold is inclusive") {
  const Grid g({3, 1, 1}, {1, 1, 1});
  const Volume v(g, VolumeKind::soft_mask, std::vector<double>{0.49, 0.5, 0.9});
  CHECK(binarize(v).values == std::vector<double>{0.0, 1.0, 1.0});
}
