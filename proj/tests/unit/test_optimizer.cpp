#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "segreg/error.hpp"
#include "segreg/interpolation.hpp"
#include "segreg/metrics.hpp"
#include "segreg/optimizer.hpp"

using namespace segreg;

TEST_CASE("adam_step") {
  const AdamParams adam{0.1, 0.9, 0.999, 1e-8};

  SUBCASE("zero gradient leaves parameters alone") {
    std::vector<double> x{1.0, -2.0, 3.5};
    AdamState s(3);
    adam_step(x, std::vector<double>(3, 0.0), s, 1, adam);
    CHECK(x == std::vector<double>{1.0, -2.0, 3.5});
  }
  SUBCASE("first step moves each coordinate by lr against the gradient sign") {
    std::vector<double> x{0.0, 0.0, 0.0};
    AdamState s(3);
    adam_step(x, std::vector<double>{3.0, -1e-3, 250.0}, s, 1, adam);
    CHECK(x[0] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(x[1] == doctest::Approx(0.1).epsilon(1e-4));
    CHECK(x[2] == doctest::Approx(-0.1).epsilon(1e-6));
  }
  SUBCASE("matches a scalar oracle over many steps") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> x(4, 0.5);
    std::vector<oracle::ScalarAdam> ref(4, oracle::ScalarAdam{0.1, 0.9, 0.999, 1e-8});
    std::vector<double> xr = x;
    AdamState s(4);
    for (int t = 1; t <= 25; ++t) {
      std::vector<double> g(4);
      for (double& v : g) v = t <= 2 ? 0.7 : u(rng);
      adam_step(x, g, s, t, adam);
      for (int i = 0; i < 4; ++i) xr[i] = ref[i].step(xr[i], g[i]);
      for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(xr[i]).epsilon(1e-12));
    }
  }
  SUBCASE("errors") {
    std::vector<double> x(3);
    AdamState s(3);
    CHECK_THROWS_AS(adam_step(x, std::vector<double>(2), s, 1, adam), InvalidArgument);
    CHECK_THROWS_AS(adam_step(x, std::vector<double>(3), s, 0, adam), InvalidArgument);
  }
}

TEST_CASE("config validation") {
  RegistrationConfig c;
  CHECK(c.lr == 0.1);
  CHECK(kNetworkLearningRate == 2e-4);
  CHECK(c.levels == 5);
  CHECK(c.iters_per_level == 150);
  validate(c);
  c.levels = 0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = {};
  c.lr = 0.0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = {};
  c.iters_per_level = 0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
}

namespace {

struct Recorder {
  std::vector<int> stages;
};

void record(int stage, int, const LossBreakdown&, void* data) { static_cast<Recorder*>(data)->stages.push_back(stage); }

struct Activation {
  std::vector<int> stages;
  bool inactive_all_zero = true;
  bool active_moved = true;
};

void check_activation(int stage, const DdfPyramid& p, void* data) {
  auto* a = static_cast<Activation*>(data);
  a->stages.push_back(stage);
  for (int k = 0; k < p.depth(); ++k) {
    bool zero = true;
    for (const Vec3& v : p.levels[static_cast<std::size_t>(k)].vectors) zero = zero && v == Vec3{0.0, 0.0, 0.0};
    if (k >= stage && !zero) a->inactive_all_zero = false;
    if (k < stage && zero) a->active_moved = false;
  }
}

}  // namespace

TEST_CASE("register_masks") {
  SUBCASE("identity problem") {
    const Grid g({24, 24, 24}, {1.0, 1.0, 1.0});
    const Volume m = oracle::ball(g, g.center(), 7.0);
    RegistrationConfig c;
    c.levels = 3;
    c.iters_per_level = 20;
    const RegistrationResult r = register_masks(m, m, c);
    CHECK(r.final_loss.total <= r.initial_loss.total);
    CHECK(bending_energy(r.ddf) <= 1e-6);
    CHECK(r.metrics.dsc_whole == doctest::Approx(1.0).epsilon(1e-3));
  }

  SUBCASE("translated sphere") {
    const Grid g({40, 40, 40}, {1.0, 1.0, 1.0});
    const Vec3 shift{3.0, 0.0, 0.0};
    const Volume fixed = oracle::ball(g, g.center(), 10.0);
    const Volume moving = oracle::ball(g, g.center() + shift, 10.0);
    RegistrationConfig c;
    c.weights = weights_for(RegistrationMode::mix);
    c.iters_per_level = 40;
    Recorder rec;
    RegisterOptions o;
    o.progress = record;
    o.progress_data = &rec;
    const RegistrationResult r = register_masks(moving, fixed, c, o);
    CHECK(r.metrics.dsc_whole > 0.98);
    Vec3 mean{0.0, 0.0, 0.0};
    double n = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (fixed.values[i] == 0.0) continue;
      mean = mean + r.ddf.vectors[i];
      n += 1.0;
    }
    mean = (1.0 / n) * mean;
    CHECK(norm(mean - shift) < 0.5);
    CHECK(r.final_loss.total <= r.initial_loss.total);
    CHECK(r.iterations_used.size() == 5);
    std::size_t total = 0;
    for (int used : r.iterations_used) total += static_cast<std::size_t>(used);
    CHECK(total == r.loss_trace.size());
    CHECK(rec.stages.size() == r.loss_trace.size());
    CHECK(std::is_sorted(rec.stages.begin(), rec.stages.end()));
  }

  SUBCASE("finer levels stay at zero until their stage") {
    const Grid g({16, 16, 16}, {1.0, 1.0, 1.0});
    const Volume fixed = oracle::ball(g, g.center(), 5.0);
    const Volume moving = oracle::ball(g, g.center() + Vec3{1.5, 0.0, 0.0}, 5.0);
    RegistrationConfig c;
    c.levels = 3;
    c.iters_per_level = 8;
    c.convergence_tol = 0.0;
    Activation act;
    RegisterOptions o;
    o.stage_begin = check_activation;
    o.progress_data = &act;
    const RegistrationResult r = register_masks(moving, fixed, c, o);
    CHECK(r.loss_trace.size() == 24);
    CHECK(act.stages == std::vector<int>{0, 1, 2});
    CHECK(act.inactive_all_zero);
    CHECK(act.active_moved);
  }

  SUBCASE("determinism") {
    const Grid g({16, 16, 16}, {1.0, 1.0, 1.0});
    const Volume fixed = oracle::ball(g, g.center(), 5.0);
    const Volume moving = oracle::ball(g, g.center() + Vec3{1.0, -1.0, 0.5}, 4.5);
    RegistrationConfig c;
    c.levels = 3;
    c.iters_per_level = 10;
    const RegistrationResult a = register_masks(moving, fixed, c);
    const RegistrationResult b = register_masks(moving, fixed, c);
    REQUIRE(a.loss_trace.size() == b.loss_trace.size());
    for (std::size_t i = 0; i < a.loss_trace.size(); ++i) CHECK(a.loss_trace[i].total == b.loss_trace[i].total);
    CHECK(a.ddf.vectors == b.ddf.vectors);
  }

  SUBCASE("errors") {
    const Grid g({8, 8, 8}, {1.0, 1.0, 1.0});
    const Volume m = oracle::ball(g, g.center(), 2.0);
    CHECK_THROWS_AS(register_masks(Volume(g, VolumeKind::binary_mask), m, {}), InvalidArgument);
    CHECK_THROWS_AS(register_masks(m, Volume(g, VolumeKind::binary_mask), {}), InvalidArgument);
    CHECK_THROWS_AS(register_masks(m, oracle::ball(Grid({9, 8, 8}, {1, 1, 1}), g.center(), 2.0), {}), InvalidArgument);
  }
}
