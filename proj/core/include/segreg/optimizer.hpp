#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "segreg/grid.hpp"
#include "segreg/losses.hpp"
#include "segreg/metrics.hpp"
#include "segreg/pyramid.hpp"

namespace segreg {

// Learning rate the original network was trained with. It is kept as a
// preset only; DDF parameters are in mm and need a much larger step.
inline constexpr double kNetworkLearningRate = 2e-4;

struct AdamParams {
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place. `step` is the 1-based update
/// count for this parameter block.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, std::int64_t step,
               const AdamParams& adam);

struct RegistrationConfig {
  LossWeights weights;
  SigmaSchedule sigmas;
  int levels = kDefaultPyramidLevels;
  int iters_per_level = 150;
  double lr = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  double convergence_tol = 1e-6;
  int convergence_window = 10;
  bool bending_mixed_terms = false;
};

void validate(const RegistrationConfig& config);

struct RegistrationResult {
  DisplacementField ddf;
  std::vector<LossBreakdown> loss_trace;  // one entry per evaluated iteration
  std::vector<int> iterations_used;       // per stage
  LossBreakdown initial_loss;
  LossBreakdown final_loss;
  MetricsReport metrics;
};

/// Called after every iteration with (stage, iteration within stage, loss).
using ProgressCallback = void (*)(int, int, const LossBreakdown&, void*);
/// Called when a stage starts, with the stage index and the current pyramid.
using StageCallback = void (*)(int, const DdfPyramid&, void*);

struct RegisterOptions {
  const LandmarkSet* moving_landmarks = nullptr;
  const LandmarkSet* fixed_landmarks = nullptr;
  ProgressCallback progress = nullptr;
  StageCallback stage_begin = nullptr;
  void* progress_data = nullptr;  // passed to both callbacks
};

/// Coarse-to-fine Adam minimization of the objective over a zero-initialized
/// DDF pyramid. Stage k optimizes levels 0..k jointly; finer levels stay at
/// zero until their stage starts. The lowest-loss field seen is returned.
///
/// Throws InvalidArgument for empty masks or mismatched grids and
/// NumericalError if the loss stops being finite.
RegistrationResult register_masks(const Volume& moving_mask, const Volume& fixed_mask,
                                  const RegistrationConfig& config, const RegisterOptions& options = {});

}  // namespace segreg
