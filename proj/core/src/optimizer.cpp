#include "segreg/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segreg/error.hpp"
#include "segreg/sdm.hpp"

namespace segreg {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, std::int64_t step,
               const AdamParams& adam) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw InvalidArgument("adam_step: parameter, gradient and moment lengths differ");
  }
  if (step < 1) throw InvalidArgument("adam_step: step index must be >= 1");
  const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = adam.beta1 * state.m[i] + (1.0 - adam.beta1) * g;
    state.v[i] = adam.beta2 * state.v[i] + (1.0 - adam.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= adam.lr * m_hat / (std::sqrt(v_hat) + adam.eps);
  }
}

void validate(const RegistrationConfig& config) {
  validate(config.weights);
  validate(config.sigmas);
  if (config.levels < 1) throw InvalidArgument("config: levels must be >= 1");
  if (config.iters_per_level < 1) throw InvalidArgument("config: iters_per_level must be >= 1");
  if (!(config.lr > 0.0)) throw InvalidArgument("config: lr must be > 0");
  if (!(config.adam_beta1 >= 0.0 && config.adam_beta1 < 1.0) ||
      !(config.adam_beta2 >= 0.0 && config.adam_beta2 < 1.0)) {
    throw InvalidArgument("config: Adam betas must lie in [0, 1)");
  }
  if (!(config.adam_eps > 0.0)) throw InvalidArgument("config: adam_eps must be > 0");
  if (!(config.convergence_tol >= 0.0)) throw InvalidArgument("config: convergence_tol must be >= 0");
  if (config.convergence_window < 1) throw InvalidArgument("config: convergence_window must be >= 1");
}

namespace {

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.total) && std::isfinite(l.mdsc) && std::isfinite(l.msle) && std::isfinite(l.bending);
}

void require_nonempty(const Volume& mask, const char* which) {
  if (!(mask.sum() > 0.0)) throw InvalidArgument(std::string("register: ") + which + " mask is empty");
}

}  // namespace

RegistrationResult register_masks(const Volume& moving_mask, const Volume& fixed_mask,
                                  const RegistrationConfig& config, const RegisterOptions& options) {
  validate(config);
  if (!same_geometry(moving_mask.grid, fixed_mask.grid)) {
    throw InvalidArgument("register: moving and fixed masks must share a grid (run coarse alignment first)");
  }
  require_nonempty(moving_mask, "moving");
  require_nonempty(fixed_mask, "fixed");

  const RegistrationObjective objective(moving_mask, fixed_mask, signed_distance_map(moving_mask),
                                        signed_distance_map(fixed_mask), config.weights, config.sigmas,
                                        BendingOptions{config.bending_mixed_terms});

  const AdamParams adam{config.lr, config.adam_beta1, config.adam_beta2, config.adam_eps};
  DdfPyramid pyramid = DdfPyramid::zeros(fixed_mask.grid, config.levels);
  std::vector<AdamState> states;
  std::vector<std::int64_t> steps(pyramid.levels.size(), 0);
  for (const DisplacementField& level : pyramid.levels) states.emplace_back(3 * level.vectors.size());

  RegistrationResult result;
  DisplacementField best_ddf = compose_pyramid(pyramid);
  double best_total = 0.0;
  bool have_best = false;

  auto consider = [&](const LossBreakdown& loss, const DisplacementField& ddf) {
    if (!have_best || loss.total < best_total) {
      best_total = loss.total;
      best_ddf = ddf;
      have_best = true;
    }
  };

  for (int stage = 0; stage < config.levels; ++stage) {
    const std::size_t stage_begin = result.loss_trace.size();
    if (options.stage_begin != nullptr) options.stage_begin(stage, pyramid, options.progress_data);
    int used = 0;
    for (int iter = 0; iter < config.iters_per_level; ++iter) {
      const DisplacementField ddf = compose_pyramid(pyramid);
      LossGradient lg = objective.evaluate_with_grad(ddf);
      if (!finite(lg.loss)) {
        throw NumericalError("register: non-finite loss at stage " + std::to_string(stage) + ", iteration " +
                             std::to_string(iter));
      }
      result.loss_trace.push_back(lg.loss);
      if (result.loss_trace.size() == 1) result.initial_loss = lg.loss;
      consider(lg.loss, ddf);
      if (options.progress != nullptr) options.progress(stage, iter, lg.loss, options.progress_data);
      ++used;

      const std::size_t in_stage = result.loss_trace.size() - stage_begin;
      if (in_stage > static_cast<std::size_t>(config.convergence_window)) {
        const double before = result.loss_trace[result.loss_trace.size() - 1 -
                                                static_cast<std::size_t>(config.convergence_window)]
                                  .total;
        const double scale = std::max(std::abs(before), 1e-30);
        if (std::abs(before - lg.loss.total) / scale < config.convergence_tol) break;
      }

      const std::vector<std::vector<Vec3>> level_grads = compose_pyramid_grad(pyramid, lg.grad);
      for (int level = 0; level <= stage; ++level) {
        const auto l = static_cast<std::size_t>(level);
        adam_step(flat_view(pyramid.levels[l].vectors), flat_view(level_grads[l]), states[l], ++steps[l], adam);
      }
    }
    result.iterations_used.push_back(used);
  }

  const DisplacementField last = compose_pyramid(pyramid);
  const LossBreakdown last_loss = objective.evaluate(last);
  if (!finite(last_loss)) throw NumericalError("register: non-finite loss after the final update");
  consider(last_loss, last);

  result.ddf = std::move(best_ddf);
  result.final_loss = objective.evaluate(result.ddf);
  result.metrics = evaluate_registration(moving_mask, fixed_mask, result.ddf, options.moving_landmarks,
                                         options.fixed_landmarks);
  return result;
}

}  // namespace segreg
