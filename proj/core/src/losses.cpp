#include "segreg/losses.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "segreg/error.hpp"
#include "segreg/smoothing.hpp"
#include "stencil.hpp"

namespace segreg {

void validate(const LossWeights& weights) {
  if (!(weights.alpha >= 0.0) || !(weights.beta >= 0.0)) {
    throw InvalidArgument("loss weights: alpha and beta must be >= 0");
  }
  if (weights.alpha + weights.beta > 1.0 + 1e-12) {
    throw InvalidArgument("loss weights: alpha + beta must not exceed 1");
  }
}

LossWeights weights_for(RegistrationMode mode) {
  switch (mode) {
    case RegistrationMode::mdsc:
      return {0.3, 0.0};
    case RegistrationMode::sdm:
      return {0.0, 0.8};
    case RegistrationMode::mix:
      return {0.05, 0.45};
  }
  throw InvalidArgument("unknown registration mode");
}

RegistrationMode parse_mode(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "mdsc") return RegistrationMode::mdsc;
  if (lower == "sdm") return RegistrationMode::sdm;
  if (lower == "mix") return RegistrationMode::mix;
  throw InvalidArgument("unknown mode '" + std::string(name) + "' (expected mdsc, sdm or mix)");
}

const char* to_string(RegistrationMode mode) {
  switch (mode) {
    case RegistrationMode::mdsc:
      return "mdsc";
    case RegistrationMode::sdm:
      return "sdm";
    case RegistrationMode::mix:
      return "mix";
  }
  return "unknown";
}

void validate(const SigmaSchedule& schedule) {
  if (schedule.sigmas.empty()) throw InvalidArgument("sigma schedule: at least one sigma is required");
  for (double s : schedule.sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("sigma schedule: sigmas must be finite and >= 0");
  }
}

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!same_geometry(a, b)) throw InvalidArgument(std::string(what) + ": inputs are on different grids");
}

struct DiceParts {
  double overlap = 0.0;
  double denom = 0.0;  // sum p + sum g + eps
  double value() const { return 2.0 * overlap / denom; }
};

DiceParts dice_parts(std::span<const double> p, std::span<const double> g, double g_sum) {
  DiceParts d;
  double p_sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d.overlap += p[i] * g[i];
    p_sum += p[i];
  }
  d.denom = p_sum + g_sum + kDiceEpsilon;
  return d;
}

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double rectified_log(double x) { return std::log1p(x > 0.0 ? x : 0.0); }

// A second-difference style stencil: value = sum coef * u(v + offset).
struct StencilTerm {
  std::ptrdiff_t offset[4];
  double coef[4];
  int size;
  double weight;  // multiplies the squared value
};

std::vector<StencilTerm> bending_terms(const Grid& g, const BendingOptions& options) {
  const std::ptrdiff_t step[3] = {1, g.dims[0], static_cast<std::ptrdiff_t>(g.dims[0]) * g.dims[1]};
  std::vector<StencilTerm> terms;
  for (int a = 0; a < 3; ++a) {
    const double h2 = g.spacing[a] * g.spacing[a];
    terms.push_back({{step[a], 0, -step[a], 0}, {1.0 / h2, -2.0 / h2, 1.0 / h2, 0.0}, 3, 1.0});
  }
  if (options.mixed_terms) {
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const double c = 1.0 / (4.0 * g.spacing[a] * g.spacing[b]);
        terms.push_back({{step[a] + step[b], step[a] - step[b], -step[a] + step[b], -step[a] - step[b]},
                         {c, -c, -c, c},
                         4,
                         2.0});
      }
    }
  }
  return terms;
}

void require_bending_dims(const Grid& g) {
  for (int a = 0; a < 3; ++a) {
    if (g.dims[a] < 3) {
      throw InvalidArgument("bending_energy: every axis needs at least 3 voxels, axis " + std::to_string(a) +
                            " has " + std::to_string(g.dims[a]));
    }
  }
}

double interior_count(const Grid& g) {
  return static_cast<double>(g.dims[0] - 2) * (g.dims[1] - 2) * (g.dims[2] - 2);
}

// Bending energy value; also accumulates its gradient into *grad when given.
double bending_pass(const DisplacementField& ddf, const BendingOptions& options, std::vector<Vec3>* grad) {
  const Grid& g = ddf.grid;
  require_bending_dims(g);
  const std::vector<StencilTerm> terms = bending_terms(g, options);
  const double scale = 2.0 / (3.0 * interior_count(g));
  if (grad != nullptr) grad->assign(g.size(), Vec3{0.0, 0.0, 0.0});
  double acc = 0.0;
  for (int k = 1; k < g.dims[2] - 1; ++k) {
    for (int j = 1; j < g.dims[1] - 1; ++j) {
      for (int i = 1; i < g.dims[0] - 1; ++i) {
        const auto v = static_cast<std::ptrdiff_t>(g.index(i, j, k));
        for (const StencilTerm& t : terms) {
          double d[3] = {0.0, 0.0, 0.0};
          for (int s = 0; s < t.size; ++s) {
            const Vec3& u = ddf.vectors[static_cast<std::size_t>(v + t.offset[s])];
            d[0] += t.coef[s] * u[0];
            d[1] += t.coef[s] * u[1];
            d[2] += t.coef[s] * u[2];
          }
          acc += t.weight * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
          if (grad == nullptr) continue;
          for (int s = 0; s < t.size; ++s) {
            Vec3& out = (*grad)[static_cast<std::size_t>(v + t.offset[s])];
            const double c = scale * t.weight * t.coef[s];
            out[0] += c * d[0];
            out[1] += c * d[1];
            out[2] += c * d[2];
          }
        }
      }
    }
  }
  return acc / (3.0 * interior_count(g));
}

}  // namespace

double soft_dice(const Volume& p, const Volume& g) {
  require_same_grid(p.grid, g.grid, "soft_dice");
  return dice_parts(p.values, g.values, g.sum()).value();
}

double multiscale_dice(const Volume& p, const Volume& g, const SigmaSchedule& schedule) {
  require_same_grid(p.grid, g.grid, "multiscale_dice");
  validate(schedule);
  double acc = 0.0;
  for (double sigma : schedule.sigmas) {
    acc += soft_dice(gaussian_smooth(p, sigma), gaussian_smooth(g, sigma));
  }
  return acc / static_cast<double>(schedule.sigmas.size());
}

double msle_sdm(const Volume& p_hat, const Volume& g_hat) {
  require_same_grid(p_hat.grid, g_hat.grid, "msle_sdm");
  double acc = 0.0;
  for (std::size_t i = 0; i < p_hat.values.size(); ++i) {
    const double d = rectified_log(p_hat.values[i]) - rectified_log(g_hat.values[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(p_hat.values.size());
}

double bending_energy(const DisplacementField& ddf, const BendingOptions& options) {
  return bending_pass(ddf, options, nullptr);
}

std::vector<Vec3> bending_energy_grad(const DisplacementField& ddf, const BendingOptions& options) {
  std::vector<Vec3> grad;
  bending_pass(ddf, options, &grad);
  return grad;
}

RegistrationObjective::RegistrationObjective(Volume moving_mask, Volume fixed_mask, Volume moving_sdm,
                                             Volume fixed_sdm, LossWeights weights, SigmaSchedule schedule,
                                             BendingOptions bending)
    : moving_mask_(std::move(moving_mask)),
      fixed_mask_(std::move(fixed_mask)),
      moving_sdm_(std::move(moving_sdm)),
      fixed_sdm_(std::move(fixed_sdm)),
      weights_(weights),
      schedule_(std::move(schedule)),
      bending_(bending) {
  validate(weights_);
  validate(schedule_);
  require_same_grid(moving_mask_.grid, moving_sdm_.grid, "objective (moving mask / moving SDM)");
  require_same_grid(fixed_mask_.grid, fixed_sdm_.grid, "objective (fixed mask / fixed SDM)");
  require_bending_dims(fixed_mask_.grid);
  const Grid& grid = fixed_mask_.grid;
  const std::vector<double> ones(grid.size(), 1.0);
  for (double sigma : schedule_.sigmas) {
    const std::vector<double> gs = gaussian_smooth(grid, fixed_mask_.values, sigma);
    fixed_smoothed_sums_.push_back(sum_of(gs));
    overlap_weights_.push_back(gaussian_smooth_adjoint(grid, gs, sigma));
    mass_weights_.push_back(gaussian_smooth_adjoint(grid, ones, sigma));
  }
}

LossBreakdown RegistrationObjective::evaluate(const DisplacementField& ddf) const { return run(ddf, false).loss; }

LossGradient RegistrationObjective::evaluate_with_grad(const DisplacementField& ddf) const {
  return run(ddf, true);
}

LossGradient RegistrationObjective::run(const DisplacementField& ddf, bool want_grad) const {
  require_same_grid(ddf.grid, fixed_mask_.grid, "objective (ddf / fixed grid)");
  const Grid& grid = ddf.grid;
  const std::size_t n = grid.size();
  const double alpha = weights_.alpha;
  const double beta = weights_.beta;
  const double gamma = weights_.gamma();

  LossGradient out;

  // Both moving volumes share a grid, so one stencil serves the two warps.
  const Grid& moving_grid = moving_mask_.grid;
  const detail::IndexMap map(grid, moving_grid);
  std::vector<double> warped_mask(n);
  std::vector<double> warped_sdm(n);
  detail::for_each_voxel(grid, [&](const Index3& ijk, std::size_t flat) {
    const detail::Stencil st = detail::make_stencil(moving_grid, map(ijk, ddf.vectors[flat]));
    double m = 0.0;
    double d = 0.0;
    for (int c = 0; c < 8; ++c) {
      m += st.weight[c] * moving_mask_.values[st.index[c]];
      d += st.weight[c] * moving_sdm_.values[st.index[c]];
    }
    warped_mask[flat] = m < 0.0 ? 0.0 : (m > 1.0 ? 1.0 : m);
    warped_sdm[flat] = d;
  });

  // Multiscale Dice of the warped moving mask.
  const double inv_z = 1.0 / static_cast<double>(schedule_.sigmas.size());
  std::vector<double> mask_upstream;
  if (want_grad && alpha != 0.0) mask_upstream.assign(n, 0.0);
  double mdsc = 0.0;
  for (std::size_t s = 0; s < schedule_.sigmas.size(); ++s) {
    const std::vector<double>& ow = overlap_weights_[s];
    const std::vector<double>& mw = mass_weights_[s];
    DiceParts d;
    double p_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d.overlap += warped_mask[i] * ow[i];
      p_sum += warped_mask[i] * mw[i];
    }
    d.denom = p_sum + fixed_smoothed_sums_[s] + kDiceEpsilon;
    mdsc += d.value();
    if (!mask_upstream.empty()) {
      // d(1 - D)/dp scaled by alpha / Z, pulled back through the smoothing.
      const double c = -alpha * inv_z;
      const double a = c * 2.0 / d.denom;
      const double b = c * 2.0 * d.overlap / (d.denom * d.denom);
      for (std::size_t i = 0; i < n; ++i) mask_upstream[i] += a * ow[i] - b * mw[i];
    }
  }
  mdsc *= inv_z;

  // MSLE between the warped moving SDM and the fixed SDM.
  std::vector<double> sdm_upstream;
  if (want_grad && beta != 0.0) sdm_upstream.assign(n, 0.0);
  double msle = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xp = warped_sdm[i];
    const double diff = rectified_log(xp) - rectified_log(fixed_sdm_.values[i]);
    msle += diff * diff;
    if (!sdm_upstream.empty() && xp > 0.0) sdm_upstream[i] = beta * 2.0 * diff * inv_n / (1.0 + xp);
  }
  msle *= inv_n;

  std::vector<Vec3> bending_grad;
  const double bending = bending_pass(ddf, bending_, want_grad && gamma != 0.0 ? &bending_grad : nullptr);

  out.loss.mdsc = mdsc;
  out.loss.msle = msle;
  out.loss.bending = bending;
  out.loss.total = alpha * (1.0 - mdsc) + beta * msle + gamma * bending;

  if (!want_grad) return out;

  out.grad.assign(n, Vec3{0.0, 0.0, 0.0});
  if (!mask_upstream.empty() || !sdm_upstream.empty()) {
    // The interpolant is linear in the sampled values, so both terms share
    // one spatial gradient of the combined volume.
    const double wm = mask_upstream.empty() ? 0.0 : 1.0;
    const double ws = sdm_upstream.empty() ? 0.0 : 1.0;
    detail::for_each_voxel(grid, [&](const Index3& ijk, std::size_t flat) {
      const double um = wm != 0.0 ? mask_upstream[flat] : 0.0;
      const double us = ws != 0.0 ? sdm_upstream[flat] : 0.0;
      if (um == 0.0 && us == 0.0) return;
      const detail::Stencil st = detail::make_stencil(moving_grid, map(ijk, ddf.vectors[flat]));
      double corner[8];
      for (int c = 0; c < 8; ++c) {
        corner[c] = um * moving_mask_.values[st.index[c]] + us * moving_sdm_.values[st.index[c]];
      }
      const Vec3 gi = detail::stencil_index_gradient(st, corner);
      out.grad[flat] = {gi[0] / moving_grid.spacing[0], gi[1] / moving_grid.spacing[1],
                        gi[2] / moving_grid.spacing[2]};
    });
  }
  if (gamma != 0.0) {
    for (std::size_t i = 0; i < n; ++i) out.grad[i] = out.grad[i] + gamma * bending_grad[i];
  }
  return out;
}

LossBreakdown total_loss(const Volume& moving_mask, const Volume& fixed_mask, const Volume& moving_sdm,
                         const Volume& fixed_sdm, const DisplacementField& ddf, const LossWeights& weights,
                         const SigmaSchedule& schedule, const BendingOptions& bending) {
  return RegistrationObjective(moving_mask, fixed_mask, moving_sdm, fixed_sdm, weights, schedule, bending)
      .evaluate(ddf);
}

LossGradient total_loss_grad(const Volume& moving_mask, const Volume& fixed_mask, const Volume& moving_sdm,
                             const Volume& fixed_sdm, const DisplacementField& ddf, const LossWeights& weights,
                             const SigmaSchedule& schedule, const BendingOptions& bending) {
  return RegistrationObjective(moving_mask, fixed_mask, moving_sdm, fixed_sdm, weights, schedule, bending)
      .evaluate_with_grad(ddf);
}

}  // namespace segreg
