#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "segreg/grid.hpp"

namespace segreg {

inline constexpr double kDiceEpsilon = 1e-7;

/// Relative weights of the Dice term (alpha), the SDM term (beta) and
/// bending energy (gamma = 1 - alpha - beta).
struct LossWeights {
  double alpha = 0.05;
  double beta = 0.45;

  double gamma() const { return 1.0 - alpha - beta; }
  bool operator==(const LossWeights&) const = default;
};

void validate(const LossWeights& weights);

enum class RegistrationMode { mdsc, sdm, mix };

LossWeights weights_for(RegistrationMode mode);
RegistrationMode parse_mode(std::string_view name);
const char* to_string(RegistrationMode mode);

/// Gaussian widths (voxels) of the multiscale Dice battery.
struct SigmaSchedule {
  std::vector<double> sigmas{0.0, 1.0, 2.0, 4.0, 8.0};
};

void validate(const SigmaSchedule& schedule);

struct BendingOptions {
  // Adds 2 * (d2u/da db)^2 for each axis pair a < b. Off by default.
  bool mixed_terms = false;
};

struct LossBreakdown {
  double total = 0.0;
  double mdsc = 0.0;  // similarity, higher is better
  double msle = 0.0;
  double bending = 0.0;
};

/// 2 sum(p g) / (sum p + sum g + eps).
double soft_dice(const Volume& p, const Volume& g);

/// Mean of soft_dice over the Gaussian-smoothed pairs, one per sigma.
double multiscale_dice(const Volume& p, const Volume& g, const SigmaSchedule& schedule);

/// Mean squared log error of the positive (exterior) parts of two signed
/// distance maps; negative values are clamped to 0 before log1p.
double msle_sdm(const Volume& p_hat, const Volume& g_hat);

/// Mean over interior voxels and the 3 components of the summed squared
/// second derivatives (central differences, per mm^2).
/// Throws InvalidArgument when any axis has fewer than 3 voxels.
double bending_energy(const DisplacementField& ddf, const BendingOptions& options = {});
std::vector<Vec3> bending_energy_grad(const DisplacementField& ddf, const BendingOptions& options = {});

struct LossGradient {
  LossBreakdown loss;
  std::vector<Vec3> grad;  // d total / d ddf(v), one per fixed-grid voxel
};

/// The registration objective for one fixed/moving pair
///   total = alpha (1 - mDSC) + beta MSLE + gamma BE.
/// Smoothed fixed masks are cached at construction so repeated evaluations
/// only smooth the warped moving mask.
class RegistrationObjective {
 public:
  RegistrationObjective(Volume moving_mask, Volume fixed_mask, Volume moving_sdm, Volume fixed_sdm,
                        LossWeights weights, SigmaSchedule schedule, BendingOptions bending = {});

  const Grid& fixed_grid() const { return fixed_mask_.grid; }
  const LossWeights& weights() const { return weights_; }

  LossBreakdown evaluate(const DisplacementField& ddf) const;
  LossGradient evaluate_with_grad(const DisplacementField& ddf) const;

 private:
  LossGradient run(const DisplacementField& ddf, bool want_grad) const;

  Volume moving_mask_;
  Volume fixed_mask_;
  Volume moving_sdm_;
  Volume fixed_sdm_;
  LossWeights weights_;
  SigmaSchedule schedule_;
  BendingOptions bending_;
  // Per sigma: S^T (S g) and S^T 1, so the smoothed overlap and mass of a
  // warped mask p are plain dot products with p.
  std::vector<std::vector<double>> overlap_weights_;
  std::vector<std::vector<double>> mass_weights_;
  std::vector<double> fixed_smoothed_sums_;
};

LossBreakdown total_loss(const Volume& moving_mask, const Volume& fixed_mask, const Volume& moving_sdm,
                         const Volume& fixed_sdm, const DisplacementField& ddf, const LossWeights& weights,
                         const SigmaSchedule& schedule, const BendingOptions& bending = {});

LossGradient total_loss_grad(const Volume& moving_mask, const Volume& fixed_mask, const Volume& moving_sdm,
                             const Volume& fixed_sdm, const DisplacementField& ddf, const LossWeights& weights,
                             const SigmaSchedule& schedule, const BendingOptions& bending = {});

}  // namespace segreg
