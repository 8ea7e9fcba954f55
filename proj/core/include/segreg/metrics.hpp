#pragma once

#include <optional>
#include <string>
#include <vector>

#include "segreg/grid.hpp"

namespace segreg {

struct Landmark {
  std::string id;
  Volume mask;  // binary, nonempty
};

using LandmarkSet = std::vector<Landmark>;

struct MetricsReport {
  double dsc_whole = 0.0;
  double dsc_base = 0.0;
  double dsc_mid = 0.0;
  double dsc_apex = 0.0;
  std::optional<double> tre_mm;  // absent when no landmarks were given
  double jac_grad = 0.0;         // per mm; reported x100
  double folding_fraction = 0.0;
};

/// 2|P & G| / (|P| + |G|) over voxels > 0.5; 1 when both are empty.
double dice_binary(const Volume& p, const Volume& g);

/// z-extent of a mask's bounding box and the two cuts splitting it into
/// near-equal thirds: cut1 = z_min + floor(n/3), cut2 = z_min + floor(2n/3)
/// with n = z_max - z_min + 1. base is z < cut1, mid cut1 <= z < cut2,
/// apex z >= cut2.
struct RegionBounds {
  int z_min = 0;
  int z_max = 0;
  int cut1 = 0;
  int cut2 = 0;
};

/// Throws InvalidArgument for an empty mask.
RegionBounds region_bounds(const Volume& mask);

struct RegionSplit {
  Volume base;
  Volume mid;
  Volume apex;
};

RegionSplit split_by_bounds(const Volume& mask, const RegionBounds& bounds);
RegionSplit region_split(const Volume& mask);

/// Mean distance between centers of mass of fixed landmarks and moving
/// landmarks warped by `ddf`. Landmarks pair by id.
double tre(const LandmarkSet& moving, const LandmarkSet& fixed, const DisplacementField& ddf);

struct JacobianStats {
  double jac_grad = 0.0;
  double folding_fraction = 0.0;
};

/// det(I + du/dx) by central differences at interior voxels; jac_grad is the
/// mean L2 norm of the central-difference gradient of that determinant
/// field, taken where all six neighbors are interior.
JacobianStats jacobian_grad_stat(const DisplacementField& ddf);

/// Determinant field at interior voxels (boundary entries are left at 1).
std::vector<double> jacobian_determinant(const DisplacementField& ddf);

/// All Table-style metrics for a registration result. Region thirds come
/// from the fixed mask; the warped moving mask is binarized at 0.5.
MetricsReport evaluate_registration(const Volume& moving_mask, const Volume& fixed_mask,
                                    const DisplacementField& ddf, const LandmarkSet* moving_landmarks = nullptr,
                                    const LandmarkSet* fixed_landmarks = nullptr);

}  // namespace segreg
