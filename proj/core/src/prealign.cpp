#include "segreg/prealign.hpp"

#include "segreg/error.hpp"
#include "stencil.hpp"

namespace segreg {

Vec3 center_of_mass(const Volume& mask) {
  if (mask.kind != VolumeKind::binary_mask && mask.kind != VolumeKind::soft_mask) {
    throw InvalidArgument(std::string("center_of_mass: expected a mask, got ") + to_string(mask.kind));
  }
  const Grid& g = mask.grid;
  double mass = 0.0;
  Vec3 acc{0.0, 0.0, 0.0};
  for (int k = 0; k < g.dims[2]; ++k) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int i = 0; i < g.dims[0]; ++i) {
        const double w = mask.at(i, j, k);
        if (w == 0.0) continue;
        mass += w;
        acc[0] += w * i;
        acc[1] += w * j;
        acc[2] += w * k;
      }
    }
  }
  if (!(mass > 0.0)) throw InvalidArgument("center_of_mass: mask is empty");
  return {g.origin[0] + g.spacing[0] * acc[0] / mass, g.origin[1] + g.spacing[1] * acc[1] / mass,
          g.origin[2] + g.spacing[2] * acc[2] / mass};
}

Grid centered_target_grid(const Grid& reference, Index3 dims, Vec3 spacing) {
  const Vec3 c = reference.center();
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = c[a] - 0.5 * (dims[a] - 1) * spacing[a];
  return Grid(dims, spacing, origin);
}

Volume translate_and_resample(const Volume& volume, const Vec3& translation, const Grid& target) {
  validate(target);
  Volume out(target, volume.kind);
  const detail::IndexMap map(target, volume.grid);
  const Vec3 back{-translation[0], -translation[1], -translation[2]};
  detail::for_each_voxel(target, [&](const Index3& ijk, std::size_t flat) {
    const detail::Stencil s = detail::make_stencil(volume.grid, map(ijk, back));
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) acc += s.weight[c] * volume.values[s.index[c]];
    out.values[flat] = acc;
  });
  if (volume.kind == VolumeKind::binary_mask) return binarize(out);
  return out;
}

PrealignResult coarse_align(const Volume& moving, const Volume& moving_mask, const Volume& fixed,
                            const Volume& fixed_mask, Index3 target_dims, Vec3 target_spacing) {
  if (!same_geometry(moving.grid, moving_mask.grid)) {
    throw InvalidArgument("coarse_align: moving image and mask are on different grids");
  }
  if (!same_geometry(fixed.grid, fixed_mask.grid)) {
    throw InvalidArgument("coarse_align: fixed image and mask are on different grids");
  }
  const Grid target = centered_target_grid(fixed.grid, target_dims, target_spacing);
  PrealignResult r;
  r.translation = target.center() - center_of_mass(moving_mask);
  r.moving_out = translate_and_resample(moving, r.translation, target);
  r.moving_mask_out = translate_and_resample(moving_mask, r.translation, target);
  r.fixed_out = translate_and_resample(fixed, {0.0, 0.0, 0.0}, target);
  r.fixed_mask_out = translate_and_resample(fixed_mask, {0.0, 0.0, 0.0}, target);
  return r;
}

}  // namespace segreg
