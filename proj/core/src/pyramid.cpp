#include "segreg/pyramid.hpp"

#include <string>

#include "segreg/error.hpp"
#include "stencil.hpp"

namespace segreg {

Grid pyramid_level_grid(const Grid& base, int levels, int level) {
  if (levels < 1 || level < 0 || level >= levels) {
    throw InvalidArgument("pyramid: level " + std::to_string(level) + " out of range for " +
                          std::to_string(levels) + " levels");
  }
  const int shift = levels - 1 - level;
  if (shift >= 30) throw InvalidArgument("pyramid: too many levels");
  const int factor = 1 << shift;
  Grid g = base;
  for (int a = 0; a < 3; ++a) {
    g.dims[a] = (base.dims[a] + factor - 1) / factor;
    g.spacing[a] = base.spacing[a] * factor;
  }
  return g;
}

DdfPyramid DdfPyramid::zeros(const Grid& base, int levels) {
  validate(base);
  DdfPyramid p;
  p.base_grid = base;
  p.levels.reserve(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) p.levels.emplace_back(pyramid_level_grid(base, levels, k));
  return p;
}

void validate(const DdfPyramid& pyramid) {
  if (pyramid.levels.empty()) throw InvalidArgument("pyramid: no levels");
  const int depth = pyramid.depth();
  for (int k = 0; k < depth; ++k) {
    const DisplacementField& f = pyramid.levels[static_cast<std::size_t>(k)];
    if (!same_geometry(f.grid, pyramid_level_grid(pyramid.base_grid, depth, k))) {
      throw InvalidArgument("pyramid: level " + std::to_string(k) + " is not on its dyadic grid");
    }
    if (f.vectors.size() != f.grid.size()) {
      throw InvalidArgument("pyramid: level " + std::to_string(k) + " has the wrong vector count");
    }
  }
}

namespace {

void require_finer(const Grid& coarse, const Grid& target) {
  for (int a = 0; a < 3; ++a) {
    if (target.spacing[a] > coarse.spacing[a] * (1.0 + 1e-12)) {
      throw InvalidArgument("upsample_ddf: target grid is coarser than the source along axis " +
                            std::to_string(a));
    }
  }
}

}  // namespace

DisplacementField upsample_ddf(const DisplacementField& coarse, const Grid& target) {
  validate(target);
  require_finer(coarse.grid, target);
  DisplacementField out(target);
  const detail::SeparableCells cells(target, coarse.grid);
  detail::for_each_voxel(target, [&](const Index3& ijk, std::size_t flat) {
    const detail::Stencil s = cells.stencil(coarse.grid, ijk);
    Vec3 acc{0.0, 0.0, 0.0};
    for (int c = 0; c < 8; ++c) {
      const Vec3& u = coarse.vectors[s.index[c]];
      acc[0] += s.weight[c] * u[0];
      acc[1] += s.weight[c] * u[1];
      acc[2] += s.weight[c] * u[2];
    }
    out.vectors[flat] = acc;
  });
  return out;
}

std::vector<Vec3> upsample_ddf_adjoint(const Grid& coarse, const Grid& target, std::span<const Vec3> upstream) {
  require_finer(coarse, target);
  if (upstream.size() != target.size()) {
    throw InvalidArgument("upsample_ddf_adjoint: upstream size does not match target grid");
  }
  std::vector<Vec3> out(coarse.size(), Vec3{0.0, 0.0, 0.0});
  const detail::SeparableCells cells(target, coarse);
  std::size_t flat = 0;
  for (int k = 0; k < target.dims[2]; ++k) {
    for (int j = 0; j < target.dims[1]; ++j) {
      for (int i = 0; i < target.dims[0]; ++i, ++flat) {
        const Vec3& up = upstream[flat];
        const detail::Stencil s = cells.stencil(coarse, Index3{i, j, k});
        for (int c = 0; c < 8; ++c) {
          Vec3& dst = out[s.index[c]];
          dst[0] += s.weight[c] * up[0];
          dst[1] += s.weight[c] * up[1];
          dst[2] += s.weight[c] * up[2];
        }
      }
    }
  }
  return out;
}

DisplacementField compose_pyramid(const DdfPyramid& pyramid) {
  validate(pyramid);
  DisplacementField running = pyramid.levels.front();
  for (std::size_t k = 1; k < pyramid.levels.size(); ++k) {
    running = upsample_ddf(running, pyramid.levels[k].grid);
    running += pyramid.levels[k];
  }
  return running;
}

std::vector<std::vector<Vec3>> compose_pyramid_grad(const DdfPyramid& pyramid, std::span<const Vec3> upstream) {
  validate(pyramid);
  if (upstream.size() != pyramid.base_grid.size()) {
    throw InvalidArgument("compose_pyramid_grad: upstream size does not match base grid");
  }
  const std::size_t depth = pyramid.levels.size();
  std::vector<std::vector<Vec3>> grads(depth);
  grads[depth - 1].assign(upstream.begin(), upstream.end());
  for (std::size_t k = depth - 1; k > 0; --k) {
    grads[k - 1] = upsample_ddf_adjoint(pyramid.levels[k - 1].grid, pyramid.levels[k].grid, grads[k]);
  }
  return grads;
}

}  // namespace segreg
