#include "segreg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "segreg/error.hpp"

namespace segreg {

void validate(const PhantomSpec& spec) {
  validate(Grid(spec.dims, spec.spacing));
  for (int a = 0; a < 3; ++a) {
    if (!(spec.semi_axes[a] > 0.0)) throw InvalidArgument("phantom: semi-axes must be > 0");
    if (spec.dims[a] < 3) throw InvalidArgument("phantom: every axis needs at least 3 voxels");
  }
  if (spec.affine_jitter < 0.0 || spec.translation_jitter_mm < 0.0) {
    throw InvalidArgument("phantom: jitter magnitudes must be >= 0");
  }
  if (spec.bump_count < 0 || spec.landmark_count < 0) throw InvalidArgument("phantom: counts must be >= 0");
  if (spec.bump_amplitude < 0.0) throw InvalidArgument("phantom: bump_amplitude must be >= 0");
  if (spec.bump_count > 0 && !(spec.bump_sigma > 0.0)) throw InvalidArgument("phantom: bump_sigma must be > 0");
  if (spec.landmark_count > 0 && !(spec.landmark_radius > 0.0)) {
    throw InvalidArgument("phantom: landmark_radius must be > 0");
  }
}

namespace {

struct Bump {
  Vec3 center;
  Vec3 amplitude;
};

// u(x) = (A - I)(x - c) + t + sum_k a_k exp(-|x - p_k|^2 / 2 s^2)
struct AnalyticField {
  Vec3 center;
  Mat3 linear;  // A - I
  Vec3 translation;
  std::vector<Bump> bumps;
  double inv_two_sigma2 = 0.0;

  Vec3 operator()(const Vec3& x) const {
    const Vec3 d = x - center;
    Vec3 u = translation;
    for (int r = 0; r < 3; ++r) u[r] += linear[r][0] * d[0] + linear[r][1] * d[1] + linear[r][2] * d[2];
    for (const Bump& b : bumps) {
      const Vec3 e = x - b.center;
      const double w = std::exp(-(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]) * inv_two_sigma2);
      u = u + w * b.amplitude;
    }
    return u;
  }

  // Solves x + u(x) = y by fixed-point iteration; false if it stalls.
  bool invert(const Vec3& y, Vec3& x) const {
    x = y - (*this)(y);
    for (int it = 0; it < 200; ++it) {
      const Vec3 next = y - (*this)(x);
      const double step = norm(next - x);
      x = next;
      if (step < 1e-11) return true;
    }
    return false;
  }
};

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const Vec3 v{normal(rng), normal(rng), normal(rng)};
    const double n = norm(v);
    if (n > 1e-8) return (1.0 / n) * v;
  }
}

bool inside_ellipsoid(const Vec3& x, const Vec3& center, const Vec3& semi) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double t = (x[a] - center[a]) / semi[a];
    s += t * t;
  }
  return s <= 1.0;
}

bool touches_border(const Volume& mask) {
  const Grid& g = mask.grid;
  for (int k = 0; k < g.dims[2]; ++k) {
    for (int j = 0; j < g.dims[1]; ++j) {
      for (int i = 0; i < g.dims[0]; ++i) {
        const bool border = i == 0 || j == 0 || k == 0 || i == g.dims[0] - 1 || j == g.dims[1] - 1 ||
                            k == g.dims[2] - 1;
        if (border && mask.at(i, j, k) != 0.0) return true;
      }
    }
  }
  return false;
}

// True when the sampled field is fold-free (det(I + Du) > 0 at every
// interior voxel) and invertible at every voxel center.
bool build(const PhantomSpec& spec, const AnalyticField& field, const Grid& grid, PhantomPair& out,
           const std::vector<Vec3>& landmark_points) {
  out.true_ddf = DisplacementField(grid);
  for (std::size_t v = 0; v < grid.size(); ++v) out.true_ddf.vectors[v] = field(grid.world(v));
  if (jacobian_grad_stat(out.true_ddf).folding_fraction > 0.0) return false;

  std::vector<Vec3> preimage(grid.size());
  for (std::size_t v = 0; v < grid.size(); ++v) {
    if (!field.invert(grid.world(v), preimage[v])) return false;
  }

  const Vec3 c = field.center;
  out.fixed_mask = Volume(grid, VolumeKind::binary_mask);
  out.moving_mask = Volume(grid, VolumeKind::binary_mask);
  for (std::size_t v = 0; v < grid.size(); ++v) {
    out.fixed_mask.values[v] = inside_ellipsoid(grid.world(v), c, spec.semi_axes) ? 1.0 : 0.0;
    out.moving_mask.values[v] = inside_ellipsoid(preimage[v], c, spec.semi_axes) ? 1.0 : 0.0;
  }

  out.fixed_landmarks.clear();
  out.moving_landmarks.clear();
  const double r2 = spec.landmark_radius * spec.landmark_radius;
  for (std::size_t l = 0; l < landmark_points.size(); ++l) {
    const Vec3& p = landmark_points[l];
    Landmark fixed{"lm" + std::to_string(l), Volume(grid, VolumeKind::binary_mask)};
    Landmark moving{fixed.id, Volume(grid, VolumeKind::binary_mask)};
    for (std::size_t v = 0; v < grid.size(); ++v) {
      const Vec3 a = grid.world(v) - p;
      const Vec3 b = preimage[v] - p;
      fixed.mask.values[v] = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] <= r2 ? 1.0 : 0.0;
      moving.mask.values[v] = b[0] * b[0] + b[1] * b[1] + b[2] * b[2] <= r2 ? 1.0 : 0.0;
    }
    if (!(fixed.mask.sum() > 0.0) || !(moving.mask.sum() > 0.0)) {
      throw InvalidArgument("phantom: landmark_radius too small to cover a voxel center");
    }
    out.fixed_landmarks.push_back(std::move(fixed));
    out.moving_landmarks.push_back(std::move(moving));
  }
  return true;
}

}  // namespace

PhantomPair generate_phantom(const PhantomSpec& spec) {
  validate(spec);
  const Grid grid(spec.dims, spec.spacing);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  AnalyticField field;
  field.center = grid.center();
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 3; ++col) {
      field.linear[r][col] = spec.affine[r][col] - (r == col ? 1.0 : 0.0) + spec.affine_jitter * unit(rng);
    }
    field.translation[r] = spec.translation[r] + spec.translation_jitter_mm * unit(rng);
  }
  field.inv_two_sigma2 = spec.bump_count > 0 ? 1.0 / (2.0 * spec.bump_sigma * spec.bump_sigma) : 0.0;

  // Bumps sit near the gland surface and push along its normal (a bulge or
  // a dent); tangential sliding would be invisible to mask supervision.
  std::vector<Bump> base_bumps;
  for (int b = 0; b < spec.bump_count; ++b) {
    const Vec3 dir = random_unit(rng);
    const double radial = 0.6 + 0.5 * u01(rng);
    Vec3 center;
    Vec3 normal;
    for (int a = 0; a < 3; ++a) {
      center[a] = field.center[a] + radial * spec.semi_axes[a] * dir[a];
      normal[a] = dir[a] / spec.semi_axes[a];
    }
    normal = (1.0 / norm(normal)) * normal;
    const double magnitude = spec.bump_amplitude * (0.5 + 0.5 * u01(rng));
    const double sign = u01(rng) < 0.5 ? -1.0 : 1.0;
    base_bumps.push_back({center, sign * magnitude * normal});
  }

  std::vector<Vec3> landmark_points;
  const double min_gap = 2.0 * spec.landmark_radius + 2.0 * std::max({spec.spacing[0], spec.spacing[1], spec.spacing[2]});
  for (int l = 0; l < spec.landmark_count; ++l) {
    Vec3 p{};
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const Vec3 dir = random_unit(rng);
      const double radial = 0.55 * std::cbrt(u01(rng));
      for (int a = 0; a < 3; ++a) p[a] = field.center[a] + radial * spec.semi_axes[a] * dir[a];
      placed = true;
      for (const Vec3& q : landmark_points) {
        if (norm(p - q) < min_gap) placed = false;
      }
    }
    if (!placed) throw InvalidArgument("phantom: cannot place " + std::to_string(spec.landmark_count) + " landmarks");
    landmark_points.push_back(p);
  }

  PhantomPair pair;
  double scale = 1.0;
  for (int attempt = 0; attempt < 10; ++attempt) {
    field.bumps = base_bumps;
    for (Bump& b : field.bumps) b.amplitude = scale * b.amplitude;
    if (build(spec, field, grid, pair, landmark_points)) {
      if (touches_border(pair.fixed_mask) || touches_border(pair.moving_mask)) {
        throw InvalidArgument("phantom: the deformed ellipsoid does not fit inside the grid");
      }
      return pair;
    }
    scale *= 0.7;
  }
  throw NumericalError("phantom: displacement field still folds after 10 amplitude reductions");
}

}  // namespace segreg
