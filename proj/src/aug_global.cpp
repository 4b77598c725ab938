#include "lidar_aug/aug_global.hpp"

#include <algorithm>
#include <cmath>

#include "lidar_aug/errors.hpp"

namespace lidar_aug {

void GlobalTranslateParams::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw ConfigError("global_translate: sigma must be >= 0");
}

void GlobalRotateParams::validate() const {
  if (!(beta >= 0.0) || !(beta <= kPi))
    throw ConfigError("global_rotate: beta must be in [0, pi]");
}

void GlobalScaleParams::validate() const {
  if (!(t >= 0.0) || !(t < 1.0))
    throw ConfigError("global_scale: t must be in [0, 1)");
}

void FlipParams::validate() const {
  if (!(probability >= 0.0) || !(probability <= 1.0))
    throw ConfigError("random_flip: probability must be in [0, 1]");
}

void GroundRemovalParams::validate() const {
  if (!(percentile >= 0.0) || !(percentile <= 100.0))
    throw ConfigError("ground_removal: percentile must be in [0, 100]");
}

void global_translate(Scene& scene, const GlobalTranslateParams& params, Rng& rng) {
  params.validate();
  const Vec3 delta{rng.normal(params.sigma), rng.normal(params.sigma),
                   rng.normal(params.sigma)};
  translate(scene.cloud, scene.annotations, delta);
}

void global_rotate(Scene& scene, const GlobalRotateParams& params, Rng& rng) {
  params.validate();
  const double alpha = rng.uniform(-params.beta, params.beta);
  rotate_z(scene.cloud, scene.annotations, alpha);
}

void global_scale(Scene& scene, const GlobalScaleParams& params, Rng& rng) {
  params.validate();
  const double s = rng.uniform(1.0 - params.t, 1.0 + params.t);
  scale(scene.cloud, scene.annotations, s);
}

void random_flip(Scene& scene, const FlipParams& params, Rng& rng) {
  params.validate();
  if (rng.bernoulli(params.probability))
    flip_y(scene.cloud, scene.annotations, params.yaw_mode);
}

void ground_removal(Scene& scene, const GroundRemovalParams& params) {
  params.validate();
  if (params.percentile == 0.0) return;
  const std::size_t n = scene.cloud.size();
  if (n == 0) throw DataError("ground removal on an empty scene");

  std::vector<double> zs(n);
  for (std::size_t i = 0; i < n; ++i) zs[i] = scene.cloud.points[i].z;
  std::size_t rank =
      static_cast<std::size_t>(std::ceil(params.percentile * static_cast<double>(n) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(zs.begin(), zs.begin() + (rank - 1), zs.end());
  const double eps = zs[rank - 1];
  std::erase_if(scene.cloud.points, [eps](const Point& p) { return p.z < eps; });
}

}  // namespace lidar_aug
