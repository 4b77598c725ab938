#pragma once

#include "lidar_aug/geom.hpp"
#include "lidar_aug/kitti_io.hpp"
#include "lidar_aug/rng.hpp"

namespace lidar_aug {

// Scene-level augmentations. Each op draws its parameters from the supplied
// Rng (in a documented order) and transforms the cloud and all annotations
// jointly, so membership masks are invariant.

struct GlobalTranslateParams {
  double sigma = 0.0;  // meters, std deviation per axis

  void validate() const;
};

struct GlobalRotateParams {
  double beta = 0.0;  // radians, half-width of U(-beta, beta)

  void validate() const;
};

struct GlobalScaleParams {
  double t = 0.0;  // half-width of U(1-t, 1+t)

  void validate() const;
};

struct FlipParams {
  double probability = 0.5;
  FlipYawMode yaw_mode = FlipYawMode::Mirror;

  void validate() const;
};

struct GroundRemovalParams {
  double percentile = 0.0;  // of all z-values; 0 disables
  bool apply_at_test = true;

  void validate() const;
};

// Draws dx, dy, dz ~ N(0, sigma^2) in that order.
void global_translate(Scene& scene, const GlobalTranslateParams& params, Rng& rng);

// Draws alpha ~ U(-beta, beta).
void global_rotate(Scene& scene, const GlobalRotateParams& params, Rng& rng);

// Draws s ~ U(1-t, 1+t).
void global_scale(Scene& scene, const GlobalScaleParams& params, Rng& rng);

// Flips about the x-axis (y negation) with the given probability. Never flips
// about the y-axis: KITTI labels exist only in the camera field of view.
void random_flip(Scene& scene, const FlipParams& params, Rng& rng);

// Removes every point with z strictly below the nearest-rank percentile of
// all z-values (rank = ceil(q/100 * n), 1-indexed on the ascending sort).
// Deterministic; annotations are untouched. The only augmentation that also
// applies at test time.
void ground_removal(Scene& scene, const GroundRemovalParams& params);

}  // namespace lidar_aug
