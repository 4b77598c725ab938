#pragma once

#include <span>

#include "lidar_aug/geom.hpp"
#include "lidar_aug/kitti_io.hpp"
#include "lidar_aug/rng.hpp"

namespace lidar_aug {

// Per-annotation augmentations: each annotation and the points inside it get
// an independent random draw. Membership is computed once against the
// pre-op cloud; annotations are then processed in ascending index order so
// the draw sequence is deterministic. Non-member points are never touched.

struct LocalTranslateParams {
  double sigma = 0.0;

  void validate() const;
};

struct LocalRotateParams {
  double beta = 0.0;

  void validate() const;
};

struct LocalScaleParams {
  double t = 0.0;

  void validate() const;
};

// Deterministic single-annotation kernels (the random drivers below build on
// these; tests use them with forced values).

// Shifts annotation `idx` and the given member points by delta.
void translate_object(Scene& scene, std::size_t idx,
                      std::span<const std::uint32_t> members, const Vec3& delta);

// Rotates the member points about the vertical axis through the box center;
// the center stays fixed and yaw advances by alpha.
void rotate_object(Scene& scene, std::size_t idx,
                   std::span<const std::uint32_t> members, double alpha);

// Scales the member points about the box center; dims scale by s, the center
// and yaw stay fixed.
void scale_object(Scene& scene, std::size_t idx,
                  std::span<const std::uint32_t> members, double s);

void local_translate(Scene& scene, const LocalTranslateParams& params, Rng& rng);
void local_rotate(Scene& scene, const LocalRotateParams& params, Rng& rng);
void local_scale(Scene& scene, const LocalScaleParams& params, Rng& rng);

}  // namespace lidar_aug
