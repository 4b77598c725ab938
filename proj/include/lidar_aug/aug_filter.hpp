#pragma once

#include "lidar_aug/geom.hpp"
#include "lidar_aug/kitti_io.hpp"

namespace lidar_aug {

// KITTI devkit difficulty tiers: 2D bbox height in pixels, maximum occlusion
// level, maximum truncation.
Difficulty assign_difficulty(double bbox_height_px, int occlusion, double truncation);
Difficulty assign_difficulty(const kitti::RawLabel& raw);

// Annotations whose difficulty is listed here are dropped from training.
// Easy is never droppable.
struct DifficultyFilterParams {
  bool drop_unknown = false;
  bool drop_hard = false;
  bool drop_moderate = false;

  bool drops(Difficulty d) const {
    return (d == Difficulty::Unknown && drop_unknown) ||
           (d == Difficulty::Hard && drop_hard) ||
           (d == Difficulty::Moderate && drop_moderate);
  }
};

struct PointCountFilterParams {
  int min_points = 1;

  void validate() const;
};

void filter_by_difficulty(Scene& scene, const DifficultyFilterParams& params);

// Drops annotations with fewer than min_points member points (margin 0).
void filter_by_points(Scene& scene, const PointCountFilterParams& params);

}  // namespace lidar_aug
