#include "lidar_aug/aug_filter.hpp"

#include <algorithm>

#include "lidar_aug/errors.hpp"

namespace lidar_aug {

Difficulty assign_difficulty(double bbox_height_px, int occlusion, double truncation) {
  if (bbox_height_px <= 0.0) return Difficulty::Unknown;
  if (bbox_height_px >= 40.0 && occlusion == 0 && truncation <= 0.15)
    return Difficulty::Easy;
  if (bbox_height_px >= 25.0 && occlusion <= 1 && truncation <= 0.30)
    return Difficulty::Moderate;
  if (bbox_height_px >= 25.0 && occlusion <= 2 && truncation <= 0.50)
    return Difficulty::Hard;
  return Difficulty::Unknown;
}

Difficulty assign_difficulty(const kitti::RawLabel& raw) {
  return assign_difficulty(raw.bbox[3] - raw.bbox[1], raw.occlusion, raw.truncation);
}

void PointCountFilterParams::validate() const {
  if (min_points < 1) throw ConfigError("filter_points: min_points must be >= 1");
}

void filter_by_difficulty(Scene& scene, const DifficultyFilterParams& params) {
  std::erase_if(scene.annotations,
                [&](const Annotation& a) { return params.drops(a.difficulty); });
}

void filter_by_points(Scene& scene, const PointCountFilterParams& params) {
  params.validate();
  std::erase_if(scene.annotations, [&](const Annotation& a) {
    const BoxLocalFrame f(a);
    int count = 0;
    for (const Point& p : scene.cloud.points) {
      if (f.contains(p.x, p.y, p.z, 0.0) && ++count >= params.min_points) return false;
    }
    return true;
  });
}

}  // namespace lidar_aug
