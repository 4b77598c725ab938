#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lidar_aug/kitti_io.hpp"

namespace lidar_aug {

// Deterministic desk-scale dataset generator: KITTI-shaped scenes with
// planted car boxes (member points known by construction) so the whole
// toolkit can be exercised without any KITTI download.
struct SyntheticParams {
  int scene_count = 10;
  int points_per_scene = 2000;  // approximate; planted box points add on top
  int min_annotations = 2;
  int max_annotations = 8;
  int max_points_per_annotation = 120;
  std::uint64_t seed = 0;
  bool with_calib = true;
};

kitti::Calibration synthetic_calibration();

Scene make_synthetic_scene(const std::string& id, const SyntheticParams& params);
std::vector<Scene> make_synthetic_dataset(const SyntheticParams& params);
std::string synthetic_scene_id(int index);

}  // namespace lidar_aug
