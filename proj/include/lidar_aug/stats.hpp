#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lidar_aug/geom.hpp"
#include "lidar_aug/kitti_io.hpp"

namespace lidar_aug {

// Foreground/background statistics. Foreground = points inside at least one
// annotation box; a point inside two boxes counts once. When the scene has
// calibration, counts are taken over the camera-FOV-filtered cloud.
struct SceneStats {
  std::string scene_id;
  std::size_t total_points = 0;
  std::size_t foreground_points = 0;
  std::vector<std::size_t> per_annotation_counts;
  double foreground_ratio = 0.0;  // 0 when total_points == 0
};

SceneStats scene_stats(const Scene& scene);

struct DatasetStats {
  std::size_t scene_count = 0;
  double mean_points = 0.0;
  double mean_foreground = 0.0;
  double foreground_ratio = 0.0;  // mean foreground / mean points
  std::vector<double> per_scene_ratios;
};

class StatsAccumulator {
 public:
  void add(const SceneStats& s);
  DatasetStats finish() const;

 private:
  std::size_t scenes_ = 0;
  std::size_t total_ = 0;
  std::size_t foreground_ = 0;
  std::vector<double> ratios_;
};

DatasetStats dataset_stats(std::span<const Scene> scenes);

std::string stats_report_text(const DatasetStats& stats);
std::string stats_report_json(const DatasetStats& stats);

}  // namespace lidar_aug
