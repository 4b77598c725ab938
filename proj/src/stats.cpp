#include "lidar_aug/stats.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace lidar_aug {

SceneStats scene_stats(const Scene& scene) {
  SceneStats out;
  out.scene_id = scene.id;
  const PointCloud* cloud = &scene.cloud;
  PointCloud filtered;
  if (scene.calib) {
    filtered = kitti::filter_fov(scene.cloud, *scene.calib);
    cloud = &filtered;
  }
  out.total_points = cloud->size();
  std::vector<char> fg(cloud->size(), 0);
  for (const Annotation& a : scene.annotations) {
    const BoxLocalFrame frame(a);
    std::size_t count = 0;
    for (std::size_t i = 0; i < cloud->size(); ++i) {
      const Point& p = cloud->points[i];
      if (frame.contains(p.x, p.y, p.z, 0.0)) {
        fg[i] = 1;
        ++count;
      }
    }
    out.per_annotation_counts.push_back(count);
  }
  for (char f : fg) out.foreground_points += f;
  out.foreground_ratio =
      out.total_points == 0
          ? 0.0
          : static_cast<double>(out.foreground_points) / static_cast<double>(out.total_points);
  return out;
}

void StatsAccumulator::add(const SceneStats& s) {
  ++scenes_;
  total_ += s.total_points;
  foreground_ += s.foreground_points;
  ratios_.push_back(s.foreground_ratio);
}

DatasetStats StatsAccumulator::finish() const {
  DatasetStats out;
  out.scene_count = scenes_;
  out.per_scene_ratios = ratios_;
  if (scenes_ == 0) return out;
  out.mean_points = static_cast<double>(total_) / static_cast<double>(scenes_);
  out.mean_foreground = static_cast<double>(foreground_) / static_cast<double>(scenes_);
  out.foreground_ratio = total_ == 0 ? 0.0
                                     : static_cast<double>(foreground_) /
                                           static_cast<double>(total_);
  return out;
}

DatasetStats dataset_stats(std::span<const Scene> scenes) {
  StatsAccumulator acc;
  for (const Scene& scene : scenes) acc.add(scene_stats(scene));
  return acc.finish();
}

std::string stats_report_text(const DatasetStats& stats) {
  std::ostringstream out;
  out << "scenes: " << stats.scene_count << "\n";
  out << "mean points per scene: " << stats.mean_points << "\n";
  out << "mean foreground points per scene: " << stats.mean_foreground << "\n";
  out << "foreground ratio: " << stats.foreground_ratio * 100.0 << "%\n";
  return out.str();
}

std::string stats_report_json(const DatasetStats& stats) {
  nlohmann::json j;
  j["scene_count"] = stats.scene_count;
  j["mean_points"] = stats.mean_points;
  j["mean_foreground"] = stats.mean_foreground;
  j["foreground_ratio"] = stats.foreground_ratio;
  j["per_scene_ratios"] = stats.per_scene_ratios;
  return j.dump(2) + "\n";
}

}  // namespace lidar_aug
