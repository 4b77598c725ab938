#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lidar_aug/geom.hpp"
#include "lidar_aug/kitti_io.hpp"
#include "lidar_aug/rng.hpp"

namespace lidar_aug {

// One annotation crop: the box at its original pose plus its member points
// expressed in box-local coordinates.
struct SampleEntry {
  Annotation annotation;
  std::vector<Point> local_points;
  std::string source_scene;

  std::size_t point_count() const { return local_points.size(); }
};

struct SampleDatabase {
  std::vector<SampleEntry> entries;
  std::map<std::string, std::vector<std::size_t>> class_index;
  std::uint64_t provenance = 0;
  int min_points = 1;

  std::size_t size() const { return entries.size(); }
};

// Incremental builder so datasets can be streamed scene by scene.
class DatabaseBuilder {
 public:
  explicit DatabaseBuilder(int min_points);

  void add_scene(const Scene& scene);
  SampleDatabase finish();

 private:
  SampleDatabase db_;
  std::uint64_t hash_;
};

// One SampleEntry per annotation with at least min_points member points;
// entries ordered by scene, then annotation index.
SampleDatabase build_database(std::span<const Scene> scenes, int min_points = 1);

struct OversampleParams {
  int target_count = 15;       // paper grid {5, 10, 15, 20, 25}
  std::string class_name = "Car";
  int max_attempts = 0;        // 0 means 5 * target_count
  double iou_tolerance = 0.0;  // candidate accepted iff bev_iou <= tolerance
  bool redraw = true;          // false: strict-skip mode, at most k draws
  bool remove_inside_background = false;

  void validate() const;
  int attempt_budget() const;
};

// Inserts up to (target_count - current class count) non-colliding database
// entries at their original pose, appending their annotations and re-posed
// points to the scene. Original points and annotations are never modified
// unless remove_inside_background is set.
void oversample(Scene& scene, const SampleDatabase& db, const OversampleParams& params,
                Rng& rng);

// Persistence: `stem.idx` holds a versioned text header plus one record per
// entry (scene_id, class, annotation 7-tuple, point_count, byte offset);
// `stem.bin` is the packed local points in the velodyne float32x4 layout.
void save_database(const SampleDatabase& db, const std::filesystem::path& stem);
SampleDatabase load_database(const std::filesystem::path& stem);

}  // namespace lidar_aug
