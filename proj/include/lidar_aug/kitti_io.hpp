#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lidar_aug/geom.hpp"

namespace lidar_aug::kitti {

struct Mat3 {
  double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  Vec3 apply(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
  Mat3 inverse() const;  // throws DataError when singular
};

// KITTI object calibration. P2 projects rectified-camera points to pixels,
// R0 rectifies the camera frame, Tr maps LiDAR to camera: for a LiDAR point
// x, the rectified camera point is R0 * (Tr_rot * x + Tr_t).
struct Calibration {
  std::array<double, 12> P2{};  // 3x4 row-major
  Mat3 R0;
  Mat3 Tr_rot;
  Vec3 Tr_t;
  int image_width = 1242;
  int image_height = 375;

  Vec3 rect_from_velo(const Vec3& v) const { return R0.apply(Tr_rot.apply(v) + Tr_t); }
  Vec3 velo_from_rect(const Vec3& r) const {
    return Tr_rot.inverse().apply(R0.inverse().apply(r) - Tr_t);
  }

  // Projects a LiDAR point to pixel coordinates; returns false for points at
  // or behind the image plane (rectified depth <= 0).
  bool project(const Vec3& velo, double& u, double& v, double& depth) const;

  void validate() const;  // orthonormality of Tr rotation, finiteness
};

// One parsed KITTI label line (15 fields plus optional score). Dimensions are
// stored in the file order h, w, l and the location is the box bottom center
// in the rectified camera frame.
struct RawLabel {
  std::string type;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox{};  // left, top, right, bottom
  double h = 0.0, w = 0.0, l = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  double rotation_y = 0.0;
  std::optional<double> score;
};

// --- velodyne binary clouds (packed little-endian float32 x,y,z,intensity) --

PointCloud read_velodyne(std::span<const std::byte> bytes);
std::vector<std::byte> write_velodyne(const PointCloud& cloud);
PointCloud read_velodyne_file(const std::filesystem::path& path);
void write_velodyne_file(const PointCloud& cloud, const std::filesystem::path& path);

// --- labels ------------------------------------------------------------------

RawLabel parse_label_line(std::string_view line, std::size_t line_no);
std::string format_label_line(const RawLabel& raw);

// Camera-frame label -> LiDAR-frame annotation: the bottom-center location is
// mapped through inverse(Tr) o inverse(R0), lifted by h/2 to the geometric
// center, and rotation_y becomes yaw = -rotation_y - pi/2. Difficulty is
// assigned from the 2D bbox / occlusion / truncation tiers.
Annotation to_annotation(const RawLabel& raw, const Calibration& calib);
RawLabel to_raw_label(const Annotation& a, const Calibration& calib);

struct LabelReadResult {
  std::vector<Annotation> annotations;
  std::vector<RawLabel> dont_care;  // kept for evaluation, never augmented
};

LabelReadResult read_labels(std::string_view text, const Calibration& calib);
std::string write_labels(std::span<const Annotation> annotations,
                         std::span<const RawLabel> dont_care,
                         const Calibration& calib);

// --- calibration files ---------------------------------------------------------

Calibration read_calib(std::string_view text);
Calibration read_calib_file(const std::filesystem::path& path);
std::string write_calib(const Calibration& calib);

// Keeps exactly the points that project into the camera image (order
// preserved). Depth is the rectified-frame z.
PointCloud filter_fov(const PointCloud& cloud, const Calibration& calib);

// --- scenes ------------------------------------------------------------------

struct Scene {
  std::string id;
  PointCloud cloud;
  std::vector<Annotation> annotations;
  std::vector<RawLabel> dont_care;
  std::optional<Calibration> calib;
};

// Writes `velodyne/ID.bin`, `label_2/ID.txt` and, when calibration is
// present, `calib/ID.txt` under out_dir.
void write_scene(const Scene& scene, const std::filesystem::path& out_dir);

// Reads one scene from a KITTI-layout root (ROOT/ or ROOT/training/). The
// label file is optional; reading labels requires the calib file.
Scene read_scene(const std::filesystem::path& root, const std::string& id);

std::filesystem::path resolve_dataset_root(const std::filesystem::path& root);
std::vector<std::string> read_split(const std::filesystem::path& path);

}  // namespace lidar_aug::kitti

namespace lidar_aug {
using kitti::Scene;  // the scene type is used across every augmentation module
}
