#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lidar_aug {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Wraps an angle into [-pi, pi). KITTI stores rotation_y and alpha this way.
inline double wrap_angle_pi(double a) {
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - kPi;
}

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

struct Vec2 {
  double x = 0.0, y = 0.0;
};

// One LiDAR return in the sensor frame, meters. Coordinates are kept in
// double precision in memory; the float32 KITTI encoding lives at the I/O
// boundary only.
struct Point {
  double x = 0.0, y = 0.0, z = 0.0;
  float intensity = 0.0f;
};

struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

enum class Difficulty : std::uint8_t { Easy = 0, Moderate = 1, Hard = 2, Unknown = 3 };

const char* to_string(Difficulty d);
std::optional<Difficulty> difficulty_from_string(std::string_view s);

// Original KITTI label fields that do not participate in 3D geometry but are
// needed to write labels back and to assign difficulty tiers.
struct LabelMeta {
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox{0.0, 0.0, 0.0, 0.0};  // left, top, right, bottom (px)
  std::optional<double> score;
};

// 7-DoF upright box in the LiDAR frame. `center` is the geometric (volume)
// center; KITTI's bottom-center convention is converted at the I/O boundary.
// `width` spans across the heading, `length` along it, yaw is the rotation
// about +z (counter-clockwise seen from above), zero meaning heading = +x.
struct Annotation {
  Vec3 center;
  double width = 0.0;
  double length = 0.0;
  double height = 0.0;
  double yaw = 0.0;  // [0, 2*pi)
  std::string class_name;
  Difficulty difficulty = Difficulty::Unknown;
  std::optional<LabelMeta> meta;

  double volume() const { return width * length * height; }
};

void validate(const Annotation& a);  // throws ConfigError on bad dims/yaw

// --- whole-scene rigid / similarity transforms -----------------------------
// Each op transforms the points and the boxes jointly, preserving point count
// and order. They mutate in place; callers that need the original keep a copy.

void rotate_z(PointCloud& cloud, std::span<Annotation> annotations, double alpha);
void translate(PointCloud& cloud, std::span<Annotation> annotations, const Vec3& delta);
void scale(PointCloud& cloud, std::span<Annotation> annotations, double s);

enum class FlipYawMode {
  Mirror,  // yaw -> -yaw: the true mirror image of the heading
  Paper,   // yaw -> yaw + pi: literal reproduction mode
};

void flip_y(PointCloud& cloud, std::span<Annotation> annotations,
            FlipYawMode mode = FlipYawMode::Mirror);

// --- box geometry -----------------------------------------------------------

// The 8 corners: bottom face then top face, each counter-clockwise in x-y.
std::array<Vec3, 8> box_corners(const Annotation& a);

// BEV footprint corners, counter-clockwise.
std::array<Vec2, 4> bev_corners(const Annotation& a);

// Precomputed box-local frame for fast point membership tests.
struct BoxLocalFrame {
  double cx, cy, cz;
  double cos_yaw, sin_yaw;
  double half_l, half_w, half_h;

  explicit BoxLocalFrame(const Annotation& a)
      : cx(a.center.x), cy(a.center.y), cz(a.center.z),
        cos_yaw(std::cos(a.yaw)), sin_yaw(std::sin(a.yaw)),
        half_l(a.length * 0.5), half_w(a.width * 0.5), half_h(a.height * 0.5) {}

  Vec3 to_local(double x, double y, double z) const {
    const double dx = x - cx;
    const double dy = y - cy;
    return {cos_yaw * dx + sin_yaw * dy, -sin_yaw * dx + cos_yaw * dy, z - cz};
  }

  Vec3 to_global(const Vec3& local) const {
    return {cx + cos_yaw * local.x - sin_yaw * local.y,
            cy + sin_yaw * local.x + cos_yaw * local.y, cz + local.z};
  }

  // Boundary points count as inside (closed box).
  bool contains(double x, double y, double z, double margin) const {
    const Vec3 l = to_local(x, y, z);
    return std::fabs(l.x) <= half_l + margin && std::fabs(l.y) <= half_w + margin &&
           std::fabs(l.z) <= half_h + margin;
  }
};

// mask[i] is true iff point i lies inside the box grown by `margin` meters.
std::vector<bool> points_in_box(const PointCloud& cloud, const Annotation& a,
                                double margin = 0.0);
std::vector<std::uint32_t> points_in_box_indices(const PointCloud& cloud,
                                                 const Annotation& a,
                                                 double margin = 0.0);

// --- rotated-box overlap ----------------------------------------------------

// Area of the intersection of the two yaw-rotated BEV rectangles, computed by
// clipping one rectangle against the other's edges and applying the shoelace
// formula. Exactly 0 for disjoint rectangles.
double bev_intersection_area(const Annotation& a, const Annotation& b);

double bev_iou(const Annotation& a, const Annotation& b);
double iou_3d(const Annotation& a, const Annotation& b);

}  // namespace lidar_aug
