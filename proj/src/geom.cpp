#include "lidar_aug/geom.hpp"

#include <algorithm>

#include "lidar_aug/errors.hpp"

namespace lidar_aug {

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Moderate: return "moderate";
    case Difficulty::Hard: return "hard";
    case Difficulty::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Difficulty> difficulty_from_string(std::string_view s) {
  if (s == "easy" || s == "Easy") return Difficulty::Easy;
  if (s == "moderate" || s == "Moderate") return Difficulty::Moderate;
  if (s == "hard" || s == "Hard") return Difficulty::Hard;
  if (s == "unknown" || s == "Unknown") return Difficulty::Unknown;
  return std::nullopt;
}

void validate(const Annotation& a) {
  if (!(a.width > 0.0) || !(a.length > 0.0) || !(a.height > 0.0))
    throw ConfigError("annotation dims must be positive");
  if (!std::isfinite(a.center.x) || !std::isfinite(a.center.y) ||
      !std::isfinite(a.center.z) || !std::isfinite(a.yaw))
    throw ConfigError("annotation fields must be finite");
}

void rotate_z(PointCloud& cloud, std::span<Annotation> annotations, double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  for (Point& p : cloud.points) {
    const double x = p.x, y = p.y;
    p.x = x * c - y * s;
    p.y = x * s + y * c;
  }
  for (Annotation& a : annotations) {
    const double x = a.center.x, y = a.center.y;
    a.center.x = x * c - y * s;
    a.center.y = x * s + y * c;
    a.yaw = wrap_angle(a.yaw + alpha);
  }
}

void translate(PointCloud& cloud, std::span<Annotation> annotations, const Vec3& delta) {
  for (Point& p : cloud.points) {
    p.x += delta.x;
    p.y += delta.y;
    p.z += delta.z;
  }
  for (Annotation& a : annotations) a.center = a.center + delta;
}

void scale(PointCloud& cloud, std::span<Annotation> annotations, double s) {
  if (!(s > 0.0)) throw ConfigError("scale factor must be positive");
  for (Point& p : cloud.points) {
    p.x *= s;
    p.y *= s;
    p.z *= s;
  }
  for (Annotation& a : annotations) {
    a.center = a.center * s;
    a.width *= s;
    a.length *= s;
    a.height *= s;
  }
}

void flip_y(PointCloud& cloud, std::span<Annotation> annotations, FlipYawMode mode) {
  for (Point& p : cloud.points) p.y = -p.y;
  for (Annotation& a : annotations) {
    a.center.y = -a.center.y;
    a.yaw = mode == FlipYawMode::Paper ? wrap_angle(a.yaw + kPi) : wrap_angle(-a.yaw);
  }
}

std::array<Vec3, 8> box_corners(const Annotation& a) {
  const BoxLocalFrame f(a);
  std::array<Vec3, 8> out;
  static constexpr double sx[4] = {+1.0, +1.0, -1.0, -1.0};
  static constexpr double sy[4] = {-1.0, +1.0, +1.0, -1.0};
  for (int i = 0; i < 4; ++i) {
    out[i] = f.to_global({sx[i] * f.half_l, sy[i] * f.half_w, -f.half_h});
    out[i + 4] = f.to_global({sx[i] * f.half_l, sy[i] * f.half_w, +f.half_h});
  }
  return out;
}

std::array<Vec2, 4> bev_corners(const Annotation& a) {
  const BoxLocalFrame f(a);
  std::array<Vec2, 4> out;
  static constexpr double sx[4] = {+1.0, +1.0, -1.0, -1.0};
  static constexpr double sy[4] = {-1.0, +1.0, +1.0, -1.0};
  for (int i = 0; i < 4; ++i) {
    const Vec3 g = f.to_global({sx[i] * f.half_l, sy[i] * f.half_w, 0.0});
    out[i] = {g.x, g.y};
  }
  return out;
}

std::vector<bool> points_in_box(const PointCloud& cloud, const Annotation& a,
                                double margin) {
  if (margin < 0.0) throw ConfigError("membership margin must be >= 0");
  const BoxLocalFrame f(a);
  std::vector<bool> mask(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    mask[i] = f.contains(p.x, p.y, p.z, margin);
  }
  return mask;
}

std::vector<std::uint32_t> points_in_box_indices(const PointCloud& cloud,
                                                 const Annotation& a, double margin) {
  if (margin < 0.0) throw ConfigError("membership margin must be >= 0");
  const BoxLocalFrame f(a);
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    if (f.contains(p.x, p.y, p.z, margin)) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

namespace {

// Sutherland-Hodgman: clip a convex CCW polygon by the half-plane to the left
// of the directed edge q0->q1. Writes at most n+1 vertices.
std::size_t clip_half_plane(const Vec2* in, std::size_t n, const Vec2& q0,
                            const Vec2& q1, Vec2* out) {
  const double ex = q1.x - q0.x;
  const double ey = q1.y - q0.y;
  auto side = [&](const Vec2& p) { return ex * (p.y - q0.y) - ey * (p.x - q0.x); };
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& cur = in[i];
    const Vec2& nxt = in[(i + 1) % n];
    const double sc = side(cur);
    const double sn = side(nxt);
    if (sc >= 0.0) out[m++] = cur;
    if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
      const double t = sc / (sc - sn);
      out[m++] = {cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)};
    }
  }
  return m;
}

double shoelace(const Vec2* p, std::size_t n) {
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return std::max(0.0, 0.5 * acc);
}

}  // namespace

double bev_intersection_area(const Annotation& a, const Annotation& b) {
  // Canonical argument order makes the result exactly symmetric.
  auto key = [](const Annotation& x) {
    return std::array<double, 5>{x.center.x, x.center.y, x.width, x.length, x.yaw};
  };
  if (key(b) < key(a)) return bev_intersection_area(b, a);

  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);

  // AABB reject: disjoint footprints give an exact zero fast.
  double min_ax = ca[0].x, max_ax = ca[0].x, min_ay = ca[0].y, max_ay = ca[0].y;
  double min_bx = cb[0].x, max_bx = cb[0].x, min_by = cb[0].y, max_by = cb[0].y;
  for (int i = 1; i < 4; ++i) {
    min_ax = std::min(min_ax, ca[i].x); max_ax = std::max(max_ax, ca[i].x);
    min_ay = std::min(min_ay, ca[i].y); max_ay = std::max(max_ay, ca[i].y);
    min_bx = std::min(min_bx, cb[i].x); max_bx = std::max(max_bx, cb[i].x);
    min_by = std::min(min_by, cb[i].y); max_by = std::max(max_by, cb[i].y);
  }
  if (min_ax > max_bx || min_bx > max_ax || min_ay > max_by || min_by > max_ay)
    return 0.0;

  // Rect-rect intersection has at most 8 vertices; 16 leaves headroom.
  Vec2 buf_a[16], buf_b[16];
  std::copy(ca.begin(), ca.end(), buf_a);
  std::size_t n = 4;
  Vec2* src = buf_a;
  Vec2* dst = buf_b;
  for (int e = 0; e < 4 && n >= 3; ++e) {
    n = clip_half_plane(src, n, cb[e], cb[(e + 1) % 4], dst);
    std::swap(src, dst);
  }
  return shoelace(src, n);
}

double bev_iou(const Annotation& a, const Annotation& b) {
  const double inter = bev_intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double area_a = a.width * a.length;
  const double area_b = b.width * b.length;
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Annotation& a, const Annotation& b) {
  const double zlo = std::max(a.center.z - a.height * 0.5, b.center.z - b.height * 0.5);
  const double zhi = std::min(a.center.z + a.height * 0.5, b.center.z + b.height * 0.5);
  const double dz = zhi - zlo;
  if (dz <= 0.0) return 0.0;
  const double inter = bev_intersection_area(a, b) * dz;
  if (inter <= 0.0) return 0.0;
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace lidar_aug
