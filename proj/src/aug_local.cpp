#include "lidar_aug/aug_local.hpp"

#include <cmath>

#include "lidar_aug/errors.hpp"

namespace lidar_aug {

void LocalTranslateParams::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw ConfigError("local_translate: sigma must be >= 0");
}

void LocalRotateParams::validate() const {
  if (!(beta >= 0.0) || !(beta <= kPi))
    throw ConfigError("local_rotate: beta must be in [0, pi]");
}

void LocalScaleParams::validate() const {
  if (!(t >= 0.0) || !(t < 1.0))
    throw ConfigError("local_scale: t must be in [0, 1)");
}

void translate_object(Scene& scene, std::size_t idx,
                      std::span<const std::uint32_t> members, const Vec3& delta) {
  for (std::uint32_t i : members) {
    Point& p = scene.cloud.points[i];
    p.x += delta.x;
    p.y += delta.y;
    p.z += delta.z;
  }
  scene.annotations[idx].center = scene.annotations[idx].center + delta;
}

void rotate_object(Scene& scene, std::size_t idx,
                   std::span<const std::uint32_t> members, double alpha) {
  Annotation& a = scene.annotations[idx];
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  for (std::uint32_t i : members) {
    Point& p = scene.cloud.points[i];
    const double dx = p.x - a.center.x;
    const double dy = p.y - a.center.y;
    p.x = a.center.x + dx * c - dy * s;
    p.y = a.center.y + dx * s + dy * c;
  }
  a.yaw = wrap_angle(a.yaw + alpha);
}

void scale_object(Scene& scene, std::size_t idx,
                  std::span<const std::uint32_t> members, double s) {
  if (!(s > 0.0)) throw ConfigError("scale factor must be positive");
  Annotation& a = scene.annotations[idx];
  for (std::uint32_t i : members) {
    Point& p = scene.cloud.points[i];
    p.x = a.center.x + (p.x - a.center.x) * s;
    p.y = a.center.y + (p.y - a.center.y) * s;
    p.z = a.center.z + (p.z - a.center.z) * s;
  }
  a.width *= s;
  a.length *= s;
  a.height *= s;
}

namespace {

std::vector<std::vector<std::uint32_t>> all_members(const Scene& scene) {
  std::vector<std::vector<std::uint32_t>> members;
  members.reserve(scene.annotations.size());
  for (const Annotation& a : scene.annotations)
    members.push_back(points_in_box_indices(scene.cloud, a, 0.0));
  return members;
}

}  // namespace

void local_translate(Scene& scene, const LocalTranslateParams& params, Rng& rng) {
  params.validate();
  const auto members = all_members(scene);
  for (std::size_t i = 0; i < scene.annotations.size(); ++i) {
    const Vec3 delta{rng.normal(params.sigma), rng.normal(params.sigma),
                     rng.normal(params.sigma)};
    translate_object(scene, i, members[i], delta);
  }
}

void local_rotate(Scene& scene, const LocalRotateParams& params, Rng& rng) {
  params.validate();
  const auto members = all_members(scene);
  for (std::size_t i = 0; i < scene.annotations.size(); ++i) {
    const double alpha = rng.uniform(-params.beta, params.beta);
    rotate_object(scene, i, members[i], alpha);
  }
}

void local_scale(Scene& scene, const LocalScaleParams& params, Rng& rng) {
  params.validate();
  const auto members = all_members(scene);
  for (std::size_t i = 0; i < scene.annotations.size(); ++i) {
    const double s = rng.uniform(1.0 - params.t, 1.0 + params.t);
    scale_object(scene, i, members[i], s);
  }
}

}  // namespace lidar_aug
