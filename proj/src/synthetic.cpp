#include "lidar_aug/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lidar_aug/aug_filter.hpp"
#include "lidar_aug/rng.hpp"

namespace lidar_aug {

namespace {

kitti::Mat3 rotation_xyz(double rx, double ry, double rz) {
  const double cx = std::cos(rx), sx = std::sin(rx);
  const double cy = std::cos(ry), sy = std::sin(ry);
  const double cz = std::cos(rz), sz = std::sin(rz);
  // Rz * Ry * Rx
  kitti::Mat3 r;
  r.m[0][0] = cz * cy;
  r.m[0][1] = cz * sy * sx - sz * cx;
  r.m[0][2] = cz * sy * cx + sz * sx;
  r.m[1][0] = sz * cy;
  r.m[1][1] = sz * sy * sx + cz * cx;
  r.m[1][2] = sz * sy * cx - cz * sx;
  r.m[2][0] = -sy;
  r.m[2][1] = cy * sx;
  r.m[2][2] = cy * cx;
  return r;
}

}  // namespace

kitti::Calibration synthetic_calibration() {
  kitti::Calibration calib;
  const double fx = 721.5377, fy = 721.5377, cx = 609.5593, cy = 172.854;
  calib.P2 = {fx, 0.0, cx, 44.85728, 0.0, fy, cy, 0.2163791, 0.0, 0.0, 1.0, 0.002745884};
  calib.R0 = rotation_xyz(0.002, -0.004, 0.008);
  // velo (x fwd, y left, z up) -> cam (x right, y down, z fwd)
  calib.Tr_rot.m[0][0] = 0.0; calib.Tr_rot.m[0][1] = -1.0; calib.Tr_rot.m[0][2] = 0.0;
  calib.Tr_rot.m[1][0] = 0.0; calib.Tr_rot.m[1][1] = 0.0;  calib.Tr_rot.m[1][2] = -1.0;
  calib.Tr_rot.m[2][0] = 1.0; calib.Tr_rot.m[2][1] = 0.0;  calib.Tr_rot.m[2][2] = 0.0;
  calib.Tr_t = {-0.002, -0.06, -0.27};
  calib.image_width = 1242;
  calib.image_height = 375;
  return calib;
}

std::string synthetic_scene_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

Scene make_synthetic_scene(const std::string& id, const SyntheticParams& params) {
  Rng rng(derive_scene_seed(params.seed, id));
  Scene scene;
  scene.id = id;
  if (params.with_calib) scene.calib = synthetic_calibration();

  const int span = std::max(0, params.max_annotations - params.min_annotations);
  const int n_annos = params.min_annotations + static_cast<int>(rng.index(span + 1));

  for (int k = 0; k < n_annos; ++k) {
    Annotation a;
    bool placed = false;
    for (int attempt = 0; attempt < 60 && !placed; ++attempt) {
      a.width = rng.uniform(1.55, 1.75);
      a.length = rng.uniform(3.6, 4.4);
      a.height = rng.uniform(1.40, 1.60);
      a.center.x = rng.uniform(8.0, 45.0);
      const double ymax = std::min(12.0, 0.5 * a.center.x);
      a.center.y = rng.uniform(-ymax, ymax);
      a.center.z = -1.65 + a.height * 0.5 + rng.uniform(-0.05, 0.05);
      a.yaw = rng.uniform(0.0, kTwoPi);
      placed = true;
      for (const Annotation& other : scene.annotations)
        if (bev_iou(a, other) > 0.0) {
          placed = false;
          break;
        }
    }
    if (!placed) continue;
    a.class_name = "Car";
    if (scene.calib) {
      kitti::RawLabel raw = kitti::to_raw_label(a, *scene.calib);
      LabelMeta meta;
      meta.bbox = raw.bbox;
      meta.alpha = raw.alpha;
      // occlusion mix 0:50% 1:25% 2:25%, truncation U(0, 0.3): all four
      // difficulty tiers occur at realistic rates
      const std::size_t occ_draw = rng.index(4);
      meta.occlusion = occ_draw == 3 ? 2 : (occ_draw == 2 ? 1 : 0);
      meta.truncation = rng.uniform(0.0, 0.3);
      a.meta = meta;
      a.difficulty =
          assign_difficulty(meta.bbox[3] - meta.bbox[1], meta.occlusion, meta.truncation);
    }
    scene.annotations.push_back(a);
  }

  // planted member points, strictly interior so membership is unambiguous
  std::size_t planted = 0;
  std::vector<Point> box_points;
  for (const Annotation& a : scene.annotations) {
    const int count = static_cast<int>(rng.index(params.max_points_per_annotation + 1));
    const BoxLocalFrame frame(a);
    for (int i = 0; i < count; ++i) {
      const Vec3 local{rng.uniform(-0.49, 0.49) * a.length,
                       rng.uniform(-0.49, 0.49) * a.width,
                       rng.uniform(-0.49, 0.49) * a.height};
      const Vec3 g = frame.to_global(local);
      box_points.push_back({g.x, g.y, g.z, static_cast<float>(rng.uniform())});
      ++planted;
    }
  }

  const int base =
      std::max(0, params.points_per_scene - static_cast<int>(planted));
  const int n_ground = base * 7 / 10;
  for (int i = 0; i < n_ground; ++i) {
    const double x = rng.uniform(0.0, 60.0);
    const double y = rng.uniform(-25.0, 25.0);
    const double z = -1.65 + rng.normal(0.03);
    scene.cloud.points.push_back({x, y, z, static_cast<float>(rng.uniform())});
  }
  for (int i = 0; i < base - n_ground; ++i) {
    const double x = rng.uniform(0.0, 60.0);
    const double y = rng.uniform(-25.0, 25.0);
    const double z = rng.uniform(-1.40, 2.5);
    scene.cloud.points.push_back({x, y, z, static_cast<float>(rng.uniform())});
  }
  scene.cloud.points.insert(scene.cloud.points.end(), box_points.begin(),
                            box_points.end());

  // occasionally a DontCare region, as real KITTI labels have
  if (scene.calib && rng.bernoulli(0.3)) {
    kitti::RawLabel dc;
    dc.type = "DontCare";
    dc.truncation = -1.0;
    dc.occlusion = -1;
    dc.alpha = -10.0;
    const double left = rng.uniform(0.0, 1100.0);
    const double top = rng.uniform(0.0, 300.0);
    dc.bbox = {left, top, left + rng.uniform(20.0, 120.0), top + rng.uniform(10.0, 60.0)};
    dc.h = dc.w = dc.l = -1.0;
    dc.x = dc.y = dc.z = -1000.0;
    dc.rotation_y = -10.0;
    scene.dont_care.push_back(dc);
  }
  return scene;
}

std::vector<Scene> make_synthetic_dataset(const SyntheticParams& params) {
  std::vector<Scene> scenes;
  scenes.reserve(params.scene_count);
  for (int i = 0; i < params.scene_count; ++i)
    scenes.push_back(make_synthetic_scene(synthetic_scene_id(i), params));
  return scenes;
}

}  // namespace lidar_aug
