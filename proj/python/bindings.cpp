#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lidar_aug/aug_filter.hpp"
#include "lidar_aug/aug_global.hpp"
#include "lidar_aug/aug_local.hpp"
#include "lidar_aug/aug_sample.hpp"
#include "lidar_aug/errors.hpp"
#include "lidar_aug/geom.hpp"
#include "lidar_aug/kitti_io.hpp"
#include "lidar_aug/metrics.hpp"
#include "lidar_aug/policy.hpp"
#include "lidar_aug/stats.hpp"
#include "lidar_aug/synthetic.hpp"

namespace py = pybind11;
using namespace lidar_aug;

namespace {

Mode parse_mode(const std::string& mode) {
  if (mode == "train") return Mode::Train;
  if (mode == "test") return Mode::Test;
  throw ConfigError("mode must be 'train' or 'test'");
}

py::array_t<double> cloud_to_numpy(const PointCloud& cloud) {
  py::array_t<double> out({static_cast<py::ssize_t>(cloud.size()), py::ssize_t(4)});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < view.shape(0); ++i) {
    const Point& p = cloud.points[static_cast<std::size_t>(i)];
    view(i, 0) = p.x;
    view(i, 1) = p.y;
    view(i, 2) = p.z;
    view(i, 3) = p.intensity;
  }
  return out;
}

PointCloud cloud_from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
  if (arr.ndim() != 2 || (arr.shape(1) != 3 && arr.shape(1) != 4))
    throw ConfigError("expected an (N, 3) or (N, 4) array");
  PointCloud cloud;
  cloud.points.resize(static_cast<std::size_t>(arr.shape(0)));
  const auto view = arr.unchecked<2>();
  const bool has_intensity = arr.shape(1) == 4;
  for (py::ssize_t i = 0; i < view.shape(0); ++i) {
    Point& p = cloud.points[static_cast<std::size_t>(i)];
    p.x = view(i, 0);
    p.y = view(i, 1);
    p.z = view(i, 2);
    p.intensity = has_intensity ? static_cast<float>(view(i, 3)) : 0.0f;
  }
  return cloud;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "deterministic LiDAR scene augmentation toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  py::enum_<Difficulty>(m, "Difficulty")
      .value("EASY", Difficulty::Easy)
      .value("MODERATE", Difficulty::Moderate)
      .value("HARD", Difficulty::Hard)
      .value("UNKNOWN", Difficulty::Unknown);

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<double, double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0,
           py::arg("z") = 0.0)
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def("__repr__", [](const Vec3& v) {
        return "Vec3(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " +
               std::to_string(v.z) + ")";
      });

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init<>())
      .def_static("from_numpy", &cloud_from_numpy, py::arg("array"))
      .def("to_numpy", &cloud_to_numpy)
      .def("__len__", &PointCloud::size);

  py::class_<Annotation>(m, "Annotation")
      .def(py::init<>())
      .def_readwrite("center", &Annotation::center)
      .def_readwrite("width", &Annotation::width)
      .def_readwrite("length", &Annotation::length)
      .def_readwrite("height", &Annotation::height)
      .def_readwrite("yaw", &Annotation::yaw)
      .def_readwrite("class_name", &Annotation::class_name)
      .def_readwrite("difficulty", &Annotation::difficulty)
      .def("volume", &Annotation::volume)
      .def("__repr__", [](const Annotation& a) {
        return "Annotation(" + a.class_name + ", x=" + std::to_string(a.center.x) +
               ", y=" + std::to_string(a.center.y) + ", yaw=" + std::to_string(a.yaw) + ")";
      });

  py::class_<Scene>(m, "Scene")
      .def(py::init<>())
      .def_readwrite("id", &Scene::id)
      .def_readwrite("cloud", &Scene::cloud)
      .def_readwrite("annotations", &Scene::annotations)
      .def("copy", [](const Scene& s) { return s; })
      .def("__repr__", [](const Scene& s) {
        return "Scene(" + s.id + ", " + std::to_string(s.cloud.size()) + " points, " +
               std::to_string(s.annotations.size()) + " annotations)";
      });

  // geometry
  m.def(
      "rotate_z",
      [](Scene& scene, double alpha) { rotate_z(scene.cloud, scene.annotations, alpha); },
      py::arg("scene"), py::arg("alpha"));
  m.def(
      "translate",
      [](Scene& scene, double dx, double dy, double dz) {
        translate(scene.cloud, scene.annotations, {dx, dy, dz});
      },
      py::arg("scene"), py::arg("dx"), py::arg("dy"), py::arg("dz"));
  m.def(
      "scale", [](Scene& scene, double s) { scale(scene.cloud, scene.annotations, s); },
      py::arg("scene"), py::arg("s"));
  m.def(
      "flip_y",
      [](Scene& scene, const std::string& yaw_mode) {
        flip_y(scene.cloud, scene.annotations,
               yaw_mode == "paper" ? FlipYawMode::Paper : FlipYawMode::Mirror);
      },
      py::arg("scene"), py::arg("yaw_mode") = "mirror");
  m.def("bev_iou", &bev_iou, py::arg("a"), py::arg("b"));
  m.def("iou_3d", &iou_3d, py::arg("a"), py::arg("b"));
  m.def(
      "box_corners",
      [](const Annotation& a) {
        py::array_t<double> out({py::ssize_t(8), py::ssize_t(3)});
        auto view = out.mutable_unchecked<2>();
        const auto corners = box_corners(a);
        for (int i = 0; i < 8; ++i) {
          view(i, 0) = corners[i].x;
          view(i, 1) = corners[i].y;
          view(i, 2) = corners[i].z;
        }
        return out;
      },
      py::arg("annotation"));
  m.def(
      "points_in_box",
      [](const PointCloud& cloud, const Annotation& a, double margin) {
        const auto mask = points_in_box(cloud, a, margin);
        py::array_t<bool> out(static_cast<py::ssize_t>(mask.size()));
        auto view = out.mutable_unchecked<1>();
        for (py::ssize_t i = 0; i < view.shape(0); ++i)
          view(i) = mask[static_cast<std::size_t>(i)];
        return out;
      },
      py::arg("cloud"), py::arg("annotation"), py::arg("margin") = 0.0);

  // policies
  py::class_<Policy>(m, "Policy")
      .def_readonly("name", &Policy::name)
      .def_readwrite("seed", &Policy::seed)
      .def("to_json", &policy_to_json)
      .def("__repr__", [](const Policy& p) { return "Policy(" + p.name + ")"; });
  m.def("load_policy", &load_policy, py::arg("config_text"));
  m.def("list_presets", &list_presets);
  m.def(
      "apply_policy",
      [](Scene& scene, const Policy& policy, const SampleDatabase* db,
         const std::string& mode) { apply_policy(scene, policy, db, parse_mode(mode)); },
      py::arg("scene"), py::arg("policy"), py::arg("db") = nullptr,
      py::arg("mode") = "train");

  // oversampling database
  py::class_<SampleDatabase>(m, "SampleDatabase")
      .def("__len__", &SampleDatabase::size)
      .def_readonly("provenance", &SampleDatabase::provenance);
  m.def(
      "build_database",
      [](const std::vector<Scene>& scenes, int min_points) {
        return build_database(scenes, min_points);
      },
      py::arg("scenes"), py::arg("min_points") = 1);
  m.def("save_database", &save_database, py::arg("db"), py::arg("stem"));
  m.def("load_database", &load_database, py::arg("stem"));

  // KITTI I/O
  m.def("read_scene", &kitti::read_scene, py::arg("root"), py::arg("id"));
  m.def("write_scene", &kitti::write_scene, py::arg("scene"), py::arg("out_dir"));
  m.def("read_split", &kitti::read_split, py::arg("path"));

  // synthetic datasets
  m.def(
      "make_synthetic_dataset",
      [](int scene_count, int points_per_scene, std::uint64_t seed) {
        SyntheticParams params;
        params.scene_count = scene_count;
        params.points_per_scene = points_per_scene;
        params.seed = seed;
        return make_synthetic_dataset(params);
      },
      py::arg("scene_count") = 10, py::arg("points_per_scene") = 2000,
      py::arg("seed") = 0);

  // statistics
  py::class_<SceneStats>(m, "SceneStats")
      .def_readonly("scene_id", &SceneStats::scene_id)
      .def_readonly("total_points", &SceneStats::total_points)
      .def_readonly("foreground_points", &SceneStats::foreground_points)
      .def_readonly("per_annotation_counts", &SceneStats::per_annotation_counts)
      .def_readonly("foreground_ratio", &SceneStats::foreground_ratio);
  py::class_<DatasetStats>(m, "DatasetStats")
      .def_readonly("scene_count", &DatasetStats::scene_count)
      .def_readonly("mean_points", &DatasetStats::mean_points)
      .def_readonly("mean_foreground", &DatasetStats::mean_foreground)
      .def_readonly("foreground_ratio", &DatasetStats::foreground_ratio);
  m.def("scene_stats", &scene_stats, py::arg("scene"));
  m.def(
      "dataset_stats",
      [](const std::vector<Scene>& scenes) { return dataset_stats(scenes); },
      py::arg("scenes"));

  // evaluation
  py::class_<metrics::Detection>(m, "Detection")
      .def(py::init([](const Annotation& a, double score) {
             return metrics::Detection{a, score};
           }),
           py::arg("annotation"), py::arg("score"))
      .def_readwrite("annotation", &metrics::Detection::annotation)
      .def_readwrite("score", &metrics::Detection::score);
  m.def(
      "evaluate",
      [](const std::map<std::string, std::vector<metrics::Detection>>& dets,
         const std::map<std::string, std::vector<Annotation>>& gts, double iou_threshold,
         const std::string& class_name) {
        const metrics::ApTable table = metrics::evaluate(dets, gts, iou_threshold, class_name);
        py::dict out;
        py::dict ap40, ap11;
        const char* names[3] = {"easy", "moderate", "hard"};
        for (int i = 0; i < 3; ++i) {
          ap40[names[i]] = table.ap40[static_cast<std::size_t>(i)];
          ap11[names[i]] = table.ap11[static_cast<std::size_t>(i)];
        }
        out["ap40"] = ap40;
        out["ap11"] = ap11;
        out["moderate"] = table.moderate();
        return out;
      },
      py::arg("detections"), py::arg("ground_truths"), py::arg("iou_threshold") = 0.7,
      py::arg("class_name") = "Car");

  m.attr("__version__") = "0.1.0";
}
