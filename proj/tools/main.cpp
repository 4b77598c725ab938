// lidar-aug: build sample databases, augment KITTI datasets, compute
// foreground statistics, and evaluate detections.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lidar_aug/aug_sample.hpp"
#include "lidar_aug/errors.hpp"
#include "lidar_aug/kitti_io.hpp"
#include "lidar_aug/metrics.hpp"
#include "lidar_aug/policy.hpp"
#include "lidar_aug/stats.hpp"
#include "lidar_aug/synthetic.hpp"

namespace fs = std::filesystem;
using namespace lidar_aug;

namespace {

struct DatasetOptions {
  std::string dataset_root;
  std::string split_file;
  int synthetic = 0;
  int synthetic_points = 2000;
  std::uint64_t seed = 0;
};

void add_dataset_flags(CLI::App* cmd, DatasetOptions& opt) {
  auto* dataset = cmd->add_option("--dataset", opt.dataset_root,
                                  "KITTI-layout dataset root (ROOT or ROOT/training)");
  cmd->add_option("--split", opt.split_file,
                  "scene id list, one per line (default: every velodyne file)");
  auto* synthetic =
      cmd->add_option("--synthetic", opt.synthetic,
                      "generate N synthetic scenes instead of reading a dataset");
  cmd->add_option("--synthetic-points", opt.synthetic_points,
                  "approximate points per synthetic scene");
  synthetic->excludes(dataset);
  dataset->excludes(synthetic);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LIDAR_AUG_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("LIDAR_AUG_SEED is not an integer");
    }
  }
  return 0;
}

std::vector<std::string> list_scene_ids(const fs::path& root) {
  const fs::path velo = kitti::resolve_dataset_root(root) / "velodyne";
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(velo))
    if (entry.path().extension() == ".bin") ids.push_back(entry.path().stem().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

// A dataset is either a directory on disk or a deterministic synthetic set.
struct SceneSource {
  std::vector<std::string> ids;
  std::optional<fs::path> root;       // disk-backed
  SyntheticParams synthetic_params;   // otherwise

  Scene load(std::size_t i) const {
    if (root) return kitti::read_scene(*root, ids[i]);
    return make_synthetic_scene(ids[i], synthetic_params);
  }
};

SceneSource open_source(const DatasetOptions& opt) {
  SceneSource src;
  if (opt.synthetic > 0) {
    src.synthetic_params.scene_count = opt.synthetic;
    src.synthetic_params.points_per_scene = opt.synthetic_points;
    src.synthetic_params.seed = opt.seed;
    for (int i = 0; i < opt.synthetic; ++i) src.ids.push_back(synthetic_scene_id(i));
    if (!opt.split_file.empty()) src.ids = kitti::read_split(opt.split_file);
    return src;
  }
  if (opt.dataset_root.empty())
    throw ConfigError("either --dataset or --synthetic is required");
  src.root = fs::path(opt.dataset_root);
  src.ids = opt.split_file.empty() ? list_scene_ids(*src.root)
                                   : kitti::read_split(opt.split_file);
  return src;
}

void parallel_over_scenes(int workers, std::size_t count,
                          const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw ConfigError("--workers must be >= 1");
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const int n = std::min<int>(workers, static_cast<int>(count));
  threads.reserve(n);
  for (int t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

Policy resolve_policy(const std::string& arg) {
  if (auto p = find_preset(arg)) return *p;
  if (fs::exists(arg)) return load_policy_file(arg);
  throw ConfigError("policy '" + arg + "' is neither a preset nor a config file");
}

// --- subcommands -------------------------------------------------------------

int cmd_build_db(const DatasetOptions& opt, const std::string& output, int min_points) {
  const SceneSource src = open_source(opt);
  DatabaseBuilder builder(min_points);
  for (std::size_t i = 0; i < src.ids.size(); ++i) builder.add_scene(src.load(i));
  const SampleDatabase db = builder.finish();
  save_database(db, output);
  std::cout << "wrote " << db.size() << " entries to " << output << ".idx/.bin\n";
  for (const auto& [cls, indices] : db.class_index)
    std::cout << "  " << cls << ": " << indices.size() << "\n";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(db.provenance));
  std::cout << "provenance " << buf << "\n";
  return 0;
}

int cmd_augment(const DatasetOptions& opt, const std::string& policy_arg,
                std::uint64_t seed, bool seed_given, const std::string& output,
                const std::string& mode_name, const std::string& db_stem, int workers) {
  Policy policy = resolve_policy(policy_arg);
  if (seed_given || policy.seed == 0) policy.seed = seed;
  const Mode mode = mode_name == "test" ? Mode::Test : Mode::Train;

  std::optional<SampleDatabase> db;
  if (policy.find(StepKind::Oversample) && mode == Mode::Train) {
    if (db_stem.empty())
      throw ConfigError("policy '" + policy.name +
                        "' oversamples; provide --db (see build-db)");
    db = load_database(db_stem);
  }

  const SceneSource src = open_source(opt);
  const fs::path out_root(output);

  struct Delta {
    std::string id;
    std::size_t points_before = 0, points_after = 0;
    std::size_t annotations_before = 0, annotations_after = 0;
  };
  std::vector<Delta> deltas(src.ids.size());

  parallel_over_scenes(workers, src.ids.size(), [&](std::size_t i) {
    Scene scene = src.load(i);
    Delta& d = deltas[i];
    d.id = scene.id;
    d.points_before = scene.cloud.size();
    d.annotations_before = scene.annotations.size();
    apply_policy(scene, policy, db ? &*db : nullptr, mode);
    d.points_after = scene.cloud.size();
    d.annotations_after = scene.annotations.size();
    kitti::write_scene(scene, out_root);
  });

  nlohmann::json manifest;
  manifest["policy"] = nlohmann::json::parse(policy_to_json(policy));
  manifest["seed"] = policy.seed;
  manifest["mode"] = mode == Mode::Test ? "test" : "train";
  nlohmann::json scenes = nlohmann::json::array();
  for (const Delta& d : deltas) {
    scenes.push_back({{"id", d.id},
                      {"points_before", d.points_before},
                      {"points_after", d.points_after},
                      {"annotations_before", d.annotations_before},
                      {"annotations_after", d.annotations_after}});
  }
  manifest["scenes"] = std::move(scenes);
  std::ofstream out(out_root / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest under " + output);
  out << manifest.dump(2) << "\n";

  std::cout << "augmented " << src.ids.size() << " scenes with " << policy.name
            << " (seed " << policy.seed << ") into " << output << "\n";
  return 0;
}

int cmd_stats(const DatasetOptions& opt, const std::string& output, int workers) {
  const SceneSource src = open_source(opt);
  std::vector<SceneStats> per_scene(src.ids.size());
  parallel_over_scenes(workers, src.ids.size(),
                       [&](std::size_t i) { per_scene[i] = scene_stats(src.load(i)); });
  StatsAccumulator acc;
  for (const SceneStats& s : per_scene) acc.add(s);
  const DatasetStats stats = acc.finish();
  std::cout << stats_report_text(stats);
  if (!output.empty()) {
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + output);
    out << stats_report_json(stats);
  }
  return 0;
}

int cmd_eval(const DatasetOptions& opt, const std::string& results_dir, double iou,
             const std::string& class_name, bool show_ap11) {
  const SceneSource src = open_source(opt);
  std::map<std::string, std::vector<metrics::Detection>> dets;
  std::map<std::string, std::vector<Annotation>> gts;

  for (std::size_t i = 0; i < src.ids.size(); ++i) {
    Scene scene = src.load(i);
    if (!scene.calib)
      throw DataError("scene " + scene.id + " has no calibration; cannot evaluate");
    gts[scene.id] = scene.annotations;

    auto& scene_dets = dets[scene.id];  // empty when no result file exists
    const fs::path file = fs::path(results_dir) / (scene.id + ".txt");
    if (fs::exists(file)) {
      std::ifstream in(file, std::ios::binary);
      if (!in) throw IoError("cannot open " + file.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      std::string text = ss.str();
      std::size_t line_no = 0, pos = 0;
      while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string line =
            text.substr(pos, eol == std::string::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        kitti::RawLabel raw;
        try {
          raw = kitti::parse_label_line(line, line_no);
        } catch (const ParseError& e) {
          throw ParseError(file.string() + ": " + e.what());
        }
        if (raw.type == "DontCare") continue;
        if (!class_name.empty() && raw.type != class_name) continue;
        metrics::Detection det;
        det.annotation = kitti::to_annotation(raw, *scene.calib);
        det.score = raw.score.value_or(1.0);
        scene_dets.push_back(std::move(det));
      }
    }
  }

  const metrics::ApTable table = metrics::evaluate(dets, gts, iou, class_name);
  std::cout << class_name << " 3D ap40: easy " << table.ap40[0] * 100.0 << " moderate "
            << table.ap40[1] * 100.0 << " hard " << table.ap40[2] * 100.0 << "\n";
  if (show_ap11)
    std::cout << class_name << " 3D ap11: easy " << table.ap11[0] * 100.0 << " moderate "
              << table.ap11[1] * 100.0 << " hard " << table.ap11[2] * 100.0 << "\n";
  std::cout << "ranking metric (moderate ap40): " << table.moderate() * 100.0 << "\n";
  return 0;
}

int cmd_presets(bool table) {
  const auto presets = list_presets();
  if (!table) {
    for (const Policy& p : presets) std::cout << policy_to_json(p) << "\n";
    return 0;
  }
  for (const Policy& p : presets) {
    std::cout << p.name << ":";
    for (const Step& s : p.steps) {
      std::cout << ' ' << to_string(s.kind);
      std::visit(
          [&](const auto& params) {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, GlobalTranslateParams> ||
                          std::is_same_v<T, LocalTranslateParams>)
              std::cout << "(sigma=" << params.sigma << ")";
            else if constexpr (std::is_same_v<T, GlobalRotateParams> ||
                               std::is_same_v<T, LocalRotateParams>)
              std::cout << "(beta=" << params.beta << ")";
            else if constexpr (std::is_same_v<T, GlobalScaleParams> ||
                               std::is_same_v<T, LocalScaleParams>)
              std::cout << "(t=" << params.t << ")";
            else if constexpr (std::is_same_v<T, FlipParams>)
              std::cout << "(p=" << params.probability << ")";
            else if constexpr (std::is_same_v<T, GroundRemovalParams>)
              std::cout << "(percentile=" << params.percentile << ")";
            else if constexpr (std::is_same_v<T, DifficultyFilterParams>) {
              std::cout << "(drop=";
              if (params.drop_unknown) std::cout << "U";
              if (params.drop_hard) std::cout << "H";
              if (params.drop_moderate) std::cout << "M";
              std::cout << ")";
            } else if constexpr (std::is_same_v<T, PointCountFilterParams>)
              std::cout << "(min_points=" << params.min_points << ")";
            else if constexpr (std::is_same_v<T, OversampleParams>)
              std::cout << "(target=" << params.target_count << ")";
          },
          s.params);
    }
    if (p.steps.empty()) std::cout << " (no augmentation)";
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic LiDAR scene augmentation toolkit"};
  app.require_subcommand(1);

  DatasetOptions opt;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed (default: $LIDAR_AUG_SEED or 0)")
        ->each([&](const std::string&) { seed_given = true; });
  };

  // build-db
  auto* build_db = app.add_subcommand("build-db", "build an oversampling database");
  add_dataset_flags(build_db, opt);
  add_seed(build_db);
  std::string db_output;
  int db_min_points = 1;
  build_db->add_option("--output", db_output, "output stem (writes stem.idx, stem.bin)")
      ->required();
  build_db->add_option("--min-points", db_min_points,
                       "minimum member points per database entry");

  // augment
  auto* augment = app.add_subcommand("augment", "apply a policy to a dataset");
  add_dataset_flags(augment, opt);
  add_seed(augment);
  std::string policy_arg, aug_output, mode_name = "train", db_stem;
  int workers = 1;
  augment->add_option("--policy", policy_arg, "preset name or policy JSON file")
      ->required();
  augment->add_option("--output", aug_output, "output dataset root")->required();
  augment->add_option("--mode", mode_name, "train or test")
      ->check(CLI::IsMember({"train", "test"}));
  augment->add_option("--db", db_stem, "sample database stem (from build-db)");
  augment->add_option("--workers", workers, "parallel scene workers");

  // stats
  auto* stats = app.add_subcommand("stats", "foreground/background statistics");
  add_dataset_flags(stats, opt);
  add_seed(stats);
  std::string stats_output;
  stats->add_option("--output", stats_output, "also write a JSON report here");
  stats->add_option("--workers", workers, "parallel scene workers");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate detections (ap40/ap11)");
  add_dataset_flags(eval, opt);
  add_seed(eval);
  std::string results_dir, class_name = "Car";
  double iou = 0.7;
  bool show_ap11 = false;
  eval->add_option("--results", results_dir, "directory of KITTI result files")
      ->required();
  eval->add_option("--iou", iou, "3D IoU threshold (car default 0.7)");
  eval->add_option("--class", class_name, "class to evaluate");
  eval->add_flag("--ap11", show_ap11, "also print 11-point ap");

  // presets
  auto* presets = app.add_subcommand("presets", "list the 43 study policies");
  bool presets_table = false;
  presets->add_flag("--table", presets_table, "human-readable table instead of JSON");

  try {
    app.parse(argc, argv);
    seed = seed_given ? seed : default_seed();
    opt.seed = seed;

    if (build_db->parsed()) return cmd_build_db(opt, db_output, db_min_points);
    if (augment->parsed())
      return cmd_augment(opt, policy_arg, seed, seed_given, aug_output, mode_name,
                         db_stem, workers);
    if (stats->parsed()) return cmd_stats(opt, stats_output, workers);
    if (eval->parsed()) return cmd_eval(opt, results_dir, iou, class_name, show_ap11);
    if (presets->parsed()) return cmd_presets(presets_table);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
