// Acceptance suite: runs every toolkit-level criterion at its stated
// tolerance and prints one PASS/FAIL/SKIP line per criterion. Exits nonzero
// if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

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
#include "test_support.hpp"

using namespace lidar_aug;
using namespace test_support;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail = "") {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  if (!ok) ++failures;
}

void skip(const char* name, const std::string& why) {
  std::cout << "[SKIP] " << name << " (" << why << ")\n";
}

struct Failure {
  std::string detail;
};

// --- 1. geometry invariant suite --------------------------------------------

bool geometry_invariants(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240001);
  for (int trial = 0; trial < 1000; ++trial) {
    auto planted = planted_scene(rng, 150, 3, 20);
    Scene& scene = planted.scene;

    // rotation isometry, relative 1e-6, on a point subsample
    {
      auto cloud = scene.cloud;
      std::vector<Annotation> annos = scene.annotations;
      const double alpha = rng.uniform(-kPi, kPi);
      rotate_z(cloud, annos, alpha);
      const std::size_t n = std::min<std::size_t>(cloud.size(), 60);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const Point &a0 = scene.cloud.points[i], &b0 = scene.cloud.points[j];
          const Point &a1 = cloud.points[i], &b1 = cloud.points[j];
          const double d0 = std::hypot(a0.x - b0.x, a0.y - b0.y, a0.z - b0.z);
          const double d1 = std::hypot(a1.x - b1.x, a1.y - b1.y, a1.z - b1.z);
          if (std::fabs(d1 - d0) > 1e-6 * std::max(1.0, d0)) {
            detail = "isometry violated at trial " + std::to_string(trial);
            return false;
          }
        }
      // inverse composition, absolute 1e-9
      rotate_z(cloud, annos, -alpha);
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (std::fabs(cloud.points[i].x - scene.cloud.points[i].x) > 1e-9 ||
            std::fabs(cloud.points[i].y - scene.cloud.points[i].y) > 1e-9) {
          detail = "rotation inverse drift at trial " + std::to_string(trial);
          return false;
        }
      }
    }

    // flip involution in both modes
    for (FlipYawMode mode : {FlipYawMode::Mirror, FlipYawMode::Paper}) {
      auto cloud = scene.cloud;
      auto annos = scene.annotations;
      flip_y(cloud, annos, mode);
      flip_y(cloud, annos, mode);
      for (std::size_t i = 0; i < cloud.size(); ++i)
        if (std::fabs(cloud.points[i].y - scene.cloud.points[i].y) > 1e-9) {
          detail = "flip involution failed at trial " + std::to_string(trial);
          return false;
        }
      for (std::size_t i = 0; i < annos.size(); ++i)
        if (std::fabs(wrap_angle_pi(annos[i].yaw - scene.annotations[i].yaw)) > 1e-9) {
          detail = "flip yaw involution failed at trial " + std::to_string(trial);
          return false;
        }
    }

    // scale inverse composition, relative 1e-9
    {
      auto cloud = scene.cloud;
      auto annos = scene.annotations;
      const double s = rng.uniform(0.75, 1.25);
      scale(cloud, annos, s);
      scale(cloud, annos, 1.0 / s);
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double ref = std::max(1.0, std::fabs(scene.cloud.points[i].x));
        if (std::fabs(cloud.points[i].x - scene.cloud.points[i].x) > 1e-9 * ref) {
          detail = "scale inverse drift at trial " + std::to_string(trial);
          return false;
        }
      }
    }

    // joint-transform membership invariance
    {
      std::vector<std::vector<bool>> before;
      for (const Annotation& a : scene.annotations)
        before.push_back(points_in_box(scene.cloud, a));
      auto cloud = scene.cloud;
      auto annos = scene.annotations;
      translate(cloud, annos, {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-1, 1)});
      rotate_z(cloud, annos, rng.uniform(-kPi, kPi));
      flip_y(cloud, annos);
      scale(cloud, annos, rng.uniform(0.8, 1.2));
      for (std::size_t b = 0; b < annos.size(); ++b) {
        PointCloud pc;
        pc.points = cloud.points;
        if (points_in_box(pc, annos[b]) != before[b]) {
          detail = "membership changed under joint transform at trial " +
                   std::to_string(trial);
          return false;
        }
      }
    }
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  detail = "1000 scenes in " + std::to_string(elapsed) + " ms";
  return elapsed < 60000;
}

// --- 2. rotated-IoU against Monte Carlo -------------------------------------

bool iou_oracle(std::string& detail) {
  Rng rng(20240002);
  double worst_bev = 0.0, worst_3d = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    Annotation a = random_car_box(rng, 2.0);
    Annotation b = random_car_box(rng, 2.0);
    b.center.z = a.center.z + rng.uniform(-0.6, 0.6);
    const double bev_err =
        std::fabs(bev_iou(a, b) - mc_bev_iou(a, b, 1000000, 555000 + pair));
    const double err_3d =
        std::fabs(iou_3d(a, b) - mc_iou_3d(a, b, 1000000, 777000 + pair));
    worst_bev = std::max(worst_bev, bev_err);
    worst_3d = std::max(worst_3d, err_3d);
  }
  std::ostringstream ss;
  ss << "max |bev-MC| = " << worst_bev << ", max |3d-MC| = " << worst_3d;
  detail = ss.str();
  return worst_bev <= 3e-3 && worst_3d <= 3e-3;
}

// --- 3. ground removal exactness --------------------------------------------

bool ground_removal_exact(std::string& detail) {
  Rng rng(20240003);
  for (int trial = 0; trial < 200; ++trial) {
    Scene scene;
    scene.id = "gr";
    scene.cloud = random_cloud(rng, 1 + rng.index(3000));
    for (double q : {1.0, 5.0, 10.0, 15.0}) {
      std::vector<double> zs;
      for (const Point& p : scene.cloud.points) zs.push_back(p.z);
      std::sort(zs.begin(), zs.end());
      const std::size_t rank = std::min<std::size_t>(
          zs.size(), std::max<std::size_t>(
                         1, static_cast<std::size_t>(std::ceil(
                                q * static_cast<double>(zs.size()) / 100.0))));
      const double eps = zs[rank - 1];
      const std::size_t expect_removed = static_cast<std::size_t>(
          std::count_if(zs.begin(), zs.end(), [&](double z) { return z < eps; }));

      Scene copy = scene;
      GroundRemovalParams params;
      params.percentile = q;
      ground_removal(copy, params);
      if (scene.cloud.size() - copy.cloud.size() != expect_removed) {
        detail = "trial " + std::to_string(trial) + " percentile " + std::to_string(q);
        return false;
      }
    }
  }
  detail = "200 clouds x percentiles {1,5,10,15}";
  return true;
}

// --- 4. oversampling safety ---------------------------------------------------

bool oversampling_safety(std::string& detail) {
  SyntheticParams donor_params;
  donor_params.scene_count = 25;
  donor_params.points_per_scene = 900;
  donor_params.seed = 404;
  const auto donors = make_synthetic_dataset(donor_params);
  const SampleDatabase built = build_database(donors, 1);

  // exercise the persisted format too
  const fs::path stem = fs::temp_directory_path() / "lidar_aug_acceptance_db";
  save_database(built, stem);
  const SampleDatabase db = load_database(stem);
  fs::remove(stem.string() + ".idx");
  fs::remove(stem.string() + ".bin");

  Rng scene_rng(20240004);
  int scenes_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Scene base = planted_scene(scene_rng, 200, 2, 12).scene;
    base.id = "os" + std::to_string(trial);
    for (int target : {5, 10, 15, 20, 25}) {
      Scene scene = base;
      const std::size_t an_before = scene.annotations.size();
      const std::size_t pt_before = scene.cloud.size();
      Rng rng(derive_scene_seed(9000 + target, scene.id));
      OversampleParams params;
      params.target_count = target;
      oversample(scene, db, params, rng);

      if (scene.annotations.size() > std::max(an_before, std::size_t(target))) {
        detail = "class count exceeded target at trial " + std::to_string(trial);
        return false;
      }
      // zero BEV overlap between every sampled box and every other box
      for (std::size_t i = an_before; i < scene.annotations.size(); ++i)
        for (std::size_t j = 0; j < scene.annotations.size(); ++j) {
          if (i == j) continue;
          if (bev_iou(scene.annotations[i], scene.annotations[j]) != 0.0) {
            detail = "sampled overlap at trial " + std::to_string(trial);
            return false;
          }
        }
      // inserted points all inside their inserted box (margin 1e-6)
      std::size_t cursor = pt_before;
      for (std::size_t i = an_before; i < scene.annotations.size(); ++i) {
        const Annotation& a = scene.annotations[i];
        // find the database entry this annotation came from
        const SampleEntry* entry = nullptr;
        for (std::size_t e : db.class_index.at("Car")) {
          const Annotation& cand = db.entries[e].annotation;
          if (cand.center.x == a.center.x && cand.center.y == a.center.y &&
              cand.yaw == a.yaw) {
            entry = &db.entries[e];
            break;
          }
        }
        if (entry == nullptr) {
          detail = "inserted annotation not found in database";
          return false;
        }
        const BoxLocalFrame frame(a);
        for (std::size_t k = 0; k < entry->point_count(); ++k) {
          const Point& p = scene.cloud.points[cursor + k];
          if (!frame.contains(p.x, p.y, p.z, 1e-6)) {
            detail = "inserted point escaped its box at trial " + std::to_string(trial);
            return false;
          }
        }
        cursor += entry->point_count();
      }
      if (cursor != scene.cloud.size()) {
        detail = "inserted point bookkeeping mismatch";
        return false;
      }
    }
    ++scenes_checked;
  }
  detail = std::to_string(scenes_checked) + " scenes x targets {5,10,15,20,25}";
  return true;
}

// --- 5. AP oracle equivalence --------------------------------------------------

double ap_brute_force(const std::vector<metrics::ScoredFlag>& flags,
                      std::size_t counted_gt, int recall_points) {
  if (counted_gt == 0) return 0.0;
  std::vector<double> precision, recall;
  std::size_t tp = 0, fp = 0;
  for (const auto& f : flags) {
    f.tp ? ++tp : ++fp;
    precision.push_back(double(tp) / double(tp + fp));
    recall.push_back(double(tp) / double(counted_gt));
  }
  double sum = 0.0;
  int samples = 0;
  const int first = recall_points == 40 ? 1 : 0;
  const int last = recall_points == 40 ? 40 : 10;
  const double denom = recall_points == 40 ? 40.0 : 10.0;
  for (int k = first; k <= last; ++k) {
    const double r = k / denom;
    double best = 0.0;
    for (std::size_t i = 0; i < flags.size(); ++i)
      if (recall[i] >= r) best = std::max(best, precision[i]);
    sum += best;
    ++samples;
  }
  return sum / samples;
}

bool ap_oracle_equivalence(std::string& detail) {
  // hand-computed fixture first: flags (TP, FP, TP) over 2 gts -> 5/6.
  // The sampled precision 2/3 is itself rounded, so the closed form is met
  // to one ulp; the brute-force integrator must agree bit-for-bit.
  {
    const std::vector<metrics::ScoredFlag> flags{{0.9, true}, {0.8, false}, {0.7, true}};
    metrics::EvalConfig cfg;
    cfg.recall_points = 40;
    const double ap = metrics::average_precision(flags, 2, cfg);
    if (std::fabs(ap - 5.0 / 6.0) > 1e-15 || ap != ap_brute_force(flags, 2, 40)) {
      detail = "hand fixture: got " + std::to_string(ap);
      return false;
    }
  }

  Rng rng(20240005);
  for (int trial = 0; trial < 500; ++trial) {
    // random geometric fixture, up to 50 boxes in total
    const int n_gt = static_cast<int>(rng.index(21));
    std::vector<Annotation> gts;
    std::vector<metrics::Detection> dets;
    for (int g = 0; g < n_gt; ++g) {
      Annotation a = make_box(rng.uniform(-60, 60), rng.uniform(-60, 60),
                              rng.uniform(-1, 1), rng.uniform(1.5, 1.8),
                              rng.uniform(3.4, 4.5), rng.uniform(1.3, 1.7),
                              rng.uniform(0.0, kTwoPi));
      a.difficulty = static_cast<Difficulty>(rng.index(4));
      gts.push_back(a);
      // detection near this gt with some probability
      if (rng.bernoulli(0.75)) {
        Annotation d = a;
        d.center.x += rng.uniform(-0.4, 0.4);
        d.center.y += rng.uniform(-0.4, 0.4);
        d.yaw = wrap_angle(d.yaw + rng.uniform(-0.05, 0.05));
        dets.push_back({d, rng.uniform()});
      }
    }
    const int n_fp = static_cast<int>(rng.index(11));
    for (int f = 0; f < n_fp && static_cast<int>(dets.size() + gts.size()) < 50; ++f) {
      dets.push_back({make_box(rng.uniform(100, 300), rng.uniform(100, 300), 0, 1.6,
                               3.9, 1.5, 0.0),
                      rng.uniform()});
    }
    metrics::EvalConfig cfg;
    cfg.difficulty = static_cast<Difficulty>(rng.index(3));
    const auto tallies = metrics::match_detections(dets, gts, cfg);
    for (int rp : {40, 11}) {
      cfg.recall_points = rp;
      const double got = metrics::average_precision(tallies.flags, tallies.counted_gt, cfg);
      const double want = ap_brute_force(tallies.flags, tallies.counted_gt, rp);
      if (std::fabs(got - want) > 1e-9) {
        detail = "trial " + std::to_string(trial) + ": |" + std::to_string(got) + " - " +
                 std::to_string(want) + "| > 1e-9";
        return false;
      }
    }
  }
  detail = "500 fixtures, ap40 and ap11, plus the exact 5/6 fixture";
  return true;
}

// --- 6. preset fidelity ---------------------------------------------------------

struct TableRow {
  int policy = -1;
  double gt = -1, grot = -1, gscale = -1, ground = -1, lt = -1, lrot = -1, lscale = -1;
  bool flip = false, funk = false, fhard = false, fmod = false;
  int fpoints = -1, oversample = -1;
};

double parse_angle(const std::string& tok) {
  if (tok.rfind("pi/", 0) == 0) return kPi / std::stod(tok.substr(3));
  if (tok == "pi") return kPi;
  return std::stod(tok);
}

double parse_interval_halfwidth(const std::string& tok, bool& mid_ok) {
  // "[0.95,1.05]" -> 0.05
  const auto comma = tok.find(',');
  const double lo = std::stod(tok.substr(1, comma - 1));
  const double hi = std::stod(tok.substr(comma + 1, tok.size() - comma - 2));
  mid_ok = std::fabs((lo + hi) / 2.0 - 1.0) < 1e-9;
  return (hi - lo) / 2.0;
}

bool preset_fidelity(std::string& detail) {
  const fs::path table = fs::path(LIDAR_AUG_TEST_DATA_DIR) / "table1.txt";
  std::ifstream in(table);
  if (!in) {
    detail = "cannot open " + table.string();
    return false;
  }
  std::vector<TableRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tok[14];
    for (auto& t : tok)
      if (!(ss >> t)) {
        detail = "short row in table transcription";
        return false;
      }
    TableRow row;
    row.policy = std::stoi(tok[0]);
    bool mid_ok = true;
    if (tok[1] != "-") row.gt = std::stod(tok[1].substr(0, tok[1].size() - 1));
    if (tok[2] != "-") row.grot = parse_angle(tok[2]);
    if (tok[3] != "-") row.gscale = parse_interval_halfwidth(tok[3], mid_ok);
    row.flip = tok[4] == "yes";
    if (tok[5] != "-") row.ground = std::stod(tok[5].substr(0, tok[5].size() - 1));
    if (tok[6] != "-") row.lt = std::stod(tok[6].substr(0, tok[6].size() - 1));
    if (tok[7] != "-") row.lrot = parse_angle(tok[7]);
    if (tok[8] != "-") row.lscale = parse_interval_halfwidth(tok[8], mid_ok);
    row.funk = tok[9] == "yes";
    row.fhard = tok[10] == "yes";
    row.fmod = tok[11] == "yes";
    if (tok[12] != "-") row.fpoints = std::stoi(tok[12]);
    if (tok[13] != "-") row.oversample = std::stoi(tok[13]);
    if (!mid_ok) {
      detail = "scaling interval not centered on 1 in row " + std::to_string(row.policy);
      return false;
    }
    rows.push_back(row);
  }
  if (rows.size() != 43) {
    detail = "expected 43 rows, found " + std::to_string(rows.size());
    return false;
  }

  const auto presets = list_presets();
  if (presets.size() != 43) {
    detail = "expected 43 presets, found " + std::to_string(presets.size());
    return false;
  }

  auto close = [](double a, double b) { return std::fabs(a - b) < 1e-9; };
  for (const TableRow& row : rows) {
    const Policy& p = presets[static_cast<std::size_t>(row.policy)];
    std::string cell;
    auto fail = [&](const char* which) {
      detail = "policy " + std::to_string(row.policy) + ": " + which + " mismatch";
      return false;
    };

    const auto* gt = p.find(StepKind::GlobalTranslate);
    if ((row.gt >= 0) != (gt != nullptr)) return fail("global_translation presence");
    if (gt && !close(std::get<GlobalTranslateParams>(gt->params).sigma, row.gt))
      return fail("global_translation sigma");

    const auto* gr = p.find(StepKind::GlobalRotate);
    if ((row.grot >= 0) != (gr != nullptr)) return fail("global_rotation presence");
    if (gr && !close(std::get<GlobalRotateParams>(gr->params).beta, row.grot))
      return fail("global_rotation beta");

    const auto* gs = p.find(StepKind::GlobalScale);
    if ((row.gscale >= 0) != (gs != nullptr)) return fail("global_scaling presence");
    if (gs && !close(std::get<GlobalScaleParams>(gs->params).t, row.gscale))
      return fail("global_scaling t");

    const auto* fl = p.find(StepKind::RandomFlip);
    if (row.flip != (fl != nullptr)) return fail("random_flip presence");
    if (fl && std::get<FlipParams>(fl->params).probability != 0.5)
      return fail("random_flip probability");

    const auto* grm = p.find(StepKind::GroundRemoval);
    if ((row.ground >= 0) != (grm != nullptr)) return fail("ground_removal presence");
    if (grm && !close(std::get<GroundRemovalParams>(grm->params).percentile, row.ground))
      return fail("ground_removal percentile");
    if (grm && !grm->apply_at_test) return fail("ground_removal test-time flag");

    const auto* lt = p.find(StepKind::LocalTranslate);
    if ((row.lt >= 0) != (lt != nullptr)) return fail("local_translation presence");
    if (lt && !close(std::get<LocalTranslateParams>(lt->params).sigma, row.lt))
      return fail("local_translation sigma");

    const auto* lr = p.find(StepKind::LocalRotate);
    if ((row.lrot >= 0) != (lr != nullptr)) return fail("local_rotation presence");
    if (lr && !close(std::get<LocalRotateParams>(lr->params).beta, row.lrot))
      return fail("local_rotation beta");

    const auto* ls = p.find(StepKind::LocalScale);
    if ((row.lscale >= 0) != (ls != nullptr)) return fail("local_scaling presence");
    if (ls && !close(std::get<LocalScaleParams>(ls->params).t, row.lscale))
      return fail("local_scaling t");

    const auto* fd = p.find(StepKind::FilterDifficulty);
    const bool any_drop = row.funk || row.fhard || row.fmod;
    if (any_drop != (fd != nullptr)) return fail("difficulty filter presence");
    if (fd) {
      const auto& params = std::get<DifficultyFilterParams>(fd->params);
      if (params.drop_unknown != row.funk) return fail("filter unknown");
      if (params.drop_hard != row.fhard) return fail("filter hard");
      if (params.drop_moderate != row.fmod) return fail("filter moderate");
    }

    const auto* fp = p.find(StepKind::FilterPoints);
    if ((row.fpoints >= 0) != (fp != nullptr)) return fail("points filter presence");
    if (fp && std::get<PointCountFilterParams>(fp->params).min_points != row.fpoints)
      return fail("points filter threshold");

    const auto* os = p.find(StepKind::Oversample);
    if ((row.oversample >= 0) != (os != nullptr)) return fail("oversampling presence");
    if (os && std::get<OversampleParams>(os->params).target_count != row.oversample)
      return fail("oversampling target");
  }
  detail = "43 presets match the transcription cell-for-cell";
  return true;
}

// --- 7. CLI determinism ----------------------------------------------------------

std::uint64_t tree_hash(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = fnv1a64("tree");
  for (const fs::path& f : files) {
    h = splitmix64(h ^ fnv1a64(fs::relative(f, root).string()));
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    h = splitmix64(h ^ fnv1a64(ss.str()));
  }
  return h;
}

std::string find_cli(const char* argv0) {
  if (const char* env = std::getenv("LIDAR_AUG_BIN")) return env;
  const fs::path self(argv0);
  const fs::path guess = self.parent_path() / ".." / "tools" / "lidar-aug";
  if (fs::exists(guess)) return guess.string();
  return "";
}

bool cli_determinism(const std::string& cli, std::string& detail) {
  const fs::path base = fs::temp_directory_path() / "lidar_aug_acceptance_cli";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string db = (base / "db").string();
  const std::string out1 = (base / "out1").string();
  const std::string out2 = (base / "out2").string();
  auto sh = [&](const std::string& cmd) {
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  if (!sh(cli + " build-db --synthetic 8 --seed 3 --output " + db)) {
    detail = "build-db failed";
    return false;
  }
  const std::string augment =
      " augment --synthetic 8 --policy policy41 --seed 7 --db " + db + " --output ";
  if (!sh(cli + augment + out1) || !sh(cli + augment + out2)) {
    detail = "augment failed";
    return false;
  }
  const bool ok = tree_hash(out1) == tree_hash(out2);
  detail = ok ? "two runs, hash-identical trees" : "output trees differ";
  fs::remove_all(base);
  return ok;
}

// --- 8. KITTI data-conditional statistics ---------------------------------------

bool kitti_stats(const std::string& root, const std::string& split_name,
                 double expect_points, double expect_ratio_pct, std::string& detail) {
  fs::path split = fs::path(root) / (split_name + std::string(".txt"));
  if (const char* dir = std::getenv("LIDAR_AUG_KITTI_SPLITS"))
    split = fs::path(dir) / (split_name + std::string(".txt"));
  if (!fs::exists(split)) {
    detail = "split file " + split.string() + " not found";
    return false;
  }
  const auto ids = kitti::read_split(split);
  StatsAccumulator acc;
  for (const std::string& id : ids) acc.add(scene_stats(kitti::read_scene(root, id)));
  const DatasetStats stats = acc.finish();
  const double ratio_pct = stats.foreground_ratio * 100.0;
  std::ostringstream ss;
  ss << split_name << ": mean points " << stats.mean_points << " (expect "
     << expect_points << " +-2%), foreground " << ratio_pct << "% (expect "
     << expect_ratio_pct << "% +-1%)";
  detail = ss.str();
  return std::fabs(stats.mean_points - expect_points) <= 0.02 * expect_points &&
         std::fabs(ratio_pct - expect_ratio_pct) <= 1.0;
}

// --- 9. throughput ----------------------------------------------------------------

bool throughput(std::string& detail) {
  SyntheticParams donor_params;
  donor_params.scene_count = 20;
  donor_params.points_per_scene = 1500;
  donor_params.seed = 11;
  const auto db = build_database(make_synthetic_dataset(donor_params), 1);

  SyntheticParams scene_params;
  scene_params.scene_count = 1;
  scene_params.points_per_scene = 20000;
  scene_params.seed = 12;
  const Scene scene = make_synthetic_scene("perf00", scene_params);

  const Policy policy = *find_preset("policy41");
  // warm-up
  {
    Scene copy = scene;
    apply_policy(copy, policy, &db, Mode::Train);
  }
  std::vector<double> times;
  for (int run = 0; run < 30; ++run) {
    Scene copy = scene;
    const auto start = std::chrono::steady_clock::now();
    apply_policy(copy, policy, &db, Mode::Train);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  std::ostringstream ss;
  ss << "policy41 on a " << scene.cloud.size() << "-point scene: median " << median
     << " ms over 30 runs";
  detail = ss.str();
  return median < 20.0;
}

}  // namespace

int main(int, char** argv) {
  std::string detail;

  detail.clear();
  report("geometry invariant suite", geometry_invariants(detail), detail);

  detail.clear();
  report("rotated-IoU Monte-Carlo oracle", iou_oracle(detail), detail);

  detail.clear();
  report("ground removal exactness", ground_removal_exact(detail), detail);

  detail.clear();
  report("oversampling safety", oversampling_safety(detail), detail);

  detail.clear();
  report("AP oracle equivalence", ap_oracle_equivalence(detail), detail);

  detail.clear();
  report("preset fidelity (Table 1 grid)", preset_fidelity(detail), detail);

  const std::string cli = find_cli(argv[0]);
  if (cli.empty()) {
    skip("CLI determinism", "lidar-aug binary not found; set LIDAR_AUG_BIN");
    ++failures;
  } else {
    detail.clear();
    report("CLI determinism", cli_determinism(cli, detail), detail);
  }

  if (const char* root = std::getenv("LIDAR_AUG_KITTI_ROOT")) {
    detail.clear();
    report("KITTI train-split statistics", kitti_stats(root, "train", 19047.0, 7.25, detail),
           detail);
    detail.clear();
    report("KITTI val-split statistics", kitti_stats(root, "val", 18888.0, 8.69, detail),
           detail);
  } else {
    skip("KITTI train-split statistics", "set LIDAR_AUG_KITTI_ROOT to enable");
    skip("KITTI val-split statistics", "set LIDAR_AUG_KITTI_ROOT to enable");
  }

  detail.clear();
  report("augmentation throughput", throughput(detail), detail);

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
