#include "lidar_aug/policy.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lidar_aug/errors.hpp"
#include "lidar_aug/rng.hpp"

namespace lidar_aug {

using nlohmann::json;

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::FilterDifficulty: return "filter_difficulty";
    case StepKind::FilterPoints: return "filter_points";
    case StepKind::Oversample: return "oversample";
    case StepKind::LocalTranslate: return "local_translate";
    case StepKind::LocalRotate: return "local_rotate";
    case StepKind::LocalScale: return "local_scale";
    case StepKind::RandomFlip: return "random_flip";
    case StepKind::GlobalRotate: return "global_rotate";
    case StepKind::GlobalScale: return "global_scale";
    case StepKind::GlobalTranslate: return "global_translate";
    case StepKind::GroundRemoval: return "ground_removal";
  }
  return "?";
}

const Step* Policy::find(StepKind kind) const {
  for (const Step& s : steps)
    if (s.kind == kind) return &s;
  return nullptr;
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    const std::string& key = item.key();
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + " requires key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

Step parse_step(StepKind kind, const json& obj) {
  const std::string where = to_string(kind);
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  Step step;
  step.kind = kind;
  switch (kind) {
    case StepKind::FilterDifficulty: {
      check_keys(obj, {"drop"}, where);
      DifficultyFilterParams p;
      if (!obj.contains("drop") || !obj.at("drop").is_array())
        throw ConfigError(where + " requires an array key 'drop'");
      for (const json& item : obj.at("drop")) {
        const auto d = item.is_string()
                           ? difficulty_from_string(item.get<std::string>())
                           : std::nullopt;
        if (!d) throw ConfigError(where + ".drop: bad difficulty " + item.dump());
        switch (*d) {
          case Difficulty::Unknown: p.drop_unknown = true; break;
          case Difficulty::Hard: p.drop_hard = true; break;
          case Difficulty::Moderate: p.drop_moderate = true; break;
          case Difficulty::Easy:
            throw ConfigError(where + ".drop: easy annotations are never droppable");
        }
      }
      step.params = p;
      break;
    }
    case StepKind::FilterPoints: {
      check_keys(obj, {"min_points"}, where);
      PointCountFilterParams p;
      p.min_points = static_cast<int>(get_number(obj, "min_points", where));
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::Oversample: {
      check_keys(obj, {"target_count", "class", "max_attempts", "iou_tolerance",
                       "redraw", "remove_inside_background"},
                 where);
      OversampleParams p;
      p.target_count = static_cast<int>(get_number(obj, "target_count", where));
      if (obj.contains("class")) p.class_name = obj.at("class").get<std::string>();
      if (obj.contains("max_attempts"))
        p.max_attempts = static_cast<int>(get_number(obj, "max_attempts", where));
      if (obj.contains("iou_tolerance"))
        p.iou_tolerance = get_number(obj, "iou_tolerance", where);
      if (obj.contains("redraw")) p.redraw = obj.at("redraw").get<bool>();
      if (obj.contains("remove_inside_background"))
        p.remove_inside_background = obj.at("remove_inside_background").get<bool>();
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::LocalTranslate: {
      check_keys(obj, {"sigma"}, where);
      LocalTranslateParams p;
      p.sigma = get_number(obj, "sigma", where);
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::LocalRotate: {
      check_keys(obj, {"beta"}, where);
      LocalRotateParams p;
      p.beta = get_number(obj, "beta", where);
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::LocalScale: {
      check_keys(obj, {"t"}, where);
      LocalScaleParams p;
      p.t = get_number(obj, "t", where);
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::RandomFlip: {
      check_keys(obj, {"probability", "yaw_mode"}, where);
      FlipParams p;
      if (obj.contains("probability")) p.probability = get_number(obj, "probability", where);
      if (obj.contains("yaw_mode")) {
        const std::string mode = obj.at("yaw_mode").get<std::string>();
        if (mode == "mirror")
          p.yaw_mode = FlipYawMode::Mirror;
        else if (mode == "paper")
          p.yaw_mode = FlipYawMode::Paper;
        else
          throw ConfigError(where + ".yaw_mode must be 'mirror' or 'paper'");
      }
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::GlobalRotate: {
      check_keys(obj, {"beta"}, where);
      GlobalRotateParams p;
      p.beta = get_number(obj, "beta", where);
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::GlobalScale: {
      check_keys(obj, {"t"}, where);
      GlobalScaleParams p;
      p.t = get_number(obj, "t", where);
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::GlobalTranslate: {
      check_keys(obj, {"sigma"}, where);
      GlobalTranslateParams p;
      p.sigma = get_number(obj, "sigma", where);
      p.validate();
      step.params = p;
      break;
    }
    case StepKind::GroundRemoval: {
      check_keys(obj, {"percentile", "apply_at_test"}, where);
      GroundRemovalParams p;
      p.percentile = get_number(obj, "percentile", where);
      if (obj.contains("apply_at_test"))
        p.apply_at_test = obj.at("apply_at_test").get<bool>();
      p.validate();
      step.params = p;
      step.apply_at_test = p.apply_at_test;
      break;
    }
  }
  return step;
}

}  // namespace

Policy load_policy(const std::string& config_text) {
  const auto first = config_text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ConfigError("empty policy config");
  if (config_text[first] != '{') {
    // not JSON: treat as a preset name
    std::string name = config_text.substr(first);
    while (!name.empty() && (name.back() == ' ' || name.back() == '\n' ||
                             name.back() == '\r' || name.back() == '\t'))
      name.pop_back();
    if (auto p = find_preset(name)) return *p;
    throw ConfigError("unknown policy preset '" + name + "'");
  }

  json root;
  try {
    root = json::parse(config_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("policy config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("policy config must be a JSON object");
  check_keys(root, {"name", "seed", "steps"}, "policy");

  Policy policy;
  if (root.contains("name")) policy.name = root.at("name").get<std::string>();
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_integer() && !root.at("seed").is_number_unsigned())
      throw ConfigError("policy.seed must be an integer");
    policy.seed = root.at("seed").get<std::uint64_t>();
  }
  if (root.contains("steps")) {
    const json& steps = root.at("steps");
    if (!steps.is_object()) throw ConfigError("policy.steps must be an object");
    check_keys(steps,
               {"filter_difficulty", "filter_points", "oversample", "local_translate",
                "local_rotate", "local_scale", "random_flip", "global_rotate",
                "global_scale", "global_translate", "ground_removal"},
               "policy.steps");
    for (StepKind kind : kCanonicalOrder) {
      const char* key = to_string(kind);
      if (steps.contains(key)) policy.steps.push_back(parse_step(kind, steps.at(key)));
    }
  }
  return policy;
}

Policy load_policy_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_policy(ss.str());
}

std::string policy_to_json(const Policy& policy) {
  json steps = json::object();
  for (const Step& step : policy.steps) {
    json s = json::object();
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, DifficultyFilterParams>) {
            json drop = json::array();
            if (p.drop_unknown) drop.push_back("unknown");
            if (p.drop_hard) drop.push_back("hard");
            if (p.drop_moderate) drop.push_back("moderate");
            s["drop"] = drop;
          } else if constexpr (std::is_same_v<T, PointCountFilterParams>) {
            s["min_points"] = p.min_points;
          } else if constexpr (std::is_same_v<T, OversampleParams>) {
            s["target_count"] = p.target_count;
            s["class"] = p.class_name;
            if (p.max_attempts > 0) s["max_attempts"] = p.max_attempts;
            if (p.iou_tolerance != 0.0) s["iou_tolerance"] = p.iou_tolerance;
            if (!p.redraw) s["redraw"] = false;
            if (p.remove_inside_background) s["remove_inside_background"] = true;
          } else if constexpr (std::is_same_v<T, LocalTranslateParams> ||
                               std::is_same_v<T, GlobalTranslateParams>) {
            s["sigma"] = p.sigma;
          } else if constexpr (std::is_same_v<T, LocalRotateParams> ||
                               std::is_same_v<T, GlobalRotateParams>) {
            s["beta"] = p.beta;
          } else if constexpr (std::is_same_v<T, LocalScaleParams> ||
                               std::is_same_v<T, GlobalScaleParams>) {
            s["t"] = p.t;
          } else if constexpr (std::is_same_v<T, FlipParams>) {
            s["probability"] = p.probability;
            s["yaw_mode"] = p.yaw_mode == FlipYawMode::Mirror ? "mirror" : "paper";
          } else if constexpr (std::is_same_v<T, GroundRemovalParams>) {
            s["percentile"] = p.percentile;
            s["apply_at_test"] = p.apply_at_test;
          }
        },
        step.params);
    steps[to_string(step.kind)] = std::move(s);
  }
  json root;
  root["name"] = policy.name;
  root["seed"] = policy.seed;
  root["steps"] = std::move(steps);
  return root.dump();
}

void apply_policy(Scene& scene, const Policy& policy, const SampleDatabase* db,
                  Mode mode) {
  Rng rng(derive_scene_seed(policy.seed, scene.id));
  for (const Step& step : policy.steps) {
    if (mode == Mode::Test && !step.apply_at_test) continue;
    switch (step.kind) {
      case StepKind::FilterDifficulty:
        filter_by_difficulty(scene, std::get<DifficultyFilterParams>(step.params));
        break;
      case StepKind::FilterPoints:
        filter_by_points(scene, std::get<PointCountFilterParams>(step.params));
        break;
      case StepKind::Oversample: {
        if (!db)
          throw ConfigError("policy '" + policy.name +
                            "' oversamples but no sample database was provided");
        oversample(scene, *db, std::get<OversampleParams>(step.params), rng);
        break;
      }
      case StepKind::LocalTranslate:
        local_translate(scene, std::get<LocalTranslateParams>(step.params), rng);
        break;
      case StepKind::LocalRotate:
        local_rotate(scene, std::get<LocalRotateParams>(step.params), rng);
        break;
      case StepKind::LocalScale:
        local_scale(scene, std::get<LocalScaleParams>(step.params), rng);
        break;
      case StepKind::RandomFlip:
        random_flip(scene, std::get<FlipParams>(step.params), rng);
        break;
      case StepKind::GlobalRotate:
        global_rotate(scene, std::get<GlobalRotateParams>(step.params), rng);
        break;
      case StepKind::GlobalScale:
        global_scale(scene, std::get<GlobalScaleParams>(step.params), rng);
        break;
      case StepKind::GlobalTranslate:
        global_translate(scene, std::get<GlobalTranslateParams>(step.params), rng);
        break;
      case StepKind::GroundRemoval:
        ground_removal(scene, std::get<GroundRemovalParams>(step.params));
        break;
    }
  }
}

namespace {

struct PresetBuilder {
  Policy policy;

  explicit PresetBuilder(int index) { policy.name = "policy" + std::to_string(index); }

  PresetBuilder& global_translate(double sigma) {
    policy.steps.push_back({StepKind::GlobalTranslate, GlobalTranslateParams{sigma}});
    return *this;
  }
  PresetBuilder& global_rotate(double beta) {
    policy.steps.push_back({StepKind::GlobalRotate, GlobalRotateParams{beta}});
    return *this;
  }
  PresetBuilder& global_scale(double t) {
    policy.steps.push_back({StepKind::GlobalScale, GlobalScaleParams{t}});
    return *this;
  }
  PresetBuilder& flip() {
    policy.steps.push_back({StepKind::RandomFlip, FlipParams{}});
    return *this;
  }
  PresetBuilder& ground_removal(double percentile) {
    GroundRemovalParams p;
    p.percentile = percentile;
    policy.steps.push_back({StepKind::GroundRemoval, p, true});
    return *this;
  }
  PresetBuilder& local_translate(double sigma) {
    policy.steps.push_back({StepKind::LocalTranslate, LocalTranslateParams{sigma}});
    return *this;
  }
  PresetBuilder& local_rotate(double beta) {
    policy.steps.push_back({StepKind::LocalRotate, LocalRotateParams{beta}});
    return *this;
  }
  PresetBuilder& local_scale(double t) {
    policy.steps.push_back({StepKind::LocalScale, LocalScaleParams{t}});
    return *this;
  }
  PresetBuilder& filter(bool unknown, bool hard, bool moderate) {
    policy.steps.push_back(
        {StepKind::FilterDifficulty, DifficultyFilterParams{unknown, hard, moderate}});
    return *this;
  }
  PresetBuilder& filter_points(int min_points) {
    policy.steps.push_back({StepKind::FilterPoints, PointCountFilterParams{min_points}});
    return *this;
  }
  PresetBuilder& oversample(int target) {
    OversampleParams p;
    p.target_count = target;
    policy.steps.push_back({StepKind::Oversample, p});
    return *this;
  }

  Policy build() {
    std::stable_sort(policy.steps.begin(), policy.steps.end(),
                     [](const Step& a, const Step& b) {
                       auto pos = [](StepKind k) {
                         return std::find(kCanonicalOrder.begin(), kCanonicalOrder.end(), k) -
                                kCanonicalOrder.begin();
                       };
                       return pos(a.kind) < pos(b.kind);
                     });
    return std::move(policy);
  }
};

}  // namespace

std::vector<Policy> list_presets() {
  const double pi = kPi;
  std::vector<Policy> out;
  out.reserve(43);

  out.push_back(PresetBuilder(0).build());
  out.push_back(PresetBuilder(1).global_translate(0.1).build());
  out.push_back(PresetBuilder(2).global_translate(0.2).build());
  out.push_back(PresetBuilder(3).global_translate(0.4).build());
  out.push_back(PresetBuilder(4).global_rotate(pi / 8).build());
  out.push_back(PresetBuilder(5).global_rotate(pi / 4).build());
  out.push_back(PresetBuilder(6).global_rotate(pi / 2).build());
  out.push_back(PresetBuilder(7).global_scale(0.05).build());
  out.push_back(PresetBuilder(8).global_scale(0.10).build());
  out.push_back(PresetBuilder(9).global_scale(0.25).build());
  out.push_back(PresetBuilder(10).flip().build());
  out.push_back(PresetBuilder(11).ground_removal(1).build());
  out.push_back(PresetBuilder(12).ground_removal(5).build());
  out.push_back(PresetBuilder(13).ground_removal(10).build());
  out.push_back(PresetBuilder(14).ground_removal(15).build());
  out.push_back(PresetBuilder(15).local_translate(0.05).build());
  out.push_back(PresetBuilder(16).local_translate(0.25).build());
  out.push_back(PresetBuilder(17).local_translate(0.50).build());
  out.push_back(PresetBuilder(18).local_translate(1.00).build());
  out.push_back(PresetBuilder(19).local_rotate(pi / 20).build());
  out.push_back(PresetBuilder(20).local_rotate(pi / 10).build());
  out.push_back(PresetBuilder(21).local_rotate(pi / 4).build());
  out.push_back(PresetBuilder(22).local_scale(0.05).build());
  out.push_back(PresetBuilder(23).local_scale(0.10).build());
  out.push_back(PresetBuilder(24).local_scale(0.25).build());
  out.push_back(PresetBuilder(25).filter(true, false, false).build());
  out.push_back(PresetBuilder(26).filter(true, true, false).build());
  out.push_back(PresetBuilder(27).filter(true, true, true).build());
  out.push_back(PresetBuilder(28).filter_points(1).build());
  out.push_back(PresetBuilder(29).filter_points(5).build());
  out.push_back(PresetBuilder(30).filter_points(10).build());
  out.push_back(PresetBuilder(31).oversample(5).build());
  out.push_back(PresetBuilder(32).oversample(10).build());
  out.push_back(PresetBuilder(33).oversample(15).build());
  out.push_back(PresetBuilder(34).oversample(20).build());
  out.push_back(PresetBuilder(35).oversample(25).build());
  // the PointPillars policy
  out.push_back(PresetBuilder(36)
                    .global_translate(0.2)
                    .global_rotate(pi / 4)
                    .global_scale(0.05)
                    .flip()
                    .local_translate(0.25)
                    .local_rotate(pi / 20)
                    .filter(true, false, false)
                    .filter_points(5)
                    .oversample(15)
                    .build());
  out.push_back(PresetBuilder(37)
                    .global_translate(0.2)
                    .global_rotate(pi / 4)
                    .global_scale(0.05)
                    .flip()
                    .local_translate(0.25)
                    .local_rotate(pi / 20)
                    .filter(true, false, false)
                    .filter_points(5)
                    .build());
  out.push_back(PresetBuilder(38).global_rotate(pi / 2).oversample(15).build());
  // improved policies
  out.push_back(PresetBuilder(39)
                    .global_translate(0.2)
                    .global_rotate(pi / 4)
                    .global_scale(0.05)
                    .flip()
                    .local_rotate(pi / 20)
                    .filter(true, false, false)
                    .filter_points(5)
                    .oversample(15)
                    .build());
  out.push_back(PresetBuilder(40)
                    .global_translate(0.2)
                    .global_rotate(pi / 4)
                    .global_scale(0.05)
                    .flip()
                    .local_rotate(pi / 20)
                    .local_scale(0.05)
                    .filter(true, false, false)
                    .filter_points(5)
                    .oversample(15)
                    .build());
  out.push_back(PresetBuilder(41)
                    .global_translate(0.2)
                    .global_rotate(pi / 4)
                    .global_scale(0.05)
                    .flip()
                    .local_rotate(pi / 20)
                    .local_scale(0.05)
                    .filter(true, true, false)
                    .filter_points(5)
                    .oversample(15)
                    .build());
  out.push_back(PresetBuilder(42)
                    .global_translate(0.2)
                    .global_rotate(pi / 2)
                    .global_scale(0.05)
                    .flip()
                    .local_rotate(pi / 20)
                    .local_scale(0.05)
                    .filter(true, true, false)
                    .filter_points(5)
                    .oversample(15)
                    .build());
  return out;
}

std::optional<Policy> find_preset(std::string_view name) {
  for (Policy& p : list_presets())
    if (p.name == name) return std::move(p);
  return std::nullopt;
}

}  // namespace lidar_aug
