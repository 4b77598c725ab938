#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lidar_aug/aug_filter.hpp"
#include "lidar_aug/aug_global.hpp"
#include "lidar_aug/aug_local.hpp"
#include "lidar_aug/aug_sample.hpp"
#include "lidar_aug/kitti_io.hpp"

namespace lidar_aug {

// Canonical execution order. Policies always run in this order regardless of
// declaration order: filters first so the oversampling database and the scene
// agree, ground removal last so the percentile reflects the final cloud.
enum class StepKind {
  FilterDifficulty,
  FilterPoints,
  Oversample,
  LocalTranslate,
  LocalRotate,
  LocalScale,
  RandomFlip,
  GlobalRotate,
  GlobalScale,
  GlobalTranslate,
  GroundRemoval,
};

constexpr std::array<StepKind, 11> kCanonicalOrder = {
    StepKind::FilterDifficulty, StepKind::FilterPoints,  StepKind::Oversample,
    StepKind::LocalTranslate,   StepKind::LocalRotate,   StepKind::LocalScale,
    StepKind::RandomFlip,       StepKind::GlobalRotate,  StepKind::GlobalScale,
    StepKind::GlobalTranslate,  StepKind::GroundRemoval,
};

const char* to_string(StepKind kind);

using StepParams =
    std::variant<DifficultyFilterParams, PointCountFilterParams, OversampleParams,
                 LocalTranslateParams, LocalRotateParams, LocalScaleParams, FlipParams,
                 GlobalRotateParams, GlobalScaleParams, GlobalTranslateParams,
                 GroundRemovalParams>;

struct Step {
  StepKind kind;
  StepParams params;
  bool apply_at_test = false;  // only ground removal may set this
};

struct Policy {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<Step> steps;  // kept in canonical order, at most one per kind

  const Step* find(StepKind kind) const;
};

enum class Mode { Train, Test };

// Parses a policy from JSON (schema in the README) or resolves a preset name
// such as "policy41". Unknown keys and out-of-range parameters are rejected.
Policy load_policy(const std::string& config_text);
Policy load_policy_file(const std::filesystem::path& path);

// Compact single-line JSON that load_policy accepts back.
std::string policy_to_json(const Policy& policy);

// Applies the policy to the scene. Train mode runs every step in canonical
// order; test mode runs only steps flagged apply_at_test (ground removal).
// The per-scene RNG stream is derived from (policy.seed, scene.id).
void apply_policy(Scene& scene, const Policy& policy, const SampleDatabase* db,
                  Mode mode);

// The 43 policies of the augmentation study, policy0 ... policy42.
std::vector<Policy> list_presets();
std::optional<Policy> find_preset(std::string_view name);

}  // namespace lidar_aug
