#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lidar_aug/geom.hpp"

namespace lidar_aug::metrics {

struct Detection {
  Annotation annotation;
  double score = 0.0;
};

struct EvalConfig {
  double iou_threshold = 0.7;  // car default
  int recall_points = 40;      // 40 or 11
  Difficulty difficulty = Difficulty::Moderate;

  void validate() const;
};

struct ScoredFlag {
  double score = 0.0;
  bool tp = false;
};

struct MatchTallies {
  std::vector<ScoredFlag> flags;  // descending score; ignored detections omitted
  std::size_t counted_gt = 0;
};

// KITTI-style greedy matching. Detections are visited in descending score
// order (stable on ties) and match the unmatched counted ground truth with
// the highest iou_3d at or above the threshold. Ground truths harder than
// cfg.difficulty, of Unknown difficulty, or of a different class when
// class_name is non-empty, are "ignored": detections matched to them count
// neither TP nor FP. Each ground truth matches at most once.
MatchTallies match_detections(std::span<const Detection> detections,
                              std::span<const Annotation> ground_truths,
                              const EvalConfig& cfg, std::string_view class_name = {});

// Interpolated average precision over the configured recall grid:
// r in {1/40, ..., 40/40} for ap40, r in {0, 0.1, ..., 1.0} for ap11.
// flags must be sorted by descending score. counted_gt == 0 yields 0.
double average_precision(std::span<const ScoredFlag> flags, std::size_t counted_gt,
                         const EvalConfig& cfg);

struct ApTable {
  // indexed by Difficulty {Easy, Moderate, Hard}
  std::array<double, 3> ap40{};
  std::array<double, 3> ap11{};

  double at(Difficulty d, int recall_points) const;
  double moderate() const { return ap40[1]; }  // the leaderboard ranking metric
};

// Pools per-scene matches, then computes ap per difficulty at both recall
// grids. The two maps must cover the same scene ids.
ApTable evaluate(const std::map<std::string, std::vector<Detection>>& detections,
                 const std::map<std::string, std::vector<Annotation>>& ground_truths,
                 double iou_threshold = 0.7, std::string_view class_name = "Car");

}  // namespace lidar_aug::metrics
