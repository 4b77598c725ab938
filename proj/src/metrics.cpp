#include "lidar_aug/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "lidar_aug/errors.hpp"

namespace lidar_aug::metrics {

void EvalConfig::validate() const {
  if (!(iou_threshold > 0.0) || !(iou_threshold <= 1.0))
    throw ConfigError("iou_threshold must be in (0, 1]");
  if (recall_points != 11 && recall_points != 40)
    throw ConfigError("recall_points must be 11 or 40");
}

namespace {

int difficulty_rank(Difficulty d) { return static_cast<int>(d); }

}  // namespace

MatchTallies match_detections(std::span<const Detection> detections,
                              std::span<const Annotation> ground_truths,
                              const EvalConfig& cfg, std::string_view class_name) {
  cfg.validate();

  // counted: contributes to recall; ignored: matches are neither TP nor FP
  std::vector<bool> counted(ground_truths.size());
  for (std::size_t g = 0; g < ground_truths.size(); ++g) {
    const Annotation& gt = ground_truths[g];
    const bool class_ok = class_name.empty() || gt.class_name == class_name;
    counted[g] = class_ok && gt.difficulty != Difficulty::Unknown &&
                 difficulty_rank(gt.difficulty) <= difficulty_rank(cfg.difficulty);
  }

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });

  MatchTallies out;
  out.counted_gt = static_cast<std::size_t>(
      std::count(counted.begin(), counted.end(), true));
  std::vector<bool> matched(ground_truths.size(), false);

  for (std::size_t d : order) {
    const Detection& det = detections[d];
    std::size_t best_counted = ground_truths.size();
    std::size_t best_ignored = ground_truths.size();
    double best_counted_iou = 0.0;
    double best_ignored_iou = 0.0;
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
      if (matched[g]) continue;
      const double iou = iou_3d(det.annotation, ground_truths[g]);
      if (iou < cfg.iou_threshold) continue;
      if (counted[g]) {
        if (best_counted == ground_truths.size() || iou > best_counted_iou) {
          best_counted = g;
          best_counted_iou = iou;
        }
      } else if (best_ignored == ground_truths.size() || iou > best_ignored_iou) {
        best_ignored = g;
        best_ignored_iou = iou;
      }
    }
    if (best_counted < ground_truths.size()) {
      matched[best_counted] = true;
      out.flags.push_back({det.score, true});
    } else if (best_ignored < ground_truths.size()) {
      matched[best_ignored] = true;  // ignored detection, no flag
    } else {
      out.flags.push_back({det.score, false});
    }
  }
  return out;
}

double average_precision(std::span<const ScoredFlag> flags, std::size_t counted_gt,
                         const EvalConfig& cfg) {
  cfg.validate();
  if (counted_gt == 0) return 0.0;

  const std::size_t n = flags.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    flags[i].tp ? ++tp : ++fp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(tp + fp);
    recall[i] = static_cast<double>(tp) / static_cast<double>(counted_gt);
  }
  // Suffix maximum: max precision over every point with recall >= recall[i].
  std::vector<double> max_from(n);
  for (std::size_t i = n; i-- > 0;)
    max_from[i] = i + 1 < n ? std::max(precision[i], max_from[i + 1]) : precision[i];

  double sum = 0.0;
  int samples = 0;
  const int first = cfg.recall_points == 40 ? 1 : 0;
  const int last = cfg.recall_points == 40 ? 40 : 10;
  const double denom = cfg.recall_points == 40 ? 40.0 : 10.0;
  for (int k = first; k <= last; ++k) {
    const double r = static_cast<double>(k) / denom;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end())
      sum += max_from[static_cast<std::size_t>(it - recall.begin())];
    ++samples;
  }
  return sum / static_cast<double>(samples);
}

double ApTable::at(Difficulty d, int recall_points) const {
  const int i = static_cast<int>(d);
  if (i < 0 || i > 2) throw ConfigError("ap is tabulated for easy/moderate/hard only");
  return recall_points == 40 ? ap40[static_cast<std::size_t>(i)]
                             : ap11[static_cast<std::size_t>(i)];
}

ApTable evaluate(const std::map<std::string, std::vector<Detection>>& detections,
                 const std::map<std::string, std::vector<Annotation>>& ground_truths,
                 double iou_threshold, std::string_view class_name) {
  // Scene sets must align exactly; report what is missing on either side.
  std::vector<std::string> missing;
  for (const auto& [id, _] : ground_truths)
    if (!detections.count(id)) missing.push_back(id);
  std::vector<std::string> unknown;
  for (const auto& [id, _] : detections)
    if (!ground_truths.count(id)) unknown.push_back(id);
  if (!missing.empty() || !unknown.empty()) {
    std::ostringstream msg;
    msg << "detection/ground-truth scene sets do not align;";
    if (!missing.empty()) {
      msg << " missing detections for:";
      for (const auto& id : missing) msg << ' ' << id;
      msg << ';';
    }
    if (!unknown.empty()) {
      msg << " unknown scene ids:";
      for (const auto& id : unknown) msg << ' ' << id;
    }
    throw DataError(msg.str());
  }

  ApTable table;
  for (Difficulty d : {Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard}) {
    EvalConfig cfg;
    cfg.iou_threshold = iou_threshold;
    cfg.difficulty = d;

    std::vector<ScoredFlag> pooled;
    std::size_t counted = 0;
    for (const auto& [id, dets] : detections) {
      const auto tallies = match_detections(dets, ground_truths.at(id), cfg, class_name);
      pooled.insert(pooled.end(), tallies.flags.begin(), tallies.flags.end());
      counted += tallies.counted_gt;
    }
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const ScoredFlag& a, const ScoredFlag& b) { return a.score > b.score; });

    const std::size_t i = static_cast<std::size_t>(d);
    cfg.recall_points = 40;
    table.ap40[i] = average_precision(pooled, counted, cfg);
    cfg.recall_points = 11;
    table.ap11[i] = average_precision(pooled, counted, cfg);
  }
  return table;
}

}  // namespace lidar_aug::metrics
