#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mr2/types.hpp"

namespace mr2 {

struct GroundTruthObject {
    BBox bbox;
    int class_id = 0;

    bool operator==(const GroundTruthObject&) const = default;
};

struct GroundTruthFrame {
    std::int64_t frame_index = 0;
    std::vector<GroundTruthObject> objects;

    bool operator==(const GroundTruthFrame&) const = default;
};

/// Detections (or track outputs) of one frame in native coordinates.
struct ScoredFrame {
    std::int64_t frame_index = 0;
    std::vector<Detection> detections;
};

/// One video: predictions and ground truth, matched up by frame index.
struct EvalSequence {
    std::vector<ScoredFrame> predictions;
    std::vector<GroundTruthFrame> ground_truth;
};

struct FrameMatch {
    std::vector<std::size_t> true_positives;   // indices into the detection list
    std::vector<std::size_t> false_positives;
    std::size_t false_negatives = 0;
};

/// Greedy matching in the given (descending confidence) order. A detection
/// is a true positive when it has the ground-truth class and IoU > 0.5 with
/// a not-yet-matched object; each object is matched at most once.
FrameMatch match_frame(std::span<const Detection> dets, std::span<const GroundTruthObject> gts);

/// All-point interpolated AP over confidence-ranked TP/FP flags.
double average_precision(const std::vector<bool>& ranked_tp, std::size_t n_gt);

struct ClassMetrics {
    double ap = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

struct MetricsReport {
    std::map<int, ClassMetrics> per_class;
    double map = 0.0;  // over classes present in the ground truth
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f1 = 0.0;
    double threshold_used = 0.0;
};

/// Pre-matched corpus; matching is done once and reused across thresholds.
class Evaluator {
public:
    explicit Evaluator(std::span<const EvalSequence> corpus);

    /// AP uses every prediction; precision, recall and F1 use conf >= threshold.
    MetricsReport report(double threshold) const;
    std::size_t ground_truth_count() const;

private:
    struct Scored {
        double conf;
        bool tp;
    };
    std::map<int, std::vector<Scored>> ranked_;  // per class, descending conf
    std::map<int, std::size_t> n_gt_;
};

MetricsReport evaluate(std::span<const EvalSequence> corpus, double threshold);

/// Thresholds {0, step, 2 step, ...} below 1 - epsilon, then 1 - epsilon itself.
std::vector<double> threshold_grid(double grid_step, double epsilon = 1e-4);

/// Sweeps threshold_grid and returns the report with the highest mean F1,
/// ties going to the higher threshold. Throws ValidationError when the corpus
/// has no ground truth or grid_step is outside (0, 0.5].
MetricsReport f1_max_threshold(std::span<const EvalSequence> corpus, double grid_step = 0.01);

}  // namespace mr2
