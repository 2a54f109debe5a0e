#pragma once

#include <span>
#include <string>
#include <vector>

#include "mr2/config.hpp"
#include "mr2/evaluation.hpp"
#include "mr2/pipeline.hpp"
#include "mr2/schedule.hpp"

namespace mr2 {

/// One video with detector output at both resolutions for every frame.
/// Packets keep boxes in their inference resolution.
struct SequenceStreams {
    std::string sequence_id;
    std::vector<FramePacket> full;
    std::vector<FramePacket> low;
    std::vector<GroundTruthFrame> ground_truth;
};

/// Picks full- or low-resolution packets per the P-interleaving and
/// normalizes them to native coordinates.
std::vector<FramePacket> interleave(const SequenceStreams& seq, int p, const RescoreConfig& rcfg);

/// Raw detections of each frame as predictions (the frame-by-frame baseline).
EvalSequence detections_as_predictions(std::span<const FramePacket> normalized,
                                       std::vector<GroundTruthFrame> ground_truth);

/// Track outputs of each frame as predictions.
EvalSequence tracks_as_predictions(std::span<const FramePacket> normalized,
                                   const std::vector<std::vector<TrackOutput>>& outputs,
                                   std::vector<GroundTruthFrame> ground_truth);

struct MethodMetrics {
    double map = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

MethodMetrics summarize(const MetricsReport& r);

struct SweepRow {
    int p = 0;
    MacEstimate mac;
    MethodMetrics baseline;  // frame-by-frame detections at the baseline threshold
    MethodMetrics naive;     // tracking without rescoring
    MethodMetrics mr2;       // tracking with rescoring
};

struct SweepResult {
    double baseline_threshold = 0.0;  // F1-maximizing threshold at full resolution
    std::vector<SweepRow> rows;
};

/// Baseline versus tracking across interleaving factors. The baseline
/// threshold is fixed from the P = 0 stream; tracker outputs are scored unthresholded.
SweepResult run_sweep(std::span<const SequenceStreams> corpus, const RunConfig& cfg,
                      std::span<const int> p_values, double grid_step = 0.01);

/// Runs the tracker on every sequence at interleaving `p` and scores the outputs.
MetricsReport evaluate_tracker(std::span<const SequenceStreams> corpus, const RunConfig& cfg, int p);

struct ThresholdSearch {
    double high_threshold = 0.0;
    double low_threshold = 0.0;
    double mean_f1 = 0.0;
};

/// Joint grid search over (high, low) with low < high, maximizing tracker
/// mean F1 at interleaving `p`. Ties keep the first pair in (high, low) order.
ThresholdSearch tune_thresholds(std::span<const SequenceStreams> corpus, const RunConfig& cfg,
                                int p, double grid_step = 0.05);

struct ClassErrorStats {
    std::size_t matched = 0;          // outputs overlapping a ground-truth object (IoU > 0.5)
    std::size_t wrong_class = 0;
    double rate() const { return matched ? static_cast<double>(wrong_class) / matched : 0.0; }
};

/// Greedy class-agnostic matching of track outputs to ground truth, counting
/// how many matched outputs carry the wrong class.
ClassErrorStats class_errors(const std::vector<std::vector<TrackOutput>>& outputs,
                             std::span<const GroundTruthFrame> ground_truth);

}  // namespace mr2
