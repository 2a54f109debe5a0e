#include "mr2/experiment.hpp"

#include <algorithm>
#include <unordered_map>

namespace mr2 {

std::vector<FramePacket> interleave(const SequenceStreams& seq, int p, const RescoreConfig& rcfg) {
    const std::size_t n = std::min(seq.full.size(), seq.low.size());
    std::vector<FramePacket> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& src = is_full_res(static_cast<std::int64_t>(t), p) ? seq.full[t] : seq.low[t];
        out.push_back(normalize_packet(src, rcfg));
    }
    return out;
}

EvalSequence detections_as_predictions(std::span<const FramePacket> normalized,
                                       std::vector<GroundTruthFrame> ground_truth) {
    EvalSequence seq;
    for (const auto& f : normalized) seq.predictions.push_back({f.frame_index, f.detections});
    seq.ground_truth = std::move(ground_truth);
    return seq;
}

EvalSequence tracks_as_predictions(std::span<const FramePacket> normalized,
                                   const std::vector<std::vector<TrackOutput>>& outputs,
                                   std::vector<GroundTruthFrame> ground_truth) {
    EvalSequence seq;
    for (std::size_t t = 0; t < normalized.size() && t < outputs.size(); ++t) {
        ScoredFrame f{normalized[t].frame_index, {}};
        for (const auto& o : outputs[t]) f.detections.push_back({o.bbox, o.class_id, o.conf});
        seq.predictions.push_back(std::move(f));
    }
    seq.ground_truth = std::move(ground_truth);
    return seq;
}

MethodMetrics summarize(const MetricsReport& r) {
    return {r.map, r.mean_precision, r.mean_recall, r.mean_f1};
}

namespace {

std::vector<EvalSequence> tracked_corpus(std::span<const SequenceStreams> corpus,
                                         const RunConfig& cfg, int p, bool rescore) {
    PipelineOptions opts = cfg.pipeline;
    opts.rescore = rescore;
    std::vector<EvalSequence> out;
    for (const auto& seq : corpus) {
        const auto frames = interleave(seq, p, cfg.rescore);
        const auto outputs = run_sequence(frames, cfg.tracker, cfg.rescore, opts);
        out.push_back(tracks_as_predictions(frames, outputs, seq.ground_truth));
    }
    return out;
}

std::vector<EvalSequence> baseline_corpus(std::span<const SequenceStreams> corpus,
                                          const RunConfig& cfg, int p) {
    std::vector<EvalSequence> out;
    for (const auto& seq : corpus) {
        const auto frames = interleave(seq, p, cfg.rescore);
        out.push_back(detections_as_predictions(frames, seq.ground_truth));
    }
    return out;
}

}  // namespace

MetricsReport evaluate_tracker(std::span<const SequenceStreams> corpus, const RunConfig& cfg,
                               int p) {
    return evaluate(tracked_corpus(corpus, cfg, p, cfg.pipeline.rescore), 0.0);
}

SweepResult run_sweep(std::span<const SequenceStreams> corpus, const RunConfig& cfg,
                      std::span<const int> p_values, double grid_step) {
    SweepResult result;
    result.baseline_threshold =
        f1_max_threshold(baseline_corpus(corpus, cfg, 0), grid_step).threshold_used;

    for (int p : p_values) {
        SweepRow row;
        row.p = p;
        ResolutionSchedule schedule = cfg.schedule;
        schedule.p = p;
        row.mac = mean_mac(schedule);
        row.baseline = summarize(evaluate(baseline_corpus(corpus, cfg, p), result.baseline_threshold));
        row.naive = summarize(evaluate(tracked_corpus(corpus, cfg, p, false), 0.0));
        row.mr2 = summarize(evaluate(tracked_corpus(corpus, cfg, p, true), 0.0));
        result.rows.push_back(row);
    }
    return result;
}

ThresholdSearch tune_thresholds(std::span<const SequenceStreams> corpus, const RunConfig& cfg,
                                int p, double grid_step) {
    const auto grid = threshold_grid(grid_step, cfg.rescore.epsilon);
    ThresholdSearch best;
    bool first = true;
    for (std::size_t hi = 0; hi < grid.size(); ++hi) {
        for (std::size_t lo = 0; lo < hi; ++lo) {
            RunConfig trial = cfg;
            trial.tracker.high_threshold = grid[hi];
            trial.tracker.low_threshold = grid[lo];
            const double f1 = evaluate_tracker(corpus, trial, p).mean_f1;
            if (first || f1 > best.mean_f1) {
                best = {grid[hi], grid[lo], f1};
                first = false;
            }
        }
    }
    return best;
}

ClassErrorStats class_errors(const std::vector<std::vector<TrackOutput>>& outputs,
                             std::span<const GroundTruthFrame> ground_truth) {
    std::unordered_map<std::int64_t, const GroundTruthFrame*> by_frame;
    for (const auto& g : ground_truth) by_frame[g.frame_index] = &g;

    ClassErrorStats stats;
    for (std::size_t t = 0; t < outputs.size(); ++t) {
        const auto it = by_frame.find(static_cast<std::int64_t>(t));
        if (it == by_frame.end()) continue;
        const auto& objects = it->second->objects;
        std::vector<TrackOutput> ranked = outputs[t];
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const TrackOutput& a, const TrackOutput& b) { return a.conf > b.conf; });
        std::vector<char> taken(objects.size(), 0);
        for (const auto& o : ranked) {
            double best = 0.5;
            std::size_t best_j = objects.size();
            for (std::size_t j = 0; j < objects.size(); ++j) {
                const double v = taken[j] ? 0.0 : iou(o.bbox, objects[j].bbox);
                if (v > best) {
                    best = v;
                    best_j = j;
                }
            }
            if (best_j == objects.size()) continue;
            taken[best_j] = 1;
            ++stats.matched;
            if (o.class_id != objects[best_j].class_id) ++stats.wrong_class;
        }
    }
    return stats;
}

}  // namespace mr2
