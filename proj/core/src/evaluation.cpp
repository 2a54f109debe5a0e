#include "mr2/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "mr2/errors.hpp"

namespace mr2 {
namespace {

constexpr double kIouGate = 0.5;

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

FrameMatch match_frame(std::span<const Detection> dets, std::span<const GroundTruthObject> gts) {
    FrameMatch out;
    std::vector<char> taken(gts.size(), 0);
    for (std::size_t i = 0; i < dets.size(); ++i) {
        double best = kIouGate;
        std::size_t best_j = gts.size();
        for (std::size_t j = 0; j < gts.size(); ++j) {
            if (taken[j] || gts[j].class_id != dets[i].class_id) continue;
            const double o = iou(dets[i].bbox, gts[j].bbox);
            if (o > best) {
                best = o;
                best_j = j;
            }
        }
        if (best_j < gts.size()) {
            taken[best_j] = 1;
            out.true_positives.push_back(i);
        } else {
            out.false_positives.push_back(i);
        }
    }
    out.false_negatives = gts.size() - out.true_positives.size();
    return out;
}

double average_precision(const std::vector<bool>& ranked_tp, std::size_t n_gt) {
    if (n_gt == 0 || ranked_tp.empty()) return 0.0;
    const std::size_t n = ranked_tp.size();
    std::vector<double> precision(n), recall(n);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        tp += ranked_tp[i] ? 1 : 0;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
    }
    // Precision envelope: running maximum from the tail.
    for (std::size_t i = n - 1; i-- > 0;) precision[i] = std::max(precision[i], precision[i + 1]);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
    }
    return ap;
}

Evaluator::Evaluator(std::span<const EvalSequence> corpus) {
    for (const auto& seq : corpus) {
        std::unordered_map<std::int64_t, const GroundTruthFrame*> gt_by_frame;
        for (const auto& g : seq.ground_truth) {
            gt_by_frame[g.frame_index] = &g;
            for (const auto& o : g.objects) ++n_gt_[o.class_id];
        }
        for (const auto& frame : seq.predictions) {
            std::vector<Detection> dets = frame.detections;
            std::stable_sort(dets.begin(), dets.end(),
                             [](const Detection& a, const Detection& b) { return a.conf > b.conf; });
            const auto it = gt_by_frame.find(frame.frame_index);
            const std::span<const GroundTruthObject> gts =
                it == gt_by_frame.end() ? std::span<const GroundTruthObject>{}
                                        : std::span<const GroundTruthObject>(it->second->objects);
            const FrameMatch m = match_frame(dets, gts);
            std::vector<char> is_tp(dets.size(), 0);
            for (std::size_t i : m.true_positives) is_tp[i] = 1;
            for (std::size_t i = 0; i < dets.size(); ++i)
                ranked_[dets[i].class_id].push_back({dets[i].conf, is_tp[i] != 0});
        }
    }
    for (auto& [cls, list] : ranked_)
        std::stable_sort(list.begin(), list.end(),
                         [](const Scored& a, const Scored& b) { return a.conf > b.conf; });
}

std::size_t Evaluator::ground_truth_count() const {
    return std::accumulate(n_gt_.begin(), n_gt_.end(), std::size_t{0},
                           [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

MetricsReport Evaluator::report(double threshold) const {
    MetricsReport out;
    out.threshold_used = threshold;

    std::map<int, std::size_t> all_classes = n_gt_;
    for (const auto& [cls, list] : ranked_) all_classes.try_emplace(cls, 0);

    std::size_t counted = 0;
    for (const auto& [cls, n_gt] : all_classes) {
        ClassMetrics m;
        const auto it = ranked_.find(cls);
        if (it != ranked_.end()) {
            std::vector<bool> flags;
            flags.reserve(it->second.size());
            for (const auto& s : it->second) {
                flags.push_back(s.tp);
                if (s.conf >= threshold) (s.tp ? m.tp : m.fp) += 1;
            }
            m.ap = average_precision(flags, n_gt);
        }
        m.fn = n_gt - m.tp;
        m.precision = ratio(m.tp, m.tp + m.fp);
        m.recall = ratio(m.tp, m.tp + m.fn);
        m.f1 = harmonic(m.precision, m.recall);
        out.per_class[cls] = m;
        if (n_gt > 0) {
            out.map += m.ap;
            out.mean_precision += m.precision;
            out.mean_recall += m.recall;
            out.mean_f1 += m.f1;
            ++counted;
        }
    }
    if (counted > 0) {
        const double k = static_cast<double>(counted);
        out.map /= k;
        out.mean_precision /= k;
        out.mean_recall /= k;
        out.mean_f1 /= k;
    }
    return out;
}

MetricsReport evaluate(std::span<const EvalSequence> corpus, double threshold) {
    return Evaluator(corpus).report(threshold);
}

std::vector<double> threshold_grid(double grid_step, double epsilon) {
    std::vector<double> grid;
    const double top = 1.0 - epsilon;
    for (long k = 0;; ++k) {
        // Snap k * step onto the nearest 1e-12 so that e.g. 70 * 0.01 == 0.7.
        const double t = std::nearbyint(static_cast<double>(k) * grid_step * 1e12) / 1e12;
        if (t >= top) break;
        grid.push_back(t);
    }
    grid.push_back(top);
    return grid;
}

MetricsReport f1_max_threshold(std::span<const EvalSequence> corpus, double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 0.5))
        throw ValidationError("f1_max_threshold: grid_step must lie in (0, 0.5]");
    const Evaluator ev(corpus);
    if (ev.ground_truth_count() == 0)
        throw ValidationError("f1_max_threshold: ground truth is empty");
    MetricsReport best;
    bool first = true;
    for (double t : threshold_grid(grid_step)) {
        MetricsReport r = ev.report(t);
        if (first || r.mean_f1 >= best.mean_f1) {
            best = std::move(r);
            first = false;
        }
    }
    return best;
}

}  // namespace mr2
