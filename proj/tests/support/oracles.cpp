#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mr2::oracle {

double brute_force_total(const CostMatrix& iou, double tau) {
    std::vector<char> used(iou.cols(), 0);
    std::function<double(std::size_t)> best = [&](std::size_t r) -> double {
        if (r == iou.rows()) return 0.0;
        double b = best(r + 1);  // row r stays unmatched
        for (std::size_t c = 0; c < iou.cols(); ++c) {
            if (used[c] || iou(r, c) < tau) continue;
            used[c] = 1;
            b = std::max(b, iou(r, c) + best(r + 1));
            used[c] = 0;
        }
        return b;
    };
    return best(0);
}

RescoreTrace rescore_start(int cls, double conf) {
    return {cls, conf, conf, {conf}};
}

void rescore_step(RescoreTrace& s, int det_cls, double det_conf, double epsilon,
                  int history_len) {
    bool take_over = false;
    if (det_cls == s.cls) {
        s.agg = 1.0 - (1.0 - s.agg) * (1.0 - det_conf);
    } else {
        if (s.agg < det_conf) {
            take_over = true;
        } else {
            s.agg = 1.0 - (1.0 - s.agg) / (1.0 - det_conf);
            if (s.agg < 0.0) s.agg = 0.0;
            if (s.agg < det_conf) take_over = true;
        }
    }
    if (take_over) {
        s.cls = det_cls;
        s.agg = det_conf;
        s.history.clear();
    }
    s.history.push_back(det_conf);
    if (s.agg > 1.0 - epsilon) s.agg = 1.0 - epsilon;

    const std::size_t n = std::min<std::size_t>(s.history.size(), history_len);
    double sum = 0.0;
    for (std::size_t i = s.history.size() - n; i < s.history.size(); ++i) sum += s.history[i];
    s.conf = sum / static_cast<double>(n);
}

Matrix loop_attention(const Matrix& q, const Matrix& k, const Matrix& v) {
    const auto n = q.rows();
    const auto d = q.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Matrix out = Matrix::Zero(n, v.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> w(static_cast<std::size_t>(n), 0.0);
        double total = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index c = 0; c < d; ++c)
                s += std::max(0.0, q(i, c) * scale) * std::max(0.0, k(j, c));
            w[static_cast<std::size_t>(j)] = s;
            total += s;
        }
        if (total == 0.0) continue;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index c = 0; c < v.cols(); ++c)
                out(i, c) += w[static_cast<std::size_t>(j)] / total * v(j, c);
    }
    return out;
}

namespace {

double box_iou(const BBox& a, const BBox& b) {
    const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    return inter / ((a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter);
}

}  // namespace

std::map<int, Counts> count_at(std::span<const EvalSequence> corpus, double threshold) {
    std::map<int, Counts> counts;
    for (const auto& seq : corpus) {
        std::map<std::int64_t, const ScoredFrame*> preds;
        for (const auto& f : seq.predictions) preds[f.frame_index] = &f;
        for (const auto& gt : seq.ground_truth) {
            for (const auto& o : gt.objects) ++counts[o.class_id].n_gt;
            auto it = preds.find(gt.frame_index);
            if (it == preds.end()) continue;
            std::vector<Detection> dets;
            for (const auto& d : it->second->detections)
                if (d.conf >= threshold) dets.push_back(d);
            std::stable_sort(dets.begin(), dets.end(),
                             [](const Detection& a, const Detection& b) { return a.conf > b.conf; });
            std::vector<char> taken(gt.objects.size(), 0);
            for (const auto& d : dets) {
                double best = 0.5;
                long pick = -1;
                for (std::size_t g = 0; g < gt.objects.size(); ++g) {
                    if (taken[g] || gt.objects[g].class_id != d.class_id) continue;
                    const double v = box_iou(d.bbox, gt.objects[g].bbox);
                    if (v > best) {
                        best = v;
                        pick = static_cast<long>(g);
                    }
                }
                if (pick >= 0) {
                    taken[static_cast<std::size_t>(pick)] = 1;
                    ++counts[d.class_id].tp;
                } else {
                    ++counts[d.class_id].fp;
                }
            }
        }
        // Predictions on frames without a ground-truth entry are all false positives.
        std::map<std::int64_t, bool> has_gt;
        for (const auto& gt : seq.ground_truth) has_gt[gt.frame_index] = true;
        for (const auto& f : seq.predictions)
            if (!has_gt.count(f.frame_index))
                for (const auto& d : f.detections)
                    if (d.conf >= threshold) ++counts[d.class_id].fp;
    }
    return counts;
}

double mean_f1_at(std::span<const EvalSequence> corpus, double threshold) {
    double sum = 0.0;
    int classes = 0;
    for (const auto& [cls, c] : count_at(corpus, threshold)) {
        if (c.n_gt == 0) continue;
        ++classes;
        const double p = c.tp + c.fp ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
        const double r = static_cast<double>(c.tp) / c.n_gt;
        sum += p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    return classes ? sum / classes : 0.0;
}

double best_threshold(std::span<const EvalSequence> corpus, double step) {
    std::vector<double> grid;
    for (int k = 0; k * step < 1.0 - 1e-4 - 1e-12; ++k) grid.push_back(k * step);
    grid.push_back(1.0 - 1e-4);
    double best_t = grid.front();
    double best_f = -1.0;
    for (double t : grid) {
        const double f = mean_f1_at(corpus, t);
        if (f >= best_f) {
            best_f = f;
            best_t = t;
        }
    }
    return best_t;
}

}  // namespace mr2::oracle
