#include "mr2/association.hpp"

#include <algorithm>
#include <limits>

namespace mr2 {

CostMatrix iou_matrix(std::span<const Detection> dets, std::span<const BBox> track_boxes) {
    CostMatrix m(dets.size(), track_boxes.size());
    for (std::size_t i = 0; i < dets.size(); ++i)
        for (std::size_t j = 0; j < track_boxes.size(); ++j)
            m(i, j) = iou(dets[i].bbox, track_boxes[j]);
    return m;
}

// Shortest augmenting path Hungarian method with row/column potentials,
// O(n^3). Rows are inserted in index order and columns scanned in index
// order, so the result is a pure function of the cost values.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // 1-based internals; index 0 is the virtual source column.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_to(n + 1);
    std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        col_owner[0] = row;
        std::size_t col = 0;
        std::fill(min_to.begin(), min_to.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col] = 1;
            const std::size_t r = col_owner[col];
            double delta = kInf;
            std::size_t next = 0;
            for (std::size_t c = 1; c <= n; ++c) {
                if (used[c]) continue;
                const double reduced = cost[(r - 1) * n + (c - 1)] - u[r] - v[c];
                if (reduced < min_to[c]) {
                    min_to[c] = reduced;
                    way[c] = col;
                }
                if (min_to[c] < delta) {
                    delta = min_to[c];
                    next = c;
                }
            }
            for (std::size_t c = 0; c <= n; ++c) {
                if (used[c]) {
                    u[col_owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    min_to[c] -= delta;
                }
            }
            col = next;
        } while (col_owner[col] != 0);
        do {
            const std::size_t prev = way[col];
            col_owner[col] = col_owner[prev];
            col = prev;
        } while (col != 0);
    }

    std::vector<std::size_t> assignment(n);
    for (std::size_t c = 1; c <= n; ++c)
        if (col_owner[c] != 0) assignment[col_owner[c] - 1] = c - 1;
    return assignment;
}

MatchResult match(const CostMatrix& iou, double tau_iou) {
    MatchResult out;
    const std::size_t rows = iou.rows();
    const std::size_t cols = iou.cols();
    if (rows == 0 || cols == 0) {
        for (std::size_t i = 0; i < rows; ++i) out.unmatched_detections.push_back(i);
        for (std::size_t j = 0; j < cols; ++j) out.unmatched_trackers.push_back(j);
        return out;
    }

    // Square problem on cost 1 - IoU. Gated pairs and padding cost 1, the
    // same as leaving both sides unmatched, so any optimum of the padded
    // problem maximises total IoU over gated pairs.
    const std::size_t n = std::max(rows, cols);
    std::vector<double> cost(n * n, 1.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (iou(i, j) >= tau_iou) cost[i * n + j] = 1.0 - iou(i, j);

    const auto assignment = solve_assignment(cost, n);
    std::vector<char> tracker_used(cols, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t j = assignment[i];
        if (j < cols && iou(i, j) >= tau_iou) {
            out.matches.emplace_back(i, j);
            tracker_used[j] = 1;
        } else {
            out.unmatched_detections.push_back(i);
        }
    }
    for (std::size_t j = 0; j < cols; ++j)
        if (!tracker_used[j]) out.unmatched_trackers.push_back(j);
    return out;
}

}  // namespace mr2
