#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mr2/geometry.hpp"
#include "mr2/types.hpp"

namespace mr2 {

/// Row-major N x M matrix of IoU values, detections along rows.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

struct MatchResult {
    std::vector<std::pair<std::size_t, std::size_t>> matches;  // (detection, tracker)
    std::vector<std::size_t> unmatched_detections;
    std::vector<std::size_t> unmatched_trackers;
};

/// Class-agnostic IoU between every detection and every tracker box.
CostMatrix iou_matrix(std::span<const Detection> dets, std::span<const BBox> track_boxes);

/// Maximum-total-IoU one-to-one assignment. Pairs with IoU < tau_iou are
/// never matched. Matches are returned sorted by detection index.
MatchResult match(const CostMatrix& iou, double tau_iou);

/// Minimum-cost assignment on a square cost matrix (row-major, n x n).
/// Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace mr2
