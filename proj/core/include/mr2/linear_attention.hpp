#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "mr2/geometry.hpp"

namespace mr2 {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Single-head attention operands, one row per patch.
struct AttentionInput {
    Matrix q;  // n x d_k
    Matrix k;  // n x d_k
    Matrix v;  // n x d_v

    Eigen::Index patches() const { return q.rows(); }
    /// Throws std::invalid_argument on shape mismatch or non-finite entries.
    void validate() const;
};

/// Counts scalar multiplications (divisions included) performed by a kernel.
struct OpCounter {
    std::uint64_t multiplies = 0;
};

/// Quadratic reference: materializes the n x n matrix
///   A_ij = sum_k relu(q'_ik) relu(k_jk) / sum_j' sum_k relu(q'_ik) relu(k_j'k)
/// with q' = q / sqrt(d_k), and returns A v. Rows with a zero denominator are zero.
Matrix naive_relu_attention(const AttentionInput& in, OpCounter* counter = nullptr);

/// Linear-cost form relu(q') (relu(k)^T v) / relu(q') (relu(k)^T 1).
/// Never forms the n x n matrix.
Matrix factored_linear_attention(const AttentionInput& in, OpCounter* counter = nullptr);

/// relu applied to the scaled dot product itself, relu(q'_i . k_j). Agrees
/// with the kernels above only when every query/key entry is non-negative.
Matrix relu_dot_attention(const AttentionInput& in);

/// Implicit attention matrix of naive_relu_attention (n x n), for inspection.
Matrix relu_attention_weights(const AttentionInput& in);

/// Patch-count ratio between two input resolutions for a given patch size.
/// Throws std::invalid_argument when a side is not divisible by the patch.
double attention_mac_ratio(Resolution full, Resolution low, int patch);

using AttentionKernel = std::function<Matrix(const AttentionInput&, OpCounter*)>;

struct AttentionCheckOptions {
    std::vector<int> n_values{1, 8, 16, 32, 64};
    int d = 16;
    int trials = 100;
    double tolerance = 1e-6;
    std::uint64_t seed = 0x5eed;
};

struct AttentionCheckReport {
    struct Row {
        int n = 0;
        int trials = 0;
        double max_rel_error = 0.0;
        bool pass = false;
    };
    std::vector<Row> equivalence;
    double factored_ratio = 0.0;  // multiply counts at n=64 over n=32
    double naive_ratio = 0.0;
    bool scaling_pass = false;
    bool pass = false;
};

/// Runs the factored kernel (or a substitute) against the quadratic reference
/// on random signed inputs and checks multiply-count scaling.
AttentionCheckReport run_attention_check(const AttentionCheckOptions& opts,
                                         const AttentionKernel& candidate = {});

/// max |a - b| / max(1, max |b|).
double relative_error(const Matrix& a, const Matrix& b);

}  // namespace mr2
