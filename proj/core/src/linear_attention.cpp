#include "mr2/linear_attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mr2/random.hpp"

namespace mr2 {
namespace {

double relu(double x) { return x > 0.0 ? x : 0.0; }

void count(OpCounter* c, std::uint64_t n) {
    if (c) c->multiplies += n;
}

// relu(q / sqrt(d_k)); the scale is applied before the nonlinearity.
Matrix scaled_query(const AttentionInput& in, OpCounter* counter) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(in.q.cols()));
    Matrix out(in.q.rows(), in.q.cols());
    for (Eigen::Index i = 0; i < in.q.rows(); ++i)
        for (Eigen::Index c = 0; c < in.q.cols(); ++c) out(i, c) = relu(in.q(i, c) * scale);
    count(counter, static_cast<std::uint64_t>(in.q.size()));
    return out;
}

Matrix relu_keys(const AttentionInput& in) {
    return in.k.unaryExpr([](double x) { return relu(x); });
}

}  // namespace

void AttentionInput::validate() const {
    if (q.rows() != k.rows() || q.rows() != v.rows())
        throw std::invalid_argument("attention: Q, K, V must have the same number of rows");
    if (q.cols() != k.cols())
        throw std::invalid_argument("attention: Q and K must share the feature dimension");
    if (q.cols() == 0) throw std::invalid_argument("attention: d_k must be positive");
    if (!q.allFinite() || !k.allFinite() || !v.allFinite())
        throw std::invalid_argument("attention: non-finite input");
}

Matrix relu_attention_weights(const AttentionInput& in) {
    in.validate();
    const Matrix qr = scaled_query(in, nullptr);
    const Matrix kr = relu_keys(in);
    const Eigen::Index n = in.patches();
    Matrix a = qr * kr.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double denom = a.row(i).sum();
        if (denom > 0.0)
            a.row(i) /= denom;
        else
            a.row(i).setZero();
    }
    return a;
}

Matrix naive_relu_attention(const AttentionInput& in, OpCounter* counter) {
    in.validate();
    const Eigen::Index n = in.patches();
    const Eigen::Index dk = in.q.cols();
    const Eigen::Index dv = in.v.cols();
    const Matrix qr = scaled_query(in, counter);
    const Matrix kr = relu_keys(in);

    Matrix sim(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index c = 0; c < dk; ++c) s += qr(i, c) * kr(j, c);
            sim(i, j) = s;
        }
    count(counter, static_cast<std::uint64_t>(n * n * dk));

    Matrix out = Matrix::Zero(n, dv);
    for (Eigen::Index i = 0; i < n; ++i) {
        double denom = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) denom += sim(i, j);
        if (!(denom > 0.0)) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = sim(i, j) / denom;
            for (Eigen::Index c = 0; c < dv; ++c) out(i, c) += a * in.v(j, c);
        }
    }
    count(counter, static_cast<std::uint64_t>(n * n * (dv + 1)));
    return out;
}

Matrix factored_linear_attention(const AttentionInput& in, OpCounter* counter) {
    in.validate();
    const Eigen::Index n = in.patches();
    const Eigen::Index dk = in.q.cols();
    const Eigen::Index dv = in.v.cols();
    const Matrix qr = scaled_query(in, counter);
    const Matrix kr = relu_keys(in);

    // Shared across all queries: relu(K)^T V (d_k x d_v) and relu(K)^T 1 (d_k).
    Matrix kv = Matrix::Zero(dk, dv);
    Eigen::VectorXd ksum = Eigen::VectorXd::Zero(dk);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index c = 0; c < dk; ++c) {
            ksum(c) += kr(j, c);
            for (Eigen::Index e = 0; e < dv; ++e) kv(c, e) += kr(j, c) * in.v(j, e);
        }
    count(counter, static_cast<std::uint64_t>(n * dk * dv));

    Matrix out = Matrix::Zero(n, dv);
    for (Eigen::Index i = 0; i < n; ++i) {
        double denom = 0.0;
        for (Eigen::Index c = 0; c < dk; ++c) denom += qr(i, c) * ksum(c);
        if (!(denom > 0.0)) continue;
        for (Eigen::Index e = 0; e < dv; ++e) {
            double num = 0.0;
            for (Eigen::Index c = 0; c < dk; ++c) num += qr(i, c) * kv(c, e);
            out(i, e) = num / denom;
        }
    }
    count(counter, static_cast<std::uint64_t>(n * (dk + dk * dv + dv)));
    return out;
}

Matrix relu_dot_attention(const AttentionInput& in) {
    in.validate();
    const Eigen::Index n = in.patches();
    const double scale = 1.0 / std::sqrt(static_cast<double>(in.q.cols()));
    Matrix sim = ((in.q * in.k.transpose()) * scale).unaryExpr([](double x) { return relu(x); });
    Matrix out = Matrix::Zero(n, in.v.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double denom = sim.row(i).sum();
        if (denom > 0.0) out.row(i) = (sim.row(i) / denom) * in.v;
    }
    return out;
}

double attention_mac_ratio(Resolution full, Resolution low, int patch) {
    if (patch <= 0) throw std::invalid_argument("attention_mac_ratio: patch must be positive");
    for (const Resolution& r : {full, low})
        if (r.width <= 0 || r.height <= 0 || r.width % patch != 0 || r.height % patch != 0)
            throw std::invalid_argument("attention_mac_ratio: resolution " +
                                        std::to_string(r.width) + "x" +
                                        std::to_string(r.height) +
                                        " is not divisible by patch " + std::to_string(patch));
    const double full_patches =
        static_cast<double>(full.width / patch) * static_cast<double>(full.height / patch);
    const double low_patches =
        static_cast<double>(low.width / patch) * static_cast<double>(low.height / patch);
    return full_patches / low_patches;
}

double relative_error(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    if (a.size() == 0) return 0.0;
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

AttentionCheckReport run_attention_check(const AttentionCheckOptions& opts,
                                         const AttentionKernel& candidate) {
    const AttentionKernel kernel =
        candidate ? candidate : AttentionKernel(&factored_linear_attention);
    AttentionCheckReport report;
    Rng rng(opts.seed);

    auto random_input = [&](int n) {
        AttentionInput in{Matrix(n, opts.d), Matrix(n, opts.d), Matrix(n, opts.d)};
        for (auto* m : {&in.q, &in.k, &in.v})
            for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = rng.normal();
        return in;
    };

    bool all = true;
    for (int n : opts.n_values) {
        AttentionCheckReport::Row row;
        row.n = n;
        row.trials = opts.trials;
        for (int t = 0; t < opts.trials; ++t) {
            const AttentionInput in = random_input(n);
            const double err = relative_error(kernel(in, nullptr), naive_relu_attention(in));
            row.max_rel_error = std::max(row.max_rel_error, err);
        }
        row.pass = row.max_rel_error <= opts.tolerance;
        all = all && row.pass;
        report.equivalence.push_back(row);
    }

    auto counted = [&](int n, bool naive) {
        OpCounter c;
        const AttentionInput in = random_input(n);
        if (naive)
            naive_relu_attention(in, &c);
        else
            kernel(in, &c);
        return static_cast<double>(c.multiplies);
    };
    report.factored_ratio = counted(64, false) / counted(32, false);
    report.naive_ratio = counted(64, true) / counted(32, true);
    report.scaling_pass = report.factored_ratio >= 1.9 && report.factored_ratio <= 2.1 &&
                          report.naive_ratio >= 3.8 && report.naive_ratio <= 4.2;
    report.pass = all && report.scaling_pass;
    return report;
}

}  // namespace mr2
