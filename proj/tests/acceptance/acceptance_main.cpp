// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "mr2/association.hpp"
#include "mr2/config.hpp"
#include "mr2/evaluation.hpp"
#include "mr2/experiment.hpp"
#include "mr2/kalman.hpp"
#include "mr2/linear_attention.hpp"
#include "mr2/pipeline.hpp"
#include "mr2/random.hpp"
#include "mr2/rescore.hpp"
#include "mr2/schedule.hpp"
#include "oracles.hpp"
#include "suite.hpp"

using namespace mr2;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kMacTolPp = 0.5;
constexpr double kNanodetReductionPct = 53.3;
constexpr double kP1ReductionPct = 32.0;
constexpr double kAttnRatio = 2.78;
constexpr double kAttnRatioTol = 0.05;
constexpr double kOrderTol = 1e-12;
constexpr int kRescoreSequences = 10000;
constexpr int kAssignmentInstances = 1000;
constexpr int kKalmanCombos = 100;
constexpr double kKalmanErrorPx = 0.5;
constexpr int kAttnInstances = 1000;
constexpr double kAttnRelTol = 1e-6;
constexpr double kRecallGainPp = 10.0;
constexpr double kClassErrorReduction = 0.50;
constexpr double kFlipProb = 0.15;
constexpr double kMr2MapDropPp = 3.0;
constexpr double kBaselineMapDropPp = 10.0;
constexpr int kSuiteSequences = 4;
constexpr int kSuiteP = 5;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double max_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double reduction_pct(const char* preset, int p) {
    RunConfig cfg = default_run_config(preset);
    cfg.schedule.p = p;
    return 100.0 * mean_mac(cfg.schedule).reduction;
}

Outcome cost_nanodet() {
    const double r = reduction_pct("nanodet", 5);
    return {std::abs(r - kNanodetReductionPct) <= kMacTolPp, fmt("reduction %.2f%%", r)};
}

Outcome cost_p1() {
    const double y = reduction_pct("yolox", 1);
    const double e = reduction_pct("effvit", 1);
    return {std::abs(y - kP1ReductionPct) <= kMacTolPp && std::abs(e - kP1ReductionPct) <= kMacTolPp,
            fmt("yolox %.2f%%, effvit %.2f%%", y, e)};
}

Outcome attention_ratio() {
    const double r = attention_mac_ratio({320, 320}, {192, 192}, 8);
    return {std::abs(r - kAttnRatio) <= kAttnRatioTol, fmt("ratio %.3f", r)};
}

Outcome rescore_suite() {
    Rng rng(1001);
    RescoreConfig cfg;
    std::size_t failures = 0;

    // Order independence of same-class folding, with the cap out of the way.
    RescoreConfig uncapped;
    uncapped.epsilon = 1e-300;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> confs(2 + rng.below(7));
        for (auto& c : confs) c = rng.uniform(0.0, 0.95);
        auto fold = [&](const std::vector<double>& cs) {
            Track t;
            for (double c : cs) {
                const Detection det{{}, 0, c};
                apply_rescore(t, det, rescore_update(t, det, uncapped), uncapped);
            }
            return t.conf_agg;
        };
        const double ref = fold(confs);
        auto perm = confs;
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        failures += std::abs(fold(perm) - ref) > kOrderTol;
    }

    for (int seq = 0; seq < kRescoreSequences; ++seq) {
        const int n_classes = 1 + static_cast<int>(rng.below(3));
        Track t;
        t.class_id = static_cast<int>(rng.below(n_classes));
        t.conf = t.conf_agg = clamp_confidence(rng.uniform(), cfg);
        t.recent_confs = {t.conf};
        oracle::RescoreTrace ref = oracle::rescore_start(t.class_id, t.conf);
        const int len = 1 + static_cast<int>(rng.below(8));
        for (int k = 0; k < len; ++k) {
            const Detection det{{}, static_cast<int>(rng.below(n_classes)),
                                clamp_confidence(rng.bernoulli(0.1) ? 1.0 : rng.uniform(), cfg)};
            const double before = t.conf_agg;
            const RescoreDecision d = rescore_update(t, det, cfg);
            if (det.class_id == t.class_id) {
                failures += d.new_conf_agg < before;  // monotone
                failures += d.class_switched;
            } else {
                const double margin = before < det.conf
                                          ? before
                                          : std::max(0.0, 1.0 - (1.0 - before) / (1.0 - det.conf));
                failures += d.class_switched != (margin < det.conf);
            }
            apply_rescore(t, det, d, cfg);
            oracle::rescore_step(ref, det.class_id, det.conf, cfg.epsilon, cfg.history_len);
            failures += t.conf_agg < 0.0 || t.conf_agg > cfg.cap();
            failures += t.class_id != ref.cls || t.conf_agg != ref.agg ||
                        std::abs(t.conf - ref.conf) > 1e-12;
        }
    }
    return {failures == 0, fmt("%.0f sequences, %.0f violations", kRescoreSequences,
                               static_cast<double>(failures))};
}

Outcome association_suite() {
    Rng rng(1002);
    int mismatches = 0;
    for (int trial = 0; trial < kAssignmentInstances; ++trial) {
        const std::size_t rows = 1 + rng.below(6), cols = 1 + rng.below(6);
        CostMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = rng.bernoulli(0.3) ? 0.0 : static_cast<double>(rng.below(65)) / 64.0;
        const double tau = 0.3;
        const MatchResult r = match(m, tau);
        double total = 0.0;
        for (auto [i, j] : r.matches) {
            total += m(i, j);
            mismatches += m(i, j) < tau;
        }
        mismatches += total != oracle::brute_force_total(m, tau);
    }
    return {mismatches == 0, fmt("%.0f instances, %.0f mismatches", kAssignmentInstances,
                                 static_cast<double>(mismatches))};
}

Outcome kalman_suite() {
    Rng rng(1003);
    double worst = 0.0;
    for (int c = 0; c < kKalmanCombos; ++c) {
        const double h = rng.uniform(20, 150), w = h * rng.uniform(0.4, 2.0);
        const double vx = rng.uniform(-15, 15), vy = rng.uniform(-15, 15);
        const double x = rng.uniform(0, 200), y = rng.uniform(0, 200);
        auto box_at = [&](int t) { return BBox{x + vx * t, y + vy * t, x + vx * t + w, y + vy * t + h}; };
        KalmanState s = kf_init(box_at(0));
        for (int t = 1; t <= 10; ++t) {
            s = kf_predict(s);
            if (t == 10) {
                const BBox p = s.box(), truth = box_at(t);
                worst = std::max(worst, std::hypot(p.center_x() - truth.center_x(),
                                                   p.center_y() - truth.center_y()));
            }
            s = kf_update(s, box_at(t));
        }
    }
    return {worst < kKalmanErrorPx, fmt("worst frame-10 error %.4f px", worst)};
}

Outcome attention_suite() {
    Rng rng(1004);
    double worst = 0.0;
    for (int trial = 0; trial < kAttnInstances; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(64));
        AttentionInput in{Matrix(n, 16), Matrix(n, 16), Matrix(n, 16)};
        for (Matrix* m : {&in.q, &in.k, &in.v})
            for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = rng.normal();
        worst = std::max(worst, relative_error(factored_linear_attention(in), naive_relu_attention(in)));
    }
    AttentionCheckOptions opts;
    opts.n_values = {32, 64};
    opts.trials = 1;
    const AttentionCheckReport r = run_attention_check(opts);
    const bool ratios = r.factored_ratio >= 1.9 && r.factored_ratio <= 2.1 && r.naive_ratio >= 3.8 &&
                        r.naive_ratio <= 4.2;
    return {worst <= kAttnRelTol && ratios,
            fmt("max rel err %.2e, count ratio factored %.3f naive %.3f", worst, r.factored_ratio,
                r.naive_ratio)};
}

// End-to-end results on the standard synthetic suite, computed once.
struct EndToEnd {
    SweepResult sweep;
    ClassErrorStats naive_errors, mr2_errors;
    double seconds = 0.0;
};

const EndToEnd& end_to_end() {
    static const EndToEnd result = [] {
        const auto start = std::chrono::steady_clock::now();
        EndToEnd e;
        const RunConfig cfg = default_run_config("nanodet");
        const auto corpus = suite::make_corpus(suite::standard_scenario(), kSuiteSequences);
        const std::vector<int> ps{0, kSuiteP};
        e.sweep = run_sweep(corpus, cfg, ps);

        const auto flips = suite::make_corpus(suite::flip_scenario(kFlipProb), kSuiteSequences);
        PipelineOptions naive = cfg.pipeline;
        naive.rescore = false;
        for (const auto& seq : flips) {
            const auto frames = interleave(seq, 0, cfg.rescore);
            const auto a = class_errors(run_sequence(frames, cfg.tracker, cfg.rescore, naive),
                                        seq.ground_truth);
            const auto b = class_errors(run_sequence(frames, cfg.tracker, cfg.rescore, cfg.pipeline),
                                        seq.ground_truth);
            e.naive_errors.matched += a.matched;
            e.naive_errors.wrong_class += a.wrong_class;
            e.mr2_errors.matched += b.matched;
            e.mr2_errors.wrong_class += b.wrong_class;
        }
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return e;
    }();
    return result;
}

Outcome e2e_recall() {
    const SweepRow& row = end_to_end().sweep.rows.back();
    const double gain = 100.0 * (row.mr2.recall - row.baseline.recall);
    return {gain >= kRecallGainPp, fmt("P=%.0f recall: frame-by-frame %.4f, MR2 %.4f, gain %.1f pp",
                                       row.p, row.baseline.recall, row.mr2.recall, gain)};
}

Outcome e2e_class_errors() {
    const EndToEnd& e = end_to_end();
    const double naive = e.naive_errors.rate(), mr2 = e.mr2_errors.rate();
    const double reduction = naive > 0.0 ? 1.0 - mr2 / naive : 0.0;
    return {naive > 0.0 && reduction >= kClassErrorReduction,
            fmt("class-error rate: naive %.4f, rescore %.4f, reduction %.1f%%", naive, mr2,
                100.0 * reduction)};
}

Outcome e2e_map_shape() {
    const auto& rows = end_to_end().sweep.rows;
    const double mr2_drop = 100.0 * (rows.front().mr2.map - rows.back().mr2.map);
    const double base_drop = 100.0 * (rows.front().baseline.map - rows.back().baseline.map);
    return {mr2_drop < kMr2MapDropPp && base_drop > kBaselineMapDropPp,
            fmt("mAP drop P=0 to P=5: MR2 %.2f pp, frame-by-frame %.2f pp", mr2_drop, base_drop)};
}

Outcome e2e_runtime() {
    const double s = end_to_end().seconds;
    return {s < 120.0, fmt("end-to-end suite %.2f s", s)};
}

Outcome evaluation_suite() {
    bool ok = average_precision({true, false}, 1) == 1.0 && average_precision({false, true}, 1) == 0.5;

    // Planted corpora: TPs above every FP at known confidences.
    Rng rng(1005);
    int mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
        EvalSequence seq;
        const BBox gt{0, 0, 10, 10};
        for (int t = 0; t < 20; ++t) {
            seq.ground_truth.push_back({t, {{gt, 0}}});
            std::vector<Detection> dets;
            if (rng.bernoulli(0.85)) dets.push_back({gt, 0, rng.uniform(0.05, 1.0)});
            for (int k = static_cast<int>(rng.below(3)); k > 0; --k)
                dets.push_back({{50, 50, 60, 60}, 0, rng.uniform(0.0, 0.8)});
            seq.predictions.push_back({t, dets});
        }
        const std::vector<EvalSequence> corpus{seq};
        const MetricsReport r = f1_max_threshold(corpus, 0.01);
        const double ref = oracle::best_threshold(corpus, 0.01);
        mismatches += std::abs(r.threshold_used - ref) > 1e-9 ||
                      std::abs(r.mean_f1 - oracle::mean_f1_at(corpus, ref)) > 1e-12;
    }
    ok = ok && mismatches == 0;
    return {ok, fmt("AP hand cases exact, %.0f f1-max mismatches on 50 planted corpora",
                    static_cast<double>(mismatches))};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    // Both runs use the same directory, since logs and reports name their files.
    const fs::path dir = fs::temp_directory_path() / "mr2_acceptance_determinism";
    std::vector<std::string> captured[2];
    for (int run = 0; run < 2; ++run) {
        fs::remove_all(dir);
        std::ostringstream log;
        cli::SynthOptions so;
        so.seed = 77;
        so.sequences = 2;
        so.p_values = {3};
        so.out_dir = dir;
        cli::cmd_synth(so, log);

        cli::ConfigFlags flags;
        flags.p = 3;
        cli::cmd_track({dir / "detections_p3.jsonl", dir / "tracks.jsonl", flags}, log);

        cli::EvalOptions eo;
        eo.inputs = {dir / "tracks.jsonl", dir / "detections_p3.jsonl"};
        eo.ground_truth = dir / "gt.jsonl";
        eo.out = dir / "eval.json";
        cli::cmd_eval(eo, log);

        cli::SweepOptions wo;
        wo.full = dir / "detections_full.jsonl";
        wo.low = dir / "detections_low.jsonl";
        wo.ground_truth = dir / "gt.jsonl";
        wo.p_values = {0, 3};
        wo.out = dir / "sweep.json";
        cli::cmd_sweep(wo, log);

        cli::cmd_attn_check({}, log);
        for (const char* f : {"gt.jsonl", "detections_full.jsonl", "detections_low.jsonl",
                              "detections_p3.jsonl", "tracks.jsonl", "eval.json", "sweep.json"})
            captured[run].push_back(slurp(dir / f));
        captured[run].push_back(log.str());
    }
    fs::remove_all(dir);
    const bool same = captured[0] == captured[1];
    return {same, same ? "synth, track, eval, sweep, attn-check outputs byte-identical"
                       : "outputs differ between reruns"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"cost model: nanodet P=5 MAC reduction 53.3% +-0.5 pp", 1.0, cost_nanodet},
        {"cost model: yolox/effvit P=1 MAC reduction 32.0% +-0.5 pp", 1.0, cost_p1},
        {"cost model: attention patch ratio 320 vs 192 = 2.78 +-0.05", 1.0, attention_ratio},
        {"rescore algebra suite (10,000 sequences)", 10.0, rescore_suite},
        {"association optimality vs brute force (1,000 instances)", 10.0, association_suite},
        {"kalman convergence < 0.5 px by frame 10 (100 combinations)", 5.0, kalman_suite},
        {"linear attention equivalence and multiply-count scaling", 30.0, attention_suite},
        {"end-to-end: MR2 recall >= frame-by-frame + 10 pp at P=5", 120.0, e2e_recall},
        {"end-to-end: rescore cuts class errors by >= 50% under 15% flips", 120.0, e2e_class_errors},
        {"end-to-end: mAP drop P=0->5 MR2 < 3 pp, frame-by-frame > 10 pp", 120.0, e2e_map_shape},
        {"end-to-end: suite runtime < 2 min", 120.0, e2e_runtime},
        {"evaluation correctness (AP cases, f1-max vs brute force)", 10.0, evaluation_suite},
        {"determinism: reruns byte-identical", 60.0, determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.pass && s < c.max_seconds;
        failed += !pass;
        std::printf("%s  %s  [%s; %.3f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                    o.detail.c_str(), s, c.max_seconds);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
