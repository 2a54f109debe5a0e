#include <gtest/gtest.h>

#include "mr2/config.hpp"
#include "mr2/experiment.hpp"
#include "mr2/pipeline.hpp"
#include "suite.hpp"

using namespace mr2;

TEST(Experiment, InterleaveFollowsSchedule) {
    const auto corpus = suite::make_corpus(suite::standard_scenario(), 1);
    const RescoreConfig rcfg;
    const auto frames = interleave(corpus[0], 2, rcfg);
    ASSERT_EQ(frames.size(), corpus[0].full.size());
    for (const auto& f : frames) {
        const auto& src = f.frame_index % 3 == 0 ? corpus[0].full : corpus[0].low;
        EXPECT_EQ(f, normalize_packet(src[static_cast<std::size_t>(f.frame_index)], rcfg));
    }
}

TEST(Experiment, ClassErrorsCountsWrongLabels) {
    const std::vector<GroundTruthFrame> gt{{0, {{{0, 0, 10, 10}, 1}, {{50, 50, 60, 60}, 2}}}};
    const std::vector<std::vector<TrackOutput>> outputs{
        {{0, {0, 0, 10, 10}, 1, 0.9, false}, {1, {50, 50, 60, 60}, 3, 0.9, false},
         {2, {100, 100, 110, 110}, 3, 0.9, false}}};
    const ClassErrorStats s = class_errors(outputs, gt);
    EXPECT_EQ(s.matched, 2u);
    EXPECT_EQ(s.wrong_class, 1u);
    EXPECT_DOUBLE_EQ(s.rate(), 0.5);
}

TEST(Experiment, SweepRowsAndMonotoneCost) {
    const auto corpus = suite::make_corpus(suite::standard_scenario(), 2);
    const RunConfig cfg = default_run_config("nanodet");
    const std::vector<int> ps{0, 1, 3, 5};
    const SweepResult r = run_sweep(corpus, cfg, ps);
    ASSERT_EQ(r.rows.size(), ps.size());
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        EXPECT_LT(r.rows[i].mac.mean_mac, r.rows[i - 1].mac.mean_mac);
    const MetricsReport direct = evaluate_tracker(corpus, cfg, 3);
    EXPECT_DOUBLE_EQ(r.rows[2].mr2.map, direct.map);
}

TEST(Experiment, ThresholdTuningKeepsOrder) {
    const auto corpus = suite::make_corpus(suite::standard_scenario(), 1);
    const ThresholdSearch t = tune_thresholds(corpus, default_run_config("nanodet"), 0, 0.1);
    EXPECT_LT(t.low_threshold, t.high_threshold);
    EXPECT_GT(t.mean_f1, 0.0);
}
