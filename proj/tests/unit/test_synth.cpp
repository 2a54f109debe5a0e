#include <gtest/gtest.h>

#include "mr2/errors.hpp"
#include "mr2/geometry.hpp"
#include "mr2/synth.hpp"
#include "suite.hpp"

using namespace mr2;

namespace {

struct Rates {
    double drop = 0.0;
    double flip = 0.0;
};

// Needs a scenario without jitter or false positives so every detection is
// an exact copy of its object's box.
Rates measure(const SynthScenario& sc, Resolution res) {
    const SynthOutput out = generate(sc);
    std::size_t objects = 0, detected = 0, flipped = 0;
    for (const auto& gt : out.ground_truth) {
        const FramePacket p = out.detector.detect(gt.frame_index, res);
        objects += gt.objects.size();
        detected += p.detections.size();
        for (const auto& d : p.detections) {
            const BBox native = rescale_bbox(d.bbox, res, sc.native_resolution);
            for (const auto& o : gt.objects)
                if (iou(native, o.bbox) > 0.999) {
                    flipped += d.class_id != o.class_id;
                    break;
                }
        }
    }
    return {1.0 - static_cast<double>(detected) / objects, static_cast<double>(flipped) / detected};
}

SynthScenario clean_counts(SynthScenario sc) {
    for (auto& a : sc.degradation) {
        a.degradation.bbox_jitter_std = 0.0;
        a.degradation.false_positive_rate = 0.0;
    }
    sc.frame_count = 1000;
    sc.n_objects = 4;
    return sc;
}

}  // namespace

TEST(Synth, NoiselessDetectionsEqualGroundTruth) {
    const SynthScenario sc = suite::noiseless_scenario();
    const SynthOutput out = generate(sc);
    for (Resolution res : {Resolution{320, 320}, Resolution{192, 192}}) {
        for (const auto& gt : out.ground_truth) {
            const FramePacket p = out.detector.detect(gt.frame_index, res);
            ASSERT_EQ(p.detections.size(), gt.objects.size());
            for (std::size_t i = 0; i < p.detections.size(); ++i) {
                const BBox b = rescale_bbox(p.detections[i].bbox, res, sc.native_resolution);
                EXPECT_NEAR(b.x1, gt.objects[i].bbox.x1, 1e-9);
                EXPECT_NEAR(b.y2, gt.objects[i].bbox.y2, 1e-9);
                EXPECT_EQ(p.detections[i].class_id, gt.objects[i].class_id);
            }
        }
    }
}

TEST(Synth, CnnLikeLowResDropRate) {
    const SynthScenario sc = clean_counts(preset_scenario("cnn-like", 5));
    const double configured = sc.degradation_at({192, 192}).drop_prob;
    EXPECT_DOUBLE_EQ(configured, 0.30);
    EXPECT_NEAR(measure(sc, {192, 192}).drop, configured, 0.02);
}

TEST(Synth, FlipRate) {
    const SynthScenario sc = clean_counts(suite::flip_scenario(0.15, 6));
    EXPECT_NEAR(measure(sc, {320, 320}).flip, 0.15, 0.02);
    EXPECT_NEAR(measure(sc, {192, 192}).flip, 0.15, 0.02);
}

TEST(Synth, ReproducibleAndSeedSensitive) {
    const SynthOutput a = generate(preset_scenario("cnn-like", 9));
    const SynthOutput b = generate(preset_scenario("cnn-like", 9));
    const SynthOutput c = generate(preset_scenario("cnn-like", 10));
    EXPECT_EQ(a.ground_truth, b.ground_truth);
    EXPECT_NE(a.ground_truth, c.ground_truth);
    for (std::int64_t t : {0, 17, 299}) {
        EXPECT_EQ(a.detector.detect(t, {192, 192}), b.detector.detect(t, {192, 192}));
        EXPECT_NE(a.detector.detect(t, {192, 192}), c.detector.detect(t, {192, 192}));
    }
}

TEST(Synth, QueryOrderIndependent) {
    const SynthOutput a = generate(preset_scenario("vit-like", 3));
    const FramePacket late = a.detector.detect(200, {320, 320});
    a.detector.detect(5, {192, 192});
    EXPECT_EQ(a.detector.detect(200, {320, 320}), late);
}

TEST(Synth, GroundTruthInsideFrame) {
    for (const char* name : {"cnn-like", "vit-like"}) {
        const SynthScenario sc = preset_scenario(name, 4);
        for (const auto& f : generate(sc).ground_truth)
            for (const auto& o : f.objects) {
                EXPECT_GE(o.bbox.x1, 0.0);
                EXPECT_GE(o.bbox.y1, 0.0);
                EXPECT_LE(o.bbox.x2, sc.native_resolution.width);
                EXPECT_LE(o.bbox.y2, sc.native_resolution.height);
            }
    }
}

TEST(Synth, DegradationMonotoneInResolution) {
    for (const char* name : {"cnn-like", "vit-like"}) {
        const SynthScenario sc = preset_scenario(name);
        Degradation prev = sc.degradation_at({400, 400});
        for (int side = 400; side >= 100; side -= 8) {
            const Degradation d = sc.degradation_at({side, side});
            EXPECT_GE(d.drop_prob, prev.drop_prob);
            EXPECT_GE(d.class_flip_prob, prev.class_flip_prob);
            prev = d;
        }
    }
}

TEST(Synth, ScheduleFollowsInterleaving) {
    const SynthOutput a = generate(preset_scenario("cnn-like"));
    ResolutionSchedule s;
    s.p = 3;
    const auto packets = a.detector.detect_schedule(s);
    ASSERT_EQ(packets.size(), 300u);
    for (const auto& p : packets) {
        EXPECT_EQ(p.inference_resolution, s.resolution_at(p.frame_index));
        EXPECT_EQ(p, a.detector.detect(p.frame_index, p.inference_resolution));
    }
}

TEST(Synth, Validation) {
    SynthScenario sc = preset_scenario("cnn-like");
    sc.degradation[0].degradation.drop_prob = 0.9;  // full-res drops more than low-res
    EXPECT_THROW(sc.validate(), ValidationError);
    sc = preset_scenario("cnn-like");
    sc.n_objects = 0;
    EXPECT_THROW(sc.validate(), ValidationError);
    EXPECT_THROW(preset_scenario("rnn-like"), ValidationError);
}
