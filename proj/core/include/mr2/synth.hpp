#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mr2/evaluation.hpp"
#include "mr2/schedule.hpp"
#include "mr2/types.hpp"

namespace mr2 {

/// Detector failure model at one inference resolution.
struct Degradation {
    double drop_prob = 0.0;        // object missed entirely
    double class_flip_prob = 0.0;  // reported with a wrong class
    double conf_mean = 0.8;        // confidence of a true detection
    double conf_noise_std = 0.0;
    double bbox_jitter_std = 0.0;  // per-corner noise, as a fraction of box width/height
    double false_positive_rate = 0.0;  // expected spurious detections per frame
    double fp_conf_mean = 0.3;

    void validate() const;
};

struct DegradationAnchor {
    Resolution resolution;
    Degradation degradation;
};

struct MotionSpec {
    double speed_min = 1.0;  // px / frame
    double speed_max = 4.0;
    double turn_prob = 0.0;  // per-frame probability of a heading change
    double max_turn = 0.8;   // radians
    double size_min = 30.0;  // box height range, px
    double size_max = 80.0;
    double aspect_min = 0.6;
    double aspect_max = 1.6;
};

struct SynthScenario {
    std::uint64_t seed = 1;
    int n_objects = 6;
    int frame_count = 300;
    int n_classes = 8;
    Resolution native_resolution{320, 320};
    MotionSpec motion;
    /// Degradation at known resolutions; other resolutions interpolate
    /// linearly in pixel area and clamp at the ends.
    std::vector<DegradationAnchor> degradation;

    Degradation degradation_at(Resolution res) const;
    /// Throws ValidationError for zero objects/frames, bad probabilities, or
    /// anchors whose failure rates shrink as resolution drops.
    void validate() const;
};

/// "cnn-like" (missed objects and lower confidence at low resolution) or
/// "vit-like" (recall kept, extra false positives). Throws ValidationError otherwise.
SynthScenario preset_scenario(const std::string& name, std::uint64_t seed = 1);

/// Deterministic detector stand-in: the same (seed, frame, resolution)
/// always yields the same packet, independent of query order.
class SyntheticDetector {
public:
    SyntheticDetector(SynthScenario scenario, std::vector<GroundTruthFrame> truth);

    /// Detections with boxes in `res` pixel coordinates.
    FramePacket detect(std::int64_t frame, Resolution res) const;
    /// One packet per frame, inferred at the schedule's resolution.
    std::vector<FramePacket> detect_schedule(const ResolutionSchedule& schedule) const;

    const SynthScenario& scenario() const { return scenario_; }

private:
    SynthScenario scenario_;
    std::vector<GroundTruthFrame> truth_;
};

struct SynthOutput {
    std::vector<GroundTruthFrame> ground_truth;
    SyntheticDetector detector;
};

SynthOutput generate(const SynthScenario& scenario);

}  // namespace mr2
