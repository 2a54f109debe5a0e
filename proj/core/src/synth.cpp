#include "mr2/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mr2/errors.hpp"
#include "mr2/random.hpp"

namespace mr2 {
namespace {

constexpr std::uint64_t kTrajectoryStream = 0;
constexpr std::uint64_t kDetectorStream = 1;

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

double area(Resolution r) { return static_cast<double>(r.width) * r.height; }

Degradation lerp(const Degradation& a, const Degradation& b, double t) {
    auto mix = [t](double x, double y) { return x + (y - x) * t; };
    Degradation d;
    d.drop_prob = mix(a.drop_prob, b.drop_prob);
    d.class_flip_prob = mix(a.class_flip_prob, b.class_flip_prob);
    d.conf_mean = mix(a.conf_mean, b.conf_mean);
    d.conf_noise_std = mix(a.conf_noise_std, b.conf_noise_std);
    d.bbox_jitter_std = mix(a.bbox_jitter_std, b.bbox_jitter_std);
    d.false_positive_rate = mix(a.false_positive_rate, b.false_positive_rate);
    d.fp_conf_mean = mix(a.fp_conf_mean, b.fp_conf_mean);
    return d;
}

std::vector<DegradationAnchor> sorted_by_area(std::vector<DegradationAnchor> anchors) {
    std::stable_sort(anchors.begin(), anchors.end(),
                     [](const auto& a, const auto& b) { return area(a.resolution) < area(b.resolution); });
    return anchors;
}

BBox clip(BBox b, Resolution r) {
    b.x1 = std::clamp(b.x1, 0.0, static_cast<double>(r.width));
    b.x2 = std::clamp(b.x2, b.x1, static_cast<double>(r.width));
    b.y1 = std::clamp(b.y1, 0.0, static_cast<double>(r.height));
    b.y2 = std::clamp(b.y2, b.y1, static_cast<double>(r.height));
    return b;
}

double confidence(Rng& rng, double mean, double std_dev) {
    return std::clamp(rng.normal(mean, std_dev), 0.01, 0.99);
}

}  // namespace

void Degradation::validate() const {
    if (!probability(drop_prob) || !probability(class_flip_prob))
        throw ValidationError("scenario: drop_prob and class_flip_prob must lie in [0, 1]");
    if (!probability(conf_mean) || !probability(fp_conf_mean))
        throw ValidationError("scenario: confidence means must lie in [0, 1]");
    if (conf_noise_std < 0.0 || bbox_jitter_std < 0.0 || false_positive_rate < 0.0)
        throw ValidationError("scenario: noise levels and rates must be non-negative");
}

Degradation SynthScenario::degradation_at(Resolution res) const {
    if (degradation.empty()) return {};
    const auto anchors = sorted_by_area(degradation);
    const double a = area(res);
    if (a <= area(anchors.front().resolution)) return anchors.front().degradation;
    if (a >= area(anchors.back().resolution)) return anchors.back().degradation;
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        const double lo = area(anchors[i - 1].resolution);
        const double hi = area(anchors[i].resolution);
        if (a <= hi) {
            const double t = hi > lo ? (a - lo) / (hi - lo) : 1.0;
            return lerp(anchors[i - 1].degradation, anchors[i].degradation, t);
        }
    }
    return anchors.back().degradation;
}

void SynthScenario::validate() const {
    if (n_objects <= 0) throw ValidationError("scenario: n_objects must be positive");
    if (frame_count <= 0) throw ValidationError("scenario: frame_count must be positive");
    if (n_classes <= 0) throw ValidationError("scenario: n_classes must be positive");
    if (native_resolution.width <= 0 || native_resolution.height <= 0)
        throw ValidationError("scenario: native_resolution must be positive");
    const MotionSpec& m = motion;
    if (m.speed_min < 0.0 || m.speed_max < m.speed_min)
        throw ValidationError("scenario: invalid speed range");
    if (!probability(m.turn_prob)) throw ValidationError("scenario: turn_prob must lie in [0, 1]");
    if (m.size_min <= 0.0 || m.size_max < m.size_min || m.aspect_min <= 0.0 ||
        m.aspect_max < m.aspect_min)
        throw ValidationError("scenario: invalid size or aspect range");
    if (m.size_max * m.aspect_max >= native_resolution.width ||
        m.size_max >= native_resolution.height)
        throw ValidationError("scenario: objects do not fit inside the native resolution");
    for (const auto& a : degradation) {
        if (a.resolution.width <= 0 || a.resolution.height <= 0)
            throw ValidationError("scenario: degradation resolution must be positive");
        a.degradation.validate();
        if (a.degradation.class_flip_prob > 0.0 && n_classes < 2)
            throw ValidationError("scenario: class flips need at least two classes");
    }
    const auto anchors = sorted_by_area(degradation);
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        const Degradation& lower = anchors[i - 1].degradation;
        const Degradation& higher = anchors[i].degradation;
        if (lower.drop_prob < higher.drop_prob || lower.class_flip_prob < higher.class_flip_prob)
            throw ValidationError(
                "scenario: drop/flip probabilities must not decrease as resolution drops");
    }
}

SynthScenario preset_scenario(const std::string& name, std::uint64_t seed) {
    SynthScenario sc;
    sc.seed = seed;
    sc.motion.turn_prob = 0.02;

    Degradation full;
    full.drop_prob = 0.02;
    full.class_flip_prob = 0.05;
    full.conf_mean = 0.75;
    full.conf_noise_std = 0.10;
    full.bbox_jitter_std = 0.03;
    full.false_positive_rate = 0.4;
    full.fp_conf_mean = 0.25;

    Degradation low = full;
    if (name == "cnn-like") {
        low.drop_prob = 0.30;
        low.class_flip_prob = 0.08;
        low.conf_mean = 0.45;
        low.conf_noise_std = 0.12;
        low.bbox_jitter_std = 0.05;
        low.false_positive_rate = 0.4;
        low.fp_conf_mean = 0.25;
    } else if (name == "vit-like") {
        low.drop_prob = 0.05;
        low.class_flip_prob = 0.10;
        low.conf_mean = 0.65;
        low.conf_noise_std = 0.12;
        low.bbox_jitter_std = 0.05;
        low.false_positive_rate = 1.5;
        low.fp_conf_mean = 0.45;
    } else {
        throw ValidationError("unknown scenario preset '" + name +
                              "' (expected cnn-like or vit-like)");
    }
    sc.degradation = {{{320, 320}, full}, {{192, 192}, low}};
    return sc;
}

SyntheticDetector::SyntheticDetector(SynthScenario scenario, std::vector<GroundTruthFrame> truth)
    : scenario_(std::move(scenario)), truth_(std::move(truth)) {}

FramePacket SyntheticDetector::detect(std::int64_t frame, Resolution res) const {
    if (frame < 0 || frame >= static_cast<std::int64_t>(truth_.size()))
        throw std::out_of_range("synthetic detector: frame " + std::to_string(frame) +
                                " outside the scenario");
    const Degradation d = scenario_.degradation_at(res);
    const Resolution native = scenario_.native_resolution;
    Rng rng(derive_seed(scenario_.seed,
                        {kDetectorStream, static_cast<std::uint64_t>(frame),
                         static_cast<std::uint64_t>(res.width),
                         static_cast<std::uint64_t>(res.height)}));

    FramePacket packet;
    packet.frame_index = frame;
    packet.inference_resolution = res;
    packet.native_resolution = native;

    for (const auto& obj : truth_[static_cast<std::size_t>(frame)].objects) {
        // Draw every variate so one object's outcome never shifts another's.
        const bool dropped = rng.bernoulli(d.drop_prob);
        const bool flipped = rng.bernoulli(d.class_flip_prob);
        const auto other = scenario_.n_classes > 1 ? rng.below(scenario_.n_classes - 1) : 0;
        const double conf = confidence(rng, d.conf_mean, d.conf_noise_std);
        const double w = obj.bbox.width();
        const double h = obj.bbox.height();
        BBox b{obj.bbox.x1 + rng.normal(0.0, d.bbox_jitter_std * w),
               obj.bbox.y1 + rng.normal(0.0, d.bbox_jitter_std * h),
               obj.bbox.x2 + rng.normal(0.0, d.bbox_jitter_std * w),
               obj.bbox.y2 + rng.normal(0.0, d.bbox_jitter_std * h)};
        if (dropped) continue;
        if (b.x2 < b.x1) std::swap(b.x1, b.x2);
        if (b.y2 < b.y1) std::swap(b.y1, b.y2);

        int cls = obj.class_id;
        if (flipped) {
            // Uniform over the other classes.
            cls = static_cast<int>(other);
            if (cls >= obj.class_id) ++cls;
        }
        packet.detections.push_back({rescale_bbox(clip(b, native), native, res), cls, conf});
    }

    const double rate = d.false_positive_rate;
    const int n_fp = static_cast<int>(std::floor(rate)) + (rng.bernoulli(rate - std::floor(rate)) ? 1 : 0);
    const MotionSpec& m = scenario_.motion;
    for (int k = 0; k < n_fp; ++k) {
        const double h = rng.uniform(m.size_min, m.size_max);
        const double w = h * rng.uniform(m.aspect_min, m.aspect_max);
        const double x = rng.uniform(0.0, native.width - w);
        const double y = rng.uniform(0.0, native.height - h);
        const int cls = static_cast<int>(rng.below(static_cast<std::uint64_t>(scenario_.n_classes)));
        const double conf = confidence(rng, d.fp_conf_mean, d.conf_noise_std);
        packet.detections.push_back({rescale_bbox({x, y, x + w, y + h}, native, res), cls, conf});
    }
    return packet;
}

std::vector<FramePacket> SyntheticDetector::detect_schedule(
    const ResolutionSchedule& schedule) const {
    std::vector<FramePacket> out;
    out.reserve(truth_.size());
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(truth_.size()); ++t)
        out.push_back(detect(t, schedule.resolution_at(t)));
    return out;
}

SynthOutput generate(const SynthScenario& scenario) {
    scenario.validate();
    const MotionSpec& m = scenario.motion;
    const double width = scenario.native_resolution.width;
    const double height = scenario.native_resolution.height;

    std::vector<GroundTruthFrame> truth(static_cast<std::size_t>(scenario.frame_count));
    for (int t = 0; t < scenario.frame_count; ++t) truth[t].frame_index = t;

    for (int obj = 0; obj < scenario.n_objects; ++obj) {
        Rng rng(derive_seed(scenario.seed, {kTrajectoryStream, static_cast<std::uint64_t>(obj)}));
        const double h = rng.uniform(m.size_min, m.size_max);
        const double w = h * rng.uniform(m.aspect_min, m.aspect_max);
        const int cls = static_cast<int>(rng.below(static_cast<std::uint64_t>(scenario.n_classes)));
        double cx = rng.uniform(0.5 * w, width - 0.5 * w);
        double cy = rng.uniform(0.5 * h, height - 0.5 * h);
        const double speed = rng.uniform(m.speed_min, m.speed_max);
        double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double vx = speed * std::cos(heading);
        double vy = speed * std::sin(heading);

        for (int t = 0; t < scenario.frame_count; ++t) {
            truth[t].objects.push_back({{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h}, cls});
            const double turn = rng.uniform(-m.max_turn, m.max_turn);
            if (rng.bernoulli(m.turn_prob)) {
                heading = std::atan2(vy, vx) + turn;
                vx = speed * std::cos(heading);
                vy = speed * std::sin(heading);
            }
            cx += vx;
            cy += vy;
            // Reflect off the frame border so the box stays inside.
            if (cx < 0.5 * w) { cx = w - cx; vx = -vx; }
            if (cx > width - 0.5 * w) { cx = 2.0 * (width - 0.5 * w) - cx; vx = -vx; }
            if (cy < 0.5 * h) { cy = h - cy; vy = -vy; }
            if (cy > height - 0.5 * h) { cy = 2.0 * (height - 0.5 * h) - cy; vy = -vy; }
        }
    }
    SyntheticDetector detector(scenario, truth);
    return {std::move(truth), std::move(detector)};
}

}  // namespace mr2
