#pragma once

#include <cstdint>
#include <vector>

#include "mr2/geometry.hpp"

namespace mr2 {

struct Detection {
    BBox bbox;
    int class_id = 0;
    double conf = 0.0;

    bool operator==(const Detection&) const = default;
};

/// All detections of one frame. Detection boxes are expressed in
/// `inference_resolution` pixels until the loader rescales them to native.
struct FramePacket {
    std::int64_t frame_index = 0;
    Resolution inference_resolution;
    Resolution native_resolution;
    std::vector<Detection> detections;

    bool operator==(const FramePacket&) const = default;
};

struct TrackerConfig {
    double high_threshold = 0.45;
    double low_threshold = 0.30;
    double tau_iou = 0.3;
    int tau_init = 2;
    int tau_dead = 5;

    /// Throws ValidationError when any field is out of range.
    void validate() const;
};

struct RescoreConfig {
    double epsilon = 1e-4;
    int history_len = 3;

    double cap() const { return 1.0 - epsilon; }
    void validate() const;
};

/// Clamps a detector confidence into [0, 1 - epsilon].
double clamp_confidence(double conf, const RescoreConfig& cfg);

/// Rescales every detection to the native resolution and clamps confidences.
FramePacket normalize_packet(FramePacket packet, const RescoreConfig& cfg);

}  // namespace mr2
