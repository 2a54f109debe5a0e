#include "mr2/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mr2/errors.hpp"

namespace mr2 {

void TrackerConfig::validate() const {
    if (!(low_threshold < high_threshold))
        throw ValidationError("tracker: low_threshold must be below high_threshold");
    if (!(tau_iou > 0.0 && tau_iou < 1.0))
        throw ValidationError("tracker: tau_iou must lie in (0, 1)");
    if (tau_init < 1) throw ValidationError("tracker: tau_init must be >= 1");
    if (tau_dead < 1) throw ValidationError("tracker: tau_dead must be >= 1");
}

void RescoreConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ValidationError("rescore: epsilon must lie in (0, 1)");
    if (history_len < 1) throw ValidationError("rescore: history_len must be >= 1");
}

double clamp_confidence(double conf, const RescoreConfig& cfg) {
    if (std::isnan(conf)) return 0.0;
    return std::clamp(conf, 0.0, cfg.cap());
}

FramePacket normalize_packet(FramePacket packet, const RescoreConfig& cfg) {
    for (auto& det : packet.detections) {
        det.bbox = rescale_bbox(det.bbox, packet.inference_resolution, packet.native_resolution);
        det.conf = clamp_confidence(det.conf, cfg);
    }
    return packet;
}

}  // namespace mr2
