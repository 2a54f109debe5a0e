#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mr2/kalman.hpp"
#include "mr2/track.hpp"
#include "mr2/types.hpp"

namespace mr2 {

struct PipelineOptions {
    /// Probabilistic class/confidence fusion. When off, a track copies the
    /// class and confidence of its latest matched detection.
    bool rescore = true;
    /// Also emit Confirmed tracks that were coasted through this frame.
    bool emit_coasted = true;
    KalmanParams kalman;
};

struct TrackOutput {
    std::int64_t track_id = 0;
    BBox bbox;
    int class_id = 0;
    double conf = 0.0;
    bool coasted = false;

    bool operator==(const TrackOutput&) const = default;
};

struct TrackerState {
    std::vector<Track> active_tracks;  // ascending track_id
    std::int64_t next_track_id = 0;
    std::int64_t frame_index = -1;  // last processed frame, -1 before the first
    std::int64_t tracks_created = 0;
    std::int64_t tracks_removed = 0;
};

/// Advances the tracker by one frame. `frame` must already be normalized to
/// native coordinates (see normalize_packet) and its index must be 0 for the
/// first call and previous + 1 afterwards; otherwise ValidationError.
std::vector<TrackOutput> step(TrackerState& state, const FramePacket& frame,
                              const TrackerConfig& tcfg, const RescoreConfig& rcfg,
                              const PipelineOptions& opts = {});

/// Runs a whole normalized sequence from a fresh state; one output list per frame.
std::vector<std::vector<TrackOutput>> run_sequence(std::span<const FramePacket> frames,
                                                   const TrackerConfig& tcfg,
                                                   const RescoreConfig& rcfg,
                                                   const PipelineOptions& opts = {});

}  // namespace mr2
