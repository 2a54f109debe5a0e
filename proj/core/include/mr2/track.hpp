#pragma once

#include <cstdint>
#include <deque>

#include "mr2/kalman.hpp"

namespace mr2 {

enum class TrackStatus { Tentative, Confirmed, Removed };

struct Track {
    std::int64_t track_id = 0;
    KalmanState kf_state;
    int class_id = 0;
    double conf = 0.0;
    double conf_agg = 0.0;
    std::deque<double> recent_confs;  // most recent last, at most history_len entries
    int hit_streak = 0;
    int frames_since_update = 0;
    TrackStatus status = TrackStatus::Tentative;

    BBox box() const { return kf_state.box(); }
};

}  // namespace mr2
