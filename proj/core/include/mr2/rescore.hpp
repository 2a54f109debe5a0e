#pragma once

#include "mr2/track.hpp"
#include "mr2/types.hpp"

namespace mr2 {

struct RescoreDecision {
    int new_class = 0;
    double new_conf = 0.0;
    double new_conf_agg = 0.0;
    bool class_switched = false;
};

/// Probabilistic class / confidence update for one track-detection match.
///
/// Agreeing classes fuse as the union of independent events,
///   agg' = 1 - (1 - agg)(1 - conf),
/// while a disagreeing detection either takes over the track outright
/// (agg < conf) or shrinks the margin
///   agg' = max(0, 1 - (1 - agg) / (1 - conf))
/// and takes over if the margin falls below its confidence. The reported
/// confidence is the mean of the last `history_len` matched confidences,
/// and agg is capped at 1 - epsilon.
///
/// Throws std::invalid_argument when det.conf >= 1.
RescoreDecision rescore_update(const Track& track, const Detection& det,
                               const RescoreConfig& cfg);

/// Writes a decision back into the track, maintaining the confidence history.
void apply_rescore(Track& track, const Detection& det, const RescoreDecision& decision,
                   const RescoreConfig& cfg);

}  // namespace mr2
