#include "mr2/rescore.hpp"

#include <algorithm>
#include <stdexcept>

namespace mr2 {
namespace {

double history_mean(const std::deque<double>& history, double latest, int history_len) {
    // Mean over `latest` and up to history_len - 1 previous entries.
    double sum = latest;
    int count = 1;
    for (auto it = history.rbegin(); it != history.rend() && count < history_len; ++it) {
        sum += *it;
        ++count;
    }
    return sum / count;
}

}  // namespace

RescoreDecision rescore_update(const Track& track, const Detection& det,
                               const RescoreConfig& cfg) {
    if (!(det.conf < 1.0))
        throw std::invalid_argument("rescore: detection confidence must be clamped below 1");

    const double conf_i = det.conf;
    double agg = track.conf_agg;
    int cls = track.class_id;
    bool switched = false;

    if (det.class_id == track.class_id) {
        agg = 1.0 - (1.0 - conf_i) * (1.0 - agg);
    } else if (agg < conf_i) {
        cls = det.class_id;
        agg = conf_i;
        switched = true;
    } else {
        agg = std::max(1.0 - (1.0 - agg) / (1.0 - conf_i), 0.0);
        if (agg < conf_i) {
            cls = det.class_id;
            agg = conf_i;
            switched = true;
        }
    }

    RescoreDecision out;
    out.new_class = cls;
    out.class_switched = switched;
    out.new_conf = switched ? conf_i : history_mean(track.recent_confs, conf_i, cfg.history_len);
    out.new_conf_agg = std::min(agg, cfg.cap());
    return out;
}

void apply_rescore(Track& track, const Detection& det, const RescoreDecision& decision,
                   const RescoreConfig& cfg) {
    if (decision.class_switched) track.recent_confs.clear();
    track.recent_confs.push_back(det.conf);
    while (track.recent_confs.size() > static_cast<std::size_t>(cfg.history_len))
        track.recent_confs.pop_front();
    track.class_id = decision.new_class;
    track.conf = decision.new_conf;
    track.conf_agg = decision.new_conf_agg;
}

}  // namespace mr2
