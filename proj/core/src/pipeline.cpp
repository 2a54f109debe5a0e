#include "mr2/pipeline.hpp"

#include <algorithm>
#include <string>

#include "mr2/association.hpp"
#include "mr2/errors.hpp"
#include "mr2/rescore.hpp"

namespace mr2 {
namespace {

void absorb(Track& track, const Detection& det, const TrackerConfig& tcfg,
            const RescoreConfig& rcfg, const PipelineOptions& opts) {
    track.kf_state = kf_update(track.kf_state, det.bbox, opts.kalman);
    if (opts.rescore) {
        apply_rescore(track, det, rescore_update(track, det, rcfg), rcfg);
    } else {
        track.class_id = det.class_id;
        track.conf = det.conf;
        track.conf_agg = det.conf;
        track.recent_confs.push_back(det.conf);
        while (track.recent_confs.size() > static_cast<std::size_t>(rcfg.history_len))
            track.recent_confs.pop_front();
    }
    track.frames_since_update = 0;
    ++track.hit_streak;
    if (track.status == TrackStatus::Tentative && track.hit_streak >= tcfg.tau_init)
        track.status = TrackStatus::Confirmed;
}

Track spawn(std::int64_t id, const Detection& det, const TrackerConfig& tcfg,
            const PipelineOptions& opts) {
    Track t;
    t.track_id = id;
    t.kf_state = kf_init(det.bbox, opts.kalman);
    t.class_id = det.class_id;
    t.conf = det.conf;
    t.conf_agg = det.conf;
    t.recent_confs.push_back(det.conf);
    t.hit_streak = 1;
    t.status = tcfg.tau_init <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
    return t;
}

template <typename Pick>
std::vector<Detection> gather(std::span<const Detection> dets, Pick pick) {
    std::vector<Detection> out;
    for (const auto& d : dets)
        if (d.bbox.height() > 0.0 && pick(d.conf)) out.push_back(d);
    return out;
}

}  // namespace

std::vector<TrackOutput> step(TrackerState& state, const FramePacket& frame,
                              const TrackerConfig& tcfg, const RescoreConfig& rcfg,
                              const PipelineOptions& opts) {
    const std::int64_t expected = state.frame_index + 1;
    if (frame.frame_index != expected)
        throw ValidationError("pipeline: expected frame " + std::to_string(expected) +
                              ", got " + std::to_string(frame.frame_index));

    auto& tracks = state.active_tracks;
    for (auto& t : tracks) t.kf_state = kf_predict(t.kf_state, opts.kalman);

    const auto high = gather(frame.detections, [&](double c) { return c >= tcfg.high_threshold; });
    const auto rem = gather(frame.detections, [&](double c) {
        return c >= tcfg.low_threshold && c < tcfg.high_threshold;
    });

    std::vector<BBox> boxes;
    boxes.reserve(tracks.size());
    for (const auto& t : tracks) boxes.push_back(t.box());

    std::vector<char> matched(tracks.size(), 0);

    // First pass: confident detections against every active track.
    const MatchResult first = match(iou_matrix(high, boxes), tcfg.tau_iou);
    for (auto [i, j] : first.matches) {
        absorb(tracks[j], high[i], tcfg, rcfg, opts);
        matched[j] = 1;
    }

    // Second pass: remaining detections against trackers left over from the first.
    std::vector<BBox> left_boxes;
    for (std::size_t j : first.unmatched_trackers) left_boxes.push_back(boxes[j]);
    const MatchResult second = match(iou_matrix(rem, left_boxes), tcfg.tau_iou);
    for (auto [i, k] : second.matches) {
        const std::size_t j = first.unmatched_trackers[k];
        absorb(tracks[j], rem[i], tcfg, rcfg, opts);
        matched[j] = 1;
    }

    for (std::size_t j = 0; j < tracks.size(); ++j) {
        if (matched[j]) continue;
        Track& t = tracks[j];
        t.hit_streak = 0;
        ++t.frames_since_update;
        if (t.status == TrackStatus::Tentative || t.frames_since_update >= tcfg.tau_dead)
            t.status = TrackStatus::Removed;
    }

    const auto removed = std::erase_if(
        tracks, [](const Track& t) { return t.status == TrackStatus::Removed; });
    state.tracks_removed += static_cast<std::int64_t>(removed);

    for (std::size_t i : first.unmatched_detections) {
        tracks.push_back(spawn(state.next_track_id++, high[i], tcfg, opts));
        ++state.tracks_created;
    }
    state.frame_index = frame.frame_index;

    std::vector<TrackOutput> out;
    for (const auto& t : tracks) {
        if (t.status != TrackStatus::Confirmed) continue;
        const bool coasted = t.frames_since_update > 0;
        if (coasted && !opts.emit_coasted) continue;
        out.push_back({t.track_id, t.box(), t.class_id, t.conf, coasted});
    }
    return out;
}

std::vector<std::vector<TrackOutput>> run_sequence(std::span<const FramePacket> frames,
                                                   const TrackerConfig& tcfg,
                                                   const RescoreConfig& rcfg,
                                                   const PipelineOptions& opts) {
    TrackerState state;
    std::vector<std::vector<TrackOutput>> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(step(state, f, tcfg, rcfg, opts));
    return out;
}

}  // namespace mr2
