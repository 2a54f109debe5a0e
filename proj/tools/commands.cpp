#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <json.hpp>

#include "mr2/errors.hpp"
#include "mr2/io.hpp"
#include "mr2/pipeline.hpp"
#include "mr2/synth.hpp"

namespace mr2::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string res_str(Resolution r) {
    return std::to_string(r.width) + "x" + std::to_string(r.height);
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

json metrics_json(const MetricsReport& r) {
    json per_class = json::object();
    for (const auto& [cls, m] : r.per_class)
        per_class[std::to_string(cls)] = {{"ap", m.ap},     {"precision", m.precision},
                                          {"recall", m.recall}, {"f1", m.f1},
                                          {"tp", m.tp},     {"fp", m.fp},
                                          {"fn", m.fn}};
    return {{"threshold", r.threshold_used}, {"mAP", r.map},
            {"precision", r.mean_precision}, {"recall", r.mean_recall},
            {"f1", r.mean_f1},               {"per_class", std::move(per_class)}};
}

json method_json(const MethodMetrics& m) {
    return {{"mAP", m.map}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

// Fills frames absent from the file with empty packets so that every
// sequence is a contiguous run starting at frame 0.
std::vector<FramePacket> contiguous(const SequenceGroup<DetectionRecord>& g,
                                    std::int64_t frame_count,
                                    const std::function<Resolution(std::int64_t)>& res_at) {
    const Resolution native = g.records.front().packet.native_resolution;
    std::vector<FramePacket> out;
    out.reserve(static_cast<std::size_t>(frame_count));
    std::size_t k = 0;
    for (std::int64_t t = 0; t < frame_count; ++t) {
        if (k < g.records.size() && g.records[k].packet.frame_index == t) {
            out.push_back(g.records[k++].packet);
        } else {
            out.push_back({t, res_at(t), native, {}});
        }
    }
    return out;
}

void check_resolution(const std::string& seq, const FramePacket& p, Resolution expected,
                      const std::string& why) {
    if (p.inference_resolution != expected)
        throw ValidationError("sequence '" + seq + "' frame " + std::to_string(p.frame_index) +
                              ": inferred at " + res_str(p.inference_resolution) + " but " + why +
                              " expects " + res_str(expected));
}

std::map<std::string, std::vector<GroundTruthFrame>> load_gt(const fs::path& path) {
    std::map<std::string, std::vector<GroundTruthFrame>> out;
    for (auto& g : group_ground_truth(read_ground_truth_file(path))) {
        auto& frames = out[g.sequence_id];
        for (auto& r : g.records) frames.push_back(std::move(r.frame));
    }
    return out;
}

void require_gt(const std::vector<std::string>& ids,
                const std::map<std::string, std::vector<GroundTruthFrame>>& gt) {
    std::vector<std::string> missing;
    for (const auto& id : ids)
        if (!gt.count(id)) missing.push_back(id);
    if (missing.empty()) return;
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw ValidationError("sequences missing from ground truth: " + list);
}

std::vector<EvalSequence> load_predictions(const fs::path& input,
                                           const std::map<std::string, std::vector<GroundTruthFrame>>& gt,
                                           const RescoreConfig& rescore) {
    std::map<std::string, EvalSequence> by_id;
    std::vector<std::string> ids;
    switch (sniff_record_kind(input)) {
        case RecordKind::Empty:
            break;
        case RecordKind::Tracks:
            for (auto& g : group_tracks(read_track_file(input))) {
                ids.push_back(g.sequence_id);
                auto& seq = by_id[g.sequence_id];
                for (const auto& r : g.records) {
                    ScoredFrame f{r.frame, {}};
                    for (const auto& t : r.tracks)
                        f.detections.push_back({t.bbox, t.class_id, clamp_confidence(t.conf, rescore)});
                    seq.predictions.push_back(std::move(f));
                }
            }
            break;
        case RecordKind::Detections:
            for (auto& g : group_detections(read_detection_file(input))) {
                ids.push_back(g.sequence_id);
                auto& seq = by_id[g.sequence_id];
                for (const auto& r : g.records) {
                    const FramePacket p = normalize_packet(r.packet, rescore);
                    seq.predictions.push_back({p.frame_index, p.detections});
                }
            }
            break;
    }
    require_gt(ids, gt);
    std::vector<EvalSequence> corpus;
    for (const auto& [id, frames] : gt) {
        EvalSequence seq;
        if (auto it = by_id.find(id); it != by_id.end()) seq = std::move(it->second);
        seq.ground_truth = frames;
        corpus.push_back(std::move(seq));
    }
    return corpus;
}

}  // namespace

RunConfig resolve_config(const ConfigFlags& flags) {
    RunConfig cfg;
    if (flags.config) {
        std::string text = read_text_file(*flags.config);
        if (flags.preset) {
            json doc;
            try {
                doc = json::parse(text);
            } catch (const json::exception& e) {
                throw ParseError(flags.config->string() + ": " + e.what());
            }
            if (!doc.is_object()) throw ParseError("run config must be a JSON object");
            doc["preset"] = *flags.preset;
            text = doc.dump();
        }
        cfg = parse_run_config(text);
    } else {
        cfg = default_run_config(flags.preset.value_or("nanodet"));
    }
    if (flags.p) cfg.schedule.p = *flags.p;
    if (flags.emit_coasted) cfg.pipeline.emit_coasted = *flags.emit_coasted;
    if (flags.rescore) cfg.pipeline.rescore = *flags.rescore;
    cfg.validate();
    return cfg;
}

TrackSummary cmd_track(const TrackOptions& opts, std::ostream& log) {
    const RunConfig cfg = resolve_config(opts.config);
    const auto groups = group_detections(read_detection_file(opts.detections));
    const auto res_at = [&](std::int64_t t) { return cfg.schedule.resolution_at(t); };

    TrackSummary summary;
    summary.mac = mean_mac(cfg.schedule);
    std::vector<TrackRecord> out;
    for (const auto& g : groups) {
        const std::int64_t count = g.records.back().packet.frame_index + 1;
        const auto frames = contiguous(g, count, res_at);
        for (const auto& f : frames)
            check_resolution(g.sequence_id, f, res_at(f.frame_index),
                             "the schedule (P=" + std::to_string(cfg.schedule.p) + ")");

        TrackerState state;
        for (const auto& f : frames) {
            auto tracks = step(state, normalize_packet(f, cfg.rescore), cfg.tracker, cfg.rescore,
                               cfg.pipeline);
            out.push_back({g.sequence_id, f.frame_index, std::move(tracks)});
        }
        ++summary.sequences;
        summary.frames += frames.size();
        summary.tracks_created += state.tracks_created;
        summary.tracks_removed += state.tracks_removed;
    }
    write_record_file(opts.out, out);

    log << "sequences:       " << summary.sequences << '\n'
        << "frames:          " << summary.frames << '\n'
        << "tracks created:  " << summary.tracks_created << '\n'
        << "tracks removed:  " << summary.tracks_removed << '\n'
        << "mean MAC/frame:  " << fixed(summary.mac.mean_mac, 1) << " (P=" << cfg.schedule.p
        << ", " << fixed(100.0 * summary.mac.reduction, 1) << "% below full-res only)\n";
    return summary;
}

ThresholdMode parse_threshold_mode(const std::string& text) {
    if (text == "f1max") return {true, 0.0};
    const std::string prefix = "fixed:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string value = text.substr(prefix.size());
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used == value.size() && v >= 0.0 && v <= 1.0) return {false, v};
        } catch (const std::exception&) {
        }
    }
    throw ValidationError("threshold mode must be 'f1max' or 'fixed:<v>' with v in [0, 1], got '" +
                          text + "'");
}

std::vector<EvalResult> cmd_eval(const EvalOptions& opts, std::ostream& log) {
    const ThresholdMode mode = parse_threshold_mode(opts.threshold);
    const auto gt = load_gt(opts.ground_truth);

    std::vector<EvalResult> results;
    for (const auto& input : opts.inputs) {
        const auto corpus = load_predictions(input, gt, opts.rescore);
        MetricsReport report =
            mode.f1max ? f1_max_threshold(corpus, opts.grid_step) : evaluate(corpus, mode.fixed);
        results.push_back({input, std::move(report)});
    }

    log << "input                                    thr     mAP     Prec    Rec     F1\n";
    for (const auto& r : results) {
        std::string name = r.input.filename().string();
        name.resize(std::max<std::size_t>(name.size(), 40), ' ');
        log << name << ' ' << fixed(r.report.threshold_used, 4) << "  " << fixed(r.report.map, 4)
            << "  " << fixed(r.report.mean_precision, 4) << "  " << fixed(r.report.mean_recall, 4)
            << "  " << fixed(r.report.mean_f1, 4) << '\n';
    }

    if (opts.out) {
        json doc = {{"threshold_mode", opts.threshold}, {"results", json::array()}};
        for (const auto& r : results) {
            json entry = metrics_json(r.report);
            entry["input"] = r.input.filename().string();
            doc["results"].push_back(std::move(entry));
        }
        write_json(*opts.out, doc);
    }
    return results;
}

std::vector<SequenceStreams> load_streams(const fs::path& full, const fs::path& low,
                                          const fs::path& ground_truth,
                                          const ResolutionSchedule& schedule) {
    const auto full_groups = group_detections(read_detection_file(full));
    const auto low_groups = group_detections(read_detection_file(low));
    const auto gt = load_gt(ground_truth);

    std::vector<std::string> ids;
    std::map<std::string, const SequenceGroup<DetectionRecord>*> full_by, low_by;
    for (const auto& g : full_groups) {
        ids.push_back(g.sequence_id);
        full_by[g.sequence_id] = &g;
    }
    for (const auto& g : low_groups) {
        if (!full_by.count(g.sequence_id)) ids.push_back(g.sequence_id);
        low_by[g.sequence_id] = &g;
    }
    require_gt(ids, gt);

    std::vector<SequenceStreams> out;
    for (const auto& id : ids) {
        SequenceStreams s;
        s.sequence_id = id;
        s.ground_truth = gt.at(id);
        std::int64_t count = 0;
        for (const auto* g : {full_by.count(id) ? full_by[id] : nullptr,
                              low_by.count(id) ? low_by[id] : nullptr})
            if (g) count = std::max(count, g->records.back().packet.frame_index + 1);
        for (const auto& f : s.ground_truth) count = std::max(count, f.frame_index + 1);

        auto build = [&](const SequenceGroup<DetectionRecord>* g, Resolution res,
                         const char* which) {
            if (!g) {
                std::vector<FramePacket> frames;
                for (std::int64_t t = 0; t < count; ++t)
                    frames.push_back({t, res, schedule.full_res, {}});
                return frames;
            }
            auto frames = contiguous(*g, count, [res](std::int64_t) { return res; });
            for (const auto& f : frames) check_resolution(id, f, res, which);
            return frames;
        };
        s.full = build(full_by.count(id) ? full_by[id] : nullptr, schedule.full_res,
                       "the full-resolution file");
        s.low = build(low_by.count(id) ? low_by[id] : nullptr, schedule.low_res,
                      "the low-resolution file");
        out.push_back(std::move(s));
    }
    return out;
}

SweepOutcome cmd_sweep(const SweepOptions& opts, std::ostream& log) {
    SweepOutcome outcome;
    outcome.config = resolve_config(opts.config);
    const auto corpus = load_streams(opts.full, opts.low, opts.ground_truth, outcome.config.schedule);

    if (opts.tune_thresholds) {
        const ThresholdSearch t = tune_thresholds(corpus, outcome.config, 0);
        outcome.config.tracker.high_threshold = t.high_threshold;
        outcome.config.tracker.low_threshold = t.low_threshold;
        log << "tuned thresholds: high " << fixed(t.high_threshold, 2) << ", low "
            << fixed(t.low_threshold, 2) << " (F1 " << fixed(t.mean_f1, 4) << ")\n";
    }
    outcome.result = run_sweep(corpus, outcome.config, opts.p_values);

    log << "preset " << outcome.config.preset << ", baseline threshold "
        << fixed(outcome.result.baseline_threshold, 4) << "\n";
    log << "P   MMAC    saved  | frame-by-frame mAP/P/R/F1     | naive mAP/P/R/F1              "
           "| MR2 mAP/P/R/F1\n";
    for (const auto& row : outcome.result.rows) {
        auto cols = [](const MethodMetrics& m) {
            return fixed(m.map, 4) + " " + fixed(m.precision, 4) + " " + fixed(m.recall, 4) + " " +
                   fixed(m.f1, 4);
        };
        std::string mac = fixed(row.mac.mean_mac, 1);
        mac.resize(std::max<std::size_t>(mac.size(), 7), ' ');
        std::string saved = fixed(100.0 * row.mac.reduction, 1) + "%";
        saved.resize(std::max<std::size_t>(saved.size(), 6), ' ');
        std::string p = std::to_string(row.p);
        p.resize(std::max<std::size_t>(p.size(), 3), ' ');
        log << p << ' ' << mac << ' ' << saved << " | " << cols(row.baseline) << " | "
            << cols(row.naive) << " | " << cols(row.mr2) << '\n';
    }

    if (opts.out) {
        json doc = {{"preset", outcome.config.preset},
                    {"high_threshold", outcome.config.tracker.high_threshold},
                    {"low_threshold", outcome.config.tracker.low_threshold},
                    {"baseline_threshold", outcome.result.baseline_threshold},
                    {"rows", json::array()}};
        for (const auto& row : outcome.result.rows)
            doc["rows"].push_back({{"P", row.p},
                                   {"mean_mac", row.mac.mean_mac},
                                   {"reduction", row.mac.reduction},
                                   {"frame_by_frame", method_json(row.baseline)},
                                   {"naive_bytetrack", method_json(row.naive)},
                                   {"mr2_bytetrack", method_json(row.mr2)}});
        write_json(*opts.out, doc);
    }
    return outcome;
}

std::vector<fs::path> cmd_synth(const SynthOptions& opts, std::ostream& log) {
    SynthScenario base = opts.scenario ? load_scenario(*opts.scenario) : preset_scenario(opts.preset);
    if (opts.seed) base.seed = *opts.seed;
    if (opts.sequences < 1) throw ValidationError("synth: --sequences must be >= 1");
    const RunConfig cfg = resolve_config(opts.config);

    std::vector<GroundTruthRecord> gt;
    std::vector<DetectionRecord> full, low;
    std::map<int, std::vector<DetectionRecord>> mixed;

    for (int s = 0; s < opts.sequences; ++s) {
        SynthScenario sc = base;
        sc.seed = base.seed + static_cast<std::uint64_t>(s);
        const SynthOutput data = generate(sc);
        const std::string id = "synth-" + std::to_string(sc.seed);
        for (const auto& f : data.ground_truth) gt.push_back({id, f});
        for (std::int64_t t = 0; t < sc.frame_count; ++t) {
            full.push_back({id, data.detector.detect(t, cfg.schedule.full_res)});
            low.push_back({id, data.detector.detect(t, cfg.schedule.low_res)});
        }
        for (int p : opts.p_values) {
            ResolutionSchedule schedule = cfg.schedule;
            schedule.p = p;
            for (auto& packet : data.detector.detect_schedule(schedule))
                mixed[p].push_back({id, std::move(packet)});
        }
    }

    fs::create_directories(opts.out_dir);
    std::vector<fs::path> written{opts.out_dir / "gt.jsonl", opts.out_dir / "detections_full.jsonl",
                                  opts.out_dir / "detections_low.jsonl"};
    write_record_file(written[0], gt);
    write_record_file(written[1], full);
    write_record_file(written[2], low);
    for (const auto& [p, records] : mixed) {
        written.push_back(opts.out_dir / ("detections_p" + std::to_string(p) + ".jsonl"));
        write_record_file(written.back(), records);
    }
    log << "wrote " << opts.sequences << " sequence(s) of " << base.frame_count << " frames to "
        << opts.out_dir.string() << '\n';
    return written;
}

AttentionCheckReport cmd_attn_check(const AttentionCheckOptions& opts, std::ostream& log,
                                    const AttentionKernel& candidate) {
    const AttentionCheckReport r = run_attention_check(opts, candidate);
    log << "equivalence (factored vs quadratic reference), d=" << opts.d << ", tol "
        << opts.tolerance << '\n';
    for (const auto& row : r.equivalence) {
        char line[128];
        std::snprintf(line, sizeof line, "  n=%-4d trials=%-5d max rel err %.3e  %s\n", row.n,
                      row.trials, row.max_rel_error, row.pass ? "PASS" : "FAIL");
        log << line;
    }
    log << "multiply-count ratio n=64/n=32: factored " << fixed(r.factored_ratio, 3)
        << " (expect 1.9-2.1), naive " << fixed(r.naive_ratio, 3) << " (expect 3.8-4.2)  "
        << (r.scaling_pass ? "PASS" : "FAIL") << '\n';
    log << (r.pass ? "attn-check: PASS" : "attn-check: FAIL") << '\n';
    return r;
}

}  // namespace mr2::cli
