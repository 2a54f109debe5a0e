#include "mr2/config.hpp"

#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mr2/errors.hpp"

namespace mr2 {
namespace {

using nlohmann::json;

struct PresetRow {
    const char* name;
    double high;
    double low;
    double mac_full;
    double mac_low;
};

// Tuned thresholds and per-inference MMAC at 320x320 / 192x192.
constexpr std::array<PresetRow, 3> kPresets{{
    {"nanodet", 0.45, 0.30, 463.0, 167.0},
    {"yolox", 0.40, 0.15, 316.0, 114.0},
    {"effvit", 0.55, 0.10, 281.0, 101.0},
}};

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key)) throw ParseError("unknown key '" + key + "' in " + where);
}

const json& object_at(const json& j, const char* key) {
    const json& o = j.at(key);
    if (!o.is_object()) throw ParseError(std::string("'") + key + "' must be an object");
    return o;
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        if constexpr (std::is_same_v<T, int>) {
            if (!it->is_number_integer()) throw ParseError(std::string(key) + " must be an integer");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ParseError(std::string(key) + " must be a boolean");
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!it->is_number_unsigned() && !(it->is_number_integer() && it->template get<long long>() >= 0))
                throw ParseError(std::string(key) + " must be a non-negative integer");
        } else {
            if (!it->is_number()) throw ParseError(std::string(key) + " must be a number");
        }
        dst = it->template get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string(key) + ": " + e.what());
    }
}

void read_res(const json& obj, const char* key, Resolution& dst) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
        !(*it)[1].is_number_integer())
        throw ParseError(std::string(key) + " must be [width, height]");
    dst = {(*it)[0].get<int>(), (*it)[1].get<int>()};
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

void read_degradation(const json& j, Degradation& d) {
    reject_unknown(j, {"resolution", "drop_prob", "class_flip_prob", "conf_mean", "conf_noise_std",
                       "bbox_jitter_std", "false_positive_rate", "fp_conf_mean"},
                   "degradation entry");
    read(j, "drop_prob", d.drop_prob);
    read(j, "class_flip_prob", d.class_flip_prob);
    read(j, "conf_mean", d.conf_mean);
    read(j, "conf_noise_std", d.conf_noise_std);
    read(j, "bbox_jitter_std", d.bbox_jitter_std);
    read(j, "false_positive_rate", d.false_positive_rate);
    read(j, "fp_conf_mean", d.fp_conf_mean);
}

}  // namespace

ModelPreset model_preset(std::string_view name) {
    for (const auto& row : kPresets) {
        if (name != row.name) continue;
        ModelPreset p;
        p.name = row.name;
        p.tracker.high_threshold = row.high;
        p.tracker.low_threshold = row.low;
        p.tracker.tau_iou = 0.3;
        p.tracker.tau_dead = 5;
        p.tracker.tau_init = 2;
        p.mac_full = row.mac_full;
        p.mac_low = row.mac_low;
        return p;
    }
    throw ValidationError("unknown model preset '" + std::string(name) +
                          "' (expected nanodet, yolox or effvit)");
}

std::vector<std::string> model_preset_names() {
    std::vector<std::string> out;
    for (const auto& row : kPresets) out.emplace_back(row.name);
    return out;
}

void RunConfig::validate() const {
    tracker.validate();
    rescore.validate();
    schedule.validate();
    try {
        pipeline.kalman.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

RunConfig default_run_config(std::string_view preset) {
    const ModelPreset p = model_preset(preset);
    RunConfig cfg;
    cfg.preset = p.name;
    cfg.tracker = p.tracker;
    cfg.schedule.mac_full = p.mac_full;
    cfg.schedule.mac_low = p.mac_low;
    return cfg;
}

RunConfig parse_run_config(std::string_view text) {
    const json doc = parse_json(text);
    if (!doc.is_object()) throw ParseError("run config must be a JSON object");
    reject_unknown(doc, {"preset", "tracker", "rescore", "schedule", "kalman", "emit_coasted"},
                   "run config");

    std::string preset = "nanodet";
    if (const auto it = doc.find("preset"); it != doc.end()) {
        if (!it->is_string()) throw ParseError("preset must be a string");
        preset = it->get<std::string>();
    }
    RunConfig cfg = default_run_config(preset);

    if (doc.contains("tracker")) {
        const json& t = object_at(doc, "tracker");
        reject_unknown(t, {"high_threshold", "low_threshold", "tau_iou", "tau_init", "tau_dead"},
                       "tracker");
        read(t, "high_threshold", cfg.tracker.high_threshold);
        read(t, "low_threshold", cfg.tracker.low_threshold);
        read(t, "tau_iou", cfg.tracker.tau_iou);
        read(t, "tau_init", cfg.tracker.tau_init);
        read(t, "tau_dead", cfg.tracker.tau_dead);
    }
    if (doc.contains("rescore")) {
        const json& r = object_at(doc, "rescore");
        reject_unknown(r, {"epsilon", "history_len", "enabled"}, "rescore");
        read(r, "epsilon", cfg.rescore.epsilon);
        read(r, "history_len", cfg.rescore.history_len);
        read(r, "enabled", cfg.pipeline.rescore);
    }
    if (doc.contains("schedule")) {
        const json& s = object_at(doc, "schedule");
        reject_unknown(s, {"P", "full_res", "low_res", "mac_full", "mac_low"}, "schedule");
        read(s, "P", cfg.schedule.p);
        read_res(s, "full_res", cfg.schedule.full_res);
        read_res(s, "low_res", cfg.schedule.low_res);
        read(s, "mac_full", cfg.schedule.mac_full);
        read(s, "mac_low", cfg.schedule.mac_low);
    }
    if (doc.contains("kalman")) {
        const json& k = object_at(doc, "kalman");
        reject_unknown(k, {"position_noise_scale", "velocity_noise_scale"}, "kalman");
        read(k, "position_noise_scale", cfg.pipeline.kalman.position_noise_scale);
        read(k, "velocity_noise_scale", cfg.pipeline.kalman.velocity_noise_scale);
    }
    read(doc, "emit_coasted", cfg.pipeline.emit_coasted);
    cfg.validate();
    return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_text_file(path));
}

SynthScenario parse_scenario(std::string_view text) {
    json doc = parse_json(text);
    if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
    if (doc.contains("scenario")) {
        reject_unknown(doc, {"scenario"}, "scenario document");
        doc = object_at(doc, "scenario");
    }
    reject_unknown(doc, {"preset", "seed", "n_objects", "frame_count", "n_classes",
                         "native_resolution", "motion", "degradation"},
                   "scenario");

    std::string preset = "cnn-like";
    if (const auto it = doc.find("preset"); it != doc.end()) {
        if (!it->is_string()) throw ParseError("preset must be a string");
        preset = it->get<std::string>();
    }
    SynthScenario sc = preset_scenario(preset);
    read(doc, "seed", sc.seed);
    read(doc, "n_objects", sc.n_objects);
    read(doc, "frame_count", sc.frame_count);
    read(doc, "n_classes", sc.n_classes);
    read_res(doc, "native_resolution", sc.native_resolution);

    if (doc.contains("motion")) {
        const json& m = object_at(doc, "motion");
        reject_unknown(m, {"speed_min", "speed_max", "turn_prob", "max_turn", "size_min", "size_max",
                           "aspect_min", "aspect_max"},
                       "motion");
        read(m, "speed_min", sc.motion.speed_min);
        read(m, "speed_max", sc.motion.speed_max);
        read(m, "turn_prob", sc.motion.turn_prob);
        read(m, "max_turn", sc.motion.max_turn);
        read(m, "size_min", sc.motion.size_min);
        read(m, "size_max", sc.motion.size_max);
        read(m, "aspect_min", sc.motion.aspect_min);
        read(m, "aspect_max", sc.motion.aspect_max);
    }
    if (const auto it = doc.find("degradation"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("degradation must be an array");
        std::vector<DegradationAnchor> anchors;
        for (const auto& entry : *it) {
            if (!entry.is_object() || !entry.contains("resolution"))
                throw ParseError("degradation entries need a 'resolution'");
            DegradationAnchor a;
            read_res(entry, "resolution", a.resolution);
            // Unspecified fields inherit the preset's value at that resolution.
            a.degradation = sc.degradation_at(a.resolution);
            read_degradation(entry, a.degradation);
            anchors.push_back(a);
        }
        sc.degradation = std::move(anchors);
    }
    sc.validate();
    return sc;
}

SynthScenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_text_file(path));
}

}  // namespace mr2
