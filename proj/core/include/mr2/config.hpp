#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mr2/pipeline.hpp"
#include "mr2/schedule.hpp"
#include "mr2/synth.hpp"
#include "mr2/types.hpp"

namespace mr2 {

/// Per-detector tracking thresholds and MAC costs at 320x320 / 192x192.
struct ModelPreset {
    std::string name;
    TrackerConfig tracker;
    double mac_full = 0.0;  // MMAC
    double mac_low = 0.0;
};

/// "nanodet", "yolox" or "effvit". Throws ValidationError otherwise.
ModelPreset model_preset(std::string_view name);
std::vector<std::string> model_preset_names();

struct RunConfig {
    std::string preset = "nanodet";
    TrackerConfig tracker;
    RescoreConfig rescore;
    ResolutionSchedule schedule;
    PipelineOptions pipeline;

    void validate() const;
};

/// Preset values with the default schedule (P = 0, 320x320 / 192x192).
RunConfig default_run_config(std::string_view preset = "nanodet");

/// JSON document. Keys: "preset" (base values, default nanodet), then
/// optional "tracker", "rescore", "schedule", "kalman" objects and
/// "emit_coasted" overriding individual fields. Unknown keys are rejected.
/// Throws ParseError for malformed documents, ValidationError for bad values.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// JSON document, either the scenario object itself or {"scenario": {...}}.
/// "preset" ("cnn-like" / "vit-like") supplies base values which the other
/// keys override; "degradation" replaces the preset's anchor list.
SynthScenario parse_scenario(std::string_view text);
SynthScenario load_scenario(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mr2
