#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mr2/config.hpp"
#include "mr2/evaluation.hpp"
#include "mr2/experiment.hpp"
#include "mr2/linear_attention.hpp"

namespace mr2::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParseError = 2,
    kValidationError = 3,
    kSuiteFailure = 4,
    kIoError = 5,
};

/// Shared run-configuration flags: --config, --preset, --P, --emit-coasted.
struct ConfigFlags {
    std::optional<std::filesystem::path> config;
    std::optional<std::string> preset;
    std::optional<int> p;
    std::optional<bool> emit_coasted;
    std::optional<bool> rescore;
};

/// Config file (if any), then the preset override, then individual flags.
RunConfig resolve_config(const ConfigFlags& flags);

struct TrackOptions {
    std::filesystem::path detections;
    std::filesystem::path out;
    ConfigFlags config;
};

struct TrackSummary {
    std::size_t sequences = 0;
    std::size_t frames = 0;
    std::int64_t tracks_created = 0;
    std::int64_t tracks_removed = 0;
    MacEstimate mac;
};

/// Tracks every sequence of a detection file and writes the track file.
/// Missing frames are processed as frames without detections.
TrackSummary cmd_track(const TrackOptions& opts, std::ostream& log);

struct ThresholdMode {
    bool f1max = true;
    double fixed = 0.0;
};

/// "f1max" or "fixed:<v>"; throws ValidationError otherwise.
ThresholdMode parse_threshold_mode(const std::string& text);

struct EvalOptions {
    std::vector<std::filesystem::path> inputs;  // track or detection files
    std::filesystem::path ground_truth;
    std::string threshold = "f1max";
    double grid_step = 0.01;
    std::optional<std::filesystem::path> out;  // JSON report
    RescoreConfig rescore;                    // confidence clamping on load
};

struct EvalResult {
    std::filesystem::path input;
    MetricsReport report;
};

std::vector<EvalResult> cmd_eval(const EvalOptions& opts, std::ostream& log);

struct SweepOptions {
    std::filesystem::path full;
    std::filesystem::path low;
    std::filesystem::path ground_truth;
    std::vector<int> p_values{0, 1, 2, 3, 4, 5, 6};
    ConfigFlags config;
    bool tune_thresholds = false;
    std::optional<std::filesystem::path> out;
};

struct SweepOutcome {
    RunConfig config;  // after optional threshold tuning
    SweepResult result;
};

SweepOutcome cmd_sweep(const SweepOptions& opts, std::ostream& log);

struct SynthOptions {
    std::optional<std::filesystem::path> scenario;
    std::string preset = "cnn-like";
    std::optional<std::uint64_t> seed;
    int sequences = 1;
    std::vector<int> p_values;  // also write interleaved detection files
    ConfigFlags config;         // full/low resolutions of the schedule
    std::filesystem::path out_dir;
};

/// Writes gt.jsonl, detections_full.jsonl, detections_low.jsonl and one
/// detections_p<P>.jsonl per requested P. Returns the written paths.
std::vector<std::filesystem::path> cmd_synth(const SynthOptions& opts, std::ostream& log);

AttentionCheckReport cmd_attn_check(const AttentionCheckOptions& opts, std::ostream& log,
                                    const AttentionKernel& candidate = {});

/// Loads detection files of both resolutions and the ground truth into
/// per-sequence streams. Throws ValidationError on resolution mismatches.
std::vector<SequenceStreams> load_streams(const std::filesystem::path& full,
                                          const std::filesystem::path& low,
                                          const std::filesystem::path& ground_truth,
                                          const ResolutionSchedule& schedule);

}  // namespace mr2::cli
