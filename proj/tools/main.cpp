#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "commands.hpp"
#include "mr2/errors.hpp"

namespace {

using namespace mr2;
using namespace mr2::cli;

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("--config", flags.config, "run configuration (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--preset", flags.preset, "model preset")
        ->check(CLI::IsMember({"nanodet", "yolox", "effvit"}));
    cmd->add_option("--P", flags.p, "low-resolution frames per full-resolution frame")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag_callback("--emit-coasted", [&flags] { flags.emit_coasted = true; },
                           "emit Confirmed tracks that missed this frame (default)");
    cmd->add_flag_callback("--no-emit-coasted", [&flags] { flags.emit_coasted = false; },
                           "emit only tracks updated this frame");
    cmd->add_flag_callback("--no-rescore", [&flags] { flags.rescore = false; },
                           "copy class and confidence from the latest detection");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mr2track: multi-resolution tracking post-processor"};
    app.require_subcommand(1);

    TrackOptions track;
    auto* track_cmd = app.add_subcommand("track", "track a detection file");
    track_cmd->add_option("detections", track.detections, "detection file (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    track_cmd->add_option("--out", track.out, "track file to write")->required();
    add_config_flags(track_cmd, track.config);

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "score track or detection files");
    eval_cmd->add_option("inputs", eval.inputs, "track or detection files")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--gt", eval.ground_truth, "ground-truth file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--threshold", eval.threshold, "f1max or fixed:<v>")
        ->capture_default_str();
    eval_cmd->add_option("--grid-step", eval.grid_step, "threshold grid step for f1max")
        ->capture_default_str();
    eval_cmd->add_option("--out", eval.out, "JSON report");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "baseline vs tracking across P");
    sweep_cmd->add_option("--full", sweep.full, "full-resolution detections")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--low", sweep.low, "low-resolution detections")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--gt", sweep.ground_truth, "ground-truth file")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--P-values", sweep.p_values, "interleaving factors")
        ->capture_default_str();
    sweep_cmd->add_flag("--tune-thresholds", sweep.tune_thresholds,
                        "grid-search tracker thresholds at P=0 first");
    sweep_cmd->add_option("--out", sweep.out, "JSON report");
    add_config_flags(sweep_cmd, sweep.config);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus");
    synth_cmd->add_option("scenario", synth.scenario, "scenario file (JSON)")
        ->check(CLI::ExistingFile);
    synth_cmd->add_option("--scenario-preset", synth.preset, "built-in scenario")
        ->check(CLI::IsMember({"cnn-like", "vit-like"}))
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "base seed");
    synth_cmd->add_option("--sequences", synth.sequences, "number of sequences")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth_cmd->add_option("--P-values", synth.p_values, "also write interleaved streams");
    synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
    add_config_flags(synth_cmd, synth.config);

    AttentionCheckOptions attn;
    auto* attn_cmd = app.add_subcommand("attn-check", "verify the factored attention kernel");
    attn_cmd->add_option("--n", attn.n_values, "patch counts")->capture_default_str();
    attn_cmd->add_option("--d", attn.d, "head dimension")->check(CLI::PositiveNumber);
    attn_cmd->add_option("--trials", attn.trials, "instances per n")->check(CLI::PositiveNumber);
    attn_cmd->add_option("--tolerance", attn.tolerance, "max relative error");
    attn_cmd->add_option("--seed", attn.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*track_cmd) {
            cmd_track(track, std::cout);
        } else if (*eval_cmd) {
            cmd_eval(eval, std::cout);
        } else if (*sweep_cmd) {
            cmd_sweep(sweep, std::cout);
        } else if (*synth_cmd) {
            cmd_synth(synth, std::cout);
        } else if (*attn_cmd) {
            if (!cmd_attn_check(attn, std::cout).pass) return kSuiteFailure;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidationError;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    }
    return kOk;
}
