#include <benchmark/benchmark.h>

#include "mr2/association.hpp"
#include "mr2/config.hpp"
#include "mr2/experiment.hpp"
#include "mr2/linear_attention.hpp"
#include "mr2/pipeline.hpp"
#include "mr2/random.hpp"
#include "mr2/synth.hpp"

using namespace mr2;

static void BM_Match(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    CostMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.bernoulli(0.7) ? 0.0 : rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(match(m, 0.3));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Match)->RangeMultiplier(2)->Range(4, 128)->Complexity(benchmark::oNCubed);

// One full sequence through the tracker, per interleaving factor.
static void BM_TrackSequence(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const RunConfig cfg = default_run_config("nanodet");
    SynthOutput data = generate(preset_scenario("cnn-like", 3));
    SequenceStreams seq;
    for (std::int64_t t = 0; t < data.detector.scenario().frame_count; ++t) {
        seq.full.push_back(data.detector.detect(t, cfg.schedule.full_res));
        seq.low.push_back(data.detector.detect(t, cfg.schedule.low_res));
    }
    const auto frames = interleave(seq, p, cfg.rescore);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_sequence(frames, cfg.tracker, cfg.rescore, cfg.pipeline));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}
BENCHMARK(BM_TrackSequence)->Arg(0)->Arg(5);

static AttentionInput attention_input(Eigen::Index n, Eigen::Index d) {
    Rng rng(2);
    AttentionInput in{Matrix(n, d), Matrix(n, d), Matrix(n, d)};
    for (Matrix* m : {&in.q, &in.k, &in.v})
        for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = rng.normal();
    return in;
}

static void BM_AttentionNaive(benchmark::State& state) {
    const AttentionInput in = attention_input(state.range(0), 16);
    for (auto _ : state) benchmark::DoNotOptimize(naive_relu_attention(in));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AttentionNaive)->RangeMultiplier(2)->Range(16, 1024)->Complexity(benchmark::oNSquared);

static void BM_AttentionFactored(benchmark::State& state) {
    const AttentionInput in = attention_input(state.range(0), 16);
    for (auto _ : state) benchmark::DoNotOptimize(factored_linear_attention(in));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AttentionFactored)->RangeMultiplier(2)->Range(16, 1024)->Complexity(benchmark::oN);
BENCHMARK_MAIN();
