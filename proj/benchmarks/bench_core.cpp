#include <benchmark/benchmark.h>

#include "acae/evaluation.hpp"
#include "acae/gradients.hpp"
#include "acae/training.hpp"
#include "synthetic.hpp"

using namespace acae;

namespace {

struct Workbench {
    BinaryDataset ds;
    SplitSpec split;
    ModelParams params;
    Profiles train;
    std::vector<std::uint32_t> batch;

    Workbench() {
        synth::Options opt;
        opt.users = 1500;
        opt.items = 2000;
        opt.groups = 8;
        opt.min_ratings = 10;
        opt.max_ratings = 40;
        opt.seed = 3;
        ds = synth::make_dataset(opt);
        RngStream rng(1);
        split = split_leave_one_out(ds, rng, 200);
        split.seed = 1;
        RngStream prng(2);
        params = init_params(ds.user_count, ds.item_count, 64, Activation::sigmoid,
                             Activation::identity, 0.01, prng);
        train = training_positives(ds, split);
        for (std::uint32_t u = 0; u < 128; ++u) batch.push_back(u);
    }
};

const Workbench& bench() {
    static Workbench w;
    return w;
}

}  // namespace

static void ForwardPass(benchmark::State& state) {
    const auto& w = bench();
    std::uint32_t u = 0;
    for (auto _ : state) {
        const ForwardTrace t = forward_sparse(w.params, u, w.train[u]);
        benchmark::DoNotOptimize(t.logits.values.data());
        u = (u + 1) % static_cast<std::uint32_t>(w.ds.user_count);
    }
}
BENCHMARK(ForwardPass);

static void BatchBackprop(benchmark::State& state) {
    const auto& w = bench();
    for (auto _ : state) {
        const ParamGrads g = backprop(w.params, w.batch, w.train, {}, 1e-4);
        benchmark::DoNotOptimize(g.w2.values.data());
    }
}
BENCHMARK(BatchBackprop)->Unit(benchmark::kMillisecond);

static void AdversarialNoise(benchmark::State& state) {
    const auto& w = bench();
    const NoiseSite site = static_cast<NoiseSite>(state.range(0));
    for (auto _ : state) {
        const NoiseTensor n = make_adversarial_noise(w.params, w.batch, w.train, site, 8.0);
        benchmark::DoNotOptimize(n.values.values.data());
    }
}
BENCHMARK(AdversarialNoise)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void EvaluateSplit(benchmark::State& state) {
    const auto& w = bench();
    for (auto _ : state) {
        const EvalReport rep = evaluate(w.params, w.ds, w.split);
        benchmark::DoNotOptimize(rep.hr.data());
    }
}
BENCHMARK(EvaluateSplit)->Unit(benchmark::kMillisecond);

static void AdagradEpochStep(benchmark::State& state) {
    const auto& w = bench();
    ModelParams params = w.params;
    AdagradState accum = make_adagrad_state(params);
    for (auto _ : state) {
        const ParamGrads g = backprop(params, w.batch, w.train, {}, 1e-4);
        apply_adagrad(params, accum, g, 0.01);
        benchmark::DoNotOptimize(params.w2.values.data());
    }
}
BENCHMARK(AdagradEpochStep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
