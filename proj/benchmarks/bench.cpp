// Microbenchmarks for the hot paths: classical construction, estimates,
// policy decoding, and one REINFORCE update. Run manually; not part of ctest.

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "svrp/classic.hpp"
#include "svrp/decode.hpp"
#include "svrp/env.hpp"
#include "svrp/estimate.hpp"
#include "svrp/experiment.hpp"
#include "svrp/policy.hpp"
#include "svrp/train.hpp"

namespace {

using namespace svrp;

struct World {
    ExperimentConfig cfg;
    GeneratorParams gen;
    InstanceSpec inst;
    ScenarioSet test;
    ScenarioSet pool;
    EstimateVector est;
    PolicyParams params;
};

const World& world(int n) {
    static std::map<int, World> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        World w;
        w.cfg.estimator = "constant";
        w.gen = experiment_generator(w.cfg, n, 1);
        w.inst = experiment_instance(w.cfg, w.gen, 1);
        w.test = experiment_dataset(w.cfg, n, 1, "test", 64);
        w.pool = experiment_dataset(w.cfg, n, 1, "train", 256);
        w.est = constant_estimate(w.gen);
        w.params = init_policy(n, 128, 1);
        it = cache.emplace(n, std::move(w)).first;
    }
    return it->second;
}

void BM_clarke_wright(benchmark::State& state) {
    const World& w = world(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(clarke_wright(w.inst, w.est));
}
BENCHMARK(BM_clarke_wright)->Arg(10)->Arg(50)->Arg(100);

void BM_tabu_search(benchmark::State& state) {
    const World& w = world(static_cast<int>(state.range(0)));
    Rng rng(7);
    for (auto _ : state)
        benchmark::DoNotOptimize(tabu_search(w.inst, w.est, TabuParams{}, rng));
}
BENCHMARK(BM_tabu_search)->Arg(10)->Arg(50);

void BM_aco(benchmark::State& state) {
    const World& w = world(static_cast<int>(state.range(0)));
    Rng rng(7);
    for (auto _ : state) benchmark::DoNotOptimize(aco(w.inst, w.est, AcoParams{}, rng));
}
BENCHMARK(BM_aco)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_knn_estimate(benchmark::State& state) {
    const World& w = world(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(knn_estimate(w.test.records[0].w, w.pool, 16));
}
BENCHMARK(BM_knn_estimate)->Arg(10)->Arg(50)->Arg(100);

void BM_env_episode(benchmark::State& state) {
    const World& w = world(static_cast<int>(state.range(0)));
    Rng rng(7);
    for (auto _ : state) {
        const auto& rec = w.test.records[rng.uniform_int(64)];
        EnvState s = reset(w.inst, rec);
        double total = 0.0;
        while (!s.done) {
            const auto mask = feasible_mask(s, w.inst, s.demands, 0);
            std::vector<int> open;
            for (int i = 0; i < static_cast<int>(mask.size()); ++i)
                if (mask[i]) open.push_back(i);
            StepResult r = step(s, w.inst, rec, {open[rng.uniform_int(open.size())]});
            total += r.cost;
            s = std::move(r.state);
        }
        benchmark::DoNotOptimize(total);
    }
}
BENCHMARK(BM_env_episode)->Arg(10)->Arg(50)->Arg(100);

void BM_greedy_decode(benchmark::State& state) {
    const World& w = world(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(greedy_decode(w.params, w.inst, w.test.records[0], w.est,
                                               ObservationMode::reoptimization));
}
BENCHMARK(BM_greedy_decode)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_beam_decode(benchmark::State& state) {
    const World& w = world(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(beam_decode(w.params, w.inst, w.test.records[0], w.est, 3,
                                             ObservationMode::reoptimization));
}
BENCHMARK(BM_beam_decode)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_reinforce_update(benchmark::State& state) {
    const World& w = world(10);
    PolicyParams params = w.params;
    std::vector<Array*> net;
    for (auto& [name, arr] : params.net.named()) net.push_back(arr);
    Adam policy_opt(net, 1e-4);
    Adam baseline_opt({&params.baseline_w, &params.baseline_b}, 1e-3);
    std::vector<const ScenarioRecord*> batch;
    for (int i = 0; i < 8; ++i) batch.push_back(&w.test.records[static_cast<std::size_t>(i)]);
    Rng rng(7);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            reinforce_update(params, w.inst, batch, policy_opt, baseline_opt, 2.0, rng, false));
}
BENCHMARK(BM_reinforce_update)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
