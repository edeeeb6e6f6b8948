/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <dstream/bench/bench.hpp>
#include <dstream/bench/zipf.hpp>
#include <dstream/operators/operators.hpp>
#include <dstream/strategies/murmur.hpp>
#include <dstream/strategies/space_saving.hpp>

#include <benchmark/benchmark.h>

using namespace dstream;

static void BM_Murmur(benchmark::State& state) {
    std::string data(static_cast<std::size_t>(state.range(0)), 'x');
    for (auto _ : state) {
        benchmark::DoNotOptimize(murmur3_x86_32(data, kHashSeed1));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Murmur)->Range(8, 4096);

static void BM_SpaceSavingOffer(benchmark::State& state) {
    auto words = bench::zipf_generate(bench::ZipfConfig{10'000, 1.4, 1 << 16, 1});
    std::vector<Value> keys(words.begin(), words.end());
    SpaceSaving sketch(static_cast<std::size_t>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        sketch.offer(keys[i++ & 0xFFFF]);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SpaceSavingOffer)->Arg(50)->Arg(200);

static void BM_ZipfSample(benchmark::State& state) {
    bench::ZipfSampler sampler(10'000, 1.4, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler.next());
    }
}
BENCHMARK(BM_ZipfSample);

static void BM_WordcountDeterministic(benchmark::State& state) {
    static const char* kStrategies[] = {"kg", "sg", "pkg", "dc", "wc"};
    auto words = bench::zipf_generate(bench::ZipfConfig{1'000, 1.4, 10'000, 2});
    std::vector<Value> input(words.begin(), words.end());
    bench::WordcountSpec spec;
    spec.strategy = kStrategies[state.range(0)];
    spec.worker_count = 16;
    auto wf = bench::wordcount_workflow(spec);
    ClusterConfig cfg;
    cfg.node_count = 4;
    for (auto _ : state) {
        Application app(wf, cfg);
        app.feed("source", input);
        benchmark::DoNotOptimize(app.await_quiescence());
    }
    state.SetLabel(spec.strategy);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(input.size()));
}
BENCHMARK(BM_WordcountDeterministic)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
