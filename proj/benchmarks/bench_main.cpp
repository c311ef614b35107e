// Copyright 2026 The qcoarse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <map>

#include "qcoarse/classical.hpp"
#include "qcoarse/expsum.hpp"
#include "qcoarse/hsmm.hpp"
#include "qcoarse/processes.hpp"
#include "qcoarse/qmodel.hpp"
#include "qcoarse/simulate.hpp"

namespace {

using namespace qcoarse;

const ExpSum &ap_sum(int terms) {
    static std::map<int, ExpSum> cache;
    auto it = cache.find(terms);
    if (it == cache.end()) {
        it = cache.emplace(terms, scan_epsilon(WaitTimeDistribution::alternating_poisson(1.0), terms,
                                               default_eps_grid())
                                      .best)
                 .first;
    }
    return it->second;
}

void BM_HankelEigen(benchmark::State &state) {
    ScanOptions o;
    o.samples = static_cast<int>(state.range(0));
    const auto dist = WaitTimeDistribution::bimodal_gaussian_default();
    for (auto _ : state) {
        benchmark::DoNotOptimize(make_decomposer(dist, o));
    }
}
BENCHMARK(BM_HankelEigen)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ScanEpsilon(benchmark::State &state) {
    const auto dist = WaitTimeDistribution::alternating_poisson(1.0);
    const auto eps = default_eps_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(scan_epsilon(dist, static_cast<int>(state.range(0)), eps));
    }
}
BENCHMARK(BM_ScanEpsilon)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_BuildUnitary(benchmark::State &state) {
    const ExpSum &sum = ap_sum(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_unitary(sum, 1e-3));
    }
}
BENCHMARK(BM_BuildUnitary)->Arg(2)->Arg(8)->Arg(16);

void BM_Trajectory(benchmark::State &state) {
    const QuantumModel model = build_unitary(ap_sum(static_cast<int>(state.range(0))), 1e-3);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const Trajectory t = run_trajectory(model, seed++, 100000);
        benchmark::DoNotOptimize(t.events.data());
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_Trajectory)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_CounterKs(benchmark::State &state) {
    const auto dist = WaitTimeDistribution::alternating_poisson(1.0);
    ClassicalCounterModel m;
    m.p.assign(static_cast<std::size_t>(state.range(0)), 0.05);
    m.dt = 0.01;
    m.loop = 0;
    const double domain = default_domain(dist);
    for (auto _ : state) {
        benchmark::DoNotOptimize(counter_ks(dist, domain, m));
    }
}
BENCHMARK(BM_CounterKs)->Arg(2)->Arg(8);

void BM_CompressHsmm(benchmark::State &state) {
    DecompositionCache cache(8, default_eps_grid());
    CompressOptions o;
    o.cache = &cache;
    const Hsmm h = example_process(0.3, 0.6);
    compress(h, 8, o);  // fill the cache
    for (auto _ : state) {
        benchmark::DoNotOptimize(compress(h, 8, o));
    }
}
BENCHMARK(BM_CompressHsmm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
