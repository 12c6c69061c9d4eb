/*
 *  Copyright 2026 The npcl Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "npcl/mlp.hpp"
#include "npcl/objectives.hpp"
#include "npcl/rng.hpp"
#include "npcl/selector.hpp"

namespace {

std::vector<double> random_values(std::size_t n, double lo, double hi, std::uint64_t seed) {
    npcl::Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

void BM_PartialOptimize(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto losses = random_values(n, 0.0, 4.0, 1);
    const double c = 0.6 * static_cast<double>(n);
    for (auto _ : state) benchmark::DoNotOptimize(npcl::partial_optimize(losses, c));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PartialOptimize)->RangeMultiplier(4)->Range(16, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_BatchedObjective(benchmark::State& state) {
    const std::size_t n = 4096;
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto batch = npcl::MarginBatch::from_hinge_margins(random_values(n, -2.0, 3.0, 2));
    npcl::Rng rng(3);
    const auto partition = npcl::BatchPartition::shuffled(n, m, rng);
    const auto mode = npcl::ThresholdMode::npcl_adaptive(0.3);
    for (auto _ : state) benchmark::DoNotOptimize(npcl::batched_objective(batch, partition, mode));
}
BENCHMARK(BM_BatchedObjective)->Arg(16)->Arg(128)->Arg(1024);

struct MlpFixture {
    npcl::MlpParams params;
    std::vector<double> features;
    std::vector<std::size_t> labels;
    std::vector<std::uint8_t> mask;

    explicit MlpFixture(std::size_t batch)
        : params(npcl::MlpParams::glorot({2, 64, 64, 4}, 4)),
          features(random_values(batch * 2, -3.0, 3.0, 5)),
          labels(batch),
          mask(batch, 1) {
        for (std::size_t i = 0; i < batch; ++i) labels[i] = i % 4;
    }
    npcl::SampleBatch batch() const { return {features, 2, labels}; }
};

void BM_MlpForward(benchmark::State& state) {
    const MlpFixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(npcl::forward_batch(f.params, f.batch()));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForward)->Arg(32)->Arg(128)->Arg(512);

void BM_MlpBackward(benchmark::State& state) {
    const MlpFixture f(static_cast<std::size_t>(state.range(0)));
    const auto loss = npcl::BaseLoss::hard_hinge();
    for (auto _ : state) benchmark::DoNotOptimize(npcl::backward(f.params, f.batch(), loss, f.mask));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpBackward)->Arg(32)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
