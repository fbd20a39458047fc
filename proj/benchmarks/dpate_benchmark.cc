// Copyright 2026 The dpate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstddef>

#include "benchmark/benchmark.h"
#include "dpate/data_io.h"
#include "dpate/matching.h"
#include "dpate/noise.h"
#include "dpate/pipeline.h"
#include "dpate/propensity.h"

namespace dpate {
namespace {

void Sizes(benchmark::internal::Benchmark* b) {
  for (int n : {500, 1000, 2000, 4000}) b->Arg(n);
}

Dataset Synth(std::size_t n) {
  SynthParams p;
  p.n = n;
  p.seed = 7;
  return GenerateSynth(p)->dataset;
}

void BM_Train(benchmark::State& state) {
  const Dataset ds = Synth(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Train(ds));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Train)->Apply(Sizes)->Arg(8000)->Complexity();

void BM_BuildSortedMatrices(benchmark::State& state) {
  const Dataset ds = Synth(static_cast<std::size_t>(state.range(0)));
  const PropensityScores scores = *Score(*Train(ds), ds);
  NoiseSource off = NoiseSource::Disabled();
  const TreatmentView view =
      *PerturbTreatment(ds, PrivacyLevel::kLabelLevel, 1.0, off, nullptr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildSortedMatrices(scores, view));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildSortedMatrices)
    ->Apply(Sizes)
    ->Complexity(benchmark::oNSquared);

void BM_Run(benchmark::State& state, PrivacyLevel level) {
  const Dataset ds = Synth(static_cast<std::size_t>(state.range(0)));
  RunConfig config = DefaultConfig(level, 1.0);
  for (auto _ : state) {
    ++config.seed;
    benchmark::DoNotOptimize(dpate::Run(ds, config));
  }
}
BENCHMARK_CAPTURE(BM_Run, label_level, PrivacyLevel::kLabelLevel)
    ->Apply(Sizes)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Run, sample_level, PrivacyLevel::kSampleLevel)
    ->Apply(Sizes)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpate

BENCHMARK_MAIN();
