// Copyright 2026 The noveval Authors
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

#include "noveval/classifier.hpp"
#include "noveval/config.hpp"
#include "noveval/detection.hpp"
#include "noveval/synthgen.hpp"

namespace {

void BM_TrainDesk(benchmark::State& state) {
  const auto cfg = noveval::ExperimentConfig::desk_scale();
  const auto bundle = noveval::generate(cfg, noveval::GeneratorSpec::from_config(cfg));
  auto spec = noveval::TrainSpec::from_config(cfg);
  spec.epochs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(noveval::train(bundle.d_train, cfg.num_classes(), spec));
  }
}
BENCHMARK(BM_TrainDesk)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_PredictScores(benchmark::State& state) {
  const auto cfg = noveval::ExperimentConfig::desk_scale();
  const auto bundle = noveval::generate(cfg, noveval::GeneratorSpec::from_config(cfg));
  auto spec = noveval::TrainSpec::from_config(cfg);
  spec.epochs = 20;
  const auto model = noveval::train(bundle.d_train, cfg.num_classes(), spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(noveval::predict_scores(model, bundle.eval_acc, cfg.k_known));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(bundle.eval_acc.size()));
}
BENCHMARK(BM_PredictScores);

}  // namespace
