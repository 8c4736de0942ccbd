// Copyright 2026 The adlradar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "adlradar/features.hpp"
#include "adlradar/preprocess.hpp"
#include "adlradar/radon.hpp"
#include "adlradar/rdmap.hpp"
#include "adlradar/sim.hpp"

using namespace adlradar;

namespace {

Scenario walker(std::size_t num_pri) {
  Scenario sc;
  sc.params.num_pri = num_pri;
  sc.duration = sc.params.duration();
  sc.tracks.push_back(build_activity_profile(ActivityKind::Walk, 0.0, sc.duration, 2.0 + sc.duration, Facing::Toward));
  sc.noise_sigma = 0.1;
  return sc;
}

RealMatrix random_matrix(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(density);
  std::uniform_real_distribution<double> val(0.1, 1.0);
  RealMatrix m(rows, cols);
  for (double& v : m.data()) v = on(rng) ? val(rng) : 0.0;
  return m;
}

void BM_RangeMap(benchmark::State& state) {
  const BasebandMatrix bb = synthesize_baseband(walker(static_cast<std::size_t>(state.range(0))), 1);
  for (auto _ : state) benchmark::DoNotOptimize(range_map(bb));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RangeMap)->Arg(1000)->Arg(12000)->Unit(benchmark::kMillisecond);

void BM_Spectrogram(benchmark::State& state) {
  const BasebandMatrix bb = synthesize_baseband(walker(12000), 1);
  const std::vector<cplx> v = range_bin_sum(range_map(bb));
  for (auto _ : state) benchmark::DoNotOptimize(spectrogram(v, StftParams{}, 1e-3));
}
BENCHMARK(BM_Spectrogram)->Unit(benchmark::kMillisecond);

void BM_RadonTransform(benchmark::State& state) {
  const RealMatrix img = random_matrix(128, static_cast<std::size_t>(state.range(0)), 0.05, 2);
  for (auto _ : state) benchmark::DoNotOptimize(radon_transform(img));
}
BENCHMARK(BM_RadonTransform)->Arg(128)->Arg(384)->Unit(benchmark::kMillisecond);

void BM_CleanRangemap(benchmark::State& state) {
  RealMatrix db = random_matrix(128, 384, 1.0, 3);
  for (double& v : db.data()) v = -60.0 + 40.0 * v;
  for (auto _ : state) benchmark::DoNotOptimize(clean_rangemap(db, CleanParams{}));
}
BENCHMARK(BM_CleanRangemap)->Unit(benchmark::kMillisecond);

void BM_NearestNeighbour(benchmark::State& state) {
  std::vector<Snippet> train;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    Snippet s;
    s.label = 1 + i % 15;
    s.md = random_matrix(128, 128, 0.2, static_cast<std::uint64_t>(10 + i));
    s.rm = random_matrix(128, 128, 0.2, static_cast<std::uint64_t>(1000 + i));
    train.push_back(std::move(s));
  }
  const FeatureModel model = train_model(train, FeatureDims{14, 4});
  const Eigen::VectorXd q = model.features(train.front());
  std::vector<int> classes(15);
  for (int c = 0; c < 15; ++c) classes[static_cast<std::size_t>(c)] = c + 1;
  for (auto _ : state) benchmark::DoNotOptimize(nn_classify(q, model, classes, model.dims));
}
BENCHMARK(BM_NearestNeighbour)->Arg(150)->Arg(450)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
