//
// Copyright 2026 The psvm Authors
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
//

#include <benchmark/benchmark.h>

#include <cstdint>

#include "psvm/dataset.hpp"
#include "psvm/explanations.hpp"
#include "psvm/feature_map.hpp"
#include "psvm/privacy.hpp"
#include "psvm/rng.hpp"
#include "psvm/svm.hpp"

namespace {

// Two well-separated Gaussian blobs, one per class.
psvm::Dataset make_blobs(int n, int dim, std::uint64_t seed) {
  psvm::Dataset data;
  data.features.resize(n, dim);
  data.labels.resize(n);
  std::uint64_t draw = 0;
  for (int i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    data.labels[i] = label;
    for (int j = 0; j < dim; ++j) {
      data.features(i, j) =
          psvm::normal01(seed, draw++) + (j == 0 ? 2.0 * label : 0.0);
    }
  }
  return data;
}

void BM_LaplaceSample(benchmark::State& state) {
  const auto count = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psvm::laplace_sample(0.5, count, seed++));
  }
  state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_LaplaceSample)->Arg(1000)->Arg(100000);

void BM_FourierApply(benchmark::State& state) {
  const auto features = static_cast<int>(state.range(0));
  const psvm::FeatureMap map =
      psvm::make_random_fourier_map(30, features, 1.0 / 30.0, 7);
  Eigen::VectorXd x(30);
  std::uint64_t draw = 0;
  for (int j = 0; j < 30; ++j) x(j) = psvm::normal01(3, draw++);
  for (auto _ : state) {
    benchmark::DoNotOptimize(psvm::apply(map, x));
  }
}
BENCHMARK(BM_FourierApply)->Arg(100)->Arg(1000);

void BM_FourierApplyAll(benchmark::State& state) {
  const auto rows = static_cast<int>(state.range(0));
  const psvm::FeatureMap map =
      psvm::make_random_fourier_map(30, 100, 1.0 / 30.0, 7);
  const psvm::Dataset data = make_blobs(rows, 30, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(psvm::apply_all(map, data.features));
  }
  state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_FourierApplyAll)->Arg(100)->Arg(1000);

void BM_TrainDual(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const psvm::Dataset data = make_blobs(n, 10, 17);
  const psvm::FeatureMap map = psvm::make_identity_map(10);
  psvm::SvmConfig config;
  config.C = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psvm::train_dual(data, map, config));
  }
}
BENCHMARK(BM_TrainDual)->Arg(100)->Arg(400);

psvm::PrivateRelease bench_release(int dim, double lambda) {
  psvm::PrivateRelease release;
  release.map = psvm::make_identity_map(dim);
  release.w_tilde = Eigen::VectorXd::LinSpaced(dim, 0.5, 1.5);
  release.noise = psvm::NoiseSpec{lambda, 1.0, 0};
  return release;
}

void BM_ConeProjection(benchmark::State& state) {
  const psvm::PrivateRelease release = bench_release(30, 0.05);
  psvm::ExplanationRequest request;
  request.x_prime = Eigen::VectorXd::LinSpaced(30, 1.0, 2.0);
  request.y_prime = 1;
  request.confidence = 0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psvm::explain_robust_linear(request, release));
  }
}
BENCHMARK(BM_ConeProjection);

void BM_Bisection(benchmark::State& state) {
  const psvm::PrivateRelease release = bench_release(30, 0.05);
  psvm::ExplanationRequest request;
  request.x_prime = Eigen::VectorXd::LinSpaced(30, 1.0, 2.0);
  request.y_prime = 1;
  request.confidence = 0.9;
  psvm::PrototypeSet prototypes;
  prototypes.z_plus = request.x_prime;
  prototypes.z_minus = -Eigen::VectorXd::LinSpaced(30, 1.0, 2.0);
  psvm::BisectionConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        psvm::explain_robust_bisection(request, release, prototypes, config));
  }
}
BENCHMARK(BM_Bisection);

void BM_ValidateChanceConstraint(benchmark::State& state) {
  const auto trials = static_cast<int>(state.range(0));
  const psvm::PrivateRelease release = bench_release(30, 0.1);
  const Eigen::VectorXd x = -Eigen::VectorXd::LinSpaced(30, 1.0, 2.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        psvm::validate_chance_constraint(x, release, 1, trials, seed++));
  }
  state.SetItemsProcessed(state.iterations() * trials);
}
BENCHMARK(BM_ValidateChanceConstraint)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
