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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "psvm/dataset.hpp"
#include "psvm/explanations.hpp"
#include "psvm/feature_map.hpp"
#include "psvm/privacy.hpp"
#include "psvm/svm.hpp"
#include "psvm/table.hpp"

namespace psvm {

// Feature-map choice for an experiment; concrete dimensions are filled in
// from the dataset.
struct MapChoice {
  MapKind kind = MapKind::kRandomFourier;
  int output_dim = 100;   // F; ignored by identity maps
  double gamma = 0.0;     // <= 0 selects the 1/L default
  std::uint64_t seed = 7;
};

// Everything a sweep needs.  Every result below is a pure function of this
// struct: all randomness is drawn from counter-based streams derived from
// master_seed (noise realizations, prototype retries) or from the fixed
// sub-seeds (split, map), so reruns reproduce outputs byte for byte on any
// machine and any core count.
struct ExperimentConfig {
  std::filesystem::path dataset_path;
  SplitSpec split;
  SvmConfig svm;
  MapChoice map;

  std::vector<double> beta_grid = {0.01,    0.031622776601683794, 0.1,
                                   0.31622776601683794, 1.0,
                                   3.1622776601683795,  10.0,
                                   31.622776601683793,  100.0};
  std::vector<double> p_grid = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  int noise_realizations = 200;
  double beta_default = 5.0;
  double p_default = 0.9;
  std::uint64_t master_seed = 42;

  // Number of test instances to explain per cell; <= 0 means all of them.
  int sample_size = 0;
  BisectionConfig bisection;
  int prototype_retry_budget = 1000;

  void validate() const;
};

// One observation in tidy/long form.  beta, p, or realization is -1 when
// the metric does not vary along that axis.
struct SweepRecord {
  double beta = -1.0;
  double p = -1.0;
  long long realization = -1;
  std::string metric;
  double value = 0.0;
};

// Shared first stage of every experiment: load, split, normalize (with
// statistics fitted on the training side only), build the feature map,
// train the exact model.
struct PreparedExperiment {
  Dataset train;      // normalized
  Dataset test;       // normalized with the training statistics
  Dataset train_raw;
  Dataset test_raw;
  NormalizationParams normalizer;
  FeatureMap map;
  SvmModel model;
  double baseline_accuracy = 0.0;  // exact model on the test split
  double domain_radius = 0.0;      // max ||x|| over normalized training rows
};

[[nodiscard]] PreparedExperiment prepare_experiment(
    const ExperimentConfig& config);

// privatize() with the identity-map domain radius plumbed through.
[[nodiscard]] PrivateRelease release_for(const PreparedExperiment& prepared,
                                         double beta,
                                         std::uint64_t noise_seed);

// Test accuracy of the released classifier per (beta, realization), plus
// one accuracy_baseline row for the exact model.
[[nodiscard]] std::vector<SweepRecord> run_accuracy_sweep(
    const ExperimentConfig& config);

// Mean explanation distance per (beta, realization) at p_default, robust
// and non-robust, with per-cell counts of explained/excluded instances.
[[nodiscard]] std::vector<SweepRecord> run_distance_sweep_beta(
    const ExperimentConfig& config);

// Mean explanation distance per (p, realization) at beta_default; the
// release is drawn once per realization and shared across the p grid.
[[nodiscard]] std::vector<SweepRecord> run_distance_sweep_p(
    const ExperimentConfig& config);

// Signed margins y_prime * f(x) of released-model explanations measured
// against the exact model, pooled over realizations and instances per
// beta: 10/50/90th percentiles, an order-statistic confidence interval for
// the median, and counts.  Positive margin = the explanation fails to
// cross the exact boundary.
[[nodiscard]] std::vector<SweepRecord> run_violation_stats(
    const ExperimentConfig& config);

// Bisection trace for one test instance (test_index < 0 picks the first
// usable one) at (beta_default, p_default): per-iteration bracket width,
// g at the midpoint, and g at the feasible end.
[[nodiscard]] Table run_convergence_trace(const ExperimentConfig& config,
                                          int test_index = -1);

// Tidy table with columns beta, p, realization, metric, value.
[[nodiscard]] Table records_to_table(const std::vector<SweepRecord>& records);

}  // namespace psvm
