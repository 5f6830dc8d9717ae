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

#include "psvm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "psvm/errors.hpp"
#include "psvm/rng.hpp"

namespace psvm {
namespace {

// Test-set row indices examined by the explanation sweeps: a seeded
// without-replacement sample of size sample_size (or every index).
std::vector<Eigen::Index> sample_indices(Eigen::Index n, int sample_size,
                                         std::uint64_t seed) {
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(n));
  std::iota(indices.begin(), indices.end(), Eigen::Index{0});
  if (sample_size <= 0 || sample_size >= n) {
    return indices;
  }
  std::uint64_t draw = 0;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(
        bounded(rng_word(seed, draw++), static_cast<std::uint64_t>(i) + 1));
    std::swap(indices[static_cast<std::size_t>(i)],
              indices[static_cast<std::size_t>(j)]);
  }
  indices.resize(static_cast<std::size_t>(sample_size));
  std::sort(indices.begin(), indices.end());
  return indices;
}

// Robust explanation dispatch: exact cone projection for identity maps,
// prototype-seeded bisection otherwise.  confidence = 0.5 degenerates to
// the non-robust problem, for which identity maps use the closed form.
Explanation explain_instance(const ExperimentConfig& config,
                             const PrivateRelease& release,
                             const PrototypeSet* prototypes,
                             const Eigen::VectorXd& x_prime,
                             double confidence) {
  const ExplanationRequest request =
      make_request(release, x_prime, confidence);
  if (release.map.kind == MapKind::kIdentity) {
    if (confidence == 0.5) {
      return explain_nonrobust_linear(request, release);
    }
    return explain_robust_linear(request, release);
  }
  return explain_robust_bisection(request, release, *prototypes,
                                  config.bisection);
}

double mean_of(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

// Percentile with linear interpolation on the sorted sample.
double percentile(const std::vector<double>& sorted, double q) {
  const auto n = sorted.size();
  const double h = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// ±3-standard-error interval for the pooled median.  Margins from one noise
// realization share a released model, so they are a cluster, not independent
// draws; the SE therefore comes from a delete-one-realization jackknife
// rather than i.i.d. order statistics, which would understate it badly.
std::pair<double, double> median_interval(
    const std::vector<std::vector<double>>& clusters, double p50,
    std::size_t total) {
  const auto R = clusters.size();
  if (R < 2 || total == 0) return {p50, p50};
  std::vector<double> leave_out;
  leave_out.reserve(R);
  std::vector<double> scratch;
  scratch.reserve(total);
  for (std::size_t skip = 0; skip < R; ++skip) {
    if (clusters[skip].size() == total) continue;  // nothing left to pool
    scratch.clear();
    for (std::size_t r = 0; r < R; ++r) {
      if (r == skip) continue;
      scratch.insert(scratch.end(), clusters[r].begin(), clusters[r].end());
    }
    std::sort(scratch.begin(), scratch.end());
    leave_out.push_back(percentile(scratch, 0.50));
  }
  if (leave_out.size() < 2) return {p50, p50};
  const double mean =
      std::accumulate(leave_out.begin(), leave_out.end(), 0.0) /
      static_cast<double>(leave_out.size());
  double sum_sq = 0.0;
  for (const double v : leave_out) sum_sq += (v - mean) * (v - mean);
  const auto m = static_cast<double>(leave_out.size());
  const double se = std::sqrt((m - 1.0) / m * sum_sq);
  return {p50 - 3.0 * se, p50 + 3.0 * se};
}

struct DistanceCell {
  std::vector<double> robust;
  std::vector<double> nonrobust;
  std::vector<double> to_prototype;
  long long excluded_robust = 0;
  long long excluded_nonrobust = 0;
  long long origin_only = 0;
};

void push_distance_records(std::vector<SweepRecord>& records, double beta,
                           double p, long long realization,
                           const DistanceCell& cell, bool with_prototype) {
  const auto push = [&](const std::string& metric, double value) {
    records.push_back(SweepRecord{beta, p, realization, metric, value});
  };
  if (!cell.robust.empty()) {
    push("distance_robust_mean", mean_of(cell.robust));
  }
  if (!cell.nonrobust.empty()) {
    push("distance_nonrobust_mean", mean_of(cell.nonrobust));
  }
  if (with_prototype && !cell.to_prototype.empty()) {
    push("distance_to_prototype_mean", mean_of(cell.to_prototype));
  }
  push("n_explained_robust", static_cast<double>(cell.robust.size()));
  push("n_excluded_robust", static_cast<double>(cell.excluded_robust));
  push("n_explained_nonrobust", static_cast<double>(cell.nonrobust.size()));
  push("n_excluded_nonrobust",
       static_cast<double>(cell.excluded_nonrobust));
  push("n_origin_only_robust", static_cast<double>(cell.origin_only));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset_path.empty()) {
    throw DataError("experiment config needs a dataset path");
  }
  if (beta_grid.empty() || p_grid.empty()) {
    throw DataError("beta_grid and p_grid must be nonempty");
  }
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > 0.0)) {
      throw DataError("beta_grid entries must be > 0");
    }
    if (i > 0 && !(beta_grid[i] > beta_grid[i - 1])) {
      throw DataError("beta_grid must be strictly ascending");
    }
  }
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] >= 0.5 && p_grid[i] < 1.0)) {
      throw DataError("p_grid entries must lie in [0.5, 1)");
    }
    if (i > 0 && !(p_grid[i] > p_grid[i - 1])) {
      throw DataError("p_grid must be strictly ascending");
    }
  }
  if (noise_realizations <= 0) {
    throw DataError("noise_realizations must be > 0");
  }
  if (!(beta_default > 0.0)) {
    throw DataError("beta_default must be > 0");
  }
  if (!(p_default >= 0.5 && p_default < 1.0)) {
    throw DataError("p_default must lie in [0.5, 1)");
  }
  if (prototype_retry_budget < 0) {
    throw DataError("prototype_retry_budget must be >= 0");
  }
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  const Dataset full = load_wdbc(config.dataset_path);
  auto [train_raw, test_raw] = split(full, config.split);

  PreparedExperiment prepared;
  prepared.normalizer = fit_normalizer(train_raw);
  prepared.train = apply_normalizer(train_raw, prepared.normalizer);
  prepared.test = apply_normalizer(test_raw, prepared.normalizer);
  prepared.train_raw = std::move(train_raw);
  prepared.test_raw = std::move(test_raw);

  const auto input_dim = static_cast<int>(prepared.train.dim());
  if (config.map.kind == MapKind::kIdentity) {
    prepared.map = make_identity_map(input_dim);
  } else {
    const double gamma = config.map.gamma > 0.0
                             ? config.map.gamma
                             : 1.0 / static_cast<double>(input_dim);
    prepared.map = make_random_fourier_map(input_dim, config.map.output_dim,
                                           gamma, config.map.seed);
  }
  prepared.model = train_dual(prepared.train, prepared.map, config.svm);
  prepared.baseline_accuracy =
      accuracy(prepared.model.weights, prepared.map, prepared.test);
  prepared.domain_radius =
      prepared.train.features.rowwise().norm().maxCoeff();
  return prepared;
}

PrivateRelease release_for(const PreparedExperiment& prepared, double beta,
                           std::uint64_t noise_seed) {
  return privatize(prepared.model, beta, noise_seed, prepared.domain_radius);
}

std::vector<SweepRecord> run_accuracy_sweep(const ExperimentConfig& config) {
  const PreparedExperiment prepared = prepare_experiment(config);
  const auto realizations =
      static_cast<std::uint64_t>(config.noise_realizations);

  std::vector<SweepRecord> records;
  records.push_back(SweepRecord{-1.0, -1.0, -1, "accuracy_baseline",
                                prepared.baseline_accuracy});
  for (std::size_t b = 0; b < config.beta_grid.size(); ++b) {
    const double beta = config.beta_grid[b];
    for (std::uint64_t r = 0; r < realizations; ++r) {
      const std::uint64_t noise_seed = derive_seed(
          config.master_seed, kStreamNoise, b * realizations + r);
      const PrivateRelease release = release_for(prepared, beta, noise_seed);
      records.push_back(SweepRecord{
          beta, -1.0, static_cast<long long>(r), "accuracy_private",
          accuracy(release.w_tilde, prepared.map, prepared.test)});
    }
  }
  return records;
}

std::vector<SweepRecord> run_distance_sweep_beta(
    const ExperimentConfig& config) {
  const PreparedExperiment prepared = prepare_experiment(config);
  const auto realizations =
      static_cast<std::uint64_t>(config.noise_realizations);
  const std::vector<Eigen::Index> instances =
      sample_indices(prepared.test.size(), config.sample_size,
                     derive_seed(config.master_seed, kStreamSample));

  std::vector<SweepRecord> records;
  for (std::size_t b = 0; b < config.beta_grid.size(); ++b) {
    const double beta = config.beta_grid[b];
    for (std::uint64_t r = 0; r < realizations; ++r) {
      const std::uint64_t cell = b * realizations + r;
      const auto realization = static_cast<long long>(r);
      const PrivateRelease release = release_for(
          prepared, beta,
          derive_seed(config.master_seed, kStreamNoise, cell));

      std::optional<PrototypeSet> prototypes;
      if (prepared.map.kind != MapKind::kIdentity) {
        try {
          prototypes = make_prototypes(
              prepared.train, release, config.p_default,
              derive_seed(config.master_seed, kStreamPrototypes, cell),
              config.prototype_retry_budget);
        } catch (const NumericalError&) {
          records.push_back(SweepRecord{beta, config.p_default, realization,
                                        "prototype_failure", 1.0});
          continue;
        }
      }

      DistanceCell distances;
      for (const Eigen::Index idx : instances) {
        const Eigen::VectorXd x_prime =
            prepared.test.features.row(idx).transpose();
        try {
          const Explanation robust = explain_instance(
              config, release, prototypes ? &*prototypes : nullptr, x_prime,
              config.p_default);
          distances.robust.push_back(robust.distance);
          if (robust.origin_only) ++distances.origin_only;
        } catch (const NumericalError&) {
          ++distances.excluded_robust;
        }
        try {
          const Explanation nonrobust = explain_instance(
              config, release, prototypes ? &*prototypes : nullptr, x_prime,
              0.5);
          distances.nonrobust.push_back(nonrobust.distance);
        } catch (const NumericalError&) {
          ++distances.excluded_nonrobust;
        }
      }
      push_distance_records(records, beta, config.p_default, realization,
                            distances, /*with_prototype=*/false);
    }
  }
  return records;
}

std::vector<SweepRecord> run_distance_sweep_p(const ExperimentConfig& config) {
  const PreparedExperiment prepared = prepare_experiment(config);
  const auto realizations =
      static_cast<std::uint64_t>(config.noise_realizations);
  const std::vector<Eigen::Index> instances =
      sample_indices(prepared.test.size(), config.sample_size,
                     derive_seed(config.master_seed, kStreamSample));

  std::vector<SweepRecord> records;
  // One release per realization, shared across the whole p grid, so the
  // p axis isolates the cost of confidence rather than fresh noise.
  for (std::uint64_t r = 0; r < realizations; ++r) {
    const auto realization = static_cast<long long>(r);
    const PrivateRelease release = release_for(
        prepared, config.beta_default,
        derive_seed(config.master_seed, kStreamNoise, r));

    for (std::size_t pi = 0; pi < config.p_grid.size(); ++pi) {
      const double p = config.p_grid[pi];
      const std::uint64_t cell = pi * realizations + r;

      std::optional<PrototypeSet> prototypes;
      if (prepared.map.kind != MapKind::kIdentity) {
        try {
          prototypes = make_prototypes(
              prepared.train, release, p,
              derive_seed(config.master_seed, kStreamPrototypes, cell),
              config.prototype_retry_budget);
        } catch (const NumericalError&) {
          records.push_back(SweepRecord{config.beta_default, p, realization,
                                        "prototype_failure", 1.0});
          continue;
        }
      }

      DistanceCell distances;
      for (const Eigen::Index idx : instances) {
        const Eigen::VectorXd x_prime =
            prepared.test.features.row(idx).transpose();
        try {
          const Explanation robust = explain_instance(
              config, release, prototypes ? &*prototypes : nullptr, x_prime,
              p);
          distances.robust.push_back(robust.distance);
          if (robust.origin_only) ++distances.origin_only;
          if (prototypes) {
            const int y_prime =
                classify(release.w_tilde, release.map, x_prime);
            distances.to_prototype.push_back(
                (prototypes->for_class(-y_prime) - x_prime).norm());
          }
        } catch (const NumericalError&) {
          ++distances.excluded_robust;
        }
        try {
          const Explanation nonrobust = explain_instance(
              config, release, prototypes ? &*prototypes : nullptr, x_prime,
              0.5);
          distances.nonrobust.push_back(nonrobust.distance);
        } catch (const NumericalError&) {
          ++distances.excluded_nonrobust;
        }
      }
      push_distance_records(records, config.beta_default, p, realization,
                            distances, /*with_prototype=*/true);
    }
  }
  return records;
}

std::vector<SweepRecord> run_violation_stats(const ExperimentConfig& config) {
  const PreparedExperiment prepared = prepare_experiment(config);
  const auto realizations =
      static_cast<std::uint64_t>(config.noise_realizations);
  const std::vector<Eigen::Index> instances =
      sample_indices(prepared.test.size(), config.sample_size,
                     derive_seed(config.master_seed, kStreamSample));

  std::vector<SweepRecord> records;
  for (std::size_t b = 0; b < config.beta_grid.size(); ++b) {
    const double beta = config.beta_grid[b];
    // One cluster of margins per realization; the clustering feeds the
    // jackknife SE of the median.
    std::vector<std::vector<double>> robust_margins;
    std::vector<std::vector<double>> nonrobust_margins;

    for (std::uint64_t r = 0; r < realizations; ++r) {
      robust_margins.emplace_back();
      nonrobust_margins.emplace_back();
      const std::uint64_t cell = b * realizations + r;
      const PrivateRelease release = release_for(
          prepared, beta,
          derive_seed(config.master_seed, kStreamNoise, cell));

      std::optional<PrototypeSet> prototypes;
      if (prepared.map.kind != MapKind::kIdentity) {
        try {
          prototypes = make_prototypes(
              prepared.train, release, config.p_default,
              derive_seed(config.master_seed, kStreamPrototypes, cell),
              config.prototype_retry_budget);
        } catch (const NumericalError&) {
          records.push_back(SweepRecord{beta, config.p_default,
                                        static_cast<long long>(r),
                                        "prototype_failure", 1.0});
          continue;
        }
      }

      for (const Eigen::Index idx : instances) {
        const Eigen::VectorXd x_prime =
            prepared.test.features.row(idx).transpose();
        const int y_prime = classify(release.w_tilde, release.map, x_prime);
        // Margin against the exact (non-private) model: positive means the
        // explanation failed to cross the true boundary.
        try {
          const Explanation robust = explain_instance(
              config, release, prototypes ? &*prototypes : nullptr, x_prime,
              config.p_default);
          robust_margins.back().push_back(
              static_cast<double>(y_prime) *
              decision_value(prepared.model.weights, prepared.map, robust.x));
        } catch (const NumericalError&) {
        }
        try {
          const Explanation nonrobust = explain_instance(
              config, release, prototypes ? &*prototypes : nullptr, x_prime,
              0.5);
          nonrobust_margins.back().push_back(
              static_cast<double>(y_prime) *
              decision_value(prepared.model.weights, prepared.map,
                             nonrobust.x));
        } catch (const NumericalError&) {
        }
      }
    }

    const auto push_stats = [&](const std::string& prefix,
                                const std::vector<std::vector<double>>&
                                    clusters) {
      std::vector<double> margins;
      for (const auto& cluster : clusters) {
        margins.insert(margins.end(), cluster.begin(), cluster.end());
      }
      records.push_back(SweepRecord{beta, config.p_default, -1, prefix + "_n",
                                    static_cast<double>(margins.size())});
      if (margins.empty()) return;
      std::sort(margins.begin(), margins.end());
      records.push_back(SweepRecord{beta, config.p_default, -1,
                                    prefix + "_p10",
                                    percentile(margins, 0.10)});
      const double p50 = percentile(margins, 0.50);
      records.push_back(
          SweepRecord{beta, config.p_default, -1, prefix + "_p50", p50});
      records.push_back(SweepRecord{beta, config.p_default, -1,
                                    prefix + "_p90",
                                    percentile(margins, 0.90)});
      const auto [lo, hi] = median_interval(clusters, p50, margins.size());
      records.push_back(
          SweepRecord{beta, config.p_default, -1, prefix + "_p50_lo", lo});
      records.push_back(
          SweepRecord{beta, config.p_default, -1, prefix + "_p50_hi", hi});
    };
    push_stats("margin_robust", robust_margins);
    push_stats("margin_nonrobust", nonrobust_margins);
  }
  return records;
}

Table run_convergence_trace(const ExperimentConfig& config, int test_index) {
  const PreparedExperiment prepared = prepare_experiment(config);
  if (prepared.map.kind == MapKind::kIdentity) {
    throw DataError(
        "the convergence trace follows the bisection engine, which identity "
        "maps do not use; configure a random Fourier map");
  }
  const PrivateRelease release = release_for(
      prepared, config.beta_default,
      derive_seed(config.master_seed, kStreamNoise, 0));
  const PrototypeSet prototypes = make_prototypes(
      prepared.train, release, config.p_default,
      derive_seed(config.master_seed, kStreamPrototypes, 0),
      config.prototype_retry_budget);

  std::vector<Eigen::Index> candidates;
  if (test_index >= 0) {
    if (test_index >= prepared.test.size()) {
      throw DataError("test index " + std::to_string(test_index) +
                      " out of range; test split has " +
                      std::to_string(prepared.test.size()) + " instances");
    }
    candidates.push_back(test_index);
  } else {
    candidates.resize(static_cast<std::size_t>(prepared.test.size()));
    std::iota(candidates.begin(), candidates.end(), Eigen::Index{0});
  }

  std::vector<BisectionTraceRow> trace;
  bool traced = false;
  for (const Eigen::Index idx : candidates) {
    const Eigen::VectorXd x_prime =
        prepared.test.features.row(idx).transpose();
    try {
      const ExplanationRequest request =
          make_request(release, x_prime, config.p_default);
      (void)explain_robust_bisection(request, release, prototypes,
                                     config.bisection, &trace);
      traced = true;
      break;
    } catch (const NumericalError&) {
      if (test_index >= 0) throw;
    }
  }
  if (!traced) {
    throw NumericalError("no test instance admits a bisection trace");
  }

  Table table;
  table.columns = {"iteration", "width", "g_midpoint", "g_upper"};
  for (const BisectionTraceRow& row : trace) {
    table.rows.push_back({static_cast<long long>(row.iteration), row.width,
                          row.g_midpoint, row.g_upper});
  }
  return table;
}

Table records_to_table(const std::vector<SweepRecord>& records) {
  Table table;
  table.columns = {"beta", "p", "realization", "metric", "value"};
  for (const SweepRecord& record : records) {
    table.rows.push_back({record.beta, record.p, record.realization,
                          record.metric, record.value});
  }
  return table;
}

}  // namespace psvm
