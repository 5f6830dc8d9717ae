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

// Command line front end.  Exit codes: 0 success, 1 usage error, 2 data
// error (unreadable/malformed inputs), 3 numerical failure (solver or
// algorithm preconditions).

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "psvm/dataset.hpp"
#include "psvm/errors.hpp"
#include "psvm/experiments.hpp"
#include "psvm/explanations.hpp"
#include "psvm/privacy.hpp"
#include "psvm/rng.hpp"
#include "psvm/serialization.hpp"
#include "psvm/svm.hpp"
#include "psvm/table.hpp"

namespace {

using psvm::Json;

psvm::ExperimentConfig load_config(const std::string& config_path) {
  psvm::ExperimentConfig config =
      psvm::experiment_config_from_json(psvm::read_json_file(config_path));
  // Relative dataset paths are taken relative to the config file, so a
  // config can be invoked from any working directory.
  if (config.dataset_path.is_relative()) {
    config.dataset_path =
        std::filesystem::path(config_path).parent_path() /
        config.dataset_path;
  }
  return config;
}

// The data pipeline shared by subcommands that do not need a trained
// model: load, split, normalize with training-side statistics.
struct Splits {
  psvm::Dataset train;
  psvm::Dataset test;
  psvm::Dataset train_raw;
  psvm::Dataset test_raw;
  psvm::NormalizationParams normalizer;
};

Splits make_splits(const psvm::ExperimentConfig& config) {
  const psvm::Dataset full = psvm::load_wdbc(config.dataset_path);
  auto [train_raw, test_raw] = psvm::split(full, config.split);
  Splits splits;
  splits.normalizer = psvm::fit_normalizer(train_raw);
  splits.train = psvm::apply_normalizer(train_raw, splits.normalizer);
  splits.test = psvm::apply_normalizer(test_raw, splits.normalizer);
  splits.train_raw = std::move(train_raw);
  splits.test_raw = std::move(test_raw);
  return splits;
}

psvm::EmitFormat parse_format(const std::string& format) {
  return format == "json" ? psvm::EmitFormat::kJson : psvm::EmitFormat::kCsv;
}

struct SweepOverrides {
  std::optional<std::uint64_t> master_seed;
  std::optional<int> realizations;
  std::optional<int> sample_size;

  void apply(psvm::ExperimentConfig& config) const {
    if (master_seed) config.master_seed = *master_seed;
    if (realizations) config.noise_realizations = *realizations;
    if (sample_size) config.sample_size = *sample_size;
    config.validate();
  }
};

int run_train(const std::string& config_path, const std::string& out_path,
              bool include_alphas) {
  const psvm::ExperimentConfig config = load_config(config_path);
  const psvm::PreparedExperiment prepared = psvm::prepare_experiment(config);
  Json j = psvm::to_json(prepared.model, include_alphas);
  j["train_accuracy"] =
      psvm::accuracy(prepared.model.weights, prepared.map, prepared.train);
  j["test_accuracy"] = prepared.baseline_accuracy;
  psvm::write_json_file(out_path, j);
  return 0;
}

int run_privatize(const std::string& config_path,
                  const std::string& model_path, const std::string& out_path,
                  std::optional<double> beta,
                  std::optional<std::uint64_t> seed) {
  const psvm::ExperimentConfig config = load_config(config_path);
  const psvm::SvmModel model =
      psvm::svm_model_from_json(psvm::read_json_file(model_path));
  double domain_radius = 0.0;
  if (model.map.kind == psvm::MapKind::kIdentity) {
    domain_radius =
        make_splits(config).train.features.rowwise().norm().maxCoeff();
  }
  const double budget = beta.value_or(config.beta_default);
  const std::uint64_t noise_seed =
      seed.value_or(psvm::derive_seed(config.master_seed, psvm::kStreamNoise,
                                      0));
  const psvm::PrivateRelease release =
      psvm::privatize(model, budget, noise_seed, domain_radius);
  psvm::write_json_file(out_path, psvm::to_json(release));
  return 0;
}

int run_explain(const std::string& config_path,
                const std::string& release_path, const std::string& out_path,
                int index, std::optional<double> confidence,
                const std::string& method) {
  const psvm::ExperimentConfig config = load_config(config_path);
  const psvm::PrivateRelease release =
      psvm::private_release_from_json(psvm::read_json_file(release_path));
  const Splits splits = make_splits(config);
  if (index < 0 || index >= splits.test.size()) {
    throw psvm::DataError("test index " + std::to_string(index) +
                          " out of range; test split has " +
                          std::to_string(splits.test.size()) + " instances");
  }
  const Eigen::VectorXd x_prime = splits.test.features.row(index).transpose();

  const bool nonrobust = method == "nonrobust";
  const double p =
      nonrobust ? 0.5 : confidence.value_or(config.p_default);
  const psvm::ExplanationRequest request =
      psvm::make_request(release, x_prime, p);

  psvm::Explanation explanation;
  if (release.map.kind == psvm::MapKind::kIdentity) {
    explanation = nonrobust || p == 0.5
                      ? psvm::explain_nonrobust_linear(request, release)
                      : psvm::explain_robust_linear(request, release);
  } else {
    const psvm::PrototypeSet prototypes = psvm::make_prototypes(
        splits.train, release, p,
        psvm::derive_seed(config.master_seed, psvm::kStreamPrototypes,
                          static_cast<std::uint64_t>(index)),
        config.prototype_retry_budget);
    explanation = psvm::explain_robust_bisection(request, release, prototypes,
                                                 config.bisection);
  }

  Json j = psvm::to_json(request, explanation);
  // Feature deltas in raw (un-normalized) units, the scale a reader of the
  // original data understands.
  const Eigen::VectorXd x_raw =
      psvm::denormalize(explanation.x, splits.normalizer);
  const Eigen::VectorXd x_prime_raw =
      splits.test_raw.features.row(index).transpose();
  Json deltas = Json::array();
  for (Eigen::Index jdx = 0; jdx < x_raw.size(); ++jdx) {
    Json d;
    d["index"] = jdx;
    d["raw_change"] = x_raw(jdx) - x_prime_raw(jdx);
    if (x_prime_raw(jdx) != 0.0) {
      d["relative_change"] = (x_raw(jdx) - x_prime_raw(jdx)) / x_prime_raw(jdx);
    } else {
      d["relative_change"] = nullptr;
    }
    deltas.push_back(std::move(d));
  }
  j["feature_deltas"] = std::move(deltas);
  psvm::write_json_file(out_path, j);
  return 0;
}

int run_validate(const std::string& release_path,
                 const std::string& explanation_path,
                 const std::string& out_path, int trials,
                 std::uint64_t seed) {
  const psvm::PrivateRelease release =
      psvm::private_release_from_json(psvm::read_json_file(release_path));
  const Json e = psvm::read_json_file(explanation_path);
  Eigen::VectorXd x(e.at("x").size());
  Eigen::Index i = 0;
  for (const auto& entry : e.at("x")) x(i++) = entry.get<double>();
  const int y_prime = e.at("y_prime").get<int>();
  const double requested = e.at("p").get<double>();

  const double empirical =
      psvm::validate_chance_constraint(x, release, y_prime, trials, seed);
  Json j;
  j["empirical_probability"] = empirical;
  j["requested_confidence"] = requested;
  j["trials"] = trials;
  j["seed"] = seed;
  j["satisfied"] = empirical >= requested;
  psvm::write_json_file(out_path, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Differentially private SVM training with noise-robust counterfactual "
      "explanations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string model_path;
  std::string release_path;
  std::string explanation_path;
  std::string format = "csv";
  std::string method = "auto";
  bool include_alphas = false;
  int index = -1;
  int trials = 100000;
  std::uint64_t validate_seed = 0;
  std::optional<double> beta;
  std::optional<double> confidence;
  std::optional<std::uint64_t> noise_seed;
  SweepOverrides overrides;

  const auto add_common = [&](CLI::App* cmd, bool with_format) {
    cmd->add_option("--config", config_path, "Experiment config JSON file")
        ->required();
    cmd->add_option("--out", out_path, "Output file path")->required();
    if (with_format) {
      cmd->add_option("--format", format, "Output format")
          ->check(CLI::IsMember({"csv", "json"}));
    }
  };
  const auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--seed", overrides.master_seed,
                    "Override the config master seed");
    cmd->add_option("--realizations", overrides.realizations,
                    "Override the number of noise realizations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--sample-size", overrides.sample_size,
                    "Override the per-cell explanation sample size");
  };

  CLI::App* train = app.add_subcommand(
      "train", "Train the exact (non-private) model and store it");
  add_common(train, false);
  train->add_flag("--include-alphas", include_alphas,
                  "Store the dual variables alongside the weights");

  CLI::App* privatize = app.add_subcommand(
      "privatize", "Release a trained model with calibrated Laplace noise");
  add_common(privatize, false);
  privatize->add_option("--model", model_path, "Trained model JSON file")
      ->required();
  privatize->add_option("--beta", beta, "Privacy budget")
      ->check(CLI::PositiveNumber);
  privatize->add_option("--noise-seed", noise_seed, "Noise draw seed");

  CLI::App* explain = app.add_subcommand(
      "explain", "Counterfactual explanation for one test instance");
  add_common(explain, false);
  explain->add_option("--release", release_path, "Release JSON file")
      ->required();
  explain->add_option("--index", index, "Test-set row to explain")
      ->required()
      ->check(CLI::NonNegativeNumber);
  explain->add_option("--p", confidence,
                      "Confidence the explanation must hold with");
  explain->add_option("--method", method, "Explanation method")
      ->check(CLI::IsMember({"auto", "robust", "nonrobust"}));

  CLI::App* validate = app.add_subcommand(
      "validate",
      "Monte Carlo check of an explanation against fresh release noise");
  validate->add_option("--release", release_path, "Release JSON file")
      ->required();
  validate
      ->add_option("--explanation", explanation_path, "Explanation JSON file")
      ->required();
  validate->add_option("--out", out_path, "Output file path")->required();
  validate->add_option("--trials", trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber);
  validate->add_option("--seed", validate_seed, "Monte Carlo seed");

  CLI::App* sweep_accuracy = app.add_subcommand(
      "sweep-accuracy", "Released-model accuracy across the beta grid");
  add_common(sweep_accuracy, true);
  add_overrides(sweep_accuracy);

  CLI::App* sweep_distance_beta = app.add_subcommand(
      "sweep-distance-beta",
      "Explanation distance across the beta grid at the default confidence");
  add_common(sweep_distance_beta, true);
  add_overrides(sweep_distance_beta);

  CLI::App* sweep_distance_p = app.add_subcommand(
      "sweep-distance-p",
      "Explanation distance across the confidence grid at the default beta");
  add_common(sweep_distance_p, true);
  add_overrides(sweep_distance_p);

  CLI::App* violation_stats = app.add_subcommand(
      "violation-stats",
      "Margins of released-model explanations against the exact model");
  add_common(violation_stats, true);
  add_overrides(violation_stats);

  CLI::App* trace = app.add_subcommand(
      "trace-convergence", "Per-iteration bisection trace for one instance");
  add_common(trace, true);
  trace->add_option("--index", index,
                    "Test-set row to trace (default: first usable)");
  add_overrides(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(train)) {
      return run_train(config_path, out_path, include_alphas);
    }
    if (app.got_subcommand(privatize)) {
      return run_privatize(config_path, model_path, out_path, beta,
                           noise_seed);
    }
    if (app.got_subcommand(explain)) {
      return run_explain(config_path, release_path, out_path, index,
                         confidence, method);
    }
    if (app.got_subcommand(validate)) {
      return run_validate(release_path, explanation_path, out_path, trials,
                          validate_seed);
    }

    psvm::ExperimentConfig config = load_config(config_path);
    overrides.apply(config);
    const psvm::EmitFormat emit_format = parse_format(format);
    if (app.got_subcommand(sweep_accuracy)) {
      psvm::emit(psvm::records_to_table(psvm::run_accuracy_sweep(config)),
                 out_path, emit_format);
    } else if (app.got_subcommand(sweep_distance_beta)) {
      psvm::emit(
          psvm::records_to_table(psvm::run_distance_sweep_beta(config)),
          out_path, emit_format);
    } else if (app.got_subcommand(sweep_distance_p)) {
      psvm::emit(psvm::records_to_table(psvm::run_distance_sweep_p(config)),
                 out_path, emit_format);
    } else if (app.got_subcommand(violation_stats)) {
      psvm::emit(psvm::records_to_table(psvm::run_violation_stats(config)),
                 out_path, emit_format);
    } else if (app.got_subcommand(trace)) {
      psvm::emit(psvm::run_convergence_trace(config, index), out_path,
                 emit_format);
    }
    return 0;
  } catch (const psvm::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const psvm::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
