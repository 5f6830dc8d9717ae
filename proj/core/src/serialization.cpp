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

#include "psvm/serialization.hpp"

#include <fstream>
#include <set>
#include <string>

#include "psvm/errors.hpp"

namespace psvm {
namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json array = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) array.push_back(v(i));
  return array;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  Eigen::VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& entry : j) v(i++) = entry.get<double>();
  return v;
}

std::string kind_to_string(MapKind kind) {
  return kind == MapKind::kIdentity ? "identity" : "random_fourier";
}

MapKind kind_from_string(const std::string& kind) {
  if (kind == "identity") return MapKind::kIdentity;
  if (kind == "random_fourier") return MapKind::kRandomFourier;
  throw DataError("unknown feature map kind: '" + kind + "'");
}

std::string method_to_string(ExplanationMethod method) {
  switch (method) {
    case ExplanationMethod::kNonRobustClosedForm:
      return "non_robust_closed_form";
    case ExplanationMethod::kRobustConeProjection:
      return "robust_cone_projection";
    case ExplanationMethod::kRobustBisection:
      return "robust_bisection";
  }
  throw DataError("unknown explanation method");
}

void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed,
                         const std::string& what) {
  for (const auto& [key, value] : j.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw DataError("unknown key '" + key + "' in " + what);
    }
  }
}

// Rethrows nlohmann type/access errors as DataError with context.
template <typename Fn>
auto with_context(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw DataError("invalid " + what + ": " + e.what());
  }
}

}  // namespace

Json to_json(const FeatureMap& map) {
  Json j;
  j["kind"] = kind_to_string(map.kind);
  j["input_dim"] = map.input_dim;
  j["output_dim"] = map.output_dim;
  if (map.kind == MapKind::kRandomFourier) {
    j["gamma"] = map.gamma;
    j["seed"] = map.seed;
  }
  return j;
}

FeatureMap feature_map_from_json(const Json& j) {
  return with_context("feature map JSON", [&] {
    reject_unknown_keys(j, {"kind", "input_dim", "output_dim", "gamma", "seed"},
                        "feature map JSON");
    const MapKind kind = kind_from_string(j.at("kind").get<std::string>());
    const int input_dim = j.at("input_dim").get<int>();
    if (kind == MapKind::kIdentity) {
      FeatureMap map = make_identity_map(input_dim);
      if (j.contains("output_dim") &&
          j.at("output_dim").get<int>() != map.output_dim) {
        throw DataError("identity map output_dim must equal input_dim");
      }
      return map;
    }
    return make_random_fourier_map(input_dim, j.at("output_dim").get<int>(),
                                   j.at("gamma").get<double>(),
                                   j.at("seed").get<std::uint64_t>());
  });
}

Json to_json(const SvmModel& model, bool include_alphas) {
  Json j;
  j["weights"] = vector_to_json(model.weights);
  j["C"] = model.config.C;
  j["tol"] = model.config.tol;
  j["max_sweeps"] = model.config.max_sweeps;
  j["n_train"] = model.alphas.size();
  j["map"] = to_json(model.map);
  if (include_alphas) {
    j["alphas"] = vector_to_json(model.alphas);
  }
  return j;
}

SvmModel svm_model_from_json(const Json& j) {
  return with_context("model JSON", [&] {
    // train_accuracy / test_accuracy are report-only keys the CLI adds.
    reject_unknown_keys(j,
                        {"weights", "C", "tol", "max_sweeps", "n_train", "map",
                         "alphas", "train_accuracy", "test_accuracy"},
                        "model JSON");
    SvmModel model;
    model.weights = vector_from_json(j.at("weights"));
    model.config.C = j.at("C").get<double>();
    model.config.tol = j.at("tol").get<double>();
    model.config.max_sweeps = j.at("max_sweeps").get<int>();
    model.map = feature_map_from_json(j.at("map"));
    if (j.contains("alphas")) {
      model.alphas = vector_from_json(j.at("alphas"));
      if (j.at("n_train").get<Eigen::Index>() != model.alphas.size()) {
        throw DataError("model n_train disagrees with its alphas length");
      }
    } else {
      // Only the training size survives; it is what calibration needs.
      const auto n = j.at("n_train").get<Eigen::Index>();
      if (n <= 0) throw DataError("model n_train must be > 0");
      model.alphas = Eigen::VectorXd::Zero(n);
    }
    if (model.weights.size() != model.map.output_dim) {
      throw DataError("model weights length disagrees with its feature map");
    }
    return model;
  });
}

Json to_json(const PrivateRelease& release) {
  Json j;
  j["w_tilde"] = vector_to_json(release.w_tilde);
  j["lambda"] = release.noise.lambda;
  j["beta"] = release.noise.beta;
  j["map"] = to_json(release.map);
  return j;
}

PrivateRelease private_release_from_json(const Json& j) {
  return with_context("release JSON", [&] {
    reject_unknown_keys(j, {"w_tilde", "lambda", "beta", "map"},
                        "release JSON");
    PrivateRelease release;
    release.w_tilde = vector_from_json(j.at("w_tilde"));
    release.noise.lambda = j.at("lambda").get<double>();
    release.noise.beta = j.at("beta").get<double>();
    release.noise.seed = 0;  // never serialized
    release.map = feature_map_from_json(j.at("map"));
    if (release.w_tilde.size() != release.map.output_dim) {
      throw DataError("release w_tilde length disagrees with its feature map");
    }
    if (!(release.noise.lambda >= 0.0)) {
      throw DataError("release lambda must be >= 0");
    }
    return release;
  });
}

Json to_json(const ExplanationRequest& request,
             const Explanation& explanation) {
  Json j;
  j["x"] = vector_to_json(explanation.x);
  j["x_prime"] = vector_to_json(request.x_prime);
  j["y_prime"] = request.y_prime;
  j["p"] = request.confidence;
  j["method"] = method_to_string(explanation.method);
  j["distance"] = explanation.distance;
  j["g_value"] = explanation.g_value;
  j["iterations"] = explanation.iterations;
  return j;
}

Json to_json(const ExperimentConfig& config) {
  Json j;
  j["dataset_path"] = config.dataset_path.generic_string();
  j["split"] = Json{{"train_fraction", config.split.train_fraction},
                    {"seed", config.split.seed}};
  j["svm"] = Json{{"C", config.svm.C},
                  {"tol", config.svm.tol},
                  {"max_sweeps", config.svm.max_sweeps}};
  j["map"] = Json{{"kind", kind_to_string(config.map.kind)},
                  {"output_dim", config.map.output_dim},
                  {"gamma", config.map.gamma},
                  {"seed", config.map.seed}};
  j["beta_grid"] = config.beta_grid;
  j["p_grid"] = config.p_grid;
  j["noise_realizations"] = config.noise_realizations;
  j["beta_default"] = config.beta_default;
  j["p_default"] = config.p_default;
  j["master_seed"] = config.master_seed;
  j["sample_size"] = config.sample_size;
  j["bisection"] = Json{{"epsilon", config.bisection.epsilon},
                        {"max_iterations", config.bisection.max_iterations}};
  j["prototype_retry_budget"] = config.prototype_retry_budget;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  return with_context("experiment config JSON", [&] {
    reject_unknown_keys(
        j,
        {"dataset_path", "split", "svm", "map", "beta_grid", "p_grid",
         "noise_realizations", "beta_default", "p_default", "master_seed",
         "sample_size", "bisection", "prototype_retry_budget"},
        "experiment config JSON");
    ExperimentConfig config;
    config.dataset_path = j.at("dataset_path").get<std::string>();
    if (j.contains("split")) {
      const Json& s = j.at("split");
      reject_unknown_keys(s, {"train_fraction", "seed"}, "split config");
      config.split.train_fraction =
          s.value("train_fraction", config.split.train_fraction);
      config.split.seed = s.value("seed", config.split.seed);
    }
    if (j.contains("svm")) {
      const Json& s = j.at("svm");
      reject_unknown_keys(s, {"C", "tol", "max_sweeps"}, "svm config");
      config.svm.C = s.value("C", config.svm.C);
      config.svm.tol = s.value("tol", config.svm.tol);
      config.svm.max_sweeps = s.value("max_sweeps", config.svm.max_sweeps);
    }
    if (j.contains("map")) {
      const Json& m = j.at("map");
      reject_unknown_keys(m, {"kind", "output_dim", "gamma", "seed"},
                          "map config");
      if (m.contains("kind")) {
        config.map.kind = kind_from_string(m.at("kind").get<std::string>());
      }
      config.map.output_dim = m.value("output_dim", config.map.output_dim);
      if (m.contains("gamma") && !m.at("gamma").is_null()) {
        config.map.gamma = m.at("gamma").get<double>();
      }
      config.map.seed = m.value("seed", config.map.seed);
    }
    if (j.contains("beta_grid")) {
      config.beta_grid = j.at("beta_grid").get<std::vector<double>>();
    }
    if (j.contains("p_grid")) {
      config.p_grid = j.at("p_grid").get<std::vector<double>>();
    }
    config.noise_realizations =
        j.value("noise_realizations", config.noise_realizations);
    config.beta_default = j.value("beta_default", config.beta_default);
    config.p_default = j.value("p_default", config.p_default);
    config.master_seed = j.value("master_seed", config.master_seed);
    config.sample_size = j.value("sample_size", config.sample_size);
    if (j.contains("bisection")) {
      const Json& b = j.at("bisection");
      reject_unknown_keys(b, {"epsilon", "max_iterations"},
                          "bisection config");
      config.bisection.epsilon =
          b.value("epsilon", config.bisection.epsilon);
      config.bisection.max_iterations =
          b.value("max_iterations", config.bisection.max_iterations);
    }
    config.prototype_retry_budget =
        j.value("prototype_retry_budget", config.prototype_retry_budget);
    config.validate();
    return config;
  });
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open JSON file: " + path.string());
  }
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError("cannot parse JSON file " + path.string() + ": " +
                    e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open output file: " + path.string());
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw DataError("failed to write JSON to " + path.string());
  }
}

}  // namespace psvm
