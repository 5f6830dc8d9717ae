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

#include <filesystem>
#include <nlohmann/json.hpp>

#include "psvm/experiments.hpp"

namespace psvm {

// Key order is fixed, so serializing equal values produces equal bytes.
using Json = nlohmann::ordered_json;

// Feature maps are stored by recipe (kind, shape, gamma, seed), never by
// their frequency matrix; loading regenerates the matrix from the seed.
[[nodiscard]] Json to_json(const FeatureMap& map);
[[nodiscard]] FeatureMap feature_map_from_json(const Json& j);

[[nodiscard]] Json to_json(const SvmModel& model, bool include_alphas = false);
[[nodiscard]] SvmModel svm_model_from_json(const Json& j);

// A release serializes exactly the public information: noisy weights,
// noise scale, budget, and the feature-map recipe.  The exact weights,
// dual variables, and the noise seed are never written; any of them would
// let a reader undo the perturbation.
[[nodiscard]] Json to_json(const PrivateRelease& release);
[[nodiscard]] PrivateRelease private_release_from_json(const Json& j);

[[nodiscard]] Json to_json(const ExplanationRequest& request,
                           const Explanation& explanation);

[[nodiscard]] Json to_json(const ExperimentConfig& config);
// Missing keys fall back to defaults; unknown keys are rejected.
[[nodiscard]] ExperimentConfig experiment_config_from_json(const Json& j);

[[nodiscard]] Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace psvm
