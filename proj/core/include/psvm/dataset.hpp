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

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace psvm {

// A labeled binary-classification sample.  Rows of `features` are
// instances; `labels[i]` is +1 or -1.
struct Dataset {
  Eigen::MatrixXd features;                // n x dim
  std::vector<int> labels;                 // size n, entries in {+1, -1}
  std::vector<std::string> feature_names;  // optional; empty or size dim

  [[nodiscard]] Eigen::Index size() const { return features.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return features.cols(); }

  // Throws DataError if labels/rows disagree, a label is not +-1, or a
  // feature value is not finite.
  void validate() const;
};

// Per-column affine normalization parameters.
struct NormalizationParams {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // population standard deviation, all entries > 0
};

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 42;
};

// Parses the Wisconsin diagnostic breast cancer file: one instance per
// line, `id,diagnosis,30 numeric features`, diagnosis M (malignant,
// label +1) or B (benign, label -1).  The id column is discarded.
[[nodiscard]] Dataset load_wdbc(const std::filesystem::path& path);

// Column means and population standard deviations.  Throws DataError if a
// column is constant, naming its index.
[[nodiscard]] NormalizationParams fit_normalizer(const Dataset& data);

// Applies (x - mean) / stddev column-wise.  Labels and names are copied.
[[nodiscard]] Dataset apply_normalizer(const Dataset& data,
                                       const NormalizationParams& params);

// Inverse of apply_normalizer: x * stddev + mean.
[[nodiscard]] Eigen::VectorXd denormalize(
    const Eigen::VectorXd& x, const NormalizationParams& params);

// Seeded shuffle split into (train, test).  The train side receives
// round(train_fraction * n) instances; both sides must be nonempty.
[[nodiscard]] std::pair<Dataset, Dataset> split(const Dataset& data,
                                                const SplitSpec& spec);

// Writes `label,f1,...,fdim` rows; header uses feature_names when present.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path,
                       bool header = true);

}  // namespace psvm
