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

#include "psvm/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "psvm/errors.hpp"
#include "psvm/rng.hpp"

namespace psvm {
namespace {

constexpr int kWdbcFeatureCount = 30;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_double_field(std::string_view field, std::size_t line_number,
                          std::size_t column) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_number) + ", field " +
                    std::to_string(column + 1) + ": not a finite number: '" +
                    std::string(field) + "'");
  }
  return value;
}

}  // namespace

void Dataset::validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw DataError("dataset has " + std::to_string(features.rows()) +
                    " rows but " + std::to_string(labels.size()) + " labels");
  }
  if (!feature_names.empty() &&
      static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
    throw DataError("dataset has " + std::to_string(features.cols()) +
                    " columns but " + std::to_string(feature_names.size()) +
                    " feature names");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      throw DataError("label at row " + std::to_string(i + 1) +
                      " is " + std::to_string(labels[i]) + ", expected +-1");
    }
  }
  if (!features.allFinite()) {
    throw DataError("dataset contains non-finite feature values");
  }
}

Dataset load_wdbc(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open dataset file: " + path.string());
  }

  std::vector<std::array<double, kWdbcFeatureCount>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() != kWdbcFeatureCount + 2) {
      throw DataError("line " + std::to_string(line_number) + ": expected " +
                      std::to_string(kWdbcFeatureCount + 2) +
                      " comma-separated fields, found " +
                      std::to_string(fields.size()));
    }
    const std::string_view diagnosis = fields[1];
    int label = 0;
    if (diagnosis == "M") {
      label = 1;
    } else if (diagnosis == "B") {
      label = -1;
    } else {
      throw DataError("line " + std::to_string(line_number) +
                      ": unknown diagnosis '" + std::string(diagnosis) +
                      "', expected M or B");
    }
    std::array<double, kWdbcFeatureCount> row;
    for (int j = 0; j < kWdbcFeatureCount; ++j) {
      row[j] = parse_double_field(fields[j + 2], line_number, j + 2);
    }
    rows.push_back(row);
    labels.push_back(label);
  }
  if (rows.empty()) {
    throw DataError("dataset file has no instances: " + path.string());
  }

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()),
                       kWdbcFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < kWdbcFeatureCount; ++j) {
      data.features(static_cast<Eigen::Index>(i), j) = rows[i][j];
    }
  }
  data.labels = std::move(labels);
  data.validate();
  return data;
}

NormalizationParams fit_normalizer(const Dataset& data) {
  data.validate();
  if (data.size() == 0) {
    throw DataError("cannot fit normalizer on an empty dataset");
  }
  NormalizationParams params;
  params.mean = data.features.colwise().mean();
  const Eigen::MatrixXd centered =
      data.features.rowwise() - params.mean.transpose();
  params.stddev =
      (centered.array().square().colwise().mean()).sqrt().transpose();
  for (Eigen::Index j = 0; j < params.stddev.size(); ++j) {
    if (!(params.stddev(j) > 0.0)) {
      throw DataError("feature column " + std::to_string(j) +
                      " has zero variance; normalization is undefined");
    }
  }
  return params;
}

Dataset apply_normalizer(const Dataset& data,
                         const NormalizationParams& params) {
  if (params.mean.size() != data.dim() ||
      params.stddev.size() != data.dim()) {
    throw DataError("normalizer dimension " +
                    std::to_string(params.mean.size()) +
                    " does not match dataset dimension " +
                    std::to_string(data.dim()));
  }
  Dataset out;
  out.features = (data.features.rowwise() - params.mean.transpose())
                     .array()
                     .rowwise() /
                 params.stddev.transpose().array();
  out.labels = data.labels;
  out.feature_names = data.feature_names;
  return out;
}

Eigen::VectorXd denormalize(const Eigen::VectorXd& x,
                            const NormalizationParams& params) {
  if (x.size() != params.mean.size()) {
    throw DataError("vector dimension " + std::to_string(x.size()) +
                    " does not match normalizer dimension " +
                    std::to_string(params.mean.size()));
  }
  return (x.array() * params.stddev.array() + params.mean.array()).matrix();
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  data.validate();
  const Eigen::Index n = data.size();
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw DataError("train_fraction must lie in (0, 1), got " +
                    std::to_string(spec.train_fraction));
  }
  const auto n_train = static_cast<Eigen::Index>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  if (n_train <= 0 || n_train >= n) {
    throw DataError("split of " + std::to_string(n) +
                    " instances at fraction " +
                    std::to_string(spec.train_fraction) +
                    " leaves an empty side");
  }

  // Seeded Fisher-Yates permutation of row indices.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const std::uint64_t seed = derive_seed(spec.seed, kStreamSplit);
  std::uint64_t draw = 0;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(
        bounded(rng_word(seed, draw++), static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }

  const auto take = [&](Eigen::Index begin, Eigen::Index count) {
    Dataset part;
    part.features.resize(count, data.dim());
    part.labels.resize(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
      const Eigen::Index src = order[static_cast<std::size_t>(begin + i)];
      part.features.row(i) = data.features.row(src);
      part.labels[static_cast<std::size_t>(i)] =
          data.labels[static_cast<std::size_t>(src)];
    }
    part.feature_names = data.feature_names;
    return part;
  };
  return {take(0, n_train), take(n_train, n - n_train)};
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path,
                       bool header) {
  data.validate();
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot open output file: " + path.string());
  }
  std::ostringstream buffer;
  if (header) {
    buffer << "label";
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      buffer << ',';
      if (data.feature_names.empty()) {
        buffer << 'f' << (j + 1);
      } else {
        buffer << data.feature_names[static_cast<std::size_t>(j)];
      }
    }
    buffer << '\n';
  }
  buffer.precision(17);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    buffer << data.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      buffer << ',' << data.features(i, j);
    }
    buffer << '\n';
  }
  out << buffer.str();
  if (!out) {
    throw DataError("failed to write dataset to " + path.string());
  }
}

}  // namespace psvm
