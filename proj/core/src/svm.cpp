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

#include "psvm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psvm/errors.hpp"

namespace psvm {
namespace {

// Diagonal entries below this are treated as zero curvature; the 1-D
// subproblem is then linear and its maximum sits at a box corner.
constexpr double kCurvatureFloor = 1e-12;

void check_training_inputs(const Dataset& data, const FeatureMap& map,
                           const SvmConfig& config) {
  data.validate();
  if (data.size() == 0) {
    throw DataError("cannot train on an empty dataset");
  }
  if (data.dim() != map.input_dim) {
    throw DataError("dataset dimension " + std::to_string(data.dim()) +
                    " does not match feature map input dimension " +
                    std::to_string(map.input_dim));
  }
  if (!(config.C >= 0.0) || !std::isfinite(config.C)) {
    throw DataError("C must be finite and >= 0, got " +
                    std::to_string(config.C));
  }
  if (!(config.tol > 0.0)) {
    throw DataError("tol must be > 0, got " + std::to_string(config.tol));
  }
  if (config.max_sweeps <= 0) {
    throw DataError("max_sweeps must be > 0, got " +
                    std::to_string(config.max_sweeps));
  }
}

// KKT violation at one coordinate: how far the gradient points into the
// feasible box.  At an optimum every coordinate scores <= tol.
double kkt_violation(double alpha, double grad, double upper) {
  double v = 0.0;
  if (alpha < upper) v = std::max(v, grad);
  if (alpha > 0.0) v = std::max(v, -grad);
  return v;
}

}  // namespace

SvmModel train_dual(const Dataset& data, const FeatureMap& map,
                    const SvmConfig& config,
                    std::vector<double>* objective_trace) {
  check_training_inputs(data, map, config);

  const Eigen::Index n = data.size();
  const Eigen::MatrixXd phi = apply_all(map, data.features);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = static_cast<double>(data.labels[static_cast<std::size_t>(i)]);
  }

  const double upper = config.C / static_cast<double>(n);
  const bool use_gram = n <= config.gram_threshold;

  Eigen::MatrixXd gram;
  Eigen::VectorXd diag(n);
  if (use_gram) {
    gram = phi * phi.transpose();
    diag = gram.diagonal();
  } else {
    diag = phi.rowwise().squaredNorm();
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  // Cached margins f_i = sum_j a_j y_j K_ij; with the Gram matrix they are
  // updated incrementally, otherwise recomputed from the weight vector.
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(map.output_dim);

  if (objective_trace != nullptr) objective_trace->clear();

  double worst_violation = 0.0;
  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double fi = use_gram ? f(i) : phi.row(i).dot(w);
      const double grad = 1.0 - y(i) * fi;
      const double old = alpha(i);
      double next = old;
      if (diag(i) > kCurvatureFloor) {
        next = std::clamp(old + grad / diag(i), 0.0, upper);
      } else if (grad > 0.0) {
        next = upper;
      } else if (grad < 0.0) {
        next = 0.0;
      }
      if (next != old) {
        const double step = (next - old) * y(i);
        if (use_gram) {
          f += step * gram.col(i);
        } else {
          w += step * phi.row(i).transpose();
        }
        alpha(i) = next;
      }
    }

    if (!use_gram) {
      f = phi * w;
    }
    worst_violation = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      worst_violation = std::max(
          worst_violation, kkt_violation(alpha(i), 1.0 - y(i) * f(i), upper));
    }
    if (objective_trace != nullptr) {
      objective_trace->push_back(dual_objective(data, map, alpha));
    }
    if (worst_violation <= config.tol) {
      SvmModel model;
      model.weights = phi.transpose() * (alpha.array() * y.array()).matrix();
      model.alphas = std::move(alpha);
      model.config = config;
      model.map = map;
      return model;
    }
  }

  throw NumericalError(
      "dual coordinate ascent did not reach tolerance " +
      std::to_string(config.tol) + " within " +
      std::to_string(config.max_sweeps) +
      " sweeps; final KKT violation " + std::to_string(worst_violation));
}

double decision_value(const Eigen::VectorXd& weights, const FeatureMap& map,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (weights.size() != map.output_dim) {
    throw DataError("weight vector length " + std::to_string(weights.size()) +
                    " does not match feature map output dimension " +
                    std::to_string(map.output_dim));
  }
  return apply(map, x).dot(weights);
}

int classify(const Eigen::VectorXd& weights, const FeatureMap& map,
             const Eigen::Ref<const Eigen::VectorXd>& x) {
  return decision_value(weights, map, x) >= 0.0 ? 1 : -1;
}

double accuracy(const Eigen::VectorXd& weights, const FeatureMap& map,
                const Dataset& data) {
  data.validate();
  if (data.size() == 0) {
    throw DataError("cannot score an empty dataset");
  }
  if (weights.size() != map.output_dim) {
    throw DataError("weight vector length " + std::to_string(weights.size()) +
                    " does not match feature map output dimension " +
                    std::to_string(map.output_dim));
  }
  const Eigen::MatrixXd phi = apply_all(map, data.features);
  const Eigen::VectorXd scores = phi * weights;
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const int predicted = scores(i) >= 0.0 ? 1 : -1;
    if (predicted == data.labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double dual_objective(const Dataset& data, const FeatureMap& map,
                      const Eigen::VectorXd& alphas) {
  if (alphas.size() != data.size()) {
    throw DataError("alpha vector length " + std::to_string(alphas.size()) +
                    " does not match dataset size " +
                    std::to_string(data.size()));
  }
  const Eigen::MatrixXd phi = apply_all(map, data.features);
  Eigen::VectorXd signed_alphas(alphas.size());
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    signed_alphas(i) =
        alphas(i) * static_cast<double>(data.labels[static_cast<std::size_t>(i)]);
  }
  const Eigen::VectorXd w = phi.transpose() * signed_alphas;
  return alphas.sum() - 0.5 * w.squaredNorm();
}

}  // namespace psvm
