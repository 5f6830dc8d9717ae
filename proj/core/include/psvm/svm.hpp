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
#include <vector>

#include "psvm/dataset.hpp"
#include "psvm/feature_map.hpp"

namespace psvm {

// Bias-free hinge-loss SVM.  The decision function is f(x) = w . phi(x)
// with no intercept, so the dual has box constraints only:
//
//   max_a  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j phi(x_i) . phi(x_j)
//   s.t.   0 <= a_i <= C/n.
//
// The missing equality constraint is what makes plain coordinate ascent
// exact here: each coordinate subproblem is a clipped 1-D quadratic.
struct SvmConfig {
  double C = 1.0;         // total slack budget; per-point box is C/n
  double tol = 1e-6;      // max KKT violation allowed at convergence
  int max_sweeps = 10000; // full passes over the coordinates

  // Instances up to this size keep the full Gram matrix; larger problems
  // maintain the primal weight vector instead.
  Eigen::Index gram_threshold = 4096;
};

struct SvmModel {
  Eigen::VectorXd weights;  // w* = sum_i a_i y_i phi(x_i), length F
  Eigen::VectorXd alphas;   // dual solution, length n
  SvmConfig config;
  FeatureMap map;
};

// Trains by cyclic coordinate ascent on the dual.  Throws NumericalError,
// reporting the final KKT violation, if `tol` is not reached within
// `max_sweeps`.  When `objective_trace` is non-null it receives the dual
// objective after every sweep (non-decreasing by construction).
[[nodiscard]] SvmModel train_dual(const Dataset& data, const FeatureMap& map,
                                  const SvmConfig& config,
                                  std::vector<double>* objective_trace = nullptr);

// f(x) = weights . phi(x).
[[nodiscard]] double decision_value(const Eigen::VectorXd& weights,
                                    const FeatureMap& map,
                                    const Eigen::Ref<const Eigen::VectorXd>& x);

// sign(f(x)) with sign(0) = +1.
[[nodiscard]] int classify(const Eigen::VectorXd& weights, const FeatureMap& map,
                           const Eigen::Ref<const Eigen::VectorXd>& x);

// Fraction of instances whose predicted label matches the dataset label.
[[nodiscard]] double accuracy(const Eigen::VectorXd& weights,
                              const FeatureMap& map, const Dataset& data);

// Dual objective sum(a) - 1/2 ||sum_i a_i y_i phi(x_i)||^2 at an arbitrary
// feasible point; exposed so tests can compare against grid searches.
[[nodiscard]] double dual_objective(const Dataset& data, const FeatureMap& map,
                                    const Eigen::VectorXd& alphas);

}  // namespace psvm
