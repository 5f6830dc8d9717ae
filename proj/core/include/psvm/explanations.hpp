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
#include <vector>

#include "psvm/dataset.hpp"
#include "psvm/privacy.hpp"

namespace psvm {

// A counterfactual query: the instance to explain, the released
// classifier's prediction for it, and the confidence the explanation must
// survive the release noise with.
struct ExplanationRequest {
  Eigen::VectorXd x_prime;
  int y_prime = 1;       // released prediction for x_prime
  double confidence = 0.9;  // p in [1/2, 1)
};

// Builds a request against a release: y_prime is the released prediction,
// p is validated to lie in [1/2, 1).
[[nodiscard]] ExplanationRequest make_request(const PrivateRelease& release,
                                              const Eigen::VectorXd& x_prime,
                                              double confidence);

enum class ExplanationMethod {
  kNonRobustClosedForm,   // hyperplane projection against w_tilde
  kRobustConeProjection,  // exact projection onto the robust cone (identity)
  kRobustBisection,       // prototype-seeded line search (any map)
};

struct Explanation {
  Eigen::VectorXd x;        // the counterfactual
  ExplanationMethod method = ExplanationMethod::kNonRobustClosedForm;
  double distance = 0.0;    // ||x - x_prime||
  double g_value = 0.0;     // robust constraint value at x
  int iterations = 0;       // bisection steps; 0 for closed forms
  // Set when the robust constraint admits no point but the origin
  // (noise dominates the released weights at this confidence).
  bool origin_only = false;
};

// One representative per class, each robustly classified as its own class
// under the release.
struct PrototypeSet {
  Eigen::VectorXd z_plus;   // class +1
  Eigen::VectorXd z_minus;  // class -1

  [[nodiscard]] const Eigen::VectorXd& for_class(int label) const {
    return label > 0 ? z_plus : z_minus;
  }
};

struct BisectionConfig {
  double epsilon = 1e-6;  // terminate when the bracket is this short
  int max_iterations = 1000;
  // When true, return the last midpoint (which may sit on the wrong side
  // of the constraint) instead of the certified upper bound.
  bool return_last_midpoint = false;
};

struct BisectionTraceRow {
  int iteration = 0;     // 1-based
  double width = 0.0;    // bracket length at the start of the iteration
  double g_midpoint = 0.0;
  double g_upper = 0.0;  // g at the feasible end after the iteration
};

// Safety margin r(p) = -lambda * sqrt(2) * ln(2 * (1 - p)) >= 0 for
// p in [1/2, 1); converts the chance constraint into a deterministic one.
[[nodiscard]] double robust_coefficient(double confidence, double lambda);

// Robust constraint value
//   g(x) = y_prime * phi(x) . w_tilde + r(p) * ||phi(x)||;
// g(x) <= 0 certifies that x flips the prediction with probability >= p
// under the release's noise model.
[[nodiscard]] double g(const Eigen::VectorXd& x, const PrivateRelease& release,
                       int y_prime, double confidence);

// Nearest point with y_prime * x . w_tilde <= 0: x_prime itself when it
// already satisfies the constraint, otherwise the projection onto the
// released hyperplane.  Identity maps only.
[[nodiscard]] Explanation explain_nonrobust_linear(
    const ExplanationRequest& request, const PrivateRelease& release);

// Exact minimizer of ||x - x_prime|| subject to g(x) <= 0 for identity
// maps: projection onto the circular cone
//   {x : <x, c> >= (r / ||w_tilde||) * ||x||},  c = -y_prime * w_tilde / ||w_tilde||.
[[nodiscard]] Explanation explain_robust_linear(
    const ExplanationRequest& request, const PrivateRelease& release);

// Picks one robust representative per class: the class mean of the
// training data when it passes the confidence test
//   y * f(z) >= r(p) * ||phi(z)||  (with y * f(z) > 0),
// otherwise training instances by decreasing y * f(z), otherwise seeded
// perturbed copies of the mean.  Throws NumericalError, reporting the class
// and the best margin found, when the budget is exhausted.
[[nodiscard]] PrototypeSet make_prototypes(const Dataset& train,
                                           const PrivateRelease& release,
                                           double confidence,
                                           std::uint64_t seed = 0,
                                           int retry_budget = 1000);

// Bisects the segment from x_prime (g > 0 required) to the opposite-class
// prototype (g < 0 required) until the bracket is shorter than epsilon;
// returns the feasible end of the final bracket, so g(x) < 0 always holds
// for the returned point.  Works for any feature map.  When `trace` is
// non-null it receives one row per iteration.
[[nodiscard]] Explanation explain_robust_bisection(
    const ExplanationRequest& request, const PrivateRelease& release,
    const PrototypeSet& prototypes, const BisectionConfig& config,
    std::vector<BisectionTraceRow>* trace = nullptr);

// Monte Carlo estimate of Pr[y_prime * phi(x) . (w_tilde + mu) <= 0] with
// mu_i ~ Laplace(0, lambda) i.i.d. — the probability that x still flips
// the prediction under a fresh noise draw.  Draws are indexed, so results
// do not depend on evaluation order.
[[nodiscard]] double validate_chance_constraint(const Eigen::VectorXd& x,
                                                const PrivateRelease& release,
                                                int y_prime, int trials,
                                                std::uint64_t seed);

}  // namespace psvm
