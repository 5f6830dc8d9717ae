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

#include "psvm/dataset.hpp"
#include "psvm/feature_map.hpp"
#include "psvm/svm.hpp"

namespace psvm {

// Parameters of the additive output perturbation.  `seed` drives the noise
// draw; it is part of the in-memory state only and is never serialized with
// a release (publishing it would let anyone subtract the noise).
struct NoiseSpec {
  double lambda = 0.0;  // Laplace scale per coordinate
  double beta = 0.0;    // differential-privacy budget the scale was set for
  std::uint64_t seed = 0;
};

// A privately releasable classifier: noisy weights plus the public
// parameters (lambda, beta, feature map).  The exact weights and dual
// variables of the underlying model are deliberately absent.
struct PrivateRelease {
  Eigen::VectorXd w_tilde;
  NoiseSpec noise;
  FeatureMap map;
};

// `count` i.i.d. Laplace(0, lambda) draws by inverse-CDF sampling; draw i
// is a pure function of (seed, i).
[[nodiscard]] Eigen::VectorXd laplace_sample(double lambda, int count,
                                             std::uint64_t seed);

// Smallest per-coordinate scale that makes weight release beta-private:
//   lambda = 4 * C * kappa * sqrt(F) / (beta * n).
// C = 0 is allowed (the model ignores the data, so lambda = 0 suffices).
[[nodiscard]] double calibrate_lambda(double C, double kappa, int F,
                                      double beta, int n);

// Largest scale at which the noisy classifier stays (epsilon, delta)-useful:
//   lambda <= epsilon / (2 * phi_max * (F - ln(delta))).
[[nodiscard]] double usefulness_max_lambda(double epsilon, double delta,
                                           double phi_max, int F);

// Releases w_tilde = w* + mu with mu_i ~ Laplace(0, lambda) and lambda
// calibrated for `beta`.  Identity maps need `identity_domain_radius`
// (a bound on ||x|| over the training domain) to obtain kappa; random
// Fourier maps ignore it.
[[nodiscard]] PrivateRelease privatize(const SvmModel& model, double beta,
                                       std::uint64_t seed,
                                       double identity_domain_radius = 0.0);

// Empirical check of the privacy inequality on a neighboring dataset pair.
struct DpCheckReport {
  int probes = 0;            // points where the density ratio was evaluated
  int violations = 0;        // probes with |log ratio| above the bound
  double max_abs_log_ratio = 0.0;  // largest |log ratio| seen at a probe
  double sup_log_ratio = 0.0;      // analytic supremum ||w1 - w2||_1 / lambda
  double log_bound = 0.0;          // beta + log(1 + tolerance)
  double sensitivity_l1 = 0.0;     // ||w1 - w2||_1
  bool passed = false;
};

// Trains on both datasets (which must differ in exactly one instance),
// then compares the log-density ratio of the two release distributions at
// `probes` points sampled from an even mixture of the two, plus the exact
// supremum ||w1 - w2||_1 / lambda.  `passed` means no probe exceeded
// beta + log(1 + tolerance).
[[nodiscard]] DpCheckReport dp_inequality_check(
    double beta, double lambda, const Dataset& data1, const Dataset& data2,
    const FeatureMap& map, const SvmConfig& config, int probes,
    std::uint64_t seed = 0, double tolerance = 1e-9);

}  // namespace psvm
