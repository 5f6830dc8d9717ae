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

#include "psvm/privacy.hpp"

#include <cmath>
#include <string>

#include "psvm/errors.hpp"
#include "psvm/rng.hpp"

namespace psvm {

Eigen::VectorXd laplace_sample(double lambda, int count, std::uint64_t seed) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DataError("Laplace scale must be finite and > 0, got " +
                    std::to_string(lambda));
  }
  if (count < 0) {
    throw DataError("sample count must be >= 0, got " + std::to_string(count));
  }
  Eigen::VectorXd draws(count);
  for (int i = 0; i < count; ++i) {
    draws(i) =
        laplace_icdf(uniform01(seed, static_cast<std::uint64_t>(i)), lambda);
  }
  return draws;
}

double calibrate_lambda(double C, double kappa, int F, double beta, int n) {
  if (!(C >= 0.0) || !std::isfinite(C)) {
    throw DataError("C must be finite and >= 0, got " + std::to_string(C));
  }
  if (!(kappa > 0.0) || F <= 0 || n <= 0 || !(beta > 0.0)) {
    throw DataError("calibration needs kappa > 0, F > 0, beta > 0, n > 0");
  }
  return 4.0 * C * kappa * std::sqrt(static_cast<double>(F)) /
         (beta * static_cast<double>(n));
}

double usefulness_max_lambda(double epsilon, double delta, double phi_max,
                             int F) {
  if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || !(phi_max > 0.0) ||
      F <= 0) {
    throw DataError(
        "usefulness bound needs epsilon > 0, delta in (0, 1), phi_max > 0, "
        "F > 0");
  }
  return epsilon /
         (2.0 * phi_max * (static_cast<double>(F) - std::log(delta)));
}

PrivateRelease privatize(const SvmModel& model, double beta,
                         std::uint64_t seed, double identity_domain_radius) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DataError("privacy budget beta must be finite and > 0, got " +
                    std::to_string(beta));
  }
  if (model.weights.size() != model.map.output_dim) {
    throw DataError("model weight length does not match its feature map");
  }
  const MapBounds b = bounds(model.map, identity_domain_radius);
  const auto n = static_cast<int>(model.alphas.size());
  if (n <= 0) {
    throw DataError("model carries no dual variables; training size unknown");
  }
  const double lambda =
      calibrate_lambda(model.config.C, b.kappa, model.map.output_dim, beta, n);

  PrivateRelease release;
  release.noise = NoiseSpec{lambda, beta, seed};
  release.map = model.map;
  if (lambda > 0.0) {
    release.w_tilde =
        model.weights + laplace_sample(lambda, model.map.output_dim, seed);
  } else {
    release.w_tilde = model.weights;
  }
  return release;
}

DpCheckReport dp_inequality_check(double beta, double lambda,
                                  const Dataset& data1, const Dataset& data2,
                                  const FeatureMap& map,
                                  const SvmConfig& config, int probes,
                                  std::uint64_t seed, double tolerance) {
  if (!(beta > 0.0) || !(lambda > 0.0)) {
    throw DataError("dp check needs beta > 0 and lambda > 0");
  }
  if (probes <= 0) {
    throw DataError("dp check needs at least one probe");
  }
  if (!(tolerance >= 0.0)) {
    throw DataError("dp check tolerance must be >= 0");
  }
  if (data1.size() != data2.size() || data1.dim() != data2.dim()) {
    throw DataError("neighboring datasets must share shape");
  }
  Eigen::Index differing = 0;
  for (Eigen::Index i = 0; i < data1.size(); ++i) {
    const bool same_features = data1.features.row(i) == data2.features.row(i);
    const bool same_label = data1.labels[static_cast<std::size_t>(i)] ==
                            data2.labels[static_cast<std::size_t>(i)];
    if (!same_features || !same_label) ++differing;
  }
  if (differing != 1) {
    throw DataError("neighboring datasets must differ in exactly one "
                    "instance, found " +
                    std::to_string(differing) + " differing rows");
  }

  const Eigen::VectorXd w1 = train_dual(data1, map, config).weights;
  const Eigen::VectorXd w2 = train_dual(data2, map, config).weights;

  DpCheckReport report;
  report.probes = probes;
  report.sensitivity_l1 = (w1 - w2).lpNorm<1>();
  report.sup_log_ratio = report.sensitivity_l1 / lambda;
  report.log_bound = beta + std::log1p(tolerance);

  // Probe points alternate between the two release distributions, so both
  // directions of the ratio are exercised where their mass actually lies.
  const std::uint64_t probe_seed = derive_seed(seed, kStreamDpProbes);
  const int F = map.output_dim;
  for (int k = 0; k < probes; ++k) {
    const Eigen::VectorXd& center = (k % 2 == 0) ? w1 : w2;
    double log_ratio = 0.0;  // log p1(z) - log p2(z)
    for (int i = 0; i < F; ++i) {
      const double u = uniform01(
          probe_seed, static_cast<std::uint64_t>(k) *
                          static_cast<std::uint64_t>(F) +
                      static_cast<std::uint64_t>(i));
      const double z = center(i) + laplace_icdf(u, lambda);
      log_ratio += (std::abs(z - w2(i)) - std::abs(z - w1(i))) / lambda;
    }
    const double abs_log_ratio = std::abs(log_ratio);
    report.max_abs_log_ratio = std::max(report.max_abs_log_ratio, abs_log_ratio);
    if (abs_log_ratio > report.log_bound) ++report.violations;
  }
  report.passed = report.violations == 0;
  return report;
}

}  // namespace psvm
