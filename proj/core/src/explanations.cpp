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

#include "psvm/explanations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "psvm/errors.hpp"
#include "psvm/rng.hpp"
#include "psvm/svm.hpp"

namespace psvm {
namespace {

void check_release(const PrivateRelease& release) {
  if (release.w_tilde.size() != release.map.output_dim) {
    throw DataError("release weight length " +
                    std::to_string(release.w_tilde.size()) +
                    " does not match its feature map output dimension " +
                    std::to_string(release.map.output_dim));
  }
  if (!(release.noise.lambda >= 0.0) ||
      !std::isfinite(release.noise.lambda)) {
    throw DataError("release noise scale must be finite and >= 0");
  }
}

void check_confidence(double confidence) {
  if (!(confidence >= 0.5 && confidence < 1.0)) {
    throw DataError("confidence must lie in [0.5, 1), got " +
                    std::to_string(confidence));
  }
}

void check_label(int y) {
  if (y != 1 && y != -1) {
    throw DataError("label must be +-1, got " + std::to_string(y));
  }
}

void check_instance_dim(const PrivateRelease& release,
                        const Eigen::VectorXd& x) {
  if (x.size() != release.map.input_dim) {
    throw DataError("instance dimension " + std::to_string(x.size()) +
                    " does not match feature map input dimension " +
                    std::to_string(release.map.input_dim));
  }
}

void check_identity_map(const PrivateRelease& release, const char* what) {
  if (release.map.kind != MapKind::kIdentity) {
    throw DataError(std::string(what) +
                    " applies to identity feature maps only; use the "
                    "bisection engine for general maps");
  }
}

}  // namespace

ExplanationRequest make_request(const PrivateRelease& release,
                                const Eigen::VectorXd& x_prime,
                                double confidence) {
  check_release(release);
  check_instance_dim(release, x_prime);
  check_confidence(confidence);
  ExplanationRequest request;
  request.x_prime = x_prime;
  request.y_prime = classify(release.w_tilde, release.map, x_prime);
  request.confidence = confidence;
  return request;
}

double robust_coefficient(double confidence, double lambda) {
  check_confidence(confidence);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DataError("noise scale must be finite and >= 0, got " +
                    std::to_string(lambda));
  }
  // Deterministic surrogate margin for the chance constraint; 0 at p = 1/2
  // and increasing in both p and lambda.
  return -lambda * std::sqrt(2.0) * std::log(2.0 * (1.0 - confidence));
}

double g(const Eigen::VectorXd& x, const PrivateRelease& release, int y_prime,
         double confidence) {
  check_release(release);
  check_instance_dim(release, x);
  check_label(y_prime);
  const double r = robust_coefficient(confidence, release.noise.lambda);
  const Eigen::VectorXd phi = apply(release.map, x);
  return static_cast<double>(y_prime) * phi.dot(release.w_tilde) +
         r * phi.norm();
}

Explanation explain_nonrobust_linear(const ExplanationRequest& request,
                                     const PrivateRelease& release) {
  check_release(release);
  check_identity_map(release, "the non-robust closed form");
  check_instance_dim(release, request.x_prime);
  check_label(request.y_prime);
  const Eigen::VectorXd& w = release.w_tilde;
  const double wnorm2 = w.squaredNorm();
  if (!(wnorm2 > 0.0)) {
    throw NumericalError(
        "released weight vector is zero; there is no hyperplane to cross");
  }

  Explanation result;
  result.method = ExplanationMethod::kNonRobustClosedForm;
  const double score = request.x_prime.dot(w);
  if (static_cast<double>(request.y_prime) * score > 0.0) {
    result.x = request.x_prime - (score / wnorm2) * w;
  } else {
    result.x = request.x_prime;  // already on the target side
  }
  result.distance = (result.x - request.x_prime).norm();
  result.g_value = static_cast<double>(request.y_prime) * result.x.dot(w);
  return result;
}

Explanation explain_robust_linear(const ExplanationRequest& request,
                                  const PrivateRelease& release) {
  check_release(release);
  check_identity_map(release, "the robust cone projection");
  check_instance_dim(release, request.x_prime);
  check_label(request.y_prime);
  check_confidence(request.confidence);
  const Eigen::VectorXd& w = release.w_tilde;
  const double wnorm = w.norm();
  if (!(wnorm > 0.0)) {
    throw NumericalError(
        "released weight vector is zero; the robust cone is undefined");
  }

  // Feasible set {g <= 0} is the circular cone {x : <x, c> >= alpha ||x||}
  // around the axis c pointing away from the predicted class.
  const double r = robust_coefficient(request.confidence, release.noise.lambda);
  const double alpha = r / wnorm;
  const Eigen::VectorXd c =
      (-static_cast<double>(request.y_prime) / wnorm) * w;

  Explanation result;
  result.method = ExplanationMethod::kRobustConeProjection;
  if (alpha > 1.0) {
    // The required margin exceeds what any direction can deliver: the
    // noise dominates the released weights and only the origin is robust.
    result.x = Eigen::VectorXd::Zero(w.size());
    result.origin_only = true;
  } else {
    const double axial = request.x_prime.dot(c);
    if (axial >= alpha * request.x_prime.norm()) {
      result.x = request.x_prime;  // already inside the cone
    } else {
      const Eigen::VectorXd v = request.x_prime - axial * c;
      const double rho = v.norm();
      const double slope = std::sqrt(1.0 - alpha * alpha);
      const double reach = alpha * axial + slope * rho;
      if (reach <= 0.0) {
        result.x = Eigen::VectorXd::Zero(w.size());  // polar cone: apex wins
      } else {
        // Nearest point on the cone boundary, in the (c, v) plane.
        result.x = reach * (alpha * c + (slope / rho) * v);
      }
    }
  }
  result.distance = (result.x - request.x_prime).norm();
  result.g_value = g(result.x, release, request.y_prime, request.confidence);
  return result;
}

PrototypeSet make_prototypes(const Dataset& train,
                             const PrivateRelease& release, double confidence,
                             std::uint64_t seed, int retry_budget) {
  train.validate();
  check_release(release);
  check_confidence(confidence);
  if (train.dim() != release.map.input_dim) {
    throw DataError("training data dimension " + std::to_string(train.dim()) +
                    " does not match feature map input dimension " +
                    std::to_string(release.map.input_dim));
  }
  if (retry_budget < 0) {
    throw DataError("retry budget must be >= 0");
  }
  const double r = robust_coefficient(confidence, release.noise.lambda);

  PrototypeSet set;
  for (const int cls : {1, -1}) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < train.size(); ++i) {
      if (train.labels[static_cast<std::size_t>(i)] == cls) rows.push_back(i);
    }
    if (rows.empty()) {
      throw DataError("training set has no instances of class " +
                      std::string(cls > 0 ? "+1" : "-1"));
    }

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(train.dim());
    for (const Eigen::Index i : rows) mean += train.features.row(i).transpose();
    mean /= static_cast<double>(rows.size());

    double best_margin = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd chosen;
    bool found = false;
    // A candidate qualifies when it is robustly classified as its own
    // class: y * f(z) >= r * ||phi(z)|| with a strictly positive score.
    const auto consider = [&](const Eigen::VectorXd& z) {
      const Eigen::VectorXd phi = apply(release.map, z);
      const double yf =
          static_cast<double>(cls) * phi.dot(release.w_tilde);
      const double margin = yf - r * phi.norm();
      best_margin = std::max(best_margin, margin);
      if (margin >= 0.0 && yf > 0.0) {
        chosen = z;
        found = true;
      }
      return found;
    };

    if (!consider(mean)) {
      // Fall back to training instances, most confidently classified first.
      std::vector<std::pair<double, Eigen::Index>> ranked;
      ranked.reserve(rows.size());
      for (const Eigen::Index i : rows) {
        const double yf = static_cast<double>(cls) *
                          decision_value(release.w_tilde, release.map,
                                         train.features.row(i).transpose());
        ranked.emplace_back(yf, i);
      }
      std::sort(ranked.begin(), ranked.end(),
                [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second < b.second;
                });
      for (const auto& [yf, i] : ranked) {
        if (consider(train.features.row(i).transpose())) break;
      }
    }

    if (!found && retry_budget > 0) {
      // Last resort: seeded perturbations of the mean with growing
      // amplitude, scaled by the per-class spread.
      Eigen::VectorXd sigma = Eigen::VectorXd::Zero(train.dim());
      for (const Eigen::Index i : rows) {
        sigma += (train.features.row(i).transpose() - mean)
                     .array()
                     .square()
                     .matrix();
      }
      sigma = (sigma / static_cast<double>(rows.size())).cwiseSqrt();
      for (Eigen::Index j = 0; j < sigma.size(); ++j) {
        if (!(sigma(j) > 0.0)) sigma(j) = 1.0;
      }
      const std::uint64_t cls_seed =
          derive_seed(seed, kStreamPrototypes, cls > 0 ? 0 : 1);
      std::uint64_t draw = 0;
      for (int k = 0; k < retry_budget && !found; ++k) {
        const double amplitude =
            0.25 + 2.75 * static_cast<double>(k + 1) /
                       static_cast<double>(retry_budget);
        Eigen::VectorXd z = mean;
        for (Eigen::Index j = 0; j < z.size(); ++j) {
          z(j) += amplitude * sigma(j) * normal01(cls_seed, draw++);
        }
        consider(z);
      }
    }

    if (!found) {
      throw NumericalError(
          "no robust prototype for class " +
          std::string(cls > 0 ? "+1" : "-1") + " at confidence " +
          std::to_string(confidence) + ": best margin " +
          std::to_string(best_margin) + ", need >= 0");
    }
    (cls > 0 ? set.z_plus : set.z_minus) = chosen;
  }
  return set;
}

Explanation explain_robust_bisection(const ExplanationRequest& request,
                                     const PrivateRelease& release,
                                     const PrototypeSet& prototypes,
                                     const BisectionConfig& config,
                                     std::vector<BisectionTraceRow>* trace) {
  check_release(release);
  check_instance_dim(release, request.x_prime);
  check_label(request.y_prime);
  check_confidence(request.confidence);
  if (!(config.epsilon > 0.0)) {
    throw DataError("bisection epsilon must be > 0, got " +
                    std::to_string(config.epsilon));
  }
  if (config.max_iterations <= 0) {
    throw DataError("bisection needs max_iterations > 0");
  }

  const double g_start =
      g(request.x_prime, release, request.y_prime, request.confidence);
  if (!(g_start > 0.0)) {
    throw NumericalError(
        "bisection needs g(x_prime) > 0 (the instance must start on the "
        "infeasible side), got g = " + std::to_string(g_start));
  }
  const Eigen::VectorXd& target = prototypes.for_class(-request.y_prime);
  check_instance_dim(release, target);
  const double g_target =
      g(target, release, request.y_prime, request.confidence);
  if (!(g_target < 0.0)) {
    throw NumericalError(
        "bisection needs a prototype with g < 0 at the requested "
        "confidence, got g = " + std::to_string(g_target));
  }

  if (trace != nullptr) trace->clear();

  // Bracket on the segment x(t) = x_prime + t * (target - x_prime).  The
  // endpoints stay dyadic rationals, so every midpoint is computed exactly
  // and the returned point lies on the segment bitwise.
  const Eigen::VectorXd direction = target - request.x_prime;
  const double span = direction.norm();
  double t_low = 0.0;
  double t_high = 1.0;
  double t_mid = 1.0;
  double g_high = g_target;
  int iterations = 0;
  while ((t_high - t_low) * span > config.epsilon) {
    if (iterations >= config.max_iterations) {
      throw NumericalError("bisection exceeded " +
                           std::to_string(config.max_iterations) +
                           " iterations with bracket width " +
                           std::to_string((t_high - t_low) * span));
    }
    const double width = (t_high - t_low) * span;
    t_mid = 0.5 * (t_low + t_high);
    const Eigen::VectorXd x_mid = request.x_prime + t_mid * direction;
    const double g_mid =
        g(x_mid, release, request.y_prime, request.confidence);
    ++iterations;
    if (g_mid < 0.0) {
      t_high = t_mid;
      g_high = g_mid;
    } else {
      t_low = t_mid;
    }
    if (trace != nullptr) {
      trace->push_back(BisectionTraceRow{iterations, width, g_mid, g_high});
    }
  }

  const bool use_midpoint = config.return_last_midpoint && iterations > 0;
  const double t_out = use_midpoint ? t_mid : t_high;
  Explanation result;
  result.method = ExplanationMethod::kRobustBisection;
  // t = 1 means the bracket never moved; hand back the prototype itself.
  result.x = (t_out == 1.0) ? target : request.x_prime + t_out * direction;
  result.distance = (result.x - request.x_prime).norm();
  result.g_value = g(result.x, release, request.y_prime, request.confidence);
  result.iterations = iterations;
  return result;
}

double validate_chance_constraint(const Eigen::VectorXd& x,
                                  const PrivateRelease& release, int y_prime,
                                  int trials, std::uint64_t seed) {
  check_release(release);
  check_instance_dim(release, x);
  check_label(y_prime);
  if (trials <= 0) {
    throw DataError("validation needs trials > 0, got " +
                    std::to_string(trials));
  }
  const Eigen::VectorXd phi = apply(release.map, x);
  const double base = phi.dot(release.w_tilde);
  const double lambda = release.noise.lambda;
  if (!(lambda > 0.0)) {
    return static_cast<double>(y_prime) * base <= 0.0 ? 1.0 : 0.0;
  }

  const std::uint64_t noise_seed = derive_seed(seed, kStreamValidation);
  const auto F = static_cast<std::uint64_t>(release.map.output_dim);
  long long flips = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t offset = static_cast<std::uint64_t>(t) * F;
    double score = base;
    for (std::uint64_t i = 0; i < F; ++i) {
      score += phi(static_cast<Eigen::Index>(i)) *
               laplace_icdf(uniform01(noise_seed, offset + i), lambda);
    }
    if (static_cast<double>(y_prime) * score <= 0.0) ++flips;
  }
  return static_cast<double>(flips) / static_cast<double>(trials);
}

}  // namespace psvm
