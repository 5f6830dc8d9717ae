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

#include "psvm/feature_map.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "psvm/errors.hpp"
#include "psvm/rng.hpp"

namespace psvm {
namespace {

void check_input_dim(const FeatureMap& map, Eigen::Index dim) {
  if (dim != map.input_dim) {
    throw DataError("feature map expects inputs of dimension " +
                    std::to_string(map.input_dim) + ", got " +
                    std::to_string(dim));
  }
}

}  // namespace

FeatureMap make_identity_map(int input_dim) {
  if (input_dim <= 0) {
    throw DataError("identity map needs a positive input dimension, got " +
                    std::to_string(input_dim));
  }
  FeatureMap map;
  map.kind = MapKind::kIdentity;
  map.input_dim = input_dim;
  map.output_dim = input_dim;
  return map;
}

FeatureMap make_random_fourier_map(int input_dim, int output_dim, double gamma,
                                   std::uint64_t seed) {
  if (input_dim <= 0 || output_dim <= 0) {
    throw DataError("random Fourier map needs positive dimensions, got L=" +
                    std::to_string(input_dim) + ", F=" +
                    std::to_string(output_dim));
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DataError("random Fourier map needs gamma > 0, got " +
                    std::to_string(gamma));
  }
  FeatureMap map;
  map.kind = MapKind::kRandomFourier;
  map.input_dim = input_dim;
  map.output_dim = output_dim;
  map.gamma = gamma;
  map.seed = seed;

  // omega_i ~ N(0, 2*gamma*I): standard normals scaled by sqrt(2*gamma),
  // indexed so the matrix is identical regardless of fill order.
  const std::uint64_t freq_seed = derive_seed(seed, kStreamRffFrequencies);
  const double scale = std::sqrt(2.0 * gamma);
  map.frequencies.resize(output_dim, input_dim);
  for (int f = 0; f < output_dim; ++f) {
    for (int l = 0; l < input_dim; ++l) {
      map.frequencies(f, l) =
          scale * normal01(freq_seed, static_cast<std::uint64_t>(f) *
                                          static_cast<std::uint64_t>(input_dim) +
                                      static_cast<std::uint64_t>(l));
    }
  }
  const std::uint64_t phase_seed = derive_seed(seed, kStreamRffPhases);
  map.phases.resize(output_dim);
  for (int f = 0; f < output_dim; ++f) {
    map.phases(f) = 2.0 * std::numbers::pi *
                    uniform01(phase_seed, static_cast<std::uint64_t>(f));
  }
  return map;
}

Eigen::VectorXd apply(const FeatureMap& map,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_input_dim(map, x.size());
  if (map.kind == MapKind::kIdentity) {
    return x;
  }
  const double amplitude = std::sqrt(2.0 / map.output_dim);
  return (amplitude *
          ((map.frequencies * x + map.phases).array().cos()))
      .matrix();
}

Eigen::MatrixXd apply_all(const FeatureMap& map, const Eigen::MatrixXd& inputs) {
  check_input_dim(map, inputs.cols());
  if (map.kind == MapKind::kIdentity) {
    return inputs;
  }
  const double amplitude = std::sqrt(2.0 / map.output_dim);
  Eigen::MatrixXd projected = inputs * map.frequencies.transpose();
  projected.rowwise() += map.phases.transpose();
  return (amplitude * projected.array().cos()).matrix();
}

MapBounds bounds(const FeatureMap& map, double domain_radius) {
  MapBounds b;
  switch (map.kind) {
    case MapKind::kIdentity:
      if (!(domain_radius > 0.0)) {
        throw DataError(
            "identity-map bounds need a positive domain radius, got " +
            std::to_string(domain_radius));
      }
      b.kappa = domain_radius;
      b.phi_max = domain_radius;
      break;
    case MapKind::kRandomFourier:
      b.kappa = std::sqrt(2.0);
      b.phi_max = std::sqrt(2.0 / map.output_dim);
      break;
  }
  return b;
}

}  // namespace psvm
