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

namespace psvm {

enum class MapKind {
  kIdentity,       // phi(x) = x, linear machines
  kRandomFourier,  // random Fourier features approximating the RBF kernel
};

// Explicit finite-dimensional feature map phi : R^L -> R^F.  Kernel
// machines are supported only through such maps; there is no implicit
// kernel-trick path.  Random Fourier maps keep their frequency matrix and
// phase vector in memory, but on disk they are identified by
// (gamma, seed, shape) alone and regenerated on load.
struct FeatureMap {
  MapKind kind = MapKind::kIdentity;
  int input_dim = 0;   // L
  int output_dim = 0;  // F

  // Random Fourier parameters; unused for identity maps.
  double gamma = 0.0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd frequencies;  // F x L, rows are omega_i ~ N(0, 2*gamma*I)
  Eigen::VectorXd phases;       // F, entries b_i ~ U[0, 2*pi)
};

// Uniform bounds on the feature map over the data domain:
//   kappa   >= sup_x ||phi(x)||
//   phi_max >= sup_x max_i |phi_i(x)|
struct MapBounds {
  double kappa = 0.0;
  double phi_max = 0.0;
};

[[nodiscard]] FeatureMap make_identity_map(int input_dim);

// phi_i(x) = sqrt(2/F) * cos(omega_i . x + b_i); the induced inner product
// approximates exp(-gamma * ||x - y||^2) in expectation over (omega, b).
[[nodiscard]] FeatureMap make_random_fourier_map(int input_dim, int output_dim,
                                                 double gamma,
                                                 std::uint64_t seed);

[[nodiscard]] Eigen::VectorXd apply(const FeatureMap& map,
                                    const Eigen::Ref<const Eigen::VectorXd>& x);

// Applies the map to every row of `inputs`; returns an n x F matrix.
[[nodiscard]] Eigen::MatrixXd apply_all(const FeatureMap& map,
                                        const Eigen::MatrixXd& inputs);

// Identity maps: kappa = phi_max = domain_radius (a bound on ||x|| that the
// caller must supply).  Random Fourier maps: kappa = sqrt(2),
// phi_max = sqrt(2/F), independent of the domain.
[[nodiscard]] MapBounds bounds(const FeatureMap& map,
                               double domain_radius = 0.0);

}  // namespace psvm
