// Copyright 2026 The Pairdp Authors
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
// Noise calibration for differentially private pairwise gradient descent.
//
// Replacing one sample changes 2(n-1) of the n(n-1) ordered pair terms of
// the empirical gradient, each bounded in norm by G, so the L2 sensitivity
// of the averaged gradient is 4G/n. Two calibrations are provided:
//
//   moments accountant (composition over T iterations):
//     sigma = 8 G sqrt(T ln(1/delta)) / (n eps)
//
//   basic Gaussian baseline (per-iteration budget (eps/T, delta/T)):
//     sigma = (4G/n) sqrt(2 ln(1.25 T / delta)) (T / eps),
//     valid only when eps/T < 1.
//
// Logarithms are natural throughout.

#ifndef PAIRDP_PRIVACY_HPP_
#define PAIRDP_PRIVACY_HPP_

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "pairdp/rng.hpp"

namespace pairdp {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;
};

// Throws std::invalid_argument unless eps > 0 and 0 < delta < 1.
void check_budget(const PrivacyBudget& budget);

// A calibrated noise scale together with the inputs that produced it.
struct NoiseScale {
  double sigma = 0.0;
  std::string method;  // "moments_accountant" or "basic_gaussian"
  double G = 0.0;
  int T = 0;
  int n = 0;
  PrivacyBudget budget;
};

NoiseScale calibrate_sigma_ma(double G, int T, int n,
                              const PrivacyBudget& budget);

// Throws std::invalid_argument when eps / T >= 1 (outside the regime of the
// classical Gaussian mechanism).
NoiseScale calibrate_sigma_basic(double G, int T, int n,
                                 const PrivacyBudget& budget);

// L2 sensitivity 4G/n of the averaged pairwise gradient under single-sample
// replacement.
double pairwise_gradient_sensitivity(double G, int n);

// Draws p independent N(0, sigma^2) values from the generator. sigma = 0
// yields the exact zero vector; the generator state advances identically
// for every sigma, which keeps noise accounting uniform across runs.
Eigen::VectorXd sample_noise(double sigma, int p, Rng& rng);

}  // namespace pairdp

#endif  // PAIRDP_PRIVACY_HPP_
