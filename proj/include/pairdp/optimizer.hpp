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
// Gradient descent on the pairwise empirical risk, in two flavors: the
// differentially private trainer (per-step isotropic Gaussian perturbation
// of the full pairwise gradient) and the exact zero-noise minimizer used for
// reference models and risk decompositions.

#ifndef PAIRDP_OPTIMIZER_HPP_
#define PAIRDP_OPTIMIZER_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pairdp/dataset.hpp"
#include "pairdp/losses.hpp"

namespace pairdp {

// One descent step: theta - eta * (grad + noise). Pure, no clipping.
Eigen::VectorXd gd_step(const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& grad,
                        const Eigen::VectorXd& noise, double eta);

// Euclidean projection onto the L2 ball of the given radius. Idempotent;
// interior points pass through unchanged.
Eigen::VectorXd project(const Eigen::VectorXd& theta, double radius);

// Settings for the zero-noise minimizer.
struct SolverConfig {
  double tol = 1e-10;          // stop when ||grad||_2 <= tol
  long max_iter = 100000;      // iteration cap; hitting it is not an error
  double eta = 0.0;            // step size, 0 selects 1 / (L + 2 lambda)
  double project_radius = 0.0; // 0 disables projection
  Eigen::VectorXd theta0;      // empty starts from zero
  int threads = 1;
};

struct MinimizeResult {
  ModelParams theta;
  double grad_norm = 0.0;  // achieved gradient norm
  long iterations = 0;
  bool converged = false;
  double risk = 0.0;  // empirical risk at the returned point
};

// Full-batch gradient descent until the empirical-risk gradient norm falls
// below tol or max_iter is reached. Never errors on non-convergence; the
// caller inspects the achieved gradient norm. Throws DivergenceError if an
// iterate stops being finite.
MinimizeResult exact_minimize(const PairwiseLoss& loss, const Dataset& data,
                              const SolverConfig& config = {});

// Settings for one private training run.
struct TrainConfig {
  int T = 1;                    // number of iterations
  double eta = 0.0;             // 0 selects 1 / (L + 2 lambda)
  double sigma = 0.0;           // per-coordinate noise standard deviation
  std::uint64_t seed = 0;       // master seed for init and noise substreams
  double project_radius = 0.0;  // 0 disables the per-step projection
  Eigen::VectorXd theta0;       // empty draws uniformly from a centered ball
  double init_radius = -1.0;    // <0 selects min(1, project radius) / 2
  bool record_trajectory = false;
  int threads = 1;
};

struct TrainResult {
  ModelParams theta_priv;
  std::vector<double> risk_trace;       // empirical risk at theta_1..theta_T
  std::vector<double> grad_norm_trace;  // gradient norm used by step t
  std::vector<Eigen::VectorXd> trajectory;  // theta_1..theta_T when recorded
  std::uint64_t noise_seed = 0;         // seed of the noise substream
  double eta = 0.0;                     // resolved step size
  double sigma = 0.0;
  int T = 0;
  Eigen::VectorXd theta0;               // resolved start point
  double final_risk = 0.0;
};

// Noisy pairwise gradient descent: T steps of
//   theta_t = theta_{t-1} - eta * (grad L(theta_{t-1}; D) + b_t),
// b_t Gaussian with the configured sigma. The trainer consumes sigma as
// given and never calibrates it; exactly T noise vectors of length p are
// drawn from a substream derived from the seed, so runs are bitwise
// reproducible and two runs with equal seeds share the noise sequence.
// Throws DivergenceError (with the iteration index) on non-finite iterates.
TrainResult dp_pairwise_gd(const PairwiseLoss& loss, const Dataset& data,
                           const TrainConfig& config);

}  // namespace pairdp

#endif  // PAIRDP_OPTIMIZER_HPP_
