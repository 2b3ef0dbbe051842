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
// Pairwise empirical risk, its derivatives, Monte-Carlo population risk,
// the excess-risk decomposition, and the Polyak-Lojasiewicz probe.
//
// The empirical risk over a dataset of n samples averages the loss over all
// n(n-1) ordered pairs:
//
//   L(theta; D) = (1 / (n(n-1))) * sum_{i != j} l(theta; z_i, z_j)
//
// Pair sums are accumulated over fixed-size index blocks and the block
// partials are reduced in block order, so results are bitwise independent
// of the worker thread count.

#ifndef PAIRDP_RISK_HPP_
#define PAIRDP_RISK_HPP_

#include <cstdint>

#include <Eigen/Core>

#include "pairdp/dataset.hpp"
#include "pairdp/losses.hpp"
#include "pairdp/optimizer.hpp"

namespace pairdp {

double empirical_risk(const PairwiseLoss& loss, const Eigen::VectorXd& theta,
                      const Dataset& data, int threads = 1);

Eigen::VectorXd empirical_risk_grad(const PairwiseLoss& loss,
                                    const Eigen::VectorXd& theta,
                                    const Dataset& data, int threads = 1);

// Computes the risk value and gradient in one pass over the pair stream.
// Returns the value and writes the gradient to *grad.
double empirical_risk_value_grad(const PairwiseLoss& loss,
                                 const Eigen::VectorXd& theta,
                                 const Dataset& data, Eigen::VectorXd* grad,
                                 int threads = 1);

// Average pair Hessian plus the regularizer diagonal.
Eigen::MatrixXd empirical_risk_hessian(const PairwiseLoss& loss,
                                       const Eigen::VectorXd& theta,
                                       const Dataset& data, int threads = 1);

// Monte-Carlo estimate of the population risk E l(theta; z, z') with the two
// pair members drawn independently from the source. Deterministic per seed.
struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;  // sample standard deviation / sqrt(pairs)
  std::int64_t pairs = 0;
};

McEstimate population_risk_mc(const PairwiseLoss& loss,
                              const Eigen::VectorXd& theta,
                              const SampleSource& source, std::int64_t pairs,
                              std::uint64_t seed);

// Excess population risk split into the three standard terms. All three
// components and their sum are computed from one Monte-Carlo pair stream
// shared by both parameter vectors (common random numbers), so
// generalization_error + excess_empirical_risk + approximation_gap == total
// holds exactly as written.
struct RiskDecomposition {
  double generalization_error = 0.0;   // population(priv) - empirical(priv)
  double excess_empirical_risk = 0.0;  // empirical(priv) - empirical(star)
  double approximation_gap = 0.0;      // empirical(star) - population(ref)
  double total = 0.0;                  // population(priv) - population(ref)
  double total_std_err = 0.0;          // MC error of the differenced total
  double population_risk_priv = 0.0;
  double population_risk_ref = 0.0;
  std::int64_t pairs = 0;
};

// theta_priv: trained parameters; theta_star: empirical minimizer of the
// risk on data; theta_ref: approximation of the population minimizer.
RiskDecomposition excess_population_risk(
    const PairwiseLoss& loss, const Eigen::VectorXd& theta_priv,
    const Eigen::VectorXd& theta_star, const Eigen::VectorXd& theta_ref,
    const Dataset& data, const SampleSource& source, std::int64_t pairs,
    std::uint64_t seed, int threads = 1);

// Samples parameter points and checks the Polyak-Lojasiewicz inequality
//   ||grad L(theta)||^2 >= 2 mu (L(theta) - L_min)
// against a high-accuracy estimate of L_min from zero-noise training.
struct PlProbe {
  int count = 500;
  double radius = 1.0;     // probes are uniform in this ball around zero
  std::uint64_t seed = 0;
};

struct PlReport {
  int violations = 0;
  double worst_ratio = 0.0;  // min over probes of lhs / rhs
  double l_min = 0.0;
  double minimizer_grad_norm = 0.0;
  int probes_evaluated = 0;  // probes with a meaningful positive gap
};

// Throws std::runtime_error if the internal minimizer fails to reach the
// configured tolerance, since the check is meaningless without L_min.
PlReport pl_check(const PairwiseLoss& loss, const Dataset& data, double mu,
                  const PlProbe& probe, const SolverConfig& solver = {});

}  // namespace pairdp

#endif  // PAIRDP_RISK_HPP_
