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
// Algorithmic stability diagnostics for pairwise empirical risk minimizers.
//
// The elastic leave-one-out coefficient of sample i probed at pair (j, k) is
//
//   beta_n(z_i; z_j, z_k) = | l(theta*_D; z_j, z_k) - l(theta*_{D \ i}; z_j, z_k) |
//
// where theta*_D minimizes the regularized empirical pairwise risk on D and
// theta*_{D \ i} minimizes it on D with sample i removed (the average
// renormalizes to (n-1)(n-2) ordered pairs automatically). The table of
// beta values over removal indices and probe pairs is summarized three ways:
//
//   beta_uniform  = max over all (i, j, k)
//   beta_sup_mean = max over i of the mean over (j, k)
//   beta_mean     = mean over all (i, j, k)
//
// With probe pairs shared across removals the ordering
// beta_uniform >= beta_sup_mean >= beta_mean holds by construction.
//
// The leave-one-out minimizer can be obtained by retraining or approximated
// by one damped Newton step from theta*_D (the influence-function route).

#ifndef PAIRDP_STABILITY_HPP_
#define PAIRDP_STABILITY_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "pairdp/dataset.hpp"
#include "pairdp/losses.hpp"
#include "pairdp/optimizer.hpp"

namespace pairdp {

// Retrains on the dataset with sample i removed. Warm starting is the
// caller's business (set solver.theta0).
MinimizeResult retrain_loo(const PairwiseLoss& loss, const Dataset& data,
                           int i, const SolverConfig& solver);

struct InfluenceResult {
  // Estimated parameter shift theta*_{D \ i} - theta*_D.
  Eigen::VectorXd delta;
  // Damping gamma (absolute, already scaled by trace(H)/p) that produced an
  // acceptable solve, and the residual ||(H + gamma I) delta - rhs||.
  double damping = 0.0;
  double residual = 0.0;
};

// One-step influence estimate of the leave-one-out shift:
//
//   delta_i = [H(theta*)]^{-1} (1 / (n(n-1))) sum_{j != i}
//             (grad l(theta*; z_i, z_j) + grad l(theta*; z_j, z_i))
//
// H is the empirical risk Hessian at theta*. The solve walks a damping
// ladder gamma in {0, 1e-8, 1e-6, 1e-4} * trace(H)/p and accepts the first
// Cholesky factorization whose residual is below 1e-8 * max(1, ||rhs||);
// if the whole ladder fails a std::runtime_error is thrown.
InfluenceResult influence_loo(const PairwiseLoss& loss, const Dataset& data,
                              int i, const Eigen::VectorXd& theta_star,
                              int threads = 1);

// |l(theta_full; z_j, z_k) - l(theta_loo; z_j, z_k)| for one probe pair.
double elastic_beta(const PairwiseLoss& loss, const Eigen::VectorXd& theta_full,
                    const Eigen::VectorXd& theta_loo, const Sample& zj,
                    const Sample& zk);

enum class LooMethod { kRetrain, kInfluence };

LooMethod loo_method_from_string(const std::string& name);
std::string to_string(LooMethod method);

// Probe plan for beta_statistics. removals = 0 selects min(n, 30). The same
// probe pairs are evaluated for every removal.
struct StabilityProbe {
  int removals = 0;
  int pairs = 200;
  std::uint64_t seed = 0;
};

struct BetaEntry {
  int removed = 0;  // sample index i
  int j = 0;        // probe pair (j, k)
  int k = 0;
  double beta = 0.0;
};

struct StabilityReport {
  double beta_uniform = 0.0;
  double beta_sup_mean = 0.0;
  double beta_mean = 0.0;
  // ||theta*_D - theta*_{D \ i}|| per removal, in draw order.
  std::vector<double> delta_norms;
  std::vector<int> removed_indices;
  std::vector<BetaEntry> table;
  LooMethod method = LooMethod::kRetrain;
  int n = 0;
};

// Samples removal indices (without replacement) and probe pairs, computes
// the beta table with the requested leave-one-out method, and aggregates.
// Requires n >= 3 and a converging full-data minimizer (std::runtime_error
// otherwise, carrying the achieved gradient norm).
StabilityReport beta_statistics(const PairwiseLoss& loss, const Dataset& data,
                                LooMethod method, const StabilityProbe& probe,
                                const SolverConfig& solver);

struct UasEstimate {
  // kappa = max over probed replacements of ||A(D) - A(D')||.
  double kappa = 0.0;
  // lipschitz_bound(max_model_norm) * kappa, comparable to beta_uniform
  // because |l(theta) - l(theta')| <= Lip * ||theta - theta'|| on the ball
  // containing every trained model.
  double g_kappa = 0.0;
  double max_model_norm = 0.0;
  int replacements = 0;
};

// Uniform argument stability of a deterministic trainer A over
// replacement-adjacent datasets: one sample (uniform index) is replaced by
// a draw from `source`, the trainer runs on both datasets, and the maximum
// parameter distance is recorded. Trainer failures propagate.
UasEstimate estimate_uas(const PairwiseLoss& loss, const Dataset& data,
                         const std::function<Eigen::VectorXd(const Dataset&)>& trainer,
                         const SampleSource& source, int replacements,
                         std::uint64_t seed);

}  // namespace pairdp

#endif  // PAIRDP_STABILITY_HPP_
