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

#include "pairdp/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "pairdp/risk.hpp"
#include "pairdp/rng.hpp"

namespace pairdp {
namespace {

MinimizeResult minimize_or_throw(const PairwiseLoss& loss, const Dataset& data,
                                 const SolverConfig& solver, const char* what) {
  MinimizeResult res = exact_minimize(loss, data, solver);
  if (!res.converged) {
    throw std::runtime_error(
        std::string(what) + ": minimizer did not converge (grad norm " +
        std::to_string(res.grad_norm) + " after " +
        std::to_string(res.iterations) + " iterations)");
  }
  return res;
}

}  // namespace

MinimizeResult retrain_loo(const PairwiseLoss& loss, const Dataset& data,
                           int i, const SolverConfig& solver) {
  return exact_minimize(loss, remove_sample(data, i), solver);
}

InfluenceResult influence_loo(const PairwiseLoss& loss, const Dataset& data,
                              int i, const Eigen::VectorXd& theta_star,
                              int threads) {
  const int n = data.n();
  if (n < 3) {
    throw std::invalid_argument("influence_loo needs n >= 3");
  }
  if (i < 0 || i >= n) {
    throw std::out_of_range("influence_loo: index out of range");
  }
  const int p = loss.param_dim();
  if (theta_star.size() != p) {
    throw std::invalid_argument("influence_loo: theta_star dimension mismatch");
  }

  const Eigen::MatrixXd hessian =
      empirical_risk_hessian(loss, theta_star, data, threads);

  // Aggregate gradient of every ordered pair term touching sample i, under
  // the full-data 1/(n(n-1)) normalization.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  const Sample& zi = data.sample(i);
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const Sample& zj = data.sample(j);
    rhs += loss.grad(theta_star, zi, zj);
    rhs += loss.grad(theta_star, zj, zi);
  }
  rhs /= static_cast<double>(pair_count(n));

  const double trace_scale = hessian.trace() / static_cast<double>(p);
  const double ladder[] = {0.0, 1e-8, 1e-6, 1e-4};
  const double accept = 1e-8 * std::max(1.0, rhs.norm());
  for (double step : ladder) {
    const double gamma = step * trace_scale;
    Eigen::MatrixXd damped = hessian;
    damped.diagonal().array() += gamma;
    Eigen::LLT<Eigen::MatrixXd> llt(damped);
    if (llt.info() != Eigen::Success) {
      continue;
    }
    const Eigen::VectorXd delta = llt.solve(rhs);
    const double residual = (damped * delta - rhs).norm();
    if (residual <= accept && delta.allFinite()) {
      return InfluenceResult{delta, gamma, residual};
    }
  }
  throw std::runtime_error(
      "influence_loo: Hessian solve failed for every damping level (trace/p = " +
      std::to_string(trace_scale) + ")");
}

double elastic_beta(const PairwiseLoss& loss, const Eigen::VectorXd& theta_full,
                    const Eigen::VectorXd& theta_loo, const Sample& zj,
                    const Sample& zk) {
  return std::abs(loss.value(theta_full, zj, zk) -
                  loss.value(theta_loo, zj, zk));
}

LooMethod loo_method_from_string(const std::string& name) {
  if (name == "retrain") return LooMethod::kRetrain;
  if (name == "influence") return LooMethod::kInfluence;
  throw std::invalid_argument("unknown leave-one-out method: " + name);
}

std::string to_string(LooMethod method) {
  return method == LooMethod::kRetrain ? "retrain" : "influence";
}

StabilityReport beta_statistics(const PairwiseLoss& loss, const Dataset& data,
                                LooMethod method, const StabilityProbe& probe,
                                const SolverConfig& solver) {
  const int n = data.n();
  if (n < 3) {
    throw std::invalid_argument("beta_statistics needs n >= 3");
  }
  const int removals = probe.removals == 0 ? std::min(n, 30) : probe.removals;
  if (removals < 1 || removals > n) {
    throw std::invalid_argument("beta_statistics: removals must be in [1, n]");
  }
  if (probe.pairs < 1) {
    throw std::invalid_argument("beta_statistics: pairs must be >= 1");
  }

  const MinimizeResult full =
      minimize_or_throw(loss, data, solver, "beta_statistics");
  const Eigen::VectorXd& theta_full = full.theta.theta;

  // Removal indices first, probe pairs second; the draw order is part of the
  // reproducibility contract.
  Rng rng(derive_seed(probe.seed, {stream_tag::kProbe}));
  std::vector<int> indices(static_cast<size_t>(n));
  std::iota(indices.begin(), indices.end(), 0);
  for (int r = 0; r < removals; ++r) {
    const int offset = r + static_cast<int>(rng.uniform_index(
                               static_cast<std::uint64_t>(n - r)));
    std::swap(indices[static_cast<size_t>(r)],
              indices[static_cast<size_t>(offset)]);
  }
  indices.resize(static_cast<size_t>(removals));

  std::vector<PairIndex> probes;
  probes.reserve(static_cast<size_t>(probe.pairs));
  for (int k = 0; k < probe.pairs; ++k) {
    const int j = static_cast<int>(rng.uniform_index(
        static_cast<std::uint64_t>(n)));
    int l = static_cast<int>(rng.uniform_index(
        static_cast<std::uint64_t>(n - 1)));
    if (l >= j) ++l;
    probes.push_back(PairIndex{j, l});
  }

  StabilityReport report;
  report.method = method;
  report.n = n;
  report.removed_indices = indices;
  report.table.reserve(indices.size() * probes.size());

  double sum_all = 0.0;
  for (int i : indices) {
    Eigen::VectorXd theta_loo;
    if (method == LooMethod::kRetrain) {
      SolverConfig warm = solver;
      warm.theta0 = theta_full;
      MinimizeResult loo = retrain_loo(loss, data, i, warm);
      if (!loo.converged) {
        throw std::runtime_error(
            "beta_statistics: leave-one-out retrain for sample " +
            std::to_string(i) + " did not converge (grad norm " +
            std::to_string(loo.grad_norm) + ")");
      }
      theta_loo = std::move(loo.theta.theta);
    } else {
      theta_loo =
          theta_full + influence_loo(loss, data, i, theta_full, solver.threads)
                           .delta;
    }
    report.delta_norms.push_back((theta_full - theta_loo).norm());

    double sum_i = 0.0;
    for (const PairIndex& pr : probes) {
      const double beta = elastic_beta(loss, theta_full, theta_loo,
                                       data.sample(pr.i), data.sample(pr.j));
      report.table.push_back(BetaEntry{i, pr.i, pr.j, beta});
      sum_i += beta;
      report.beta_uniform = std::max(report.beta_uniform, beta);
    }
    const double mean_i = sum_i / static_cast<double>(probes.size());
    report.beta_sup_mean = std::max(report.beta_sup_mean, mean_i);
    sum_all += sum_i;
  }
  report.beta_mean =
      sum_all / static_cast<double>(indices.size() * probes.size());
  return report;
}

UasEstimate estimate_uas(const PairwiseLoss& loss, const Dataset& data,
                         const std::function<Eigen::VectorXd(const Dataset&)>& trainer,
                         const SampleSource& source, int replacements,
                         std::uint64_t seed) {
  if (replacements < 1) {
    throw std::invalid_argument("estimate_uas: replacements must be >= 1");
  }
  const Eigen::VectorXd theta_base = trainer(data);

  Rng rng(derive_seed(seed, {stream_tag::kProbe}));
  UasEstimate est;
  est.replacements = replacements;
  est.max_model_norm = theta_base.norm();
  for (int r = 0; r < replacements; ++r) {
    const int i = static_cast<int>(rng.uniform_index(
        static_cast<std::uint64_t>(data.n())));
    Sample z = source.draw(rng);
    const Dataset neighbor = replace_sample(data, i, std::move(z));
    const Eigen::VectorXd theta_alt = trainer(neighbor);
    est.kappa = std::max(est.kappa, (theta_base - theta_alt).norm());
    est.max_model_norm = std::max(est.max_model_norm, theta_alt.norm());
  }
  est.g_kappa = loss.lipschitz_bound(est.max_model_norm) * est.kappa;
  return est;
}

}  // namespace pairdp
