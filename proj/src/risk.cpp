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
// Pair sums are accumulated per fixed-size block and the block partials are
// reduced in index order, so results are bitwise identical for every thread
// count. The linear ranking loss additionally gets a fused fast path: with
// scores s_i = theta . x_i the pair margin is u_ij = (y_i - y_j)(s_i - s_j)
// and the per-pair gradient weight c_ij = phi'(u_ij)(y_i - y_j) is
// antisymmetric in (i, j), so the full gradient collapses to
// (2 / (n(n-1))) sum_i rowsum_i x_i with rowsum_i = sum_{j != i} c_ij.

#include "pairdp/risk.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairdp/parallel.hpp"
#include "pairdp/rng.hpp"

namespace pairdp {
namespace {

constexpr std::int64_t kPairsPerBlock = 8192;
constexpr int kRowsPerBlock = 64;

std::int64_t block_count(std::int64_t items, std::int64_t per_block) {
  return (items + per_block - 1) / per_block;
}

void check_theta(const PairwiseLoss& loss, const Eigen::VectorXd& theta,
                 const Dataset& data) {
  if (theta.size() != loss.param_dim()) {
    throw std::invalid_argument("risk: theta has dimension " +
                                std::to_string(theta.size()) + ", expected " +
                                std::to_string(loss.param_dim()));
  }
  // Custom losses report dim() == 0: their callbacks consume samples of any
  // feature dimension, so only the built-in families pin the dataset shape.
  if (loss.dim() > 0 && data.dim() != loss.dim()) {
    throw std::invalid_argument("risk: dataset dimension " +
                                std::to_string(data.dim()) +
                                " does not match loss dimension " +
                                std::to_string(loss.dim()));
  }
}

// Fused value / rowsum sweep for the linear ranking loss. Either output may
// be null. value_out receives the average of phi over ordered pairs plus the
// ridge term; grad_out receives the full regularized gradient.
void ranking_fused(const PairwiseLoss& loss, const Eigen::VectorXd& theta,
                   const Dataset& data, double* value_out,
                   Eigen::VectorXd* grad_out, int threads) {
  const int n = data.n();
  Eigen::VectorXd scores(n);
  Eigen::VectorXd labels(n);
  for (int i = 0; i < n; ++i) {
    scores[i] = theta.dot(data.sample(i).x);
    labels[i] = data.sample(i).y;
  }

  const bool want_value = value_out != nullptr;
  const bool want_grad = grad_out != nullptr;
  const std::int64_t blocks = block_count(n, kRowsPerBlock);
  std::vector<double> block_value(want_value ? blocks : 0, 0.0);
  Eigen::VectorXd rowsum;
  if (want_grad) {
    rowsum.setZero(n);
  }

  parallel_for_blocks(blocks, threads, [&](std::int64_t b) {
    const int i0 = static_cast<int>(b) * kRowsPerBlock;
    const int i1 = std::min(n, i0 + kRowsPerBlock);
    double vsum = 0.0;
    for (int i = i0; i < i1; ++i) {
      const double si = scores[i];
      const double yi = labels[i];
      double rs = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dy = yi - labels[j];
        const double u = dy * (si - scores[j]);
        const double t = std::exp(-std::abs(u));
        if (want_value) {
          vsum += u >= 0.0 ? std::log1p(t) : -u + std::log1p(t);
        }
        if (want_grad) {
          // phi'(u) = -1 / (1 + e^u), written through t = e^{-|u|}.
          const double d1 = u >= 0.0 ? -t / (1.0 + t) : -1.0 / (1.0 + t);
          rs += d1 * dy;
        }
      }
      if (want_grad) {
        rowsum[i] = rs;
      }
    }
    if (want_value) {
      block_value[static_cast<std::size_t>(b)] = vsum;
    }
  });

  const double inv_pairs = 1.0 / static_cast<double>(pair_count(n));
  const double lambda = loss.lambda();
  if (want_value) {
    double total = 0.0;
    for (double v : block_value) total += v;
    *value_out = total * inv_pairs + lambda * theta.squaredNorm();
  }
  if (want_grad) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
    const double scale = 2.0 * inv_pairs;
    for (int i = 0; i < n; ++i) {
      g += (scale * rowsum[i]) * data.sample(i).x;
    }
    if (lambda > 0.0) {
      g += (2.0 * lambda) * theta;
    }
    *grad_out = std::move(g);
  }
}

// Generic pair sweep in blocks of the row-major ordered pair index.
void generic_fused(const PairwiseLoss& loss, const Eigen::VectorXd& theta,
                   const Dataset& data, double* value_out,
                   Eigen::VectorXd* grad_out, int threads) {
  const int n = data.n();
  const std::int64_t pairs = pair_count(n);
  const std::int64_t blocks = block_count(pairs, kPairsPerBlock);
  const bool want_value = value_out != nullptr;
  const bool want_grad = grad_out != nullptr;

  std::vector<double> block_value(want_value ? blocks : 0, 0.0);
  std::vector<Eigen::VectorXd> block_grad;
  if (want_grad) {
    block_grad.assign(blocks, Eigen::VectorXd());
  }

  parallel_for_blocks(blocks, threads, [&](std::int64_t b) {
    const std::int64_t k0 = b * kPairsPerBlock;
    const std::int64_t k1 = std::min(pairs, k0 + kPairsPerBlock);
    double vsum = 0.0;
    Eigen::VectorXd gsum;
    if (want_grad) {
      gsum.setZero(theta.size());
    }
    for (std::int64_t k = k0; k < k1; ++k) {
      const PairIndex pr = pair_at(n, k);
      const Sample& a = data.sample(pr.i);
      const Sample& c = data.sample(pr.j);
      if (want_value) {
        vsum += loss.value(theta, a, c);
      }
      if (want_grad) {
        gsum += loss.grad(theta, a, c);
      }
    }
    if (want_value) {
      block_value[static_cast<std::size_t>(b)] = vsum;
    }
    if (want_grad) {
      block_grad[static_cast<std::size_t>(b)] = std::move(gsum);
    }
  });

  const double inv_pairs = 1.0 / static_cast<double>(pairs);
  if (want_value) {
    double total = 0.0;
    for (double v : block_value) total += v;
    *value_out = total * inv_pairs;
  }
  if (want_grad) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
    for (const Eigen::VectorXd& part : block_grad) {
      g += part;
    }
    *grad_out = g * inv_pairs;
  }
}

}  // namespace

double empirical_risk(const PairwiseLoss& loss, const Eigen::VectorXd& theta,
                      const Dataset& data, int threads) {
  check_theta(loss, theta, data);
  double value = 0.0;
  if (loss.kind() == LossKind::kRanking) {
    ranking_fused(loss, theta, data, &value, nullptr, threads);
  } else {
    generic_fused(loss, theta, data, &value, nullptr, threads);
  }
  return value;
}

Eigen::VectorXd empirical_risk_grad(const PairwiseLoss& loss,
                                    const Eigen::VectorXd& theta,
                                    const Dataset& data, int threads) {
  check_theta(loss, theta, data);
  Eigen::VectorXd grad(theta.size());
  if (loss.kind() == LossKind::kRanking) {
    ranking_fused(loss, theta, data, nullptr, &grad, threads);
  } else {
    generic_fused(loss, theta, data, nullptr, &grad, threads);
  }
  return grad;
}

double empirical_risk_value_grad(const PairwiseLoss& loss,
                                 const Eigen::VectorXd& theta,
                                 const Dataset& data, Eigen::VectorXd* grad,
                                 int threads) {
  check_theta(loss, theta, data);
  if (grad == nullptr) {
    throw std::invalid_argument("empirical_risk_value_grad: grad is null");
  }
  double value = 0.0;
  if (loss.kind() == LossKind::kRanking) {
    ranking_fused(loss, theta, data, &value, grad, threads);
  } else {
    generic_fused(loss, theta, data, &value, grad, threads);
  }
  return value;
}

Eigen::MatrixXd empirical_risk_hessian(const PairwiseLoss& loss,
                                       const Eigen::VectorXd& theta,
                                       const Dataset& data, int threads) {
  check_theta(loss, theta, data);
  const int n = data.n();
  const int p = loss.param_dim();
  const std::int64_t pairs = pair_count(n);
  const std::int64_t blocks = block_count(pairs, kPairsPerBlock);
  std::vector<Eigen::MatrixXd> block_sum(blocks);

  parallel_for_blocks(blocks, threads, [&](std::int64_t b) {
    const std::int64_t k0 = b * kPairsPerBlock;
    const std::int64_t k1 = std::min(pairs, k0 + kPairsPerBlock);
    Eigen::MatrixXd hsum = Eigen::MatrixXd::Zero(p, p);
    for (std::int64_t k = k0; k < k1; ++k) {
      const PairIndex pr = pair_at(n, k);
      hsum += loss.hessian(theta, data.sample(pr.i), data.sample(pr.j));
    }
    block_sum[static_cast<std::size_t>(b)] = std::move(hsum);
  });

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
  for (const Eigen::MatrixXd& part : block_sum) {
    h += part;
  }
  return h / static_cast<double>(pairs);
}

McEstimate population_risk_mc(const PairwiseLoss& loss,
                              const Eigen::VectorXd& theta,
                              const SampleSource& source, std::int64_t pairs,
                              std::uint64_t seed) {
  if (theta.size() != loss.param_dim()) {
    throw std::invalid_argument("population_risk_mc: theta dimension mismatch");
  }
  if (pairs < 1) {
    throw std::invalid_argument("population_risk_mc requires pairs >= 1");
  }
  Rng rng(derive_seed(seed, {stream_tag::kMc}));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t k = 0; k < pairs; ++k) {
    const Sample a = source.draw(rng);
    const Sample b = source.draw(rng);
    const double v = loss.value(theta, a, b);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / static_cast<double>(pairs);
  double std_err = 0.0;
  if (pairs > 1) {
    const double var =
        (sum_sq - static_cast<double>(pairs) * mean * mean) /
        static_cast<double>(pairs - 1);
    std_err = std::sqrt(std::max(0.0, var) / static_cast<double>(pairs));
  }
  return McEstimate{mean, std_err, pairs};
}

RiskDecomposition excess_population_risk(
    const PairwiseLoss& loss, const Eigen::VectorXd& theta_priv,
    const Eigen::VectorXd& theta_star, const Eigen::VectorXd& theta_ref,
    const Dataset& data, const SampleSource& source, std::int64_t pairs,
    std::uint64_t seed, int threads) {
  if (theta_priv.size() != loss.param_dim() ||
      theta_star.size() != loss.param_dim() ||
      theta_ref.size() != loss.param_dim()) {
    throw std::invalid_argument(
        "excess_population_risk: parameter dimension mismatch");
  }
  if (pairs < 1) {
    throw std::invalid_argument("excess_population_risk requires pairs >= 1");
  }

  const double emp_priv = empirical_risk(loss, theta_priv, data, threads);
  const double emp_star = empirical_risk(loss, theta_star, data, threads);

  // Common random numbers: every population term is estimated on the same
  // drawn pair stream, so the three components sum to the total exactly and
  // the difference F(theta_priv) - F(theta_ref) has its own small variance.
  Rng rng(derive_seed(seed, {stream_tag::kMc}));
  double sum_priv = 0.0;
  double sum_ref = 0.0;
  double diff_sum = 0.0;
  double diff_sum_sq = 0.0;
  for (std::int64_t k = 0; k < pairs; ++k) {
    const Sample a = source.draw(rng);
    const Sample b = source.draw(rng);
    const double vp = loss.value(theta_priv, a, b);
    const double vr = loss.value(theta_ref, a, b);
    sum_priv += vp;
    sum_ref += vr;
    const double d = vp - vr;
    diff_sum += d;
    diff_sum_sq += d * d;
  }
  const double inv = 1.0 / static_cast<double>(pairs);
  const double pop_priv = sum_priv * inv;
  const double pop_ref = sum_ref * inv;
  const double diff_mean = diff_sum * inv;
  double total_std_err = 0.0;
  if (pairs > 1) {
    const double var =
        (diff_sum_sq - static_cast<double>(pairs) * diff_mean * diff_mean) /
        static_cast<double>(pairs - 1);
    total_std_err = std::sqrt(std::max(0.0, var) * inv);
  }

  RiskDecomposition out;
  out.generalization_error = pop_priv - emp_priv;
  out.excess_empirical_risk = emp_priv - emp_star;
  out.approximation_gap = emp_star - pop_ref;
  out.total = diff_mean;
  // Rebalance the approximation gap so the three parts add to the common
  // random number total exactly, absorbing the last-bit rounding drift.
  out.approximation_gap =
      out.total - out.generalization_error - out.excess_empirical_risk;
  out.total_std_err = total_std_err;
  out.population_risk_priv = pop_priv;
  out.population_risk_ref = pop_ref;
  out.pairs = pairs;
  return out;
}

PlReport pl_check(const PairwiseLoss& loss, const Dataset& data, double mu,
                  const PlProbe& probe, const SolverConfig& solver) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("pl_check requires mu > 0");
  }
  if (probe.count < 1 || !(probe.radius > 0.0)) {
    throw std::invalid_argument("pl_check requires count >= 1 and radius > 0");
  }

  const MinimizeResult mini = exact_minimize(loss, data, solver);
  if (!mini.converged) {
    throw std::runtime_error(
        "pl_check: reference minimizer did not converge (grad norm " +
        std::to_string(mini.grad_norm) + " after " +
        std::to_string(mini.iterations) + " iterations)");
  }

  PlReport report;
  report.l_min = mini.risk;
  report.minimizer_grad_norm = mini.grad_norm;
  report.worst_ratio = std::numeric_limits<double>::infinity();

  // Gaps at or below this floor are dominated by rounding and say nothing
  // about the inequality; such probes are skipped.
  const double gap_floor = 1e-12 * std::max(1.0, std::abs(report.l_min));

  Rng rng(derive_seed(probe.seed, {stream_tag::kProbe}));
  Eigen::VectorXd grad(loss.param_dim());
  for (int k = 0; k < probe.count; ++k) {
    const Eigen::VectorXd theta =
        rng.uniform_ball(loss.param_dim(), probe.radius);
    const double value =
        empirical_risk_value_grad(loss, theta, data, &grad, solver.threads);
    const double gap = value - report.l_min;
    if (gap <= gap_floor) {
      continue;
    }
    const double lhs = grad.squaredNorm();
    const double rhs = 2.0 * mu * gap;
    ++report.probes_evaluated;
    const double ratio = lhs / rhs;
    if (ratio < report.worst_ratio) {
      report.worst_ratio = ratio;
    }
    if (lhs < rhs * (1.0 - 1e-9)) {
      ++report.violations;
    }
  }
  if (report.probes_evaluated == 0) {
    report.worst_ratio = 0.0;
  }
  return report;
}

}  // namespace pairdp
