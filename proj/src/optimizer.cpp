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

#include "pairdp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pairdp/privacy.hpp"
#include "pairdp/risk.hpp"
#include "pairdp/rng.hpp"
#include "pairdp/util.hpp"

namespace pairdp {
namespace {

Eigen::VectorXd resolve_theta0(const Eigen::VectorXd& requested, int p,
                               const char* what) {
  if (requested.size() == 0) {
    return Eigen::VectorXd::Zero(p);
  }
  if (requested.size() != p) {
    throw std::invalid_argument(std::string(what) + ": theta0 has dimension " +
                                std::to_string(requested.size()) +
                                ", expected " + std::to_string(p));
  }
  if (!requested.allFinite()) {
    throw std::invalid_argument(std::string(what) +
                                ": theta0 has non-finite entries");
  }
  return requested;
}

double resolve_eta(double requested, const PairwiseLoss& loss,
                   const char* what) {
  if (requested > 0.0) {
    if (!std::isfinite(requested)) {
      throw std::invalid_argument(std::string(what) + ": eta must be finite");
    }
    return requested;
  }
  if (requested < 0.0) {
    throw std::invalid_argument(std::string(what) + ": eta must be >= 0 (0 " +
                                "selects the 1/smoothness default)");
  }
  return 1.0 / loss.step_smoothness();
}

}  // namespace

Eigen::VectorXd gd_step(const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& grad,
                        const Eigen::VectorXd& noise, double eta) {
  if (grad.size() != theta.size() || noise.size() != theta.size()) {
    throw std::invalid_argument("gd_step: theta, grad and noise dimensions "
                                "must agree");
  }
  return theta - eta * (grad + noise);
}

Eigen::VectorXd project(const Eigen::VectorXd& theta, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("project requires finite radius > 0");
  }
  const double norm = theta.norm();
  // The slack keeps the map exactly idempotent: a vector that was just
  // scaled onto the sphere can recompute its norm a few ulp above radius,
  // and must not be scaled a second time.
  const double slack = radius * (8.0 * std::numeric_limits<double>::epsilon());
  if (norm <= radius + slack) {
    return theta;
  }
  return theta * (radius / norm);
}

MinimizeResult exact_minimize(const PairwiseLoss& loss, const Dataset& data,
                              const SolverConfig& config) {
  if (!(config.tol > 0.0)) {
    throw std::invalid_argument("exact_minimize requires tol > 0");
  }
  if (config.max_iter < 0) {
    throw std::invalid_argument("exact_minimize requires max_iter >= 0");
  }
  const int p = loss.param_dim();
  const double eta = resolve_eta(config.eta, loss, "exact_minimize");

  Eigen::VectorXd theta = resolve_theta0(config.theta0, p, "exact_minimize");
  if (config.project_radius > 0.0) {
    theta = project(theta, config.project_radius);
  }

  Eigen::VectorXd grad(p);
  MinimizeResult result;
  result.theta.layout = loss.layout();

  for (long it = 0; it <= config.max_iter; ++it) {
    const double value =
        empirical_risk_value_grad(loss, theta, data, &grad, config.threads);
    if (!std::isfinite(value) || !grad.allFinite()) {
      throw DivergenceError(
          "exact_minimize: non-finite objective at iteration " +
              std::to_string(it),
          it);
    }
    const double grad_norm = grad.norm();
    if (grad_norm <= config.tol || it == config.max_iter) {
      result.theta.theta = theta;
      result.grad_norm = grad_norm;
      result.iterations = it;
      result.converged = grad_norm <= config.tol;
      result.risk = value;
      return result;
    }
    theta -= eta * grad;
    if (config.project_radius > 0.0) {
      theta = project(theta, config.project_radius);
    }
    if (!theta.allFinite()) {
      throw DivergenceError(
          "exact_minimize: iterate diverged at iteration " + std::to_string(it),
          it);
    }
  }
  // Unreachable: the loop always returns at it == max_iter.
  throw std::logic_error("exact_minimize: fell through iteration loop");
}

TrainResult dp_pairwise_gd(const PairwiseLoss& loss, const Dataset& data,
                           const TrainConfig& config) {
  if (config.T < 1) {
    throw std::invalid_argument("dp_pairwise_gd requires T >= 1, got " +
                                std::to_string(config.T));
  }
  if (!(config.sigma >= 0.0) || !std::isfinite(config.sigma)) {
    throw std::invalid_argument("dp_pairwise_gd requires finite sigma >= 0");
  }
  const int p = loss.param_dim();
  const double eta = resolve_eta(config.eta, loss, "dp_pairwise_gd");

  // Initial point: caller-supplied, or a ball draw from the init substream
  // so that train runs with equal seeds start identically.
  Eigen::VectorXd theta;
  if (config.theta0.size() > 0) {
    theta = resolve_theta0(config.theta0, p, "dp_pairwise_gd");
    if (config.project_radius > 0.0) {
      theta = project(theta, config.project_radius);
    }
  } else {
    double init_radius = config.init_radius;
    if (init_radius < 0.0) {
      const double cap =
          config.project_radius > 0.0 ? std::min(1.0, config.project_radius)
                                      : 1.0;
      init_radius = 0.5 * cap;
    }
    if (init_radius == 0.0) {
      theta = Eigen::VectorXd::Zero(p);
    } else {
      Rng init_rng(derive_seed(config.seed, {stream_tag::kInit}));
      theta = init_rng.uniform_ball(p, init_radius);
    }
  }

  const std::uint64_t noise_seed =
      derive_seed(config.seed, {stream_tag::kNoise});
  Rng noise_rng(noise_seed);

  TrainResult result;
  result.theta0 = theta;
  result.noise_seed = noise_seed;
  result.eta = eta;
  result.sigma = config.sigma;
  result.T = config.T;
  result.grad_norm_trace.reserve(config.T);
  result.risk_trace.reserve(config.T);
  if (config.record_trajectory) {
    result.trajectory.reserve(config.T);
  }

  Eigen::VectorXd grad(p);
  for (int t = 1; t <= config.T; ++t) {
    const double value =
        empirical_risk_value_grad(loss, theta, data, &grad, config.threads);
    if (!std::isfinite(value) || !grad.allFinite()) {
      throw DivergenceError(
          "dp_pairwise_gd: non-finite objective at iteration " +
              std::to_string(t),
          t);
    }
    if (t >= 2) {
      // value is the risk at theta_{t-1}, produced by the previous step.
      result.risk_trace.push_back(value);
    }
    result.grad_norm_trace.push_back(grad.norm());

    const Eigen::VectorXd noise = sample_noise(config.sigma, p, noise_rng);
    theta = gd_step(theta, grad, noise, eta);
    if (config.project_radius > 0.0) {
      theta = project(theta, config.project_radius);
    }
    if (!theta.allFinite()) {
      throw DivergenceError(
          "dp_pairwise_gd: iterate diverged at iteration " + std::to_string(t),
          t);
    }
    if (config.record_trajectory) {
      result.trajectory.push_back(theta);
    }
  }

  const double final_risk = empirical_risk(loss, theta, data, config.threads);
  if (!std::isfinite(final_risk)) {
    throw DivergenceError("dp_pairwise_gd: non-finite final risk",
                          config.T);
  }
  result.risk_trace.push_back(final_risk);
  result.final_risk = final_risk;
  result.theta_priv = ModelParams{theta, loss.layout()};
  return result;
}

}  // namespace pairdp
