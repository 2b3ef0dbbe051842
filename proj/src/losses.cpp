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

#include "pairdp/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace pairdp {
namespace {

// Published constants of the two shipped families on the unit domain
// (||x|| <= 1, |y| <= 1, unit-ball constraint set), kept as exact
// expressions: ranking G = 2, L = (2 + 2 sqrt 2) / (3 + 2 sqrt 2) and
// metric G = 1, L = (1 + sqrt 2) / (6 + 4 sqrt 2).
double ranking_published_L() {
  const double s = std::sqrt(2.0);
  return (2.0 + 2.0 * s) / (3.0 + 2.0 * s);
}

double metric_published_L() {
  const double s = std::sqrt(2.0);
  return (1.0 + s) / (6.0 + 4.0 * s);
}

bool unit_bounds(const Bounds& b) { return b.x_max == 1.0 && b.y_max == 1.0; }

// Largest attainable |phi argument| on the unit domain and unit ball.
// Ranking: |u| = |y - y'| |theta^T (x - x')| <= 2 * 2 * 1 = 4.
// Metric: u = y y' (1 - q) with |q| <= ||Theta||_F ||x - x'||^2 <= 4,
// so |u| <= 5 (the quadratic form is not sign-constrained).
constexpr double kRankingUMax = 4.0;
constexpr double kMetricUMax = 5.0;

}  // namespace

double logistic_phi(double u) {
  if (u >= 0.0) return std::log1p(std::exp(-u));
  return -u + std::log1p(std::exp(u));
}

double logistic_phi_d1(double u) {
  if (u >= 0.0) {
    const double t = std::exp(-u);
    return -t / (1.0 + t);
  }
  return -1.0 / (1.0 + std::exp(u));
}

double logistic_phi_d2(double u) {
  const double t = std::exp(-std::abs(u));
  const double s = 1.0 + t;
  return t / (s * s);
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "ranking") return LossKind::kRanking;
  if (name == "metric") return LossKind::kMetric;
  if (name == "custom") return LossKind::kCustom;
  throw std::invalid_argument("unknown loss kind: " + name);
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kRanking:
      return "ranking";
    case LossKind::kMetric:
      return "metric";
    case LossKind::kCustom:
      return "custom";
  }
  return "unknown";
}

LossConstants registered_constants(LossKind kind, const Bounds& bounds,
                                   double lambda) {
  if (lambda < 0.0) {
    throw std::invalid_argument("registered_constants: lambda must be >= 0");
  }
  if (kind == LossKind::kCustom) {
    throw std::invalid_argument(
        "registered_constants: custom losses declare their own constants");
  }
  if (!unit_bounds(bounds)) {
    throw std::invalid_argument(
        "registered_constants: constants are registered for unit bounds "
        "(x_max = 1, y_max = 1); declare custom constants for other domains");
  }
  LossConstants c;
  if (kind == LossKind::kRanking) {
    c.G = 2.0;
    c.L = ranking_published_L();
    c.M_ell = logistic_phi(-kRankingUMax) + lambda;  // unit-ball radius r = 1
  } else {
    c.G = 1.0;
    c.L = metric_published_L();
    c.M_ell = logistic_phi(-kMetricUMax) + lambda;
  }
  c.mu = lambda > 0.0 ? lambda : 0.0;
  return c;
}

PairwiseLoss PairwiseLoss::ranking(int d, double lambda, Bounds bounds) {
  if (d < 1) throw std::invalid_argument("ranking loss: d must be >= 1");
  PairwiseLoss loss;
  loss.kind_ = LossKind::kRanking;
  loss.lambda_ = lambda;
  loss.bounds_ = bounds;
  loss.d_ = d;
  loss.param_dim_ = d;
  loss.layout_ = ParamLayout::kVector;
  loss.constants_ = registered_constants(LossKind::kRanking, bounds, lambda);
  return loss;
}

PairwiseLoss PairwiseLoss::metric(int d, double lambda, Bounds bounds) {
  if (d < 1) throw std::invalid_argument("metric loss: d must be >= 1");
  PairwiseLoss loss;
  loss.kind_ = LossKind::kMetric;
  loss.lambda_ = lambda;
  loss.bounds_ = bounds;
  loss.d_ = d;
  loss.param_dim_ = d * d;
  loss.layout_ = ParamLayout::kFlattenedSquare;
  loss.constants_ = registered_constants(LossKind::kMetric, bounds, lambda);
  return loss;
}

PairwiseLoss PairwiseLoss::custom(CustomLossSpec spec, double lambda,
                                  Bounds bounds) {
  if (spec.param_dim < 1) {
    throw std::invalid_argument("custom loss: param_dim must be >= 1");
  }
  if (!spec.value || !spec.grad) {
    throw std::invalid_argument(
        "custom loss: value and grad callbacks are required");
  }
  if (!(spec.constants.G > 0.0) || !(spec.constants.L > 0.0)) {
    throw std::invalid_argument("custom loss: constants need G > 0 and L > 0");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("custom loss: lambda must be >= 0");
  }
  PairwiseLoss loss;
  loss.kind_ = LossKind::kCustom;
  loss.lambda_ = lambda;
  loss.bounds_ = bounds;
  loss.d_ = 0;
  loss.param_dim_ = spec.param_dim;
  loss.layout_ = spec.layout;
  loss.constants_ = spec.constants;
  loss.constants_.mu = lambda > 0.0 ? lambda : spec.constants.mu;
  loss.constants_.M_ell = spec.constants.M_ell + lambda;
  if (loss.constants_.mu > 0.0 &&
      !(loss.constants_.mu < loss.step_smoothness())) {
    throw std::invalid_argument("custom loss: constants need mu < L + 2 lambda");
  }
  loss.custom_ = std::move(spec);
  return loss;
}

std::string PairwiseLoss::name() const {
  return kind_ == LossKind::kCustom ? custom_.name : to_string(kind_);
}

void PairwiseLoss::check_theta(const Eigen::VectorXd& theta) const {
  if (theta.size() != param_dim_) {
    throw std::invalid_argument(
        "theta has dimension " + std::to_string(theta.size()) +
        ", loss expects " + std::to_string(param_dim_));
  }
}

double PairwiseLoss::value(const Eigen::VectorXd& theta, const Sample& a,
                           const Sample& b) const {
  check_theta(theta);
  double data = 0.0;
  switch (kind_) {
    case LossKind::kRanking: {
      const double u = (a.y - b.y) * theta.dot(a.x - b.x);
      data = logistic_phi(u);
      break;
    }
    case LossKind::kMetric: {
      const Eigen::VectorXd delta = a.x - b.x;
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>
          m(theta.data(), d_, d_);
      const double q = delta.dot(m * delta);
      data = logistic_phi(a.y * b.y * (1.0 - q));
      break;
    }
    case LossKind::kCustom:
      data = custom_.value(theta, a, b);
      break;
  }
  return lambda_ > 0.0 ? data + lambda_ * theta.squaredNorm() : data;
}

Eigen::VectorXd PairwiseLoss::grad(const Eigen::VectorXd& theta,
                                   const Sample& a, const Sample& b) const {
  check_theta(theta);
  Eigen::VectorXd g;
  switch (kind_) {
    case LossKind::kRanking: {
      const Eigen::VectorXd delta = a.x - b.x;
      const double w = a.y - b.y;
      const double u = w * theta.dot(delta);
      g = (logistic_phi_d1(u) * w) * delta;
      break;
    }
    case LossKind::kMetric: {
      const Eigen::VectorXd delta = a.x - b.x;
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>
          m(theta.data(), d_, d_);
      const double q = delta.dot(m * delta);
      const double yy = a.y * b.y;
      const double u = yy * (1.0 - q);
      const double scale = -logistic_phi_d1(u) * yy;
      // Row-major vec of the symmetric outer product delta delta^T.
      g.resize(param_dim_);
      for (int r = 0; r < d_; ++r) {
        for (int c = 0; c < d_; ++c) {
          g[r * d_ + c] = scale * delta[r] * delta[c];
        }
      }
      break;
    }
    case LossKind::kCustom:
      g = custom_.grad(theta, a, b);
      if (g.size() != param_dim_) {
        throw std::invalid_argument("custom grad returned wrong dimension");
      }
      break;
  }
  if (lambda_ > 0.0) g += (2.0 * lambda_) * theta;
  return g;
}

Eigen::MatrixXd PairwiseLoss::hessian(const Eigen::VectorXd& theta,
                                      const Sample& a, const Sample& b) const {
  check_theta(theta);
  Eigen::MatrixXd h;
  switch (kind_) {
    case LossKind::kRanking: {
      const Eigen::VectorXd delta = a.x - b.x;
      const double w = a.y - b.y;
      const double u = w * theta.dot(delta);
      // Materialize the outer product before scaling so entry (r, c) and
      // entry (c, r) go through identical roundings and the result is
      // symmetric to the last bit.
      h = delta * delta.transpose();
      h *= logistic_phi_d2(u) * w * w;
      break;
    }
    case LossKind::kMetric: {
      const Eigen::VectorXd delta = a.x - b.x;
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>
          m(theta.data(), d_, d_);
      const double q = delta.dot(m * delta);
      const double yy = a.y * b.y;
      const double u = yy * (1.0 - q);
      Eigen::VectorXd v(param_dim_);
      for (int r = 0; r < d_; ++r) {
        for (int c = 0; c < d_; ++c) {
          v[r * d_ + c] = delta[r] * delta[c];
        }
      }
      // Same ordering concern as the ranking branch: scale after forming
      // the outer product to keep the matrix bitwise symmetric.
      h = v * v.transpose();
      h *= logistic_phi_d2(u) * yy * yy;
      break;
    }
    case LossKind::kCustom:
      if (!custom_.hessian) {
        throw std::invalid_argument("custom loss has no hessian callback");
      }
      h = custom_.hessian(theta, a, b);
      if (h.rows() != param_dim_ || h.cols() != param_dim_) {
        throw std::invalid_argument("custom hessian returned wrong dimension");
      }
      break;
  }
  if (lambda_ > 0.0) {
    h.diagonal().array() += 2.0 * lambda_;
  }
  return h;
}

double PairwiseLoss::grad_sup(double radius) const {
  if (radius <= 0.0) throw std::invalid_argument("grad_sup: radius must be > 0");
  double data_sup = 0.0;
  switch (kind_) {
    case LossKind::kRanking: {
      // ||grad|| = |phi'(theta^T a)| ||a|| with ||a|| <= 4; the worst case
      // anti-aligns theta with a, so the envelope is c / (1 + exp(-c r)).
      const double c = 4.0 * bounds_.x_max * bounds_.y_max;
      data_sup = c / (1.0 + std::exp(-c * radius));
      break;
    }
    case LossKind::kMetric: {
      // ||grad|| = |phi'(u)| |y y'| ||x - x'||^2 with the argument reaching
      // -m (1 + c r) when the quadratic form anti-aligns.
      const double m = bounds_.y_max * bounds_.y_max;
      const double c = 4.0 * bounds_.x_max * bounds_.x_max;
      data_sup = m * c / (1.0 + std::exp(-m * (1.0 + c * radius)));
      break;
    }
    case LossKind::kCustom:
      data_sup = constants_.G;
      break;
  }
  return data_sup + 2.0 * lambda_ * radius;
}

double PairwiseLoss::smoothness_sup(double radius) const {
  (void)radius;
  double data_sup = 0.0;
  switch (kind_) {
    case LossKind::kRanking: {
      // ||hessian|| = phi''(u) ||a||^2 <= (1/4) * 16, attained at u = 0.
      const double c = 4.0 * bounds_.x_max * bounds_.y_max;
      data_sup = 0.25 * c * c;
      break;
    }
    case LossKind::kMetric: {
      const double m = bounds_.y_max * bounds_.y_max;
      const double c = 4.0 * bounds_.x_max * bounds_.x_max;
      data_sup = 0.25 * m * m * c * c;
      break;
    }
    case LossKind::kCustom:
      data_sup = constants_.L;
      break;
  }
  return data_sup + 2.0 * lambda_;
}

}  // namespace pairdp
