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
// Pairwise losses: functions of a parameter vector and an ordered pair of
// samples. Two families ship with the library, both built on the logistic
// link phi(u) = log(1 + exp(-u)):
//
//   ranking:  l(theta; z, z') = phi((y - y') * theta^T (x - x'))
//   metric:   l(theta; z, z') = phi(y y' * (1 - (x-x')^T Theta (x-x')))
//             with Theta the d x d matrix stored row-major in theta (p = d^2)
//
// An optional Tikhonov term lambda * ||theta||_2^2 is added per pair. Each
// loss carries registered constants (Lipschitz bound G of the data term,
// smoothness bound L, Polyak-Lojasiewicz parameter mu, value bound M_ell)
// that drive noise calibration and step-size defaults.

#ifndef PAIRDP_LOSSES_HPP_
#define PAIRDP_LOSSES_HPP_

#include <functional>
#include <string>

#include <Eigen/Core>

#include "pairdp/dataset.hpp"

namespace pairdp {

// log(1 + exp(-u)), evaluated without overflow for |u| up to at least 500.
double logistic_phi(double u);
// First derivative, -1 / (1 + exp(u)).
double logistic_phi_d1(double u);
// Second derivative, exp(u) / (1 + exp(u))^2.
double logistic_phi_d2(double u);

enum class LossKind { kRanking, kMetric, kCustom };

LossKind loss_kind_from_string(const std::string& name);
std::string to_string(LossKind kind);

// Registered analytic constants of a loss family on the declared domain.
// G and L describe the data term alone; on the radius-r constraint set the
// regularized loss is (G + 2 lambda r)-Lipschitz and (L + 2 lambda)-smooth.
struct LossConstants {
  double G = 0.0;      // Lipschitz bound of the data-term gradient norm
  double L = 0.0;      // smoothness bound of the data term
  double mu = 0.0;     // PL parameter (lambda when regularized, else 0)
  double M_ell = 0.0;  // value upper bound on the constraint set
};

// User-supplied loss plug-in. Callbacks implement the data term only; the
// wrapper adds the lambda * ||theta||^2 regularizer and its derivatives.
struct CustomLossSpec {
  int param_dim = 0;
  ParamLayout layout = ParamLayout::kVector;
  std::function<double(const Eigen::VectorXd&, const Sample&, const Sample&)>
      value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Sample&,
                                const Sample&)>
      grad;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Sample&,
                                const Sample&)>
      hessian;  // may be empty; hessian() then throws
  LossConstants constants;  // data-term constants declared by the caller
  std::string name = "custom";
};

// Returns the registered constants for a named loss family. Values are
// registered for unit bounds (x_max = 1, y_max = 1) and the unit-ball
// constraint set; other bounds raise std::invalid_argument.
LossConstants registered_constants(LossKind kind, const Bounds& bounds,
                                   double lambda);

// A pairwise loss with registered constants, gradient, and Hessian.
// Instances are immutable and cheap to copy.
class PairwiseLoss {
 public:
  static PairwiseLoss ranking(int d, double lambda = 0.0, Bounds bounds = {});
  static PairwiseLoss metric(int d, double lambda = 0.0, Bounds bounds = {});
  static PairwiseLoss custom(CustomLossSpec spec, double lambda = 0.0,
                             Bounds bounds = {});

  double value(const Eigen::VectorXd& theta, const Sample& a,
               const Sample& b) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& theta, const Sample& a,
                       const Sample& b) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& theta, const Sample& a,
                          const Sample& b) const;

  LossKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const Bounds& bounds() const { return bounds_; }
  const LossConstants& constants() const { return constants_; }
  int dim() const { return d_; }
  int param_dim() const { return param_dim_; }
  ParamLayout layout() const { return layout_; }
  std::string name() const;

  // Smoothness bound used by the default step size, L + 2 lambda.
  double step_smoothness() const { return constants_.L + 2.0 * lambda_; }
  // Lipschitz bound of the full loss on the radius-r ball, G + 2 lambda r.
  double lipschitz_bound(double radius) const {
    return constants_.G + 2.0 * lambda_ * radius;
  }

  // Tight worst-case envelopes of the gradient norm and of the smoothness
  // modulus over the radius-r parameter ball and the declared bounds. The
  // registered G and L are the published per-family constants; these
  // envelopes are the attainable suprema, which are larger, and are what
  // sampled evaluations are checked against.
  double grad_sup(double radius) const;
  double smoothness_sup(double radius) const;

  ModelParams zero_params() const {
    return ModelParams{Eigen::VectorXd::Zero(param_dim_), layout_};
  }

 private:
  PairwiseLoss() = default;
  void check_theta(const Eigen::VectorXd& theta) const;

  LossKind kind_ = LossKind::kRanking;
  double lambda_ = 0.0;
  Bounds bounds_;
  LossConstants constants_;
  int d_ = 0;          // feature dimension (0 for custom)
  int param_dim_ = 0;  // p
  ParamLayout layout_ = ParamLayout::kVector;
  CustomLossSpec custom_;
};

}  // namespace pairdp

#endif  // PAIRDP_LOSSES_HPP_
