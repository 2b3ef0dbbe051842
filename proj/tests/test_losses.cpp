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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pairdp/losses.hpp"
#include "pairdp/rng.hpp"

using namespace pairdp;

namespace {

Sample make_sample(std::initializer_list<double> xs, double y) {
  Eigen::VectorXd x(static_cast<int>(xs.size()));
  int i = 0;
  for (double v : xs) x[i++] = v;
  return Sample{x, y};
}

// Random in-bound sample for property sweeps.
Sample random_sample(int d, Rng& rng, bool binary_label) {
  Sample s;
  s.x = rng.uniform_ball(d, 1.0);
  s.y = binary_label ? (rng.uniform() < 0.5 ? -1.0 : 1.0)
                     : 2.0 * rng.uniform() - 1.0;
  return s;
}

// Central finite difference of the loss value; step 1e-6 per coordinate.
Eigen::VectorXd fd_grad(const PairwiseLoss& loss, const Eigen::VectorXd& theta,
                        const Sample& a, const Sample& b) {
  const double h = 1e-6;
  Eigen::VectorXd g(theta.size());
  Eigen::VectorXd t = theta;
  for (int k = 0; k < theta.size(); ++k) {
    const double saved = t[k];
    t[k] = saved + h;
    const double up = loss.value(t, a, b);
    t[k] = saved - h;
    const double down = loss.value(t, a, b);
    t[k] = saved;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

// Central finite difference of the gradient; step 1e-5 per coordinate.
Eigen::MatrixXd fd_hessian(const PairwiseLoss& loss,
                           const Eigen::VectorXd& theta, const Sample& a,
                           const Sample& b) {
  const double h = 1e-5;
  Eigen::MatrixXd m(theta.size(), theta.size());
  Eigen::VectorXd t = theta;
  for (int k = 0; k < theta.size(); ++k) {
    const double saved = t[k];
    t[k] = saved + h;
    const Eigen::VectorXd up = loss.grad(t, a, b);
    t[k] = saved - h;
    const Eigen::VectorXd down = loss.grad(t, a, b);
    t[k] = saved;
    m.col(k) = (up - down) / (2.0 * h);
  }
  return m;
}

}  // namespace

TEST_CASE("logistic link evaluates to the frozen reference values") {
  // log(1 + exp(-u)) at pinned arguments; references evaluated from the
  // analytic closed form with this toolchain's libm.
  CHECK(logistic_phi(0.0) == std::log(2.0));
  CHECK(logistic_phi(1.0) == doctest::Approx(0.31326168751822286).epsilon(1e-15));
  CHECK(logistic_phi(2.0) == doctest::Approx(0.12692801104297249).epsilon(1e-15));
  CHECK(logistic_phi(-4.0) == doctest::Approx(4.0181499279178094).epsilon(1e-15));
  // Stability far outside the saturation region.
  CHECK(logistic_phi(800.0) == 0.0);
  CHECK(logistic_phi(-800.0) == 800.0);
  CHECK(std::isfinite(logistic_phi(500.0)));
  CHECK(std::isfinite(logistic_phi(-500.0)));
}

TEST_CASE("logistic link derivatives match their closed forms") {
  CHECK(logistic_phi_d1(0.0) == -0.5);
  CHECK(logistic_phi_d1(2.0) ==
        doctest::Approx(-0.11920292202211755).epsilon(1e-15));
  CHECK(logistic_phi_d1(800.0) == 0.0);
  CHECK(logistic_phi_d1(-800.0) == -1.0);
  CHECK(logistic_phi_d2(0.0) == 0.25);
  CHECK(logistic_phi_d2(800.0) == 0.0);
  CHECK(logistic_phi_d2(-800.0) == 0.0);
  // The second derivative is even in u.
  CHECK(logistic_phi_d2(3.0) == logistic_phi_d2(-3.0));
  // phi is decreasing and convex: d1 < 0, d2 > 0 on moderate arguments.
  for (double u : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
    CHECK(logistic_phi_d1(u) < 0.0);
    CHECK(logistic_phi_d2(u) > 0.0);
  }
}

TEST_CASE("ranking loss at theta = 0 is log 2 for any pair") {
  const PairwiseLoss loss = PairwiseLoss::ranking(3);
  Rng rng(1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < 20; ++i) {
    const Sample a = random_sample(3, rng, false);
    const Sample b = random_sample(3, rng, false);
    CHECK(loss.value(zero, a, b) == std::log(2.0));
  }
}

TEST_CASE("ranking worked example matches the hand evaluation") {
  const PairwiseLoss loss = PairwiseLoss::ranking(2);
  Eigen::VectorXd theta(2);
  theta << 1.0, 0.0;
  const Sample a = make_sample({1.0, 0.0}, 1.0);
  const Sample b = make_sample({0.0, 1.0}, -1.0);
  // u = (y - y') theta^T (x - x') = 2 * 1 = 2.
  CHECK(loss.value(theta, a, b) == logistic_phi(2.0));
  const Eigen::VectorXd g = loss.grad(theta, a, b);
  // grad = phi'(2) * 2 * (x - x') = (-0.2384058..., +0.2384058...).
  CHECK(g[0] == doctest::Approx(-0.23840584404423509).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(0.23840584404423509).epsilon(1e-15));
  const Eigen::VectorXd fd = fd_grad(loss, theta, a, b);
  CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
}

TEST_CASE("ranking gradient at theta = 0 is the closed form") {
  const PairwiseLoss loss = PairwiseLoss::ranking(3);
  Rng rng(2);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < 20; ++i) {
    const Sample a = random_sample(3, rng, false);
    const Sample b = random_sample(3, rng, false);
    const Eigen::VectorXd want = -0.5 * (a.y - b.y) * (a.x - b.x);
    const Eigen::VectorXd got = loss.grad(zero, a, b);
    CHECK((got - want).norm() <= 1e-15);
  }
}

TEST_CASE("ranking Hessian at theta = 0 matches the worked example") {
  const PairwiseLoss loss = PairwiseLoss::ranking(2);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const Sample a = make_sample({1.0, 0.0}, 1.0);
  const Sample b = make_sample({0.0, 1.0}, -1.0);
  // phi''(0) * (y - y')^2 * (x - x')(x - x')^T = [[1, -1], [-1, 1]].
  const Eigen::MatrixXd h = loss.hessian(zero, a, b);
  CHECK(h(0, 0) == 1.0);
  CHECK(h(0, 1) == -1.0);
  CHECK(h(1, 0) == -1.0);
  CHECK(h(1, 1) == 1.0);
  const Eigen::MatrixXd fd = fd_hessian(loss, zero, a, b);
  CHECK((h - fd).norm() <= 1e-5 * std::max(1.0, h.norm()));
}

TEST_CASE("metric loss at theta = 0 reduces to phi(y y')") {
  const PairwiseLoss loss = PairwiseLoss::metric(2);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  const Sample a = make_sample({0.3, 0.1}, 1.0);
  const Sample b = make_sample({-0.2, 0.4}, 1.0);
  CHECK(loss.value(zero, a, b) ==
        doctest::Approx(0.31326168751822286).epsilon(1e-15));
  const Sample c = make_sample({-0.2, 0.4}, -1.0);
  CHECK(loss.value(zero, a, c) == logistic_phi(-1.0));
}

TEST_CASE("metric gradient vanishes when the two feature vectors agree") {
  const PairwiseLoss loss = PairwiseLoss::metric(3);
  Rng rng(3);
  const Eigen::VectorXd theta = rng.uniform_ball(9, 1.0);
  const Sample a = make_sample({0.2, -0.1, 0.4}, 1.0);
  Sample b = a;
  b.y = -1.0;
  const Eigen::VectorXd g = loss.grad(theta, a, b);
  CHECK(g.norm() == 0.0);  // lambda = 0, x - x' = 0 annihilates the data term
}

TEST_CASE("finite differences confirm gradients and Hessians for both "
          "families") {
  struct Family {
    PairwiseLoss loss;
    int p;
    bool binary;
  };
  const Family families[] = {
      {PairwiseLoss::ranking(4, 0.0), 4, false},
      {PairwiseLoss::ranking(4, 0.1), 4, false},
      {PairwiseLoss::metric(3, 0.0), 9, true},
      {PairwiseLoss::metric(3, 0.05), 9, true},
  };
  Rng rng(17);
  for (const Family& fam : families) {
    double worst_grad = 0.0;
    double worst_hess = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const Eigen::VectorXd theta = rng.uniform_ball(fam.p, 1.0);
      const Sample a = random_sample(fam.loss.dim(), rng, fam.binary);
      const Sample b = random_sample(fam.loss.dim(), rng, fam.binary);
      const Eigen::VectorXd g = fam.loss.grad(theta, a, b);
      const Eigen::VectorXd gfd = fd_grad(fam.loss, theta, a, b);
      worst_grad = std::max(
          worst_grad, (g - gfd).norm() / std::max(1.0, g.norm()));
      if (rep % 10 == 0) {  // Hessian differencing is p times pricier
        const Eigen::MatrixXd h = fam.loss.hessian(theta, a, b);
        const Eigen::MatrixXd hfd = fd_hessian(fam.loss, theta, a, b);
        worst_hess = std::max(
            worst_hess, (h - hfd).norm() / std::max(1.0, h.norm()));
      }
    }
    CHECK(worst_grad < 1e-6);
    CHECK(worst_hess < 1e-5);
  }
}

TEST_CASE("Hessians are exactly symmetric") {
  const PairwiseLoss ranking = PairwiseLoss::ranking(4, 0.1);
  const PairwiseLoss metric = PairwiseLoss::metric(2, 0.1);
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const Sample a = random_sample(4, rng, false);
    const Sample b = random_sample(4, rng, false);
    const Eigen::MatrixXd h =
        ranking.hessian(rng.uniform_ball(4, 1.0), a, b);
    CHECK(h == h.transpose().eval());
    const Sample c = random_sample(2, rng, true);
    const Sample d = random_sample(2, rng, true);
    const Eigen::MatrixXd m = metric.hessian(rng.uniform_ball(4, 1.0), c, d);
    CHECK(m == m.transpose().eval());
  }
}

TEST_CASE("saturated data term leaves only the regularizer Hessian") {
  const double lambda = 0.3;
  const PairwiseLoss loss = PairwiseLoss::ranking(2, lambda);
  // theta far along (x - x') saturates phi'' to exactly zero.
  Eigen::VectorXd theta(2);
  theta << 500.0, -500.0;
  const Sample a = make_sample({1.0, 0.0}, 1.0);
  const Sample b = make_sample({0.0, 1.0}, -1.0);
  const Eigen::MatrixXd h = loss.hessian(theta, a, b);
  const Eigen::MatrixXd want =
      2.0 * lambda * Eigen::MatrixXd::Identity(2, 2);
  CHECK((h - want).norm() == 0.0);
}

TEST_CASE("registered constants match the published closed forms") {
  const LossConstants rank0 =
      registered_constants(LossKind::kRanking, Bounds{}, 0.0);
  CHECK(rank0.G == 2.0);
  CHECK(rank0.L == (2.0 + 2.0 * std::sqrt(2.0)) / (3.0 + 2.0 * std::sqrt(2.0)));
  CHECK(rank0.L == doctest::Approx(0.84).epsilon(0.02));
  CHECK(rank0.mu == 0.0);

  const LossConstants metric0 =
      registered_constants(LossKind::kMetric, Bounds{}, 0.0);
  CHECK(metric0.G == 1.0);
  CHECK(metric0.L == (1.0 + std::sqrt(2.0)) / (6.0 + 4.0 * std::sqrt(2.0)));
  CHECK(metric0.L == doctest::Approx(0.21).epsilon(0.02));

  const LossConstants rank_r =
      registered_constants(LossKind::kRanking, Bounds{}, 0.1);
  CHECK(rank_r.mu == 0.1);
  // Value bound: worst-case link argument 4 (ranking) / 5 (metric) on the
  // unit set, plus lambda * r^2 with r = 1.
  CHECK(rank_r.M_ell == logistic_phi(-4.0) + 0.1);
  const LossConstants metric_r =
      registered_constants(LossKind::kMetric, Bounds{}, 0.2);
  CHECK(metric_r.M_ell == logistic_phi(-5.0) + 0.2);

  CHECK_THROWS_AS(
      registered_constants(LossKind::kRanking, Bounds{2.0, 1.0}, 0.0),
      std::invalid_argument);
  CHECK_THROWS_AS(registered_constants(LossKind::kRanking, Bounds{}, -0.1),
                  std::invalid_argument);
}

TEST_CASE("loss values stay within [0, M_ell] on the constraint set") {
  const PairwiseLoss losses[] = {PairwiseLoss::ranking(3, 0.1),
                                 PairwiseLoss::metric(2, 0.1)};
  Rng rng(31);
  for (const PairwiseLoss& loss : losses) {
    const bool binary = loss.kind() == LossKind::kMetric;
    for (int rep = 0; rep < 10000; ++rep) {
      const Eigen::VectorXd theta = rng.uniform_ball(loss.param_dim(), 1.0);
      const Sample a = random_sample(loss.dim(), rng, binary);
      const Sample b = random_sample(loss.dim(), rng, binary);
      const double v = loss.value(theta, a, b);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= loss.constants().M_ell);
    }
  }
}

TEST_CASE("ranking gradient at theta = 0 stays under the registered G") {
  // The published G is the link-slope-1/2 bound, attained at theta = 0 where
  // the link argument is zero. Away from zero the slope grows toward 1 and
  // only the attainable envelope (grad_sup) bounds the gradient.
  const PairwiseLoss loss = PairwiseLoss::ranking(3);
  Rng rng(37);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  double worst = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    const Sample a = random_sample(3, rng, false);
    const Sample b = random_sample(3, rng, false);
    worst = std::max(worst, loss.grad(zero, a, b).norm());
  }
  CHECK(worst <= loss.constants().G * (1.0 + 1e-12));
  CHECK(loss.grad_sup(1.0) >= loss.constants().G);
}

TEST_CASE("sampled gradients respect the attainable envelopes") {
  // The published per-family constants are not suprema for the metric
  // family; the attainable envelopes are, and sampled evaluations must stay
  // under them for both families.
  const PairwiseLoss losses[] = {PairwiseLoss::ranking(3, 0.0),
                                 PairwiseLoss::metric(2, 0.0)};
  Rng rng(41);
  for (const PairwiseLoss& loss : losses) {
    const bool binary = loss.kind() == LossKind::kMetric;
    const int p = loss.param_dim();
    double worst_grad = 0.0;
    double worst_smooth = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
      const Eigen::VectorXd t1 = rng.uniform_ball(p, 1.0);
      const Eigen::VectorXd t2 = rng.uniform_ball(p, 1.0);
      const Sample a = random_sample(loss.dim(), rng, binary);
      const Sample b = random_sample(loss.dim(), rng, binary);
      const Eigen::VectorXd g1 = loss.grad(t1, a, b);
      worst_grad = std::max(worst_grad, g1.norm());
      const double dist = (t1 - t2).norm();
      if (dist > 1e-12) {
        const Eigen::VectorXd g2 = loss.grad(t2, a, b);
        worst_smooth = std::max(worst_smooth, (g1 - g2).norm() / dist);
      }
    }
    CHECK(worst_grad <= loss.grad_sup(1.0) * (1.0 + 1e-9));
    CHECK(worst_smooth <= loss.smoothness_sup(1.0) * (1.0 + 1e-9));
  }
}

TEST_CASE("derived bounds compose the registered constants") {
  const PairwiseLoss loss = PairwiseLoss::ranking(3, 0.25);
  CHECK(loss.step_smoothness() == loss.constants().L + 0.5);
  CHECK(loss.lipschitz_bound(2.0) == loss.constants().G + 1.0);
  CHECK(loss.param_dim() == 3);
  CHECK(loss.layout() == ParamLayout::kVector);
  const PairwiseLoss m = PairwiseLoss::metric(3);
  CHECK(m.param_dim() == 9);
  CHECK(m.layout() == ParamLayout::kFlattenedSquare);
  CHECK(m.zero_params().theta.size() == 9);
}

TEST_CASE("parameter dimension mismatches are rejected") {
  const PairwiseLoss loss = PairwiseLoss::ranking(3);
  const Sample a = make_sample({0.1, 0.2, 0.0}, 1.0);
  const Sample b = make_sample({0.0, 0.1, 0.2}, -1.0);
  const Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(loss.value(bad, a, b), std::invalid_argument);
  CHECK_THROWS_AS(loss.grad(bad, a, b), std::invalid_argument);
  CHECK_THROWS_AS(loss.hessian(bad, a, b), std::invalid_argument);
}

TEST_CASE("custom losses wrap user callbacks plus the regularizer") {
  CustomLossSpec spec;
  spec.param_dim = 2;
  // Data term (theta - [1, 0])^T (theta - [1, 0]), independent of samples.
  Eigen::VectorXd center(2);
  center << 1.0, 0.0;
  spec.value = [center](const Eigen::VectorXd& t, const Sample&,
                        const Sample&) { return (t - center).squaredNorm(); };
  spec.grad = [center](const Eigen::VectorXd& t, const Sample&,
                       const Sample&) -> Eigen::VectorXd {
    return 2.0 * (t - center);
  };
  spec.hessian = [](const Eigen::VectorXd& t, const Sample&,
                    const Sample&) -> Eigen::MatrixXd {
    return 2.0 * Eigen::MatrixXd::Identity(t.size(), t.size());
  };
  spec.constants = LossConstants{4.0, 2.0, 2.0, 8.0};

  const double lambda = 0.5;
  const PairwiseLoss loss = PairwiseLoss::custom(spec, lambda);
  const Sample a = make_sample({0.0, 0.0}, 0.0);
  Eigen::VectorXd t(2);
  t << 3.0, 4.0;
  CHECK(loss.value(t, a, a) ==
        (t - center).squaredNorm() + lambda * t.squaredNorm());
  const Eigen::VectorXd g = loss.grad(t, a, a);
  const Eigen::VectorXd want = 2.0 * (t - center) + 2.0 * lambda * t;
  CHECK((g - want).norm() == 0.0);
  const Eigen::MatrixXd h = loss.hessian(t, a, a);
  CHECK((h - (2.0 + 2.0 * lambda) * Eigen::MatrixXd::Identity(2, 2)).norm() ==
        0.0);
  CHECK(loss.kind() == LossKind::kCustom);
  CHECK(loss.constants().G == 4.0);
  // A positive regularizer replaces the user-declared curvature constant
  // with the conservative lambda-driven one; without it the declared value
  // passes through untouched.
  CHECK(loss.constants().mu == lambda);
  CustomLossSpec relaxed = spec;
  relaxed.constants.mu = 1.0;
  const PairwiseLoss plain = PairwiseLoss::custom(relaxed);
  CHECK(plain.constants().mu == 1.0);
}

TEST_CASE("custom loss without a Hessian callback rejects hessian calls") {
  CustomLossSpec spec;
  spec.param_dim = 2;
  spec.value = [](const Eigen::VectorXd& t, const Sample&, const Sample&) {
    return t.squaredNorm();
  };
  spec.grad = [](const Eigen::VectorXd& t, const Sample&,
                 const Sample&) -> Eigen::VectorXd { return 2.0 * t; };
  spec.constants = LossConstants{1.0, 2.0, 0.0, 4.0};
  const PairwiseLoss loss = PairwiseLoss::custom(spec);
  const Sample a = make_sample({0.0, 0.0}, 0.0);
  CHECK_THROWS(loss.hessian(Eigen::VectorXd::Zero(2), a, a));
}

TEST_CASE("loss kind strings round-trip") {
  CHECK(loss_kind_from_string("ranking") == LossKind::kRanking);
  CHECK(loss_kind_from_string("metric") == LossKind::kMetric);
  CHECK(to_string(LossKind::kRanking) == "ranking");
  CHECK(to_string(LossKind::kMetric) == "metric");
  CHECK_THROWS_AS(loss_kind_from_string("nope"), std::invalid_argument);
}
