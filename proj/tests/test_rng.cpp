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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "pairdp/parallel.hpp"
#include "pairdp/rng.hpp"
#include "pairdp/util.hpp"

using namespace pairdp;

TEST_CASE("splitmix64 matches the reference output sequence") {
  // Reference values for the standard splitmix64 constants, state 1234567.
  std::uint64_t state = 1234567ULL;
  CHECK(splitmix64_next(state) == 6457827717110365317ULL);
  CHECK(splitmix64_next(state) == 3203168211198807973ULL);
  CHECK(splitmix64_next(state) == 9817491932198370423ULL);
}

TEST_CASE("derive_seed is deterministic and tag-sensitive") {
  const std::uint64_t a = derive_seed(42, {1, 2, 3});
  CHECK(a == derive_seed(42, {1, 2, 3}));
  CHECK(a != derive_seed(43, {1, 2, 3}));
  CHECK(a != derive_seed(42, {1, 2, 4}));
  CHECK(a != derive_seed(42, {3, 2, 1}));  // order matters
  CHECK(derive_seed(42, {}) != derive_seed(42, {0}));

  // Nearby tag tuples give well-separated streams: no collisions on a grid.
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 50; ++i)
    for (std::uint64_t j = 0; j < 50; ++j)
      seen.insert(derive_seed(7, {i, j}));
  CHECK(seen.size() == 2500);
}

TEST_CASE("Rng reproduces its sequence from equal seeds") {
  Rng a(987), b(987), c(988);
  bool all_equal = true;
  bool any_differs = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_differs = any_differs || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_differs);
}

TEST_CASE("uniform stays in [0,1) and uniform_open in (0,1]") {
  Rng rng(1);
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform_open();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("uniform_index respects the bound and covers all residues") {
  Rng rng(3);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t k = rng.uniform_index(5);
    REQUIRE(k < 5);
    ++hits[static_cast<int>(k)];
  }
  for (int h : hits) CHECK(h > 500);  // roughly uniform, seed-stable
  CHECK_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}

TEST_CASE("gaussian draws have the right first and second moments") {
  Rng rng(20260814);
  const int m = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / m;
  const double var = sum_sq / m - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.05);
  CHECK(rng.gaussians_delivered() == static_cast<std::uint64_t>(m));
}

TEST_CASE("gaussian_vector consumes pairs and counts deliveries") {
  Rng rng(5);
  const Eigen::VectorXd v = rng.gaussian_vector(7);
  CHECK(v.size() == 7);
  CHECK(v.allFinite());
  CHECK(rng.gaussians_delivered() == 7);
  rng.gaussian_vector(4);
  CHECK(rng.gaussians_delivered() == 11);
  CHECK_THROWS_AS(rng.gaussian_vector(-1), std::invalid_argument);
}

TEST_CASE("uniform_ball draws stay inside the radius and fill it") {
  Rng rng(11);
  double max_norm = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd v = rng.uniform_ball(7, 2.0);
    REQUIRE(v.size() == 7);
    const double norm = v.norm();
    CHECK(norm <= 2.0 * (1.0 + 1e-12));
    max_norm = std::max(max_norm, norm);
  }
  CHECK(max_norm > 1.0);  // not collapsed near the center
}

TEST_CASE("format_double_17 round-trips exact bit patterns") {
  const double values[] = {0.0,     -0.0,   0.1,        1.0 / 3.0, 1e-300,
                           6.02e23, M_PI,   -2.5e-17,   1.0,       -1.0,
                           0.17167728210314778, 1e308};
  for (double v : values) {
    double back = 0.0;
    REQUIRE(parse_double(format_double_17(v), &back));
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
}

TEST_CASE("format_double_shortest round-trips exact bit patterns") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, i % 17 - 8);
    double back = 0.0;
    REQUIRE(parse_double(format_double_shortest(v), &back));
    CHECK(back == v);
  }
}

TEST_CASE("parse_double is strict about trailing garbage") {
  double out = 0.0;
  CHECK(parse_double("1.25", &out));
  CHECK(out == 1.25);
  CHECK(parse_double("-3e-5", &out));
  CHECK_FALSE(parse_double("", &out));
  CHECK_FALSE(parse_double("1.2x", &out));
  CHECK_FALSE(parse_double(" 1.2", &out));
  CHECK_FALSE(parse_double("abc", &out));
  // Non-finite spellings parse here; finiteness is the caller's check.
  CHECK(parse_double("nan", &out));
  CHECK(std::isnan(out));
  CHECK(parse_double("inf", &out));
  CHECK(std::isinf(out));
}

TEST_CASE("parallel_for_blocks runs every block exactly once") {
  for (int threads : {1, 4}) {
    const std::int64_t blocks = 137;
    std::vector<std::atomic<int>> counts(blocks);
    for (auto& c : counts) c.store(0);
    parallel_for_blocks(blocks, threads,
                        [&](std::int64_t b) { counts[b].fetch_add(1); });
    for (auto& c : counts) CHECK(c.load() == 1);
  }
  parallel_for_blocks(0, 4, [](std::int64_t) { FAIL("no blocks expected"); });
}

TEST_CASE("parallel_for_blocks rethrows worker exceptions") {
  CHECK_THROWS_AS(parallel_for_blocks(8, 4,
                                      [](std::int64_t b) {
                                        if (b == 5)
                                          throw std::runtime_error("boom");
                                      }),
                  std::runtime_error);
}
