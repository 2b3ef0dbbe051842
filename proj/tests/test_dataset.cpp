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

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "pairdp/dataset.hpp"
#include "pairdp/util.hpp"

using namespace pairdp;

namespace {

Sample make_sample(std::initializer_list<double> xs, double y) {
  Eigen::VectorXd x(static_cast<int>(xs.size()));
  int i = 0;
  for (double v : xs) x[i++] = v;
  return Sample{x, y};
}

bool same_samples(const Dataset& a, const Dataset& b) {
  if (a.n() != b.n() || a.dim() != b.dim()) return false;
  for (int i = 0; i < a.n(); ++i) {
    if (a.sample(i).y != b.sample(i).y) return false;
    for (int k = 0; k < a.dim(); ++k)
      if (a.sample(i).x[k] != b.sample(i).x[k]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("dataset construction validates size, bounds and finiteness") {
  std::vector<Sample> good{make_sample({0.1, 0.2}, 1.0),
                           make_sample({-0.3, 0.0}, -0.5)};
  const Dataset data(good, Bounds{});
  CHECK(data.n() == 2);
  CHECK(data.dim() == 2);

  CHECK_THROWS_AS(Dataset({make_sample({0.1}, 0.0)}, Bounds{}),
                  ValidationError);  // n < 2
  CHECK_THROWS_AS(Dataset({make_sample({2.0, 0.0}, 0.0), good[1]}, Bounds{}),
                  ValidationError);  // ||x|| > x_max
  CHECK_THROWS_AS(Dataset({make_sample({0.1, 0.0}, 1.5), good[1]}, Bounds{}),
                  ValidationError);  // |y| > y_max
  CHECK_THROWS_AS(
      Dataset({make_sample({std::nan(""), 0.0}, 0.0), good[1]}, Bounds{}),
      ValidationError);  // non-finite feature
  CHECK_THROWS_AS(Dataset({good[0], make_sample({0.1}, 0.0)}, Bounds{}),
                  ValidationError);  // inconsistent dimension
  CHECK_THROWS_AS(Dataset(good, Bounds{-1.0, 1.0}), ValidationError);
}

TEST_CASE("pair enumeration is exhaustive for every n in [2, 100]") {
  for (int n = 2; n <= 100; ++n) {
    const std::int64_t count = pair_count(n);
    REQUIRE(count == static_cast<std::int64_t>(n) * (n - 1));
    std::vector<char> seen(static_cast<size_t>(n) * n, 0);
    for (std::int64_t k = 0; k < count; ++k) {
      const PairIndex pr = pair_at(n, k);
      REQUIRE(pr.i >= 0);
      REQUIRE(pr.i < n);
      REQUIRE(pr.j >= 0);
      REQUIRE(pr.j < n);
      REQUIRE(pr.i != pr.j);
      char& flag = seen[static_cast<size_t>(pr.i) * n + pr.j];
      REQUIRE(flag == 0);  // each ordered pair exactly once
      flag = 1;
    }
  }
}

TEST_CASE("pair order is row-major with the diagonal skipped") {
  // Smallest case first.
  CHECK(pair_at(2, 0).i == 0);
  CHECK(pair_at(2, 0).j == 1);
  CHECK(pair_at(2, 1).i == 1);
  CHECK(pair_at(2, 1).j == 0);
  // n = 3 yields 6 pairs in the documented order.
  const int expect[6][2] = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  for (int k = 0; k < 6; ++k) {
    CHECK(pair_at(3, k).i == expect[k][0]);
    CHECK(pair_at(3, k).j == expect[k][1]);
  }
}

TEST_CASE("PairStream yields the same sequence as direct indexing") {
  const Dataset data = gen_synthetic(SyntheticKind::kRanking, 9, 2, 5);
  std::int64_t k = 0;
  for (const PairIndex pr : pair_stream(data)) {
    const PairIndex want = pair_at(data.n(), k);
    CHECK(pr.i == want.i);
    CHECK(pr.j == want.j);
    ++k;
  }
  CHECK(k == pair_count(9));
}

TEST_CASE("gen_synthetic is reproducible bitwise") {
  const Dataset a = gen_synthetic(SyntheticKind::kRanking, 10, 3, 7);
  const Dataset b = gen_synthetic(SyntheticKind::kRanking, 10, 3, 7);
  CHECK(same_samples(a, b));
  const Dataset c = gen_synthetic(SyntheticKind::kRanking, 10, 3, 8);
  CHECK_FALSE(same_samples(a, c));
  CHECK(a.seed().has_value());
  CHECK(*a.seed() == 7);
}

TEST_CASE("metric labels are binary and ranking labels are continuous") {
  const Dataset metric = gen_synthetic(SyntheticKind::kMetric, 100, 2, 1);
  for (int i = 0; i < metric.n(); ++i) {
    const double y = metric.sample(i).y;
    CHECK((y == 1.0 || y == -1.0));
  }
  const Dataset ranking = gen_synthetic(SyntheticKind::kRanking, 100, 2, 1);
  int interior = 0;
  for (int i = 0; i < ranking.n(); ++i) {
    const double y = ranking.sample(i).y;
    CHECK(y <= 1.0);
    CHECK(y >= -1.0);
    if (y != 1.0 && y != -1.0) ++interior;
  }
  CHECK(interior > 50);
}

TEST_CASE("synthetic features respect the declared norm bound") {
  const Dataset data = gen_synthetic(SyntheticKind::kRanking, 1000, 5, 3);
  double max_norm = 0.0;
  for (int i = 0; i < data.n(); ++i)
    max_norm = std::max(max_norm, data.sample(i).x.norm());
  CHECK(max_norm <= 1.0);
  CHECK(max_norm > 0.5);  // the ball is actually used
  CHECK_THROWS_AS(gen_synthetic(SyntheticKind::kRanking, 1, 3, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_synthetic(SyntheticKind::kRanking, 10, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("synthetic_direction is a unit vector fixed per (kind, d)") {
  const Eigen::VectorXd w1 = synthetic_direction(SyntheticKind::kRanking, 4);
  const Eigen::VectorXd w2 = synthetic_direction(SyntheticKind::kRanking, 4);
  CHECK(w1 == w2);
  CHECK(w1.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("CSV save and load round-trips bit for bit") {
  const std::string path = "/tmp/pairdp_test_dataset.csv";
  const Dataset data = gen_synthetic(SyntheticKind::kRanking, 25, 4, 11);
  save_dataset(data, path);
  const Dataset loaded = load_dataset(path, DatasetDescriptor{4, Bounds{}});
  CHECK(same_samples(data, loaded));
  std::remove(path.c_str());
}

TEST_CASE("CSV loader reports malformed input precisely") {
  const std::string path = "/tmp/pairdp_test_dataset_bad.csv";
  auto write = [&](const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
  };

  write("x0,x1,y\n0.1,0.2,1\n0.3,-0.4,-1\n");
  CHECK_NOTHROW(load_dataset(path, DatasetDescriptor{2, Bounds{}}));

  write("x0,wrong,y\n0.1,0.2,1\n");
  CHECK_THROWS_AS(load_dataset(path, DatasetDescriptor{2, Bounds{}}),
                  ParseError);

  write("x0,x1,y\n0.1,0.2\n");  // missing field
  CHECK_THROWS_AS(load_dataset(path, DatasetDescriptor{2, Bounds{}}),
                  ParseError);

  write("x0,x1,y\n0.1,abc,1\n");  // unparseable field
  CHECK_THROWS_AS(load_dataset(path, DatasetDescriptor{2, Bounds{}}),
                  ParseError);

  write("x0,x1,y\n0.1,NaN,1\n");  // non-finite feature
  CHECK_THROWS_AS(load_dataset(path, DatasetDescriptor{2, Bounds{}}),
                  ParseError);

  write("x0,x1,y\n0.9,0.9,1\n0.0,0.0,0\n");  // ||x|| > 1
  CHECK_THROWS_AS(load_dataset(path, DatasetDescriptor{2, Bounds{}}),
                  ValidationError);

  std::remove(path.c_str());
  CHECK_THROWS_AS(load_dataset("/tmp/definitely_missing_pairdp.csv",
                               DatasetDescriptor{2, Bounds{}}),
                  ParseError);
}

TEST_CASE("remove_sample drops exactly one index") {
  const Dataset data = gen_synthetic(SyntheticKind::kRanking, 6, 3, 2);
  const Dataset removed = remove_sample(data, 2);
  REQUIRE(removed.n() == 5);
  const int mapped[5] = {0, 1, 3, 4, 5};
  for (int i = 0; i < 5; ++i) {
    CHECK(removed.sample(i).x == data.sample(mapped[i]).x);
    CHECK(removed.sample(i).y == data.sample(mapped[i]).y);
  }
  CHECK_THROWS_AS(remove_sample(data, 6), std::out_of_range);
  CHECK_THROWS_AS(remove_sample(data, -1), std::out_of_range);

  const Dataset two = gen_synthetic(SyntheticKind::kRanking, 2, 3, 2);
  CHECK_THROWS_AS(remove_sample(two, 0), ValidationError);
}

TEST_CASE("replace_sample swaps one index and revalidates") {
  const Dataset data = gen_synthetic(SyntheticKind::kRanking, 6, 3, 2);
  Sample z = make_sample({0.5, 0.0, 0.0}, -1.0);
  const Dataset replaced = replace_sample(data, 3, z);
  REQUIRE(replaced.n() == 6);
  CHECK(replaced.sample(3).x == z.x);
  CHECK(replaced.sample(3).y == z.y);
  for (int i = 0; i < 6; ++i) {
    if (i == 3) continue;
    CHECK(replaced.sample(i).x == data.sample(i).x);
  }
  CHECK_THROWS_AS(replace_sample(data, 7, z), std::out_of_range);
  CHECK_THROWS_AS(replace_sample(data, 0, make_sample({2.0, 0.0, 0.0}, 0.0)),
                  ValidationError);
}

TEST_CASE("sample sources draw deterministically and within bounds") {
  const Dataset data = gen_synthetic(SyntheticKind::kRanking, 8, 3, 4);
  DatasetSource ds(data);
  Rng a(9), b(9);
  for (int i = 0; i < 50; ++i) {
    const Sample za = ds.draw(a);
    const Sample zb = ds.draw(b);
    CHECK(za.x == zb.x);
    bool found = false;
    for (int j = 0; j < data.n(); ++j)
      if (data.sample(j).x == za.x && data.sample(j).y == za.y) found = true;
    CHECK(found);
  }

  SyntheticSource ss(SyntheticKind::kMetric, 3);
  Rng c(10);
  for (int i = 0; i < 50; ++i) {
    const Sample z = ss.draw(c);
    CHECK(z.x.norm() <= 1.0);
    CHECK((z.y == 1.0 || z.y == -1.0));
  }
}
