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
// Datasets of (feature, label) samples with declared bounds, the ordered
// pair stream over them, synthetic data generation, and CSV input/output.

#ifndef PAIRDP_DATASET_HPP_
#define PAIRDP_DATASET_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pairdp/rng.hpp"

namespace pairdp {

// Domain bounds declared by a dataset: every feature vector satisfies
// ||x||_2 <= x_max and every label |y| <= y_max.
struct Bounds {
  double x_max = 1.0;
  double y_max = 1.0;
};

struct Sample {
  Eigen::VectorXd x;
  double y = 0.0;
};

// How a flat parameter vector is interpreted by a loss.
enum class ParamLayout {
  kVector,           // plain vector in R^d
  kFlattenedSquare,  // row-major d x d matrix, p = d * d
};

// A parameter vector tagged with its layout.
struct ModelParams {
  Eigen::VectorXd theta;
  ParamLayout layout = ParamLayout::kVector;
};

// Immutable collection of samples plus bound metadata. Validation happens at
// construction; out-of-bound data is rejected, never rescaled.
class Dataset {
 public:
  Dataset(std::vector<Sample> samples, Bounds bounds,
          std::optional<std::uint64_t> seed = std::nullopt);

  int n() const { return static_cast<int>(samples_.size()); }
  int dim() const { return dim_; }
  const Sample& sample(int i) const { return samples_[static_cast<size_t>(i)]; }
  const std::vector<Sample>& samples() const { return samples_; }
  const Bounds& bounds() const { return bounds_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

 private:
  std::vector<Sample> samples_;
  Bounds bounds_;
  std::optional<std::uint64_t> seed_;
  int dim_ = 0;
};

// Copy of a dataset with sample i removed. Requires n >= 3 so the result
// still has pairs. The seed tag is dropped: the result is a derived dataset,
// not a reproducible draw.
Dataset remove_sample(const Dataset& data, int i);

// Copy of a dataset with sample i replaced by z (the replacement-adjacent
// neighbor used by sensitivity and stability checks). z is validated against
// the dataset bounds.
Dataset replace_sample(const Dataset& data, int i, Sample z);

// Ordered pair (i, j), i != j, of sample indices.
struct PairIndex {
  int i = 0;
  int j = 0;
};

// Number of ordered pairs, n * (n - 1).
inline std::int64_t pair_count(int n) {
  return static_cast<std::int64_t>(n) * (n - 1);
}

// The k-th pair in row-major order: i ascending, then j ascending with the
// diagonal skipped.
inline PairIndex pair_at(int n, std::int64_t k) {
  const int i = static_cast<int>(k / (n - 1));
  const int rem = static_cast<int>(k % (n - 1));
  return PairIndex{i, rem + (rem >= i ? 1 : 0)};
}

// Iterable view over the ordered pair indices of a dataset, in row-major
// order. Yields exactly pair_count(n) pairs.
class PairStream {
 public:
  explicit PairStream(int n) : n_(n) {}

  class iterator {
   public:
    iterator(int n, std::int64_t k) : n_(n), k_(k) {}
    PairIndex operator*() const { return pair_at(n_, k_); }
    iterator& operator++() {
      ++k_;
      return *this;
    }
    bool operator!=(const iterator& other) const { return k_ != other.k_; }
    bool operator==(const iterator& other) const { return k_ == other.k_; }

   private:
    int n_;
    std::int64_t k_;
  };

  iterator begin() const { return iterator(n_, 0); }
  iterator end() const { return iterator(n_, pair_count(n_)); }
  std::int64_t size() const { return pair_count(n_); }

 private:
  int n_;
};

// Pair stream over a dataset's index range.
inline PairStream pair_stream(const Dataset& data) {
  return PairStream(data.n());
}

// Synthetic data families. Both draw features uniformly from the unit ball.
// Ranking labels are a clipped noisy linear score (continuous in [-1, 1]);
// metric labels are the sign of a noisy linear score (binary, -1 or +1).
enum class SyntheticKind { kRanking, kMetric };

SyntheticKind synthetic_kind_from_string(const std::string& name);
std::string to_string(SyntheticKind kind);

// The hidden unit direction that defines the synthetic label distribution.
// It depends only on (kind, d), so datasets generated with different seeds
// are i.i.d. draws from one fixed population.
Eigen::VectorXd synthetic_direction(SyntheticKind kind, int d);

// Draws one sample from the synthetic population.
Sample synthetic_sample(SyntheticKind kind, const Eigen::VectorXd& direction,
                        Rng& rng);

// Generates n samples with the given seed. Identical arguments reproduce the
// dataset bitwise.
Dataset gen_synthetic(SyntheticKind kind, int n, int d, std::uint64_t seed);

// Expected shape of a CSV dataset: column count and bounds to validate.
struct DatasetDescriptor {
  int d = 0;
  Bounds bounds;
};

// Loads a dataset from CSV with header x0,...,x{d-1},y. Throws ParseError
// (with the offending row index) on malformed or non-finite fields and
// ValidationError (naming the sample) on bound violations.
Dataset load_dataset(const std::string& path, const DatasetDescriptor& desc);

// Writes CSV that load_dataset reads back bit-for-bit.
void save_dataset(const Dataset& data, const std::string& path);

// A population of samples that can be drawn from. Used for Monte-Carlo risk
// estimates and for replacement draws in stability experiments.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual Sample draw(Rng& rng) const = 0;
};

// The synthetic population behind gen_synthetic for a given (kind, d).
class SyntheticSource : public SampleSource {
 public:
  SyntheticSource(SyntheticKind kind, int d);
  Sample draw(Rng& rng) const override;

 private:
  SyntheticKind kind_;
  Eigen::VectorXd direction_;
};

// The empirical distribution of a held-out dataset (uniform index draw).
class DatasetSource : public SampleSource {
 public:
  explicit DatasetSource(const Dataset& data) : data_(&data) {}
  Sample draw(Rng& rng) const override {
    return data_->sample(static_cast<int>(
        rng.uniform_index(static_cast<std::uint64_t>(data_->n()))));
  }

 private:
  const Dataset* data_;
};

}  // namespace pairdp

#endif  // PAIRDP_DATASET_HPP_
