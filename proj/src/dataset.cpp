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

#include "pairdp/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pairdp/util.hpp"

namespace pairdp {
namespace {

// Relative slack for bound validation. Catches genuine violations while
// tolerating the last-ulp wobble of norms recomputed after serialization.
constexpr double kBoundSlack = 1e-9;

// Label noise levels of the synthetic recipes (recorded in README and report
// config echoes; changing them changes every seeded dataset).
constexpr double kRankingLabelNoise = 0.1;
constexpr double kMetricScoreNoise = 0.05;

// Fixed master seed for the hidden population direction. Independent of the
// per-dataset seeds so all datasets of a (kind, d) family share a population.
constexpr std::uint64_t kPopulationMaster = 0x70707A31CE5EEDULL;

void validate_sample(const Sample& s, int dim, const Bounds& bounds, int index,
                     const char* origin) {
  if (s.x.size() != dim) {
    throw ValidationError(std::string(origin) + ": sample " +
                          std::to_string(index) + " has dimension " +
                          std::to_string(s.x.size()) + ", expected " +
                          std::to_string(dim));
  }
  if (!s.x.allFinite() || !std::isfinite(s.y)) {
    throw ValidationError(std::string(origin) + ": sample " +
                          std::to_string(index) + " has a non-finite field");
  }
  const double xnorm = s.x.norm();
  if (xnorm > bounds.x_max * (1.0 + kBoundSlack)) {
    throw ValidationError(std::string(origin) + ": sample " +
                          std::to_string(index) + " violates ||x||_2 <= " +
                          format_double_shortest(bounds.x_max) + " (got " +
                          format_double_shortest(xnorm) + ")");
  }
  if (std::abs(s.y) > bounds.y_max * (1.0 + kBoundSlack)) {
    throw ValidationError(std::string(origin) + ": sample " +
                          std::to_string(index) + " violates |y| <= " +
                          format_double_shortest(bounds.y_max) + " (got " +
                          format_double_shortest(s.y) + ")");
  }
}

}  // namespace

Dataset::Dataset(std::vector<Sample> samples, Bounds bounds,
                 std::optional<std::uint64_t> seed)
    : samples_(std::move(samples)), bounds_(bounds), seed_(seed) {
  if (samples_.size() < 2) {
    throw ValidationError("dataset needs at least 2 samples, got " +
                          std::to_string(samples_.size()));
  }
  if (!(bounds_.x_max > 0.0) || !(bounds_.y_max > 0.0)) {
    throw ValidationError("dataset bounds must be positive");
  }
  dim_ = static_cast<int>(samples_[0].x.size());
  if (dim_ < 1) throw ValidationError("dataset feature dimension must be >= 1");
  for (size_t i = 0; i < samples_.size(); ++i) {
    validate_sample(samples_[i], dim_, bounds_, static_cast<int>(i),
                    "dataset");
  }
}

Dataset remove_sample(const Dataset& data, int i) {
  if (data.n() < 3) {
    throw ValidationError("remove_sample needs n >= 3, got n = " +
                          std::to_string(data.n()));
  }
  if (i < 0 || i >= data.n()) {
    throw std::out_of_range("remove_sample: index " + std::to_string(i) +
                            " out of range for n = " + std::to_string(data.n()));
  }
  std::vector<Sample> rest;
  rest.reserve(static_cast<size_t>(data.n() - 1));
  for (int k = 0; k < data.n(); ++k) {
    if (k != i) rest.push_back(data.sample(k));
  }
  return Dataset(std::move(rest), data.bounds());
}

Dataset replace_sample(const Dataset& data, int i, Sample z) {
  if (i < 0 || i >= data.n()) {
    throw std::out_of_range("replace_sample: index " + std::to_string(i) +
                            " out of range for n = " + std::to_string(data.n()));
  }
  std::vector<Sample> copy = data.samples();
  copy[static_cast<size_t>(i)] = std::move(z);
  return Dataset(std::move(copy), data.bounds());
}

SyntheticKind synthetic_kind_from_string(const std::string& name) {
  if (name == "ranking") return SyntheticKind::kRanking;
  if (name == "metric") return SyntheticKind::kMetric;
  throw std::invalid_argument("unknown synthetic kind: " + name);
}

std::string to_string(SyntheticKind kind) {
  return kind == SyntheticKind::kRanking ? "ranking" : "metric";
}

Eigen::VectorXd synthetic_direction(SyntheticKind kind, int d) {
  if (d < 1) throw std::invalid_argument("synthetic_direction: d must be >= 1");
  Rng rng(derive_seed(kPopulationMaster,
                      {stream_tag::kPopulation,
                       static_cast<std::uint64_t>(kind),
                       static_cast<std::uint64_t>(d)}));
  Eigen::VectorXd w = rng.gaussian_vector(d);
  return w / w.norm();
}

Sample synthetic_sample(SyntheticKind kind, const Eigen::VectorXd& direction,
                        Rng& rng) {
  Sample s;
  s.x = rng.uniform_ball(static_cast<int>(direction.size()), 1.0);
  const double score = direction.dot(s.x);
  if (kind == SyntheticKind::kRanking) {
    const double noisy = score + kRankingLabelNoise * rng.gaussian();
    s.y = std::min(1.0, std::max(-1.0, noisy));
  } else {
    const double noisy = score + kMetricScoreNoise * rng.gaussian();
    s.y = noisy >= 0.0 ? 1.0 : -1.0;
  }
  return s;
}

Dataset gen_synthetic(SyntheticKind kind, int n, int d, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_synthetic: n must be >= 2");
  if (d < 1) throw std::invalid_argument("gen_synthetic: d must be >= 1");
  const Eigen::VectorXd direction = synthetic_direction(kind, d);
  Rng rng(derive_seed(seed, {stream_tag::kData,
                             static_cast<std::uint64_t>(kind),
                             static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(d)}));
  std::vector<Sample> samples;
  samples.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    samples.push_back(synthetic_sample(kind, direction, rng));
  }
  return Dataset(std::move(samples), Bounds{1.0, 1.0}, seed);
}

Dataset load_dataset(const std::string& path, const DatasetDescriptor& desc) {
  if (desc.d < 1) throw std::invalid_argument("load_dataset: d must be >= 1");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  // Split on LF. A single trailing newline is allowed; carriage returns are
  // not stripped and will fail field parsing, which keeps the format strict.
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(path + ": empty file");

  std::string expected_header;
  for (int c = 0; c < desc.d; ++c) {
    expected_header += "x" + std::to_string(c) + ",";
  }
  expected_header += "y";
  if (lines[0] != expected_header) {
    throw ParseError(path + ": bad header, expected \"" + expected_header +
                     "\", got \"" + lines[0] + "\"");
  }

  std::vector<Sample> samples;
  samples.reserve(lines.size() - 1);
  for (size_t r = 1; r < lines.size(); ++r) {
    const std::string& line = lines[r];
    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
      const size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (static_cast<int>(fields.size()) != desc.d + 1) {
      throw ParseError(path + ": row " + std::to_string(r) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(desc.d + 1));
    }
    Sample s;
    s.x.resize(desc.d);
    for (int c = 0; c <= desc.d; ++c) {
      double v = 0.0;
      if (!parse_double(fields[static_cast<size_t>(c)], &v)) {
        throw ParseError(path + ": row " + std::to_string(r) + ", field " +
                         std::to_string(c) + ": cannot parse \"" +
                         fields[static_cast<size_t>(c)] + "\"");
      }
      if (!std::isfinite(v)) {
        throw ParseError(path + ": row " + std::to_string(r) + ", field " +
                         std::to_string(c) + ": non-finite value");
      }
      if (c < desc.d) {
        s.x[c] = v;
      } else {
        s.y = v;
      }
    }
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), desc.bounds);
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  for (int c = 0; c < data.dim(); ++c) out << "x" << c << ",";
  out << "y\n";
  for (int i = 0; i < data.n(); ++i) {
    const Sample& s = data.sample(i);
    for (int c = 0; c < data.dim(); ++c) {
      out << format_double_shortest(s.x[c]) << ",";
    }
    out << format_double_shortest(s.y) << "\n";
  }
  if (!out) throw ParseError("failed writing dataset to " + path);
}

SyntheticSource::SyntheticSource(SyntheticKind kind, int d)
    : kind_(kind), direction_(synthetic_direction(kind, d)) {}

Sample SyntheticSource::draw(Rng& rng) const {
  return synthetic_sample(kind_, direction_, rng);
}

}  // namespace pairdp
