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
// Deterministic random number generation. Every stochastic component of the
// library draws from an explicitly seeded Rng so that runs are bitwise
// reproducible. Substreams are derived by hashing a master seed together
// with integer tags (cell coordinates, seed index, purpose tag), which keeps
// streams independent of scheduling and thread count.

#ifndef PAIRDP_RNG_HPP_
#define PAIRDP_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

#include <Eigen/Core>

namespace pairdp {

// One round of the splitmix64 output function. Standard constants.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a substream seed from a master seed and a list of tags. Feeding
// each tag through splitmix64 gives well-separated streams for nearby tag
// tuples (consecutive seed indices, neighboring grid cells).
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t state = master;
  std::uint64_t mixed = splitmix64_next(state);
  for (std::uint64_t tag : tags) {
    state ^= tag + 0x9e3779b97f4a7c15ULL + (mixed << 6) + (mixed >> 2);
    mixed = splitmix64_next(state);
  }
  return mixed;
}

// Tags for the purpose component of derived seeds. Distinct constants keep
// the data stream, noise stream, and probe streams of one run independent.
namespace stream_tag {
inline constexpr std::uint64_t kData = 0xD47A'0001ULL;
inline constexpr std::uint64_t kNoise = 0x0153'0002ULL;
inline constexpr std::uint64_t kInit = 0x1417'0003ULL;
inline constexpr std::uint64_t kMc = 0x3C4D'0004ULL;
inline constexpr std::uint64_t kProbe = 0x9B0E'0005ULL;
inline constexpr std::uint64_t kReference = 0x2EF5'0006ULL;
inline constexpr std::uint64_t kBootstrap = 0xB007'0007ULL;
inline constexpr std::uint64_t kPopulation = 0x909C'0008ULL;
}  // namespace stream_tag

// Deterministic generator: mt19937_64 plus an explicit Box-Muller gaussian,
// so the exact draw sequence does not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1], safe as a log argument.
  double uniform_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: bound is 0");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

  // Standard normal draw. Generates a Box-Muller pair and discards the
  // second member, so scalar draws consume exactly two engine outputs.
  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double a = 2.0 * M_PI * uniform();
    ++gaussians_delivered_;
    return r * std::cos(a);
  }

  // Fills a vector with independent standard normals, consuming Box-Muller
  // pairs; for odd p the final sine component is discarded.
  Eigen::VectorXd gaussian_vector(int p) {
    if (p < 0) throw std::invalid_argument("gaussian_vector: negative size");
    Eigen::VectorXd v(p);
    int i = 0;
    while (i < p) {
      const double r = std::sqrt(-2.0 * std::log(uniform_open()));
      const double a = 2.0 * M_PI * uniform();
      v[i++] = r * std::cos(a);
      if (i < p) v[i++] = r * std::sin(a);
    }
    gaussians_delivered_ += p;
    return v;
  }

  // Uniform draw from the L2 ball of the given radius.
  Eigen::VectorXd uniform_ball(int dim, double radius) {
    Eigen::VectorXd dir = gaussian_vector(dim);
    double norm = dir.norm();
    while (norm < 1e-300) {  // astronomically unlikely underflow guard
      dir = gaussian_vector(dim);
      norm = dir.norm();
    }
    const double r = radius * std::pow(uniform(), 1.0 / dim);
    return dir * (r / norm);
  }

  // Number of gaussian values handed out so far. Lets tests assert that a
  // training run consumed exactly T vectors of length p.
  std::uint64_t gaussians_delivered() const { return gaussians_delivered_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t gaussians_delivered_ = 0;
};

}  // namespace pairdp

#endif  // PAIRDP_RNG_HPP_
