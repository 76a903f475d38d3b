// Copyright 2026 The AdaDP Authors
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

#ifndef ADADP_RANDOM_H_
#define ADADP_RANDOM_H_

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace adadp {

// Fixed role offsets added to the master seed. Each role gets its own stream
// so that, e.g., disabling noise leaves lot sampling and initialization as-is.
enum class SeedRole : std::uint64_t {
  kLotSampling = 1,
  kNoise = 2,
  kInit = 3,
  kData = 4,
};

// Seeded generator. Normal deviates come from std::normal_distribution over
// std::mt19937_64 (Marsaglia polar method in libstdc++), so a seed reproduces
// a stream bit-for-bit on one build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Independent stream for a role or a trial index: seed + offset.
  Rng Derive(std::uint64_t offset) const { return Rng(seed_ + offset); }
  Rng Derive(SeedRole role) const {
    return Derive(static_cast<std::uint64_t>(role));
  }

  double Normal() { return normal_(engine_); }
  double Normal(double stddev) { return stddev * normal_(engine_); }

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Uniform integer on [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }

  // Vector of independent N(0, stddev_i^2) draws, coordinates in index order.
  Eigen::VectorXd NormalVector(const Eigen::VectorXd& stddevs) {
    Eigen::VectorXd out(stddevs.size());
    for (Eigen::Index i = 0; i < stddevs.size(); ++i) {
      out[i] = Normal(stddevs[i]);
    }
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace adadp

#endif  // ADADP_RANDOM_H_
