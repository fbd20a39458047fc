// Copyright 2026 The dpate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPATE_NOISE_H_
#define DPATE_NOISE_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace dpate {

// Well-known stream ids, one per (phase, purpose). Adding draws to one
// stream never shifts another.
enum class Stream : std::uint64_t {
  kWeights = 1,
  kScores = 2,
  kTreatment = 3,
  kOutcomes = 4,
  kSynth = 100,
};

// Seeded uniform source. Identical (seed, stream) pairs produce identical
// draw sequences on every platform: uniforms are built from raw
// mt19937_64 bits rather than std::uniform_real_distribution.
//
// Not thread-safe; give each concurrent task its own stream.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, std::uint64_t stream);
  NoiseSource(std::uint64_t seed, Stream stream)
      : NoiseSource(seed, static_cast<std::uint64_t>(stream)) {}

  // Oracle mode: every mechanism returns its input unchanged. Results built
  // from a disabled source are not private.
  static NoiseSource Disabled();

  bool disabled() const { return disabled_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Uniform on the open interval (0, 1).
  double Uniform();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi);
  std::uint64_t Bits() { return engine_(); }

 private:
  NoiseSource() = default;

  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  bool disabled_ = false;
};

// Laplace(0, scale) by inverse CDF from a single uniform draw.
double SampleLaplace(double scale, NoiseSource& rng);

struct LaplaceOutput {
  double value = 0.0;
  double scale = 0.0;
};

// value + Laplace(sensitivity / eps). With a disabled source the value is
// returned exactly and eps is not checked.
// Errors: NonPositiveBudget, NonPositiveSensitivity.
absl::StatusOr<LaplaceOutput> LaplacePerturb(double value, double sensitivity,
                                             double eps, NoiseSource& rng);

// Element-wise independent draws sharing one scale.
absl::StatusOr<std::vector<double>> LaplacePerturbVector(
    std::span<const double> values, double sensitivity, double eps,
    NoiseSource& rng);

// Probability of reporting the true bit: e^eps / (e^eps + 1).
double KeepProbability(double eps);

// Keeps `bit` with KeepProbability(eps), flips it otherwise.
// Errors: NonPositiveBudget.
absl::StatusOr<std::uint8_t> RandomizedResponse(std::uint8_t bit, double eps,
                                                NoiseSource& rng);

}  // namespace dpate

#endif  // DPATE_NOISE_H_
