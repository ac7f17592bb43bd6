// Copyright 2026 The feedaudit Authors
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

#ifndef FEEDAUDIT_RNG_HPP_
#define FEEDAUDIT_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace feedaudit {

// Mixes a seed and a salt into a new seed (splitmix64 finalizer). Used to
// derive independent substreams so that results never depend on evaluation
// order or thread schedule.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// FNV-1a hash, used to salt per-query streams with an input id.
std::uint64_t hash_string(std::string_view text);

// Deterministic random stream. All distributions are implemented explicitly
// on top of the raw generator so that a given seed produces the same draws
// on every platform and standard library.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (two uniforms per draw, no cache).
  double normal01();
  double normal(double mean, double stddev);

  // Fair or biased coin.
  bool flip(double p_true = 0.5);

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Derives an independent substream from the original seed (not from the
  // current state), so forks are reproducible regardless of how much of
  // this stream has been consumed.
  SeedStream fork(std::uint64_t salt) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace feedaudit

#endif  // FEEDAUDIT_RNG_HPP_
