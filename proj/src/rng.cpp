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

#include "feedaudit/rng.hpp"

#include <cmath>

#include "feedaudit/errors.hpp"

namespace feedaudit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt ^ 0x632BE59BD9B4E019ull));
}

std::uint64_t hash_string(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

SeedStream::SeedStream(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

std::uint64_t SeedStream::next_u64() { return gen_(); }

double SeedStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeedStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double SeedStream::normal01() {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double SeedStream::normal(double mean, double stddev) {
  return mean + stddev * normal01();
}

bool SeedStream::flip(double p_true) { return uniform01() < p_true; }

std::uint64_t SeedStream::below(std::uint64_t n) {
  if (n == 0) throw DomainError("SeedStream::below requires n >= 1");
  // Multiply-shift; bias is negligible for the pool sizes used here.
  const double u = uniform01();
  auto k = static_cast<std::uint64_t>(u * static_cast<double>(n));
  return k >= n ? n - 1 : k;
}

SeedStream SeedStream::fork(std::uint64_t salt) const {
  return SeedStream(derive_seed(seed_, salt));
}

}  // namespace feedaudit
