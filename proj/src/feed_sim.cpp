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

#include "feedaudit/feed_sim.hpp"

#include <cstdio>
#include <utility>

#include "feedaudit/errors.hpp"

namespace feedaudit {

namespace {

SeedStream query_stream(std::uint64_t source_seed, const AuditInput& input) {
  return SeedStream(derive_seed(source_seed, hash_string(input.id)));
}

class UniformPoolSource final : public FeedSource {
 public:
  UniformPoolSource(std::string name, ContentPools pools, int m, std::uint64_t seed)
      : FeedSource(std::move(name)), pools_(std::move(pools)), m_(m), seed_(seed) {
    if (pools_.baseline_pool.empty()) {
      throw ConfigError("uniform baseline source requires a nonempty baseline pool");
    }
    if (m_ < 1) throw ConfigError("feed length m must be >= 1");
  }

  Feed query(const AuditInput& input) override {
    SeedStream rng = query_stream(seed_, input);
    Feed feed(static_cast<std::size_t>(m_));
    for (auto& z : feed) {
      z = pools_.baseline_pool[rng.below(pools_.baseline_pool.size())];
    }
    return feed;
  }

 private:
  ContentPools pools_;
  int m_;
  std::uint64_t seed_;
};

class ParametricSource final : public FeedSource {
 public:
  ParametricSource(std::string name, ParametricFilterPolicy policy, int m, std::uint64_t seed)
      : FeedSource(std::move(name)), policy_(std::move(policy)), m_(m), seed_(seed) {
    if (!policy_.family) throw ConfigError("parametric source requires a model family");
    policy_.family->require_in_domain(policy_.theta);
    if (m_ < 1) throw ConfigError("feed length m must be >= 1");
  }

  Feed query(const AuditInput& input) override {
    SeedStream rng = query_stream(seed_, input);
    return policy_.family->sample_feed(policy_.theta, m_, rng);
  }

 private:
  ParametricFilterPolicy policy_;
  int m_;
  std::uint64_t seed_;
};

class MixedPoolSource final : public FeedSource {
 public:
  MixedPoolSource(std::string name, ContentPools pools, double injected_fraction, int m,
                  std::uint64_t seed)
      : FeedSource(std::move(name)),
        pools_(std::move(pools)),
        injected_fraction_(injected_fraction),
        m_(m),
        seed_(seed) {
    if (pools_.baseline_pool.empty()) {
      throw ConfigError("mixed source requires a nonempty baseline pool");
    }
    if (injected_fraction_ > 0.0 && pools_.injected_pool.empty()) {
      throw ConfigError("mixed source with injected_fraction > 0 requires an injected pool");
    }
    if (!(injected_fraction_ >= 0.0 && injected_fraction_ <= 1.0)) {
      throw ConfigError("injected_fraction must lie in [0, 1]");
    }
    if (m_ < 1) throw ConfigError("feed length m must be >= 1");
  }

  Feed query(const AuditInput& input) override {
    SeedStream rng = query_stream(seed_, input);
    Feed feed(static_cast<std::size_t>(m_));
    for (auto& z : feed) {
      const auto& pool =
          rng.flip(injected_fraction_) ? pools_.injected_pool : pools_.baseline_pool;
      z = pool[rng.below(pool.size())];
    }
    return feed;
  }

 private:
  ContentPools pools_;
  double injected_fraction_;
  int m_;
  std::uint64_t seed_;
};

}  // namespace

std::unique_ptr<FeedSource> uniform_baseline_source(ContentPools pools, int m,
                                                    std::uint64_t seed, std::string name) {
  return std::make_unique<UniformPoolSource>(std::move(name), std::move(pools), m, seed);
}

std::unique_ptr<FeedSource> parametric_filter_source(ParametricFilterPolicy policy, int m,
                                                     std::uint64_t seed, std::string name) {
  return std::make_unique<ParametricSource>(std::move(name), std::move(policy), m, seed);
}

std::unique_ptr<FeedSource> mixed_pool_source(ContentPools pools, double injected_fraction,
                                              int m, std::uint64_t seed, std::string name) {
  return std::make_unique<MixedPoolSource>(std::move(name), std::move(pools), injected_fraction,
                                           m, seed);
}

ContentPools gaussian_pool_baseline(double mu0, double sigma2_0, int pool_size, SeedStream& rng,
                                    double injected_mu, double injected_sigma2) {
  if (pool_size < 1) throw ConfigError("pool_size must be >= 1");
  if (sigma2_0 < 0.0 || injected_sigma2 < 0.0) {
    throw ConfigError("pool variances must be nonnegative");
  }
  ContentPools pools;
  pools.baseline_pool.resize(static_cast<std::size_t>(pool_size));
  const double sd0 = std::sqrt(sigma2_0);
  for (auto& z : pools.baseline_pool) z = rng.normal(mu0, sd0);
  pools.injected_pool.resize(static_cast<std::size_t>(pool_size));
  const double sd_inj = std::sqrt(injected_sigma2);
  for (auto& z : pools.injected_pool) z = rng.normal(injected_mu, sd_inj);
  return pools;
}

std::vector<AuditInput> generate_inputs(int n, int payload_dim, SeedStream& rng) {
  if (n < 1) throw ConfigError("generate_inputs requires n >= 1");
  if (payload_dim < 0) throw ConfigError("payload_dim must be >= 0");

  int width = 3;
  for (int v = n - 1; v >= 1000 && width < 10; v /= 10) ++width;

  std::vector<AuditInput> inputs;
  inputs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "input-%0*d", width, i);
    nlohmann::json payload = nlohmann::json::array();
    for (int d = 0; d < payload_dim; ++d) payload.push_back(rng.uniform(-1.0, 1.0));
    inputs.push_back(AuditInput{id, std::move(payload)});
  }
  return inputs;
}

}  // namespace feedaudit
