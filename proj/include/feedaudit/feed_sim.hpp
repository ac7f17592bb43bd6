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

#ifndef FEEDAUDIT_FEED_SIM_HPP_
#define FEEDAUDIT_FEED_SIM_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "feedaudit/feed.hpp"
#include "feedaudit/model_family.hpp"

namespace feedaudit {

// Finite pools of content: the baseline pool holds consented content, the
// injected pool holds platform-inserted content.
struct ContentPools {
  std::vector<double> baseline_pool;
  std::vector<double> injected_pool;
};

// A filter that draws i.i.d. from a fixed member of a model family.
struct ParametricFilterPolicy {
  std::shared_ptr<const ModelFamily> family;
  ParameterVector theta;
};

// Source sampling m items i.i.d. uniformly with replacement from the
// baseline pool. Per-query randomness is derived from (seed, input id), so
// answers do not depend on query order or thread schedule.
std::unique_ptr<FeedSource> uniform_baseline_source(ContentPools pools, int m,
                                                    std::uint64_t seed,
                                                    std::string name = "baseline");

// Source sampling m items i.i.d. from the policy's distribution. Ignores the
// input payload (the single-input simulation setting).
std::unique_ptr<FeedSource> parametric_filter_source(ParametricFilterPolicy policy, int m,
                                                     std::uint64_t seed,
                                                     std::string name = "filter");

// Source drawing each item from the injected pool with probability
// injected_fraction and from the baseline pool otherwise.
std::unique_ptr<FeedSource> mixed_pool_source(ContentPools pools, double injected_fraction,
                                              int m, std::uint64_t seed,
                                              std::string name = "filter");

// Materializes a finite baseline pool of pool_size draws from
// N(mu0, sigma2_0), so that the uniform-at-random baseline approximates a
// continuous one, plus an injected pool from N(injected_mu, injected_sigma2).
ContentPools gaussian_pool_baseline(double mu0, double sigma2_0, int pool_size, SeedStream& rng,
                                    double injected_mu = 2.0, double injected_sigma2 = 1.0);

// n synthetic audit inputs with ids input-000, input-001, ... and opaque
// feature-vector payloads. No real-user data pathway exists.
std::vector<AuditInput> generate_inputs(int n, int payload_dim, SeedStream& rng);

}  // namespace feedaudit

#endif  // FEEDAUDIT_FEED_SIM_HPP_
