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

#ifndef FEEDAUDIT_CONFIG_HPP_
#define FEEDAUDIT_CONFIG_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "feedaudit/audit.hpp"
#include "feedaudit/experiments.hpp"
#include "feedaudit/feed.hpp"
#include "feedaudit/model_family.hpp"

namespace feedaudit {

struct PoolSpec {
  double mu0 = 0.0;
  double sigma2 = 1.0;
  int size = 100000;
  double injected_mu = 2.0;
  double injected_sigma2 = 1.0;
};

struct SourceSpec {
  std::string kind = "parametric";  // parametric | uniform-pool | mixed-pool | subprocess
  std::vector<double> theta;        // parametric
  double injected_fraction = 0.25;  // mixed-pool
  PoolSpec pool;                    // pool-backed kinds
  std::vector<std::string> command;  // subprocess
  int timeout_ms = 30000;            // subprocess
};

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  std::vector<double> values() const { return grid_values(min, max, step); }
};

// Validated run configuration. Every section and key is checked against the
// documented schema; unknown keys are rejected before any source is built.
struct RunConfig {
  nlohmann::json family_descriptor;  // as given; empty object = default family

  double alpha = 0.01;
  int m = 30;
  int n = 1;
  std::uint64_t seed = 0;
  AuditMode mode = AuditMode::kFull;
  int jobs = 0;  // 0 = hardware concurrency

  int payload_dim = 4;

  std::optional<SourceSpec> filter;
  std::optional<SourceSpec> baseline;

  int trials = 1000;
  std::vector<int> m_values = {30, 100, 300, 1000};
  std::vector<double> theta0 = {0.0, 1.0};
  GridSpec mu_grid{-1.5, 1.5, 0.1};
  GridSpec sigma2_grid{0.4, 2.2, 0.1};
  double feasibility_threshold = 0.8;
  double mean_separation = 1.0;
  RewardMode reward_mode = RewardMode::kMeanOnly;
  RevenueFunction revenue_fn;

  std::string out_dir = ".";
  std::string format = "csv";  // csv | json
};

RunConfig load_run_config(const std::string& path);

// Builds the family described by the config ([family] section or defaults).
std::shared_ptr<const ModelFamily> build_family(const RunConfig& config);

// Builds a feed source from its spec. Simulator sources derive per-query
// randomness from (seed, input id); the subprocess kind launches the
// configured command.
std::unique_ptr<FeedSource> build_source(const SourceSpec& spec, const RunConfig& config,
                                         const std::shared_ptr<const ModelFamily>& family,
                                         const std::string& name, std::uint64_t seed);

// Baseline parameter vector for experiments, checked against the family.
ParameterVector config_theta0(const RunConfig& config,
                              const std::shared_ptr<const ModelFamily>& family);

}  // namespace feedaudit

#endif  // FEEDAUDIT_CONFIG_HPP_
