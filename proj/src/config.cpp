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

#include "feedaudit/config.hpp"

#include <set>

#include "feedaudit/feed_sim.hpp"
#include "feedaudit/subprocess_source.hpp"
#include "feedaudit/toml_lite.hpp"

namespace feedaudit {

namespace {

void reject_unknown_keys(const nlohmann::json& table, const std::string& section,
                         const std::set<std::string>& allowed) {
  for (const auto& item : table.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in [" + section + "]");
    }
  }
}

double require_number(const nlohmann::json& value, const std::string& where) {
  if (!value.is_number()) throw ConfigError(where + " must be a number");
  return value.get<double>();
}

int require_int(const nlohmann::json& value, const std::string& where) {
  if (!value.is_number_integer()) throw ConfigError(where + " must be an integer");
  return value.get<int>();
}

std::string require_string(const nlohmann::json& value, const std::string& where) {
  if (!value.is_string()) throw ConfigError(where + " must be a string");
  return value.get<std::string>();
}

std::vector<double> require_number_array(const nlohmann::json& value, const std::string& where) {
  if (!value.is_array() || value.empty()) {
    throw ConfigError(where + " must be a nonempty array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : value) out.push_back(require_number(v, where + " entry"));
  return out;
}

GridSpec parse_grid(const nlohmann::json& table, const std::string& section) {
  reject_unknown_keys(table, section, {"min", "max", "step"});
  GridSpec grid;
  if (table.contains("min")) grid.min = require_number(table["min"], section + ".min");
  if (table.contains("max")) grid.max = require_number(table["max"], section + ".max");
  if (table.contains("step")) grid.step = require_number(table["step"], section + ".step");
  if (!(grid.step > 0.0) || grid.max < grid.min) {
    throw ConfigError("[" + section + "] must satisfy step > 0 and max >= min");
  }
  return grid;
}

SourceSpec parse_source(const nlohmann::json& table, const std::string& section) {
  reject_unknown_keys(table, section,
                      {"kind", "theta", "lambda", "command", "timeout_ms", "pool"});
  SourceSpec spec;
  if (table.contains("kind")) spec.kind = require_string(table["kind"], section + ".kind");
  if (spec.kind != "parametric" && spec.kind != "uniform-pool" && spec.kind != "mixed-pool" &&
      spec.kind != "subprocess") {
    throw ConfigError("[" + section + "].kind must be one of parametric, uniform-pool, "
                      "mixed-pool, subprocess");
  }
  if (table.contains("theta")) {
    spec.theta = require_number_array(table["theta"], section + ".theta");
  }
  if (table.contains("lambda")) {
    spec.injected_fraction = require_number(table["lambda"], section + ".lambda");
  }
  if (table.contains("timeout_ms")) {
    spec.timeout_ms = require_int(table["timeout_ms"], section + ".timeout_ms");
  }
  if (table.contains("command")) {
    if (!table["command"].is_array() || table["command"].empty()) {
      throw ConfigError("[" + section + "].command must be a nonempty array of strings");
    }
    for (const auto& part : table["command"]) {
      spec.command.push_back(require_string(part, section + ".command entry"));
    }
  }
  if (table.contains("pool")) {
    const auto& pool = table["pool"];
    reject_unknown_keys(pool, section + ".pool",
                        {"mu0", "sigma2", "size", "injected_mu", "injected_sigma2"});
    if (pool.contains("mu0")) spec.pool.mu0 = require_number(pool["mu0"], "pool.mu0");
    if (pool.contains("sigma2")) spec.pool.sigma2 = require_number(pool["sigma2"], "pool.sigma2");
    if (pool.contains("size")) spec.pool.size = require_int(pool["size"], "pool.size");
    if (pool.contains("injected_mu")) {
      spec.pool.injected_mu = require_number(pool["injected_mu"], "pool.injected_mu");
    }
    if (pool.contains("injected_sigma2")) {
      spec.pool.injected_sigma2 =
          require_number(pool["injected_sigma2"], "pool.injected_sigma2");
    }
  }
  if (spec.kind == "parametric" && spec.theta.empty()) {
    throw ConfigError("[" + section + "] kind=parametric requires theta");
  }
  if (spec.kind == "subprocess" && spec.command.empty()) {
    throw ConfigError("[" + section + "] kind=subprocess requires command");
  }
  return spec;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  const nlohmann::json root = parse_toml_file(path);
  reject_unknown_keys(root, "top level",
                      {"family", "audit", "inputs", "filter", "baseline", "experiment",
                       "output"});

  RunConfig config;
  config.family_descriptor = nlohmann::json::object();

  if (root.contains("family")) {
    const auto& family = root["family"];
    reject_unknown_keys(family, "family", {"id", "dimension", "domain", "fixed"});
    config.family_descriptor = family;
    // Validate eagerly so config errors surface before any source launches.
    try {
      ModelFamily::from_descriptor(family);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("[family] ") + e.what());
    }
  }

  if (root.contains("audit")) {
    const auto& audit = root["audit"];
    reject_unknown_keys(audit, "audit", {"alpha", "m", "n", "seed", "mode", "jobs"});
    if (audit.contains("alpha")) config.alpha = require_number(audit["alpha"], "audit.alpha");
    if (audit.contains("m")) config.m = require_int(audit["m"], "audit.m");
    if (audit.contains("n")) config.n = require_int(audit["n"], "audit.n");
    if (audit.contains("seed")) {
      if (!audit["seed"].is_number_integer()) throw ConfigError("audit.seed must be an integer");
      config.seed = audit["seed"].get<std::uint64_t>();
    }
    if (audit.contains("mode")) {
      const std::string mode = require_string(audit["mode"], "audit.mode");
      if (mode == "strict") {
        config.mode = AuditMode::kStrict;
      } else if (mode == "full") {
        config.mode = AuditMode::kFull;
      } else {
        throw ConfigError("audit.mode must be 'strict' or 'full'");
      }
    }
    if (audit.contains("jobs")) config.jobs = require_int(audit["jobs"], "audit.jobs");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw ConfigError("audit.alpha must lie in (0, 1)");
  }
  if (config.m < 1) throw ConfigError("audit.m must be >= 1");
  if (config.n < 1) throw ConfigError("audit.n must be >= 1");

  if (root.contains("inputs")) {
    const auto& inputs = root["inputs"];
    reject_unknown_keys(inputs, "inputs", {"payload_dim"});
    if (inputs.contains("payload_dim")) {
      config.payload_dim = require_int(inputs["payload_dim"], "inputs.payload_dim");
    }
  }

  if (root.contains("filter")) config.filter = parse_source(root["filter"], "filter");
  if (root.contains("baseline")) config.baseline = parse_source(root["baseline"], "baseline");

  if (root.contains("experiment")) {
    const auto& exp = root["experiment"];
    reject_unknown_keys(exp, "experiment",
                        {"trials", "m_values", "theta0", "mu_grid", "sigma2_grid",
                         "feasibility_threshold", "mean_separation", "reward", "revenue"});
    if (exp.contains("trials")) config.trials = require_int(exp["trials"], "experiment.trials");
    if (exp.contains("m_values")) {
      if (!exp["m_values"].is_array() || exp["m_values"].empty()) {
        throw ConfigError("experiment.m_values must be a nonempty array of integers");
      }
      config.m_values.clear();
      for (const auto& v : exp["m_values"]) {
        config.m_values.push_back(require_int(v, "experiment.m_values entry"));
      }
    }
    if (exp.contains("theta0")) {
      config.theta0 = require_number_array(exp["theta0"], "experiment.theta0");
    }
    if (exp.contains("mu_grid")) config.mu_grid = parse_grid(exp["mu_grid"], "experiment.mu_grid");
    if (exp.contains("sigma2_grid")) {
      config.sigma2_grid = parse_grid(exp["sigma2_grid"], "experiment.sigma2_grid");
    }
    if (exp.contains("feasibility_threshold")) {
      config.feasibility_threshold =
          require_number(exp["feasibility_threshold"], "experiment.feasibility_threshold");
    }
    if (exp.contains("mean_separation")) {
      config.mean_separation =
          require_number(exp["mean_separation"], "experiment.mean_separation");
    }
    if (exp.contains("reward")) {
      const std::string reward = require_string(exp["reward"], "experiment.reward");
      if (reward == "mean-only") {
        config.reward_mode = RewardMode::kMeanOnly;
      } else if (reward == "all-coordinates") {
        config.reward_mode = RewardMode::kAllCoordinates;
      } else {
        throw ConfigError("experiment.reward must be 'mean-only' or 'all-coordinates'");
      }
    }
    if (exp.contains("revenue")) {
      const auto& revenue = exp["revenue"];
      reject_unknown_keys(revenue, "experiment.revenue", {"base", "peak_gain", "peak_distance"});
      if (revenue.contains("base")) {
        config.revenue_fn.base = require_number(revenue["base"], "revenue.base");
      }
      if (revenue.contains("peak_gain")) {
        config.revenue_fn.peak_gain = require_number(revenue["peak_gain"], "revenue.peak_gain");
      }
      if (revenue.contains("peak_distance")) {
        config.revenue_fn.peak_distance =
            require_number(revenue["peak_distance"], "revenue.peak_distance");
      }
    }
    if (config.trials < 1) throw ConfigError("experiment.trials must be >= 1");
    for (int m : config.m_values) {
      if (m < 1) throw ConfigError("experiment.m_values entries must be >= 1");
    }
  }

  if (root.contains("output")) {
    const auto& output = root["output"];
    reject_unknown_keys(output, "output", {"dir", "format"});
    if (output.contains("dir")) config.out_dir = require_string(output["dir"], "output.dir");
    if (output.contains("format")) {
      config.format = require_string(output["format"], "output.format");
      if (config.format != "csv" && config.format != "json") {
        throw ConfigError("output.format must be 'csv' or 'json'");
      }
    }
  }
  return config;
}

std::shared_ptr<const ModelFamily> build_family(const RunConfig& config) {
  if (config.family_descriptor.empty()) {
    return ModelFamily::make("gaussian-mean-var");
  }
  return ModelFamily::from_descriptor(config.family_descriptor);
}

std::unique_ptr<FeedSource> build_source(const SourceSpec& spec, const RunConfig& config,
                                         const std::shared_ptr<const ModelFamily>& family,
                                         const std::string& name, std::uint64_t seed) {
  if (spec.kind == "parametric") {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(spec.theta.size()));
    for (std::size_t i = 0; i < spec.theta.size(); ++i) {
      theta[static_cast<Eigen::Index>(i)] = spec.theta[i];
    }
    return parametric_filter_source({family, ParameterVector(theta)}, config.m, seed, name);
  }
  if (spec.kind == "uniform-pool" || spec.kind == "mixed-pool") {
    SeedStream pool_rng(derive_seed(seed, hash_string("pool")));
    ContentPools pools =
        gaussian_pool_baseline(spec.pool.mu0, spec.pool.sigma2, spec.pool.size, pool_rng,
                               spec.pool.injected_mu, spec.pool.injected_sigma2);
    if (spec.kind == "uniform-pool") {
      return uniform_baseline_source(std::move(pools), config.m, seed, name);
    }
    return mixed_pool_source(std::move(pools), spec.injected_fraction, config.m, seed, name);
  }
  if (spec.kind == "subprocess") {
    return std::make_unique<SubprocessSource>(spec.command, config.m, name, spec.timeout_ms);
  }
  throw ConfigError("unknown source kind '" + spec.kind + "'");
}

ParameterVector config_theta0(const RunConfig& config,
                              const std::shared_ptr<const ModelFamily>& family) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(config.theta0.size()));
  for (std::size_t i = 0; i < config.theta0.size(); ++i) {
    theta[static_cast<Eigen::Index>(i)] = config.theta0[i];
  }
  ParameterVector theta0(theta);
  family->require_in_domain(theta0);
  return theta0;
}

}  // namespace feedaudit
