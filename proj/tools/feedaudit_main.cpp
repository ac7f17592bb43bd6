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

// Batch front end: audit a pair of feed sources or run the simulation
// experiments, writing CSV/JSON reports. Exit codes: 0 = PASS/completed,
// 1 = audit FAIL, 2 = configuration or source error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "feedaudit/config.hpp"
#include "feedaudit/feed_sim.hpp"
#include "feedaudit/report_io.hpp"

namespace {

using namespace feedaudit;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "run configuration (TOML)")->required();
  cmd->add_option("--seed", flags->seed, "override the configured seed");
  cmd->add_option("--jobs", flags->jobs, "worker pool size (0 = hardware concurrency)");
  cmd->add_option("--out-dir", flags->out_dir, "output directory");
  cmd->add_option("--format", flags->format, "raw result format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

RunConfig load_with_overrides(const CommonFlags& flags) {
  RunConfig config = load_run_config(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  if (flags.format) config.format = *flags.format;
  std::filesystem::create_directories(config.out_dir);
  return config;
}

std::string out_path(const RunConfig& config, const std::string& file) {
  return (std::filesystem::path(config.out_dir) / file).string();
}

// Raw rows go to CSV or JSON depending on --format; the summary is always JSON.
void write_raw(const RunConfig& config, const std::string& stem, const std::string& csv,
               const nlohmann::json& json_rows) {
  if (config.format == "csv") {
    write_text_file(out_path(config, stem + ".csv"), csv);
  } else {
    write_text_file(out_path(config, stem + ".json"), json_rows.dump(2) + "\n");
  }
}

int cmd_audit(const CommonFlags& flags) {
  const RunConfig config = load_with_overrides(flags);
  if (!config.filter || !config.baseline) {
    throw ConfigError("audit requires [filter] and [baseline] sections");
  }
  const auto family = build_family(config);

  const auto filter = build_source(*config.filter, config, family, "filter",
                                   derive_seed(config.seed, hash_string("filter-source")));
  const auto baseline = build_source(*config.baseline, config, family, "baseline",
                                     derive_seed(config.seed, hash_string("baseline-source")));

  SeedStream input_rng(derive_seed(config.seed, hash_string("inputs")));
  const auto inputs = generate_inputs(config.n, config.payload_dim, input_rng);

  AuditConfig audit_config;
  audit_config.alpha = config.alpha;
  audit_config.mode = config.mode;
  audit_config.seed = config.seed;
  audit_config.jobs = config.jobs;

  const AuditReport report = run_audit(*filter, *baseline, inputs, *family, audit_config);

  write_text_file(out_path(config, "audit_report.json"),
                  audit_report_json(report).dump(2) + "\n");
  if (config.format == "csv") {
    write_text_file(out_path(config, "audit_rows.csv"), audit_report_csv(report));
  }

  if (report.aborted) {
    nlohmann::json error = {{"error", {{"type", "source"}, {"message", report.error}}}};
    std::cerr << error.dump() << "\n";
    return 2;
  }
  std::cout << "overall: " << to_string(report.overall) << " (" << report.results.size()
            << " inputs, tau per input in " << out_path(config, "audit_report.json") << ")\n";
  return report.overall == Verdict::kPass ? 0 : 1;
}

int cmd_fpr(const CommonFlags& flags) {
  const RunConfig config = load_with_overrides(flags);
  const auto family = build_family(config);
  const ParameterVector theta0 = config_theta0(config, family);

  const FprTable table = run_fpr_experiment(*family, theta0, config.m_values, config.alpha,
                                            config.trials, config.seed, config.jobs);
  write_raw(config, "fpr", fpr_csv(table), fpr_json(table)["rows"]);
  write_text_file(out_path(config, "fpr_summary.json"), fpr_json(table).dump(2) + "\n");
  std::cout << "max_fpr: " << format_double(table.max_fpr()) << "\n";
  return 0;
}

void require_gaussian_mean_var(const std::shared_ptr<const ModelFamily>& family,
                               const std::string& command) {
  if (family->id() != "gaussian-mean-var") {
    throw ConfigError(command + " sweeps (mu, sigma2) policies and requires the "
                      "gaussian-mean-var family");
  }
}

int cmd_heatmap(const CommonFlags& flags) {
  const RunConfig config = load_with_overrides(flags);
  const auto family = build_family(config);
  require_gaussian_mean_var(family, "heatmap");
  const ParameterVector theta0 = config_theta0(config, family);

  const HeatmapGrid grid =
      run_heatmap(theta0, config.mu_grid.values(), config.sigma2_grid.values(), config.m,
                  config.alpha, config.trials, config.seed, config.jobs);
  const Classification classification = classify_distributions(grid, 0.8);

  const nlohmann::json summary = heatmap_json(grid, classification);
  write_raw(config, "heatmap", heatmap_csv(grid), summary["failure_rate"]);
  write_text_file(out_path(config, "heatmap_summary.json"), summary.dump(2) + "\n");
  write_text_file(out_path(config, "heatmap.ppm"), heatmap_ppm(grid));
  std::cout << "cells: " << grid.mu_values.size() * grid.sigma2_values.size()
            << ", baseline-cell failure rate: "
            << format_double(grid.failure_at(theta0[1], theta0[0])) << "\n";
  return 0;
}

int cmd_cost(const CommonFlags& flags) {
  const RunConfig config = load_with_overrides(flags);
  const auto family = build_family(config);
  require_gaussian_mean_var(family, "cost");
  const ParameterVector theta0 = config_theta0(config, family);

  const CostOfAuditingResult result = cost_of_auditing(
      config.revenue_fn, theta0, config.mu_grid.values(), config.sigma2_grid.values(), config.m,
      config.alpha, config.feasibility_threshold, config.trials, config.seed, config.jobs);

  const nlohmann::json summary = cost_json(result);
  write_raw(config, "cost", cost_csv(result), summary);
  write_text_file(out_path(config, "cost_summary.json"), summary.dump(2) + "\n");
  std::cout << "cost: " << format_double(result.cost)
            << (result.infeasible ? " (infeasible)" : "") << "\n";
  return 0;
}

int cmd_prop2(const CommonFlags& flags) {
  const RunConfig config = load_with_overrides(flags);
  const Prop2Report report =
      zero_cost_construction(config.reward_mode, config.revenue_fn, config.mean_separation,
                                config.m, config.alpha, config.trials, config.seed, config.jobs);

  const nlohmann::json summary = prop2_json(report);
  write_raw(config, "prop2", prop2_csv(report), summary);
  write_text_file(out_path(config, "prop2_summary.json"), summary.dump(2) + "\n");
  if (report.precondition_violated) {
    std::cout << "precondition violated: " << report.message << "\n";
  } else {
    std::cout << "measured_cost: " << format_double(report.measured_cost) << "\n";
  }
  return 0;
}

int cmd_validate_family(const CommonFlags& flags) {
  const RunConfig config = load_with_overrides(flags);
  const auto family = build_family(config);
  const RegularityReport report = validate_regularity(*family);

  write_text_file(out_path(config, "validate_family.json"),
                  regularity_json(report).dump(2) + "\n");
  for (const auto& check : report.checks) {
    std::cout << (check.pass ? "pass" : "FAIL") << "  " << check.condition;
    if (!check.witness.empty()) std::cout << "  (" << check.witness << ")";
    std::cout << "\n";
  }
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feedaudit: decision-robustness audits of content filters"};
  app.require_subcommand(1);

  CommonFlags flags;
  int (*handler)(const CommonFlags&) = nullptr;

  const auto add = [&](const std::string& name, const std::string& help,
                       int (*fn)(const CommonFlags&)) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common_flags(cmd, &flags);
    cmd->callback([&handler, fn] { handler = fn; });
  };

  add("audit", "audit a filter source against a baseline source", cmd_audit);
  add("heatmap", "pass/fail rates over a (mu, sigma2) policy grid", cmd_heatmap);
  add("fpr", "false-positive-rate calibration with filter = baseline", cmd_fpr);
  add("cost", "revenue cost of restricting to audit-passing policies", cmd_cost);
  add("prop2", "zero-cost construction via variance shifts", cmd_prop2);
  add("validate-family", "check the machine-checkable regularity conditions",
      cmd_validate_family);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return handler(flags);
  } catch (const Error& e) {
    nlohmann::json error = {{"error", {{"type", "config"}, {"message", e.what()}}}};
    std::cerr << error.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json error = {{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cerr << error.dump() << "\n";
    return 2;
  }
}
