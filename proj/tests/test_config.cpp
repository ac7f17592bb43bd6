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

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "feedaudit/toml_lite.hpp"

using namespace feedaudit;

namespace {

std::string write_temp_config(const std::string& content) {
  static int counter = 0;
  const auto path = std::filesystem::temp_directory_path() /
                    ("feedaudit_cfg_" + std::to_string(::getpid()) + "_" +
                     std::to_string(counter++) + ".toml");
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("toml subset: tables, arrays, comments, types") {
  const nlohmann::json parsed = parse_toml(R"(
# comment
top = 1

[audit]
alpha = 0.05     # trailing comment
mode = "strict"
flag = true

[experiment]
m_values = [30, 100,
            300]
theta0 = [0.0, 1.0]
domain = [[-10.0, 10.0], [0.01, 25.0]]

[experiment.mu_grid]
min = -1.5
max = 1.5
step = 0.1
)");
  CHECK(parsed["top"] == 1);
  CHECK(parsed["audit"]["alpha"] == 0.05);
  CHECK(parsed["audit"]["mode"] == "strict");
  CHECK(parsed["audit"]["flag"] == true);
  CHECK(parsed["experiment"]["m_values"] == nlohmann::json({30, 100, 300}));
  CHECK(parsed["experiment"]["domain"][1][0] == 0.01);
  CHECK(parsed["experiment"]["mu_grid"]["step"] == 0.1);
  CHECK(parsed["audit"]["alpha"].is_number_float());
  CHECK(parsed["top"].is_number_integer());
}

TEST_CASE("toml subset rejects what it does not support") {
  CHECK_THROWS_AS(parse_toml("a = {x = 1}"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = 'literal'"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = 2026-08-01"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[[rows]]\na = 1"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = [1, 2"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a 1"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = \"unterminated"), ConfigError);
}

TEST_CASE("run config: full audit configuration round-trips") {
  const std::string path = write_temp_config(R"(
[family]
id = "gaussian-mean-var"
domain = [[-10.0, 10.0], [0.01, 25.0]]

[audit]
alpha = 0.05
m = 40
n = 7
seed = 123
mode = "strict"
jobs = 2

[inputs]
payload_dim = 6

[filter]
kind = "parametric"
theta = [0.5, 1.2]

[baseline]
kind = "uniform-pool"
[baseline.pool]
mu0 = 0.0
sigma2 = 1.0
size = 5000

[output]
dir = "out"
format = "json"
)");
  const RunConfig config = load_run_config(path);
  CHECK(config.alpha == 0.05);
  CHECK(config.m == 40);
  CHECK(config.n == 7);
  CHECK(config.seed == 123);
  CHECK(config.mode == AuditMode::kStrict);
  CHECK(config.jobs == 2);
  CHECK(config.payload_dim == 6);
  CHECK(config.filter->kind == "parametric");
  CHECK(config.filter->theta == std::vector<double>{0.5, 1.2});
  CHECK(config.baseline->kind == "uniform-pool");
  CHECK(config.baseline->pool.size == 5000);
  CHECK(config.out_dir == "out");
  CHECK(config.format == "json");

  const auto family = build_family(config);
  CHECK(family->id() == "gaussian-mean-var");
  const auto filter = build_source(*config.filter, config, family, "filter", 1);
  const auto baseline = build_source(*config.baseline, config, family, "baseline", 2);
  CHECK(filter->query({"x", {}}).size() == 40);
  CHECK(baseline->query({"x", {}}).size() == 40);
  std::filesystem::remove(path);
}

TEST_CASE("run config: unknown keys are rejected everywhere") {
  for (const std::string bad : {
           "[audit]\nalhpa = 0.01\n",
           "[mystery]\nx = 1\n",
           "[filter]\nkind = \"parametric\"\ntheta = [0.0, 1.0]\nextra = 1\n",
           "[experiment]\ntrails = 10\n",
           "[family]\nid = \"bernoulli\"\nwhatever = 3\n",
           "[output]\ndirectory = \".\"\n",
       }) {
    const std::string path = write_temp_config(bad);
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    std::filesystem::remove(path);
  }
}

TEST_CASE("run config: value validation") {
  for (const std::string bad : {
           "[audit]\nalpha = 1.5\n",
           "[audit]\nm = 0\n",
           "[audit]\nmode = \"both\"\n",
           "[filter]\nkind = \"parametric\"\n",          // theta missing
           "[filter]\nkind = \"subprocess\"\n",          // command missing
           "[filter]\nkind = \"mystery\"\n",
           "[output]\nformat = \"xml\"\n",
           "[experiment]\ntrials = 0\n",
           "[experiment]\nm_values = []\n",
           "[experiment]\n[experiment.mu_grid]\nstep = -1.0\n",
           "[family]\nid = \"gaussian-mean-var\"\ndomain = [[-1.0, 1.0]]\n",
       }) {
    const std::string path = write_temp_config(bad);
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    std::filesystem::remove(path);
  }
}

TEST_CASE("run config: defaults apply when sections are omitted") {
  const std::string path = write_temp_config("");
  const RunConfig config = load_run_config(path);
  CHECK(config.alpha == 0.01);
  CHECK(config.m == 30);
  CHECK(config.mode == AuditMode::kFull);
  CHECK(config.trials == 1000);
  CHECK(config.m_values == std::vector<int>{30, 100, 300, 1000});
  CHECK(config.mu_grid.values().size() == 31);
  CHECK(config.sigma2_grid.values().size() == 19);
  CHECK(config.revenue_fn.peak_distance == 0.75);
  CHECK_FALSE(config.filter.has_value());
  CHECK(build_family(config)->id() == "gaussian-mean-var");
  std::filesystem::remove(path);
}

TEST_CASE("missing config file raises a config error") {
  CHECK_THROWS_AS(load_run_config("/no/such/feedaudit.toml"), ConfigError);
}
