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

// Reference subprocess feed source speaking the line-delimited JSON
// protocol: reads {"id", "payload", "m"} per line on stdin and replies
// {"id", "items"} per line on stdout. Draws feeds from a parametric policy
// with per-query randomness derived from (--seed, request id), which makes
// its answers bit-identical to the in-process parametric source with the
// same seed. The --mode flag injects protocol failures for testing.

#include <chrono>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "feedaudit/model_family.hpp"
#include "feedaudit/rng.hpp"

int main(int argc, char** argv) {
  CLI::App app{"feedaudit-sim-source: parametric feed source over stdin/stdout"};

  std::string family_id = "gaussian-mean-var";
  std::vector<double> theta_values = {0.0, 1.0};
  std::uint64_t seed = 0;
  double fixed_sigma2 = 1.0;
  std::string mode = "ok";

  app.add_option("--family", family_id, "model family id");
  app.add_option("--theta", theta_values, "policy parameters")->delimiter(',');
  app.add_option("--seed", seed, "source seed");
  app.add_option("--fixed-sigma2", fixed_sigma2, "known variance (gaussian-known-var)");
  app.add_option("--mode", mode, "ok | malformed | silent | crash | short")
      ->check(CLI::IsMember({"ok", "malformed", "silent", "crash", "short"}));

  CLI11_PARSE(app, argc, argv);

  std::shared_ptr<const feedaudit::ModelFamily> family;
  try {
    nlohmann::json fixed = nlohmann::json::object();
    if (family_id == "gaussian-known-var") fixed["sigma2"] = fixed_sigma2;
    family = feedaudit::ModelFamily::from_descriptor({{"id", family_id}, {"fixed", fixed}});
  } catch (const std::exception& e) {
    std::cerr << "invalid family: " << e.what() << "\n";
    return 2;
  }

  Eigen::VectorXd theta(static_cast<Eigen::Index>(theta_values.size()));
  for (std::size_t i = 0; i < theta_values.size(); ++i) {
    theta[static_cast<Eigen::Index>(i)] = theta_values[i];
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;

    if (mode == "crash") return 9;
    if (mode == "silent") {
      // Swallow requests until the auditor gives up and closes stdin.
      continue;
    }
    if (mode == "malformed") {
      std::cout << "this is not a protocol reply\n" << std::flush;
      continue;
    }

    nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
    if (request.is_discarded() || !request.contains("id") || !request.contains("m")) {
      std::cerr << "malformed request: " << line << "\n";
      return 3;
    }
    const std::string id = request["id"].get<std::string>();
    int m = request["m"].get<int>();
    if (mode == "short" && m > 1) m -= 1;

    feedaudit::SeedStream rng(
        feedaudit::derive_seed(seed, feedaudit::hash_string(id)));
    feedaudit::Feed feed;
    try {
      feed = family->sample_feed(feedaudit::ParameterVector(theta), m, rng);
    } catch (const std::exception& e) {
      std::cerr << "sampling failed: " << e.what() << "\n";
      return 3;
    }

    nlohmann::json reply = {{"id", id}, {"items", feed}};
    std::cout << reply.dump() << "\n" << std::flush;
  }
  return 0;
}
