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

#include "feedaudit/audit.hpp"

#include <cmath>

#include "doctest.h"
#include "feedaudit/feed_sim.hpp"
#include "feedaudit/report_io.hpp"
#include "support/test_util.hpp"

using namespace feedaudit;
namespace ft = feedaudit::testing;

namespace {

std::vector<AuditInput> simple_inputs(int n) {
  SeedStream rng(4242);
  return generate_inputs(n, 3, rng);
}

AuditConfig config_with(double alpha, AuditMode mode, std::uint64_t seed, int jobs = 1) {
  AuditConfig config;
  config.alpha = alpha;
  config.mode = mode;
  config.seed = seed;
  config.jobs = jobs;
  return config;
}

}  // namespace

TEST_CASE("shuffle_pair is a fair relabeling") {
  const Feed z{1.0, 2.0};
  const Feed z_b{3.0, 4.0};

  bool saw_plain = false, saw_swapped = false;
  int swapped = 0;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    SeedStream rng(seed);
    const ShuffledPair pair = shuffle_pair(z, z_b, rng);
    if (pair.bit == 0) {
      CHECK(pair.z_prime == z);
      CHECK(pair.z_double_prime == z_b);
      saw_plain = true;
    } else {
      CHECK(pair.z_prime == z_b);
      CHECK(pair.z_double_prime == z);
      saw_swapped = true;
      ++swapped;
    }
  }
  CHECK(saw_plain);
  CHECK(saw_swapped);
  CHECK(std::abs(swapped / static_cast<double>(trials) - 0.5) < 0.02);

  SeedStream rng(1);
  CHECK_THROWS_AS(shuffle_pair({1.0}, {1.0, 2.0}, rng), ShapeError);
}

TEST_CASE("shuffle_pair is deterministic given a seed") {
  const Feed z{1.0, 2.0}, z_b{3.0, 4.0};
  SeedStream a(17), b(17);
  const ShuffledPair pa = shuffle_pair(z, z_b, a);
  const ShuffledPair pb = shuffle_pair(z, z_b, b);
  CHECK(pa.bit == pb.bit);
  CHECK(pa.z_prime == pb.z_prime);
}

TEST_CASE("identical deterministic sources pass with zero statistics") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  const Feed fixed{0.1, -0.4, 1.2, 0.7, -1.1, 0.3};
  ft::InlineSource filter("filter", [&](const AuditInput&) { return fixed; });
  ft::InlineSource baseline("baseline", [&](const AuditInput&) { return fixed; });

  SeedStream rng(5);
  const InputAuditResult result =
      audit_input(filter, baseline, {"input-000", {}}, *family, 0.01, rng);
  CHECK(result.verdict == Verdict::kPass);
  CHECK(result.stat_prime == 0.0);
  CHECK(result.stat_double_prime == 0.0);
  CHECK(result.stat_midpoint == 0.0);
  CHECK(result.theta_prime == result.theta_double_prime);
}

TEST_CASE("far-apart filter fails almost always, matched filter passes mostly") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  const int n = 1000;
  const auto inputs = simple_inputs(n);

  SUBCASE("filter N(3,1) vs baseline N(0,1) fails > 99% of inputs") {
    const auto filter =
        parametric_filter_source({family, ParameterVector{3.0, 1.0}}, 30, 111, "filter");
    const auto baseline =
        parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 222, "baseline");
    const AuditReport report =
        run_audit(*filter, *baseline, inputs, *family, config_with(0.01, AuditMode::kFull, 7));
    int fails = 0;
    for (const auto& r : report.results) fails += r.verdict == Verdict::kFail ? 1 : 0;
    CHECK(fails > static_cast<int>(0.99 * n));
    CHECK(report.overall == Verdict::kFail);
  }

  SUBCASE("independent N(0,1) vs N(0,1) passes the vast majority of inputs") {
    // The dual test's finite-sample FAIL rate at m=30, alpha=0.01 is about
    // 7.7% (the information weights are evaluated at noisy per-feed MLEs);
    // it drops toward alpha as m grows. Frozen from a 40k-trial run.
    const auto filter =
        parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 111, "filter");
    const auto baseline =
        parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 222, "baseline");
    const AuditReport report =
        run_audit(*filter, *baseline, inputs, *family, config_with(0.01, AuditMode::kFull, 7));
    int passes = 0;
    for (const auto& r : report.results) passes += r.verdict == Verdict::kPass ? 1 : 0;
    CHECK(passes >= static_cast<int>(0.90 * n));

    int passes_large_m = 0;
    const auto filter_large =
        parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 1000, 111, "filter");
    const auto baseline_large =
        parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 1000, 222, "baseline");
    const AuditReport large = run_audit(*filter_large, *baseline_large, inputs, *family,
                                        config_with(0.01, AuditMode::kFull, 7));
    for (const auto& r : large.results) passes_large_m += r.verdict == Verdict::kPass ? 1 : 0;
    CHECK(passes_large_m >= static_cast<int>(0.97 * n));
  }
}

TEST_CASE("strict mode stops at the first failing input") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  SeedStream feed_rng(99);
  const Feed near = family->sample_feed(ParameterVector{0.0, 1.0}, 30, feed_rng);
  const Feed far = family->sample_feed(ParameterVector{6.0, 1.0}, 30, feed_rng);
  const Feed base = family->sample_feed(ParameterVector{0.0, 1.0}, 30, feed_rng);

  ft::InlineSource filter("filter", [&](const AuditInput& x) {
    return x.id == "input-001" ? far : near;
  });
  ft::InlineSource baseline("baseline", [&](const AuditInput&) { return base; });

  const auto inputs = simple_inputs(3);
  const AuditReport strict =
      run_audit(filter, baseline, inputs, *family, config_with(0.01, AuditMode::kStrict, 3));
  CHECK(strict.overall == Verdict::kFail);
  CHECK(strict.results.size() == 2);  // early exit after the second input

  const AuditReport full =
      run_audit(filter, baseline, inputs, *family, config_with(0.01, AuditMode::kFull, 3));
  CHECK(full.overall == Verdict::kFail);
  CHECK(full.results.size() == 3);
}

TEST_CASE("strict and full modes agree on the overall verdict") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  SeedStream scenario_rng(2718);
  for (int scenario = 0; scenario < 100; ++scenario) {
    const double mu = scenario_rng.uniform(-1.0, 1.0);
    const double sigma2 = scenario_rng.uniform(0.5, 2.0);
    const auto filter = parametric_filter_source({family, ParameterVector{mu, sigma2}}, 30,
                                                 1000 + scenario, "filter");
    const auto baseline =
        parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 2000 + scenario,
                                 "baseline");
    const auto inputs = simple_inputs(3);
    const AuditReport strict = run_audit(*filter, *baseline, inputs, *family,
                                         config_with(0.05, AuditMode::kStrict, scenario));
    const AuditReport full = run_audit(*filter, *baseline, inputs, *family,
                                       config_with(0.05, AuditMode::kFull, scenario));
    CHECK(strict.overall == full.overall);
  }
}

TEST_CASE("decision_robustness_check equals the audit step and ignores argument order") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  SeedStream rng(1414);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ParameterVector ta(ft::random_interior_point(family->domain(), rng, 0.3));
    const ParameterVector tb(ft::random_interior_point(family->domain(), rng, 0.3));
    SeedStream fa = rng.fork(2 * trial);
    SeedStream fb = rng.fork(2 * trial + 1);
    const Feed z = family->sample_feed(ta, 30, fa);
    const Feed z_b = family->sample_feed(tb, 30, fb);

    const Verdict forward = decision_robustness_check(z, z_b, *family, 0.01);
    const Verdict backward = decision_robustness_check(z_b, z, *family, 0.01);
    CHECK(forward == backward);

    // Same feeds through the full audit step, under both shuffle outcomes.
    ft::InlineSource filter("filter", [&](const AuditInput&) { return z; });
    ft::InlineSource baseline("baseline", [&](const AuditInput&) { return z_b; });
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      SeedStream shuffle_rng(seed);
      const InputAuditResult result =
          audit_input(filter, baseline, {"x", {}}, *family, 0.01, shuffle_rng);
      CHECK(result.verdict == forward);
    }
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("decision_robustness_check validates shapes") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  CHECK_THROWS_AS(decision_robustness_check({1.0}, {1.0, 2.0}, *family, 0.01), ShapeError);
  CHECK_THROWS_AS(decision_robustness_check({}, {}, *family, 0.01), EmptyFeedError);
}

TEST_CASE("stored statistics reproduce the stored verdicts bit-for-bit") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  const auto filter =
      parametric_filter_source({family, ParameterVector{0.6, 1.1}}, 30, 5, "filter");
  const auto baseline =
      parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 6, "baseline");
  const auto inputs = simple_inputs(50);
  const AuditReport report =
      run_audit(*filter, *baseline, inputs, *family, config_with(0.05, AuditMode::kFull, 8));

  for (const auto& r : report.results) {
    const FisherMatrix info_prime = family->fisher_information(r.theta_prime);
    const FisherMatrix info_dprime = family->fisher_information(r.theta_double_prime);
    const double stat_prime = wald_statistic(r.theta_prime, r.theta_double_prime, info_prime);
    const double stat_dprime = wald_statistic(r.theta_prime, r.theta_double_prime, info_dprime);
    CHECK(stat_prime == r.stat_prime);
    CHECK(stat_dprime == r.stat_double_prime);
    const AuditThreshold threshold = audit_threshold(family->dimension(), r.m, report.alpha);
    CHECK(threshold.tau == r.tau);
    CHECK(robustness_decision({stat_prime, stat_dprime}, threshold) == r.verdict);
  }
}

TEST_CASE("reports are deterministic and schedule-independent") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  const auto inputs = simple_inputs(12);

  const auto run_with_jobs = [&](int jobs) {
    const auto filter =
        parametric_filter_source({family, ParameterVector{0.4, 1.3}}, 30, 91, "filter");
    const auto baseline =
        parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 92, "baseline");
    const AuditReport report = run_audit(*filter, *baseline, inputs, *family,
                                         config_with(0.05, AuditMode::kFull, 1234, jobs));
    return audit_report_json(report).dump();
  };

  const std::string serial = run_with_jobs(1);
  CHECK(serial == run_with_jobs(1));
  CHECK(serial == run_with_jobs(4));
}

TEST_CASE("payload content never influences results") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  const auto filter =
      parametric_filter_source({family, ParameterVector{0.5, 1.0}}, 30, 77, "filter");
  const auto baseline =
      parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 78, "baseline");

  std::vector<AuditInput> plain, decorated;
  for (int i = 0; i < 8; ++i) {
    const std::string id = "input-" + std::to_string(i);
    plain.push_back({id, nlohmann::json::array({1, 2, 3})});
    decorated.push_back({id, nlohmann::json{{"nested", {{"deep", i}}}, {"note", "opaque"}}});
  }

  const AuditReport a =
      run_audit(*filter, *baseline, plain, *family, config_with(0.05, AuditMode::kFull, 55));
  const AuditReport b =
      run_audit(*filter, *baseline, decorated, *family, config_with(0.05, AuditMode::kFull, 55));
  REQUIRE(a.results.size() == b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    CHECK(a.results[i].verdict == b.results[i].verdict);
    CHECK(a.results[i].stat_prime == b.results[i].stat_prime);
    CHECK(a.results[i].theta_prime == b.results[i].theta_prime);
  }
}

TEST_CASE("a warning is emitted when alpha exceeds 1/n") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  const auto filter =
      parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 1, "filter");
  const auto baseline =
      parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 2, "baseline");

  const AuditReport report = run_audit(*filter, *baseline, simple_inputs(4), *family,
                                       config_with(0.5, AuditMode::kFull, 9));
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.cumulative_false_positive_rate == doctest::Approx(2.0));

  const AuditReport quiet = run_audit(*filter, *baseline, simple_inputs(4), *family,
                                      config_with(0.2, AuditMode::kFull, 9));
  CHECK(quiet.warnings.empty());
}

TEST_CASE("source failures abort with a partial report naming the source") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  SeedStream feed_rng(4);
  const Feed good = family->sample_feed(ParameterVector{0.0, 1.0}, 30, feed_rng);

  SUBCASE("thrown source error") {
    ft::InlineSource filter("filter", [&](const AuditInput& x) -> Feed {
      if (x.id == "input-002") throw SourceError("filter", "synthetic outage");
      return good;
    });
    ft::InlineSource baseline("baseline", [&](const AuditInput&) { return good; });
    const AuditReport report = run_audit(filter, baseline, simple_inputs(4), *family,
                                         config_with(0.01, AuditMode::kStrict, 10));
    CHECK(report.aborted);
    CHECK(report.results.size() == 2);
    CHECK(report.error.find("filter") != std::string::npos);
  }

  SUBCASE("malformed feed items") {
    ft::InlineSource filter("filter", [&](const AuditInput&) { return good; });
    ft::InlineSource baseline("baseline", [&](const AuditInput&) {
      Feed bad = good;
      bad[3] = std::numeric_limits<double>::quiet_NaN();
      return bad;
    });
    const AuditReport report = run_audit(filter, baseline, simple_inputs(2), *family,
                                         config_with(0.01, AuditMode::kFull, 10));
    CHECK(report.aborted);
    CHECK(report.error.find("baseline") != std::string::npos);
  }

  SUBCASE("errors surface identically under a worker pool") {
    ft::InlineSource filter("filter", [&](const AuditInput& x) -> Feed {
      if (x.id == "input-005") throw SourceError("filter", "synthetic outage");
      return good;
    });
    ft::InlineSource baseline("baseline", [&](const AuditInput&) { return good; });
    const AuditReport serial = run_audit(filter, baseline, simple_inputs(8), *family,
                                         config_with(0.01, AuditMode::kFull, 10, 1));
    const AuditReport pooled = run_audit(filter, baseline, simple_inputs(8), *family,
                                         config_with(0.01, AuditMode::kFull, 10, 4));
    CHECK(serial.aborted);
    CHECK(pooled.aborted);
    CHECK(serial.error == pooled.error);
    CHECK(serial.results.size() == pooled.results.size());
  }

  SUBCASE("length mismatch blames the second source") {
    ft::InlineSource filter("filter", [&](const AuditInput&) { return good; });
    ft::InlineSource baseline("baseline", [&](const AuditInput&) {
      return Feed(good.begin(), good.begin() + 20);
    });
    SeedStream rng(1);
    CHECK_THROWS_WITH_AS(audit_input(filter, baseline, {"x", {}}, *family, 0.01, rng),
                         doctest::Contains("baseline"), SourceError);
  }

  SUBCASE("feed length changing between inputs aborts the run") {
    ft::InlineSource filter("filter", [&](const AuditInput& x) {
      return x.id == "input-000" ? good : Feed(good.begin(), good.begin() + 10);
    });
    ft::InlineSource baseline("baseline", [&](const AuditInput& x) {
      return x.id == "input-000" ? good : Feed(good.begin(), good.begin() + 10);
    });
    const AuditReport report = run_audit(filter, baseline, simple_inputs(2), *family,
                                         config_with(0.01, AuditMode::kFull, 10));
    CHECK(report.aborted);
    CHECK(report.error.find("length") != std::string::npos);
  }
}

TEST_CASE("run_audit validates its preconditions") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  const auto filter =
      parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 1, "filter");
  const auto baseline =
      parametric_filter_source({family, ParameterVector{0.0, 1.0}}, 30, 2, "baseline");
  CHECK_THROWS_AS(
      run_audit(*filter, *baseline, {}, *family, config_with(0.01, AuditMode::kFull, 0)),
      DomainError);
  CHECK_THROWS_AS(run_audit(*filter, *baseline, simple_inputs(1), *family,
                            config_with(1.5, AuditMode::kFull, 0)),
                  DomainError);
}

TEST_CASE("boundary MLE is flagged in the result, not fatal") {
  const auto family = ModelFamily::make("gaussian-mean-var");
  ft::InlineSource filter("filter", [](const AuditInput&) { return Feed(30, 2.0); });
  SeedStream feed_rng(12);
  const Feed base = family->sample_feed(ParameterVector{0.0, 1.0}, 30, feed_rng);
  ft::InlineSource baseline("baseline", [&](const AuditInput&) { return base; });

  SeedStream rng(0);  // bit 0 or 1; either way exactly one side is degenerate
  const InputAuditResult result =
      audit_input(filter, baseline, {"x", {}}, *family, 0.01, rng);
  REQUIRE(result.flags.size() == 1);
  const bool prime_flagged = result.flags[0] == "boundary-mle-prime";
  const bool dprime_flagged = result.flags[0] == "boundary-mle-dprime";
  CHECK((prime_flagged || dprime_flagged));
  CHECK(result.verdict == Verdict::kFail);  // constant feed at mean 2 vs N(0,1)
}
