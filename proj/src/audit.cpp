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

#include <optional>
#include <sstream>

#include "feedaudit/parallel.hpp"

namespace feedaudit {

namespace {

// Validates a source response and reports protocol violations against the
// offending source by name.
Feed checked_query(FeedSource& source, const AuditInput& input, const ModelFamily& family,
                   int expected_m) {
  Feed feed = source.query(input);
  if (feed.empty()) {
    throw SourceError(source.name(), "returned an empty feed for input '" + input.id + "'");
  }
  if (expected_m > 0 && static_cast<int>(feed.size()) != expected_m) {
    throw SourceError(source.name(), "returned " + std::to_string(feed.size()) +
                                         " items for input '" + input.id + "', expected " +
                                         std::to_string(expected_m));
  }
  for (double z : feed) {
    if (!family.in_sample_space(z)) {
      throw SourceError(source.name(), "returned item " + std::to_string(z) +
                                           " outside the sample space of " + family.id());
    }
  }
  return feed;
}

}  // namespace

ShuffledPair shuffle_pair(Feed z, Feed z_baseline, SeedStream& rng) {
  if (z.size() != z_baseline.size()) {
    throw ShapeError("shuffle_pair requires equal-length feeds");
  }
  ShuffledPair out;
  out.bit = rng.flip(0.5) ? 1 : 0;
  if (out.bit == 0) {
    out.z_prime = std::move(z);
    out.z_double_prime = std::move(z_baseline);
  } else {
    out.z_prime = std::move(z_baseline);
    out.z_double_prime = std::move(z);
  }
  return out;
}

PairStatistics compute_pair_statistics(const ModelFamily& family, const Feed& z_prime,
                                       const Feed& z_double_prime) {
  if (z_prime.size() != z_double_prime.size()) {
    throw ShapeError("pair statistics require equal-length feeds");
  }
  PairStatistics out;
  out.mle_prime = family.mle(z_prime);
  out.mle_double_prime = family.mle(z_double_prime);

  const FisherMatrix info_prime = family.fisher_information(out.mle_prime.theta);
  const FisherMatrix info_double_prime = family.fisher_information(out.mle_double_prime.theta);
  out.stats.stat_prime =
      wald_statistic(out.mle_prime.theta, out.mle_double_prime.theta, info_prime);
  out.stats.stat_double_prime =
      wald_statistic(out.mle_prime.theta, out.mle_double_prime.theta, info_double_prime);

  const ParameterVector midpoint(
      ((out.mle_prime.theta.values() + out.mle_double_prime.theta.values()) / 2.0).eval());
  out.stat_midpoint =
      wald_statistic(out.mle_prime.theta, out.mle_double_prime.theta,
                     family.fisher_information(midpoint));
  return out;
}

InputAuditResult audit_input(FeedSource& filter, FeedSource& baseline, const AuditInput& input,
                             const ModelFamily& family, double alpha, SeedStream& rng,
                             int expected_m) {
  Feed z = checked_query(filter, input, family, expected_m);
  const int m = static_cast<int>(z.size());
  Feed z_b = checked_query(baseline, input, family, m);

  const ShuffledPair pair = shuffle_pair(std::move(z), std::move(z_b), rng);
  const PairStatistics stats = compute_pair_statistics(family, pair.z_prime, pair.z_double_prime);
  const AuditThreshold threshold = audit_threshold(family.dimension(), m, alpha);

  InputAuditResult result;
  result.input_id = input.id;
  result.shuffle_bit = pair.bit;
  result.m = m;
  result.theta_prime = stats.mle_prime.theta;
  result.theta_double_prime = stats.mle_double_prime.theta;
  result.stat_prime = stats.stats.stat_prime;
  result.stat_double_prime = stats.stats.stat_double_prime;
  result.stat_midpoint = stats.stat_midpoint;
  result.tau = threshold.tau;
  result.verdict = robustness_decision(stats.stats, threshold);
  if (stats.mle_prime.boundary) result.flags.push_back("boundary-mle-prime");
  if (stats.mle_double_prime.boundary) result.flags.push_back("boundary-mle-dprime");
  return result;
}

AuditReport run_audit(FeedSource& filter, FeedSource& baseline,
                      const std::vector<AuditInput>& inputs, const ModelFamily& family,
                      const AuditConfig& config) {
  if (inputs.empty()) throw DomainError("run_audit requires a nonempty input set");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw DomainError("significance alpha must lie in (0, 1)");
  }

  AuditReport report;
  report.alpha = config.alpha;
  report.n = static_cast<int>(inputs.size());
  report.family_id = family.id();
  report.seed = config.seed;
  report.mode = config.mode;
  report.cumulative_false_positive_rate = config.alpha * static_cast<double>(inputs.size());

  if (config.alpha > 1.0 / static_cast<double>(inputs.size())) {
    std::ostringstream warning;
    warning << "alpha " << config.alpha << " exceeds 1/n = "
            << 1.0 / static_cast<double>(inputs.size())
            << "; cumulative false positive rate n*alpha = "
            << report.cumulative_false_positive_rate;
    report.warnings.push_back(warning.str());
  }

  const auto stream_for = [&](std::size_t index) {
    return SeedStream(derive_seed(config.seed, static_cast<std::uint64_t>(index)));
  };

  if (config.mode == AuditMode::kStrict) {
    // Literal early-exit semantics; evaluated sequentially in input order.
    int expected_m = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      SeedStream rng = stream_for(i);
      InputAuditResult result;
      try {
        result = audit_input(filter, baseline, inputs[i], family, config.alpha, rng, expected_m);
      } catch (const SourceError& e) {
        report.aborted = true;
        report.error = e.what();
        break;
      }
      expected_m = result.m;
      report.m = result.m;
      report.results.push_back(std::move(result));
      if (report.results.back().verdict == Verdict::kFail) break;
    }
  } else {
    std::vector<std::optional<InputAuditResult>> slots(inputs.size());
    std::vector<std::string> errors(inputs.size());
    parallel_for(inputs.size(), config.jobs, [&](std::size_t i) {
      SeedStream rng = stream_for(i);
      try {
        slots[i] = audit_input(filter, baseline, inputs[i], family, config.alpha, rng);
      } catch (const SourceError& e) {
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!errors[i].empty()) {
        report.aborted = true;
        report.error = errors[i];
        break;
      }
      report.results.push_back(std::move(*slots[i]));
    }
    // All sources must keep answering with the same feed length.
    for (const auto& r : report.results) {
      if (r.m != report.results.front().m) {
        report.aborted = true;
        report.error = "feed length changed between inputs: " +
                       std::to_string(report.results.front().m) + " vs " + std::to_string(r.m) +
                       " (input '" + r.input_id + "')";
        break;
      }
    }
    if (!report.results.empty()) report.m = report.results.front().m;
  }

  // For an aborted run the verdict only covers the evaluated inputs; callers
  // must inspect the aborted flag.
  report.overall = Verdict::kPass;
  for (const auto& r : report.results) {
    if (r.verdict == Verdict::kFail) report.overall = Verdict::kFail;
  }
  return report;
}

Verdict decision_robustness_check(const Feed& z, const Feed& z_baseline,
                                  const ModelFamily& family, double alpha) {
  if (z.size() != z_baseline.size()) {
    throw ShapeError("decision_robustness_check requires equal-length feeds");
  }
  if (z.empty()) throw EmptyFeedError("decision_robustness_check requires nonempty feeds");
  const PairStatistics stats = compute_pair_statistics(family, z, z_baseline);
  const AuditThreshold threshold =
      audit_threshold(family.dimension(), static_cast<int>(z.size()), alpha);
  return robustness_decision(stats.stats, threshold);
}

}  // namespace feedaudit
