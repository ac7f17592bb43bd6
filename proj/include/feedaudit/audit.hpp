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

#ifndef FEEDAUDIT_AUDIT_HPP_
#define FEEDAUDIT_AUDIT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "feedaudit/feed.hpp"
#include "feedaudit/model_family.hpp"
#include "feedaudit/stats.hpp"

namespace feedaudit {

enum class AuditMode { kStrict, kFull };

inline const char* to_string(AuditMode m) { return m == AuditMode::kStrict ? "strict" : "full"; }

struct ShuffledPair {
  Feed z_prime;
  Feed z_double_prime;
  int bit = 0;  // 0: (Z', Z'') = (Z, Z_B), 1: swapped
};

// Randomly relabels the two feeds with probability 1/2 each way, so the
// auditor does not know which feed came from the filter.
ShuffledPair shuffle_pair(Feed z, Feed z_baseline, SeedStream& rng);

// The computational core of one audit step: fit both MLEs and evaluate the
// difference in both information metrics, plus the midpoint-information
// statistic kept as a diagnostic (it never drives the verdict).
struct PairStatistics {
  MleResult mle_prime;
  MleResult mle_double_prime;
  TestStatisticPair stats;
  double stat_midpoint = 0.0;
};

PairStatistics compute_pair_statistics(const ModelFamily& family, const Feed& z_prime,
                                       const Feed& z_double_prime);

struct InputAuditResult {
  std::string input_id;
  int shuffle_bit = 0;
  int m = 0;
  ParameterVector theta_prime;
  ParameterVector theta_double_prime;
  double stat_prime = 0.0;
  double stat_double_prime = 0.0;
  double stat_midpoint = 0.0;
  double tau = 0.0;
  Verdict verdict = Verdict::kPass;
  std::vector<std::string> flags;
};

struct AuditConfig {
  double alpha = 0.01;
  AuditMode mode = AuditMode::kFull;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct AuditReport {
  // Config echo.
  double alpha = 0.0;
  int m = 0;
  int n = 0;
  std::string family_id;
  std::uint64_t seed = 0;
  AuditMode mode = AuditMode::kFull;

  double cumulative_false_positive_rate = 0.0;  // n * alpha
  std::vector<std::string> warnings;
  std::vector<InputAuditResult> results;
  Verdict overall = Verdict::kPass;
  bool aborted = false;
  std::string error;
};

// Executes one audit step: queries both sources, shuffles, fits, tests.
// The feed length m is discovered from the filter's response; when
// expected_m > 0 both responses must have exactly that length.
InputAuditResult audit_input(FeedSource& filter, FeedSource& baseline, const AuditInput& input,
                             const ModelFamily& family, double alpha, SeedStream& rng,
                             int expected_m = 0);

// Runs the audit over a set of inputs. Strict mode evaluates inputs in order
// and stops at the first FAIL; full mode evaluates every input (possibly in
// parallel) and aggregates. Both modes produce the same overall verdict.
// A source error aborts the run; the partial report is returned with the
// aborted flag and error message set.
AuditReport run_audit(FeedSource& filter, FeedSource& baseline,
                      const std::vector<AuditInput>& inputs, const ModelFamily& family,
                      const AuditConfig& config);

// Pure-function form of the audit step for already-materialized feeds, used
// by platforms to self-verify before an audit. The verdict is invariant
// under swapping the arguments because both information metrics are tested.
Verdict decision_robustness_check(const Feed& z, const Feed& z_baseline,
                                  const ModelFamily& family, double alpha);

}  // namespace feedaudit

#endif  // FEEDAUDIT_AUDIT_HPP_
