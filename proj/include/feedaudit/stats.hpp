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

#ifndef FEEDAUDIT_STATS_HPP_
#define FEEDAUDIT_STATS_HPP_

#include <string>

#include "feedaudit/parameter.hpp"

namespace feedaudit {

// Regularized lower incomplete gamma function P(a, x) for a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// CDF of the chi-squared distribution with r degrees of freedom.
double chi_squared_cdf(int r, double x);

// Inverse CDF: returns q such that P(u <= q) = a for u ~ chi-squared(r).
// Computed by bisection on the regularized incomplete gamma CDF down to an
// interval width of 1e-12.
double chi_squared_quantile(int r, double a);

// The audit threshold tau = (2/m) * chi2_r(1 - alpha), together with the
// parameters it was computed from.
struct AuditThreshold {
  double tau = 0.0;
  int r = 0;
  int m = 0;
  double alpha = 0.0;
};

AuditThreshold audit_threshold(int r, int m, double alpha);

// The two quadratic forms of the dual test: the parameter-difference vector
// measured in the information metric at each of the two estimates.
struct TestStatisticPair {
  double stat_prime = 0.0;
  double stat_double_prime = 0.0;
};

enum class Verdict { kPass, kFail };

inline const char* to_string(Verdict v) { return v == Verdict::kPass ? "PASS" : "FAIL"; }

// (theta1 - theta2)^T info (theta1 - theta2). Symmetric in its first two
// arguments and nonnegative for PSD info.
double wald_statistic(const ParameterVector& theta1, const ParameterVector& theta2,
                      const FisherMatrix& info);

// FAIL iff either statistic reaches the threshold. The comparison is >= so a
// statistic exactly at tau fails.
Verdict robustness_decision(const TestStatisticPair& pair, const AuditThreshold& threshold);

}  // namespace feedaudit

#endif  // FEEDAUDIT_STATS_HPP_
