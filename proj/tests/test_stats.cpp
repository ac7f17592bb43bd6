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

#include "feedaudit/stats.hpp"

#include <cmath>

#include "doctest.h"
#include "feedaudit/errors.hpp"
#include "feedaudit/rng.hpp"

using namespace feedaudit;

namespace {

// Reference quantiles, frozen from an independent high-precision inversion
// of the regularized incomplete gamma function.
struct QuantileCase {
  int r;
  double a;
  double expected;
};
constexpr QuantileCase kQuantileTable[] = {
    {1, 0.95, 3.8414588206941245},  {2, 0.99, 9.210340371976181},
    {1, 0.99, 6.6348966010212136},  {2, 0.95, 5.9914645471079802},
    {3, 0.9, 6.2513886311703237},   {4, 0.999, 18.466826952903169},
    {6, 0.5, 5.3481206274471206},   {5, 0.975, 12.832501994030026},
};

FisherMatrix identity_info(int r) {
  return FisherMatrix(Eigen::MatrixXd::Identity(r, r));
}

}  // namespace

TEST_CASE("chi-squared quantile matches frozen table values") {
  for (const auto& c : kQuantileTable) {
    CHECK(std::abs(chi_squared_quantile(c.r, c.a) - c.expected) < 1e-10);
  }
}

TEST_CASE("chi-squared quantile at r=2 matches the closed form -2 ln(1-a)") {
  for (double a : {0.5, 0.9, 0.95, 0.99, 0.999}) {
    CHECK(std::abs(chi_squared_quantile(2, a) - (-2.0 * std::log1p(-a))) < 1e-10);
  }
}

TEST_CASE("chi-squared quantile tends to zero as a tends to zero") {
  CHECK(chi_squared_quantile(2, 1e-12) < 1e-6);
  CHECK(chi_squared_quantile(2, 1e-12) >= 0.0);
}

TEST_CASE("chi-squared quantile / CDF round trip") {
  for (int r = 1; r <= 6; ++r) {
    for (double a : {0.5, 0.9, 0.95, 0.99, 0.999}) {
      CHECK(std::abs(chi_squared_cdf(r, chi_squared_quantile(r, a)) - a) < 1e-9);
    }
  }
}

TEST_CASE("chi-squared quantile rejects out-of-range probabilities") {
  CHECK_THROWS_AS(chi_squared_quantile(2, 0.0), DomainError);
  CHECK_THROWS_AS(chi_squared_quantile(2, 1.0), DomainError);
  CHECK_THROWS_AS(chi_squared_quantile(2, -0.3), DomainError);
  CHECK_THROWS_AS(chi_squared_quantile(2, 1.5), DomainError);
  CHECK_THROWS_AS(chi_squared_quantile(0, 0.5), DomainError);
}

TEST_CASE("audit threshold composes the quantile with the 2/m scale") {
  const AuditThreshold t1 = audit_threshold(2, 30, 0.01);
  CHECK(std::abs(t1.tau - 0.61402269146507873) < 1e-9);
  CHECK(t1.r == 2);
  CHECK(t1.m == 30);

  const AuditThreshold t2 = audit_threshold(1, 1000, 0.05);
  CHECK(std::abs(t2.tau - 0.0076829176413882489) < 1e-12);

  // Scale limit: tau -> 0 as m -> infinity.
  CHECK(audit_threshold(2, 100000000, 0.01).tau < 1e-6);
}

TEST_CASE("audit threshold is monotone in m and in 1 - alpha") {
  double previous = audit_threshold(2, 1, 0.01).tau;
  for (int m : {2, 5, 30, 100, 10000}) {
    const double tau = audit_threshold(2, m, 0.01).tau;
    CHECK(tau < previous);
    previous = tau;
  }

  previous = audit_threshold(2, 30, 0.5).tau;
  for (double alpha : {0.2, 0.1, 0.05, 0.01, 0.001}) {
    const double tau = audit_threshold(2, 30, alpha).tau;
    CHECK(tau > previous);
    previous = tau;
  }

  CHECK_THROWS_AS(audit_threshold(2, 0, 0.01), DomainError);
  CHECK_THROWS_AS(audit_threshold(2, 30, 0.0), DomainError);
  CHECK_THROWS_AS(audit_threshold(2, 30, 1.0), DomainError);
}

TEST_CASE("wald statistic basic values") {
  CHECK(wald_statistic(ParameterVector{1.0, 2.0}, ParameterVector{1.0, 2.0},
                       identity_info(2)) == 0.0);
  CHECK(wald_statistic(ParameterVector{1.0, 0.0}, ParameterVector{0.0, 0.0},
                       identity_info(2)) == doctest::Approx(1.0));

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 0.5;
  CHECK(wald_statistic(ParameterVector{0.5, 1.2}, ParameterVector{0.0, 1.0},
                       FisherMatrix(diag)) == doctest::Approx(0.27).epsilon(1e-12));

  CHECK_THROWS_AS(
      wald_statistic(ParameterVector{1.0}, ParameterVector{0.0, 0.0}, identity_info(2)),
      ShapeError);
}

TEST_CASE("wald statistic is symmetric, nonnegative, and scales quadratically") {
  SeedStream rng(20260101);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + static_cast<int>(rng.below(3));
    Eigen::VectorXd a(r), b(r);
    for (int i = 0; i < r; ++i) {
      a[i] = rng.uniform(-3.0, 3.0);
      b[i] = rng.uniform(-3.0, 3.0);
    }
    Eigen::MatrixXd square(r, r);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) square(i, j) = rng.uniform(-1.0, 1.0);
    }
    const FisherMatrix info(Eigen::MatrixXd(square.transpose() * square +
                                            1e-9 * Eigen::MatrixXd::Identity(r, r)));

    const ParameterVector pa(a), pb(b);
    const double s = wald_statistic(pa, pb, info);
    CHECK(s >= 0.0);
    CHECK(wald_statistic(pb, pa, info) == doctest::Approx(s).epsilon(1e-12));

    const double c = rng.uniform(0.1, 4.0);
    const ParameterVector ca((c * a).eval()), cb((c * b).eval());
    CHECK(wald_statistic(ca, cb, info) == doctest::Approx(c * c * s).epsilon(1e-9));
  }
}

TEST_CASE("robustness decision fails iff a statistic reaches tau") {
  const AuditThreshold threshold{0.614, 2, 30, 0.01};
  CHECK(robustness_decision({0.0, 0.0}, threshold) == Verdict::kPass);
  CHECK(robustness_decision({0.7, 0.3}, threshold) == Verdict::kFail);
  CHECK(robustness_decision({0.3, 0.7}, threshold) == Verdict::kFail);
  // The comparison is >=, so the boundary fails.
  CHECK(robustness_decision({0.614, 0.1}, threshold) == Verdict::kFail);
  CHECK(robustness_decision({0.6139999, 0.1}, threshold) == Verdict::kPass);
}

TEST_CASE("robustness decision is monotone: enlarging tau never flips PASS to FAIL") {
  SeedStream rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const TestStatisticPair pair{rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
    const double tau_small = rng.uniform(0.0, 2.0);
    const double tau_large = tau_small + rng.uniform(0.0, 2.0);
    const AuditThreshold small{tau_small, 2, 30, 0.01};
    const AuditThreshold large{tau_large, 2, 30, 0.01};
    if (robustness_decision(pair, small) == Verdict::kPass) {
      CHECK(robustness_decision(pair, large) == Verdict::kPass);
    }
  }
}

TEST_CASE("regularized incomplete gamma basics") {
  CHECK(regularized_gamma_p(0.5, 0.0) == 0.0);
  CHECK(regularized_gamma_p(1.0, 1e9) == doctest::Approx(1.0));
  // P(1, x) = 1 - exp(-x).
  for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(regularized_gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(regularized_gamma_p(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(regularized_gamma_p(1.0, -1.0), DomainError);
}
