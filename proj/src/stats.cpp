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
#include <limits>

#include "feedaudit/errors.hpp"

namespace feedaudit {

namespace {

constexpr int kMaxTerms = 500;
constexpr double kEps = 1e-16;

// Series expansion, preferred for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxTerms; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction (modified Lentz) for Q(a, x), preferred for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxTerms; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("regularized_gamma_p requires a > 0");
  if (x < 0.0) throw DomainError("regularized_gamma_p requires x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_squared_cdf(int r, double x) {
  if (r < 1) throw DomainError("chi-squared degrees of freedom must be >= 1");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * r, 0.5 * x);
}

double chi_squared_quantile(int r, double a) {
  if (r < 1) throw DomainError("chi-squared degrees of freedom must be >= 1");
  if (!(a > 0.0 && a < 1.0)) {
    throw DomainError("chi-squared quantile probability must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = std::max(2.0 * r, 16.0);
  int guard = 0;
  while (chi_squared_cdf(r, hi) < a) {
    hi *= 2.0;
    if (++guard > 400) throw Error("chi_squared_quantile bracket failure");
  }
  for (int i = 0; i < 300 && (hi - lo) > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi_squared_cdf(r, mid) < a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

AuditThreshold audit_threshold(int r, int m, double alpha) {
  if (m < 1) throw DomainError("audit threshold requires feed length m >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("significance alpha must lie in (0, 1)");
  }
  AuditThreshold t;
  t.r = r;
  t.m = m;
  t.alpha = alpha;
  t.tau = (2.0 / static_cast<double>(m)) * chi_squared_quantile(r, 1.0 - alpha);
  return t;
}

double wald_statistic(const ParameterVector& theta1, const ParameterVector& theta2,
                      const FisherMatrix& info) {
  if (theta1.dimension() != theta2.dimension() || theta1.dimension() != info.dimension()) {
    throw ShapeError("wald_statistic dimension mismatch");
  }
  const Eigen::VectorXd diff = theta1.values() - theta2.values();
  return diff.dot(info.entries() * diff);
}

Verdict robustness_decision(const TestStatisticPair& pair, const AuditThreshold& threshold) {
  if (pair.stat_prime >= threshold.tau || pair.stat_double_prime >= threshold.tau) {
    return Verdict::kFail;
  }
  return Verdict::kPass;
}

}  // namespace feedaudit
