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

#ifndef FEEDAUDIT_EXPERIMENTS_HPP_
#define FEEDAUDIT_EXPERIMENTS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "feedaudit/audit.hpp"
#include "feedaudit/model_family.hpp"

namespace feedaudit {

// --------------------------------------------------------------------------
// False-positive-rate calibration: filter and baseline both sample the same
// distribution, so every FAIL is a false positive.

struct FprRow {
  int m = 0;
  int trials = 0;
  int failures = 0;
  double fpr = 0.0;
  double ci_low = 0.0;   // 95% binomial (normal approximation)
  double ci_high = 0.0;
};

struct FprTable {
  std::string family_id;
  ParameterVector theta0;
  double alpha = 0.0;
  std::vector<FprRow> rows;

  double max_fpr() const;
};

FprTable run_fpr_experiment(const ModelFamily& family, const ParameterVector& theta0,
                            const std::vector<int>& m_values, double alpha, int trials,
                            std::uint64_t seed, int jobs = 1);

// --------------------------------------------------------------------------
// Pass/fail heatmap over Gaussian filter policies versus a Gaussian baseline.

struct HeatmapGrid {
  std::vector<double> mu_values;
  std::vector<double> sigma2_values;
  int trials = 0;
  int m = 0;
  double alpha = 0.0;
  ParameterVector baseline_theta;
  // failure_rate(i, j) = FAIL frequency of filter N(mu_values[j],
  // sigma2_values[i]) against the baseline.
  Eigen::MatrixXd failure_rate;

  double failure_at(double sigma2, double mu) const;
};

// Evenly spaced grid helper (inclusive of both ends, step > 0).
std::vector<double> grid_values(double min, double max, double step);

HeatmapGrid run_heatmap(const ParameterVector& baseline_theta,
                        const std::vector<double>& mu_values,
                        const std::vector<double>& sigma2_values, int m, double alpha,
                        int trials, std::uint64_t seed, int jobs = 1);

// --------------------------------------------------------------------------
// Partition of heatmap cells into confidently-passing and confidently-
// failing distributions, with density curves of representative members.

struct DensityCurve {
  double mu = 0.0;
  double sigma2 = 0.0;
  std::vector<double> z;
  std::vector<double> density;
};

struct ClassifiedCell {
  double mu = 0.0;
  double sigma2 = 0.0;
  double pass_rate = 0.0;
};

struct Classification {
  double threshold = 0.8;
  std::vector<ClassifiedCell> passing;  // pass rate > threshold
  std::vector<ClassifiedCell> failing;  // fail rate > threshold
  std::vector<DensityCurve> passing_curves;
  std::vector<DensityCurve> failing_curves;
};

Classification classify_distributions(const HeatmapGrid& grid, double threshold = 0.8,
                                      int representatives = 3);

// --------------------------------------------------------------------------
// Revenue as a function of the distance between filtered and baseline means:
// R(d) = base + peak_gain * (d/d*) * exp(1 - d/d*), strictly concave on
// [0, 2 d*] with its maximum at d = d*.

struct RevenueFunction {
  double base = 1.0;
  double peak_gain = 1.0;
  double peak_distance = 0.75;  // d*, must be > 0
};

double revenue(const RevenueFunction& fn, double distance);

// --------------------------------------------------------------------------
// Cost of auditing: revenue forgone by restricting to policies that pass the
// audit sufficiently often.

struct PolicyCell {
  double mu = 0.0;
  double sigma2 = 0.0;
  double revenue = 0.0;
  double pass_rate = 0.0;
  bool feasible = false;
};

struct CostOfAuditingResult {
  double unconstrained_max = 0.0;
  double constrained_max = 0.0;
  double cost = 0.0;
  PolicyCell unconstrained_argmax;
  PolicyCell constrained_argmax;
  bool infeasible = false;  // no grid policy reached the feasibility threshold
  double feasibility_threshold = 0.8;
  int trials = 0;
  int m = 0;
  double alpha = 0.0;
  RevenueFunction revenue_fn;
  std::vector<PolicyCell> cells;
};

CostOfAuditingResult cost_of_auditing(const RevenueFunction& fn,
                                      const ParameterVector& baseline_theta,
                                      const std::vector<double>& mu_values,
                                      const std::vector<double>& sigma2_values, int m,
                                      double alpha, double feasibility_threshold, int trials,
                                      std::uint64_t seed, int jobs = 1);

// --------------------------------------------------------------------------
// Concrete demonstration of the zero-cost construction: when the reward
// ignores the variance coordinate, shifting both feeds along that coordinate
// shrinks the information quadratic form below the threshold, so maximal
// reward and a passing audit coexist.

enum class RewardMode { kMeanOnly, kAllCoordinates };

struct Prop2Candidate {
  double kappa = 0.0;
  double sigma2 = 0.0;
  double quadratic_form = 0.0;
  double pass_rate = 0.0;
  bool evaluated = false;  // pass_rate measured by Monte Carlo
};

struct Prop2Report {
  bool precondition_violated = false;
  std::string message;

  std::vector<int> omega;     // coordinates the reward ignores
  Eigen::VectorXd theta_bar;  // shift direction
  double kappa = 0.0;
  double shifted_sigma2 = 0.0;
  double quadratic_form = 0.0;
  double tau = 0.0;
  bool box_bound_hit = false;
  std::string omega_cardinality_note;

  double mean_separation = 0.0;
  double pass_rate_unshifted = 0.0;
  double pass_rate_shifted = 0.0;
  // Fallback policy that moves both means to their midpoint instead of
  // shifting the variance; always compliant but pays a reward price.
  double matching_reward = 0.0;
  double matching_pass_rate = 0.0;
  double unconstrained_reward = 0.0;
  double constrained_reward = 0.0;
  double measured_cost = 0.0;
  double feasibility_threshold = 0.8;
  int m = 0;
  double alpha = 0.0;
  int trials = 0;

  std::vector<Prop2Candidate> candidates;
};

Prop2Report zero_cost_construction(RewardMode mode, const RevenueFunction& fn,
                                   double mean_separation, int m, double alpha, int trials,
                                   std::uint64_t seed, int jobs = 1);

}  // namespace feedaudit

#endif  // FEEDAUDIT_EXPERIMENTS_HPP_
