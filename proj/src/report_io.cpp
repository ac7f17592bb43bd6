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

#include "feedaudit/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace feedaudit {

namespace {

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out.push_back(';');
    out += f;
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

nlohmann::json audit_report_json(const AuditReport& report) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) {
    results.push_back({{"input_id", r.input_id},
                       {"shuffle_bit", r.shuffle_bit},
                       {"m", r.m},
                       {"theta_prime", vector_json(r.theta_prime.values())},
                       {"theta_double_prime", vector_json(r.theta_double_prime.values())},
                       {"stat_prime", r.stat_prime},
                       {"stat_double_prime", r.stat_double_prime},
                       {"stat_midpoint", r.stat_midpoint},
                       {"tau", r.tau},
                       {"verdict", to_string(r.verdict)},
                       {"flags", r.flags}});
  }
  nlohmann::json out = {
      {"config",
       {{"alpha", report.alpha},
        {"m", report.m},
        {"n", report.n},
        {"family", report.family_id},
        {"seed", report.seed},
        {"mode", to_string(report.mode)}}},
      {"cumulative_false_positive_rate", report.cumulative_false_positive_rate},
      {"warnings", report.warnings},
      {"results", results},
      {"overall_verdict", to_string(report.overall)},
      {"aborted", report.aborted}};
  if (report.aborted) out["error"] = report.error;
  return out;
}

std::string audit_report_csv(const AuditReport& report) {
  std::ostringstream out;
  const int r = report.results.empty()
                    ? 0
                    : static_cast<int>(report.results.front().theta_prime.dimension());
  out << "input_id,shuffle_bit";
  for (int i = 0; i < r; ++i) out << ",theta_prime_" << i;
  for (int i = 0; i < r; ++i) out << ",theta_dprime_" << i;
  out << ",stat_prime,stat_dprime,tau,verdict,flags\n";
  for (const auto& row : report.results) {
    out << row.input_id << ',' << row.shuffle_bit;
    for (int i = 0; i < r; ++i) out << ',' << format_double(row.theta_prime[i]);
    for (int i = 0; i < r; ++i) out << ',' << format_double(row.theta_double_prime[i]);
    out << ',' << format_double(row.stat_prime) << ',' << format_double(row.stat_double_prime)
        << ',' << format_double(row.tau) << ',' << to_string(row.verdict) << ','
        << join_flags(row.flags) << '\n';
  }
  return out.str();
}

nlohmann::json fpr_json(const FprTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"m", row.m},
                    {"trials", row.trials},
                    {"failures", row.failures},
                    {"fpr", row.fpr},
                    {"ci_low", row.ci_low},
                    {"ci_high", row.ci_high}});
  }
  return {{"family", table.family_id},
          {"theta0", vector_json(table.theta0.values())},
          {"alpha", table.alpha},
          {"max_fpr", table.max_fpr()},
          {"rows", rows}};
}

std::string fpr_csv(const FprTable& table) {
  std::ostringstream out;
  out << "m,trials,failures,fpr,ci_low,ci_high\n";
  for (const auto& row : table.rows) {
    out << row.m << ',' << row.trials << ',' << row.failures << ',' << format_double(row.fpr)
        << ',' << format_double(row.ci_low) << ',' << format_double(row.ci_high) << '\n';
  }
  return out.str();
}

nlohmann::json heatmap_json(const HeatmapGrid& grid, const Classification& classification) {
  nlohmann::json rates = nlohmann::json::array();
  for (Eigen::Index i = 0; i < grid.failure_rate.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < grid.failure_rate.cols(); ++j) {
      row.push_back(grid.failure_rate(i, j));
    }
    rates.push_back(row);
  }

  const auto cells_json = [](const std::vector<ClassifiedCell>& cells) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : cells) {
      out.push_back({{"mu", c.mu}, {"sigma2", c.sigma2}, {"pass_rate", c.pass_rate}});
    }
    return out;
  };
  const auto curves_json = [](const std::vector<DensityCurve>& curves) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : curves) {
      out.push_back(
          {{"mu", c.mu}, {"sigma2", c.sigma2}, {"z", c.z}, {"density", c.density}});
    }
    return out;
  };

  return {{"m", grid.m},
          {"alpha", grid.alpha},
          {"trials", grid.trials},
          {"baseline_theta", vector_json(grid.baseline_theta.values())},
          {"mu_values", grid.mu_values},
          {"sigma2_values", grid.sigma2_values},
          {"failure_rate", rates},
          {"classification",
           {{"threshold", classification.threshold},
            {"passing", cells_json(classification.passing)},
            {"failing", cells_json(classification.failing)},
            {"passing_curves", curves_json(classification.passing_curves)},
            {"failing_curves", curves_json(classification.failing_curves)}}}};
}

std::string heatmap_csv(const HeatmapGrid& grid) {
  std::ostringstream out;
  out << "sigma2,mu,trials,failures,failure_rate\n";
  for (std::size_t i = 0; i < grid.sigma2_values.size(); ++i) {
    for (std::size_t j = 0; j < grid.mu_values.size(); ++j) {
      const double rate =
          grid.failure_rate(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const int failures = static_cast<int>(std::lround(rate * grid.trials));
      out << format_double(grid.sigma2_values[i]) << ',' << format_double(grid.mu_values[j])
          << ',' << grid.trials << ',' << failures << ',' << format_double(rate) << '\n';
    }
  }
  return out.str();
}

std::string heatmap_ppm(const HeatmapGrid& grid, int cell_pixels) {
  const int rows = static_cast<int>(grid.sigma2_values.size());
  const int cols = static_cast<int>(grid.mu_values.size());
  const int width = cols * cell_pixels;
  const int height = rows * cell_pixels;

  std::string body;
  body.reserve(static_cast<std::size_t>(width) * height * 3);
  // Highest sigma2 on the top row; light cells pass, dark cells fail.
  for (int py = 0; py < height; ++py) {
    const int i = rows - 1 - py / cell_pixels;
    for (int px = 0; px < width; ++px) {
      const int j = px / cell_pixels;
      const double f = grid.failure_rate(i, j);
      const auto channel = [&](double lo, double hi) {
        return static_cast<char>(static_cast<int>(std::lround(hi + (lo - hi) * f)));
      };
      body.push_back(channel(120.0, 255.0));
      body.push_back(channel(20.0, 250.0));
      body.push_back(channel(60.0, 235.0));
    }
  }

  std::ostringstream header;
  header << "P6\n" << width << ' ' << height << "\n255\n";
  return header.str() + body;
}

nlohmann::json cost_json(const CostOfAuditingResult& result) {
  const auto cell_json = [](const PolicyCell& c) {
    return nlohmann::json{{"mu", c.mu},
                          {"sigma2", c.sigma2},
                          {"revenue", c.revenue},
                          {"pass_rate", c.pass_rate},
                          {"feasible", c.feasible}};
  };
  return {{"unconstrained_max", result.unconstrained_max},
          {"constrained_max", result.constrained_max},
          {"cost", result.cost},
          {"infeasible", result.infeasible},
          {"unconstrained_argmax", cell_json(result.unconstrained_argmax)},
          {"constrained_argmax", cell_json(result.constrained_argmax)},
          {"feasibility_threshold", result.feasibility_threshold},
          {"trials", result.trials},
          {"m", result.m},
          {"alpha", result.alpha},
          {"revenue_function",
           {{"base", result.revenue_fn.base},
            {"peak_gain", result.revenue_fn.peak_gain},
            {"peak_distance", result.revenue_fn.peak_distance}}}};
}

std::string cost_csv(const CostOfAuditingResult& result) {
  std::ostringstream out;
  out << "sigma2,mu,revenue,pass_rate,feasible\n";
  for (const auto& cell : result.cells) {
    out << format_double(cell.sigma2) << ',' << format_double(cell.mu) << ','
        << format_double(cell.revenue) << ',' << format_double(cell.pass_rate) << ','
        << (cell.feasible ? 1 : 0) << '\n';
  }
  return out.str();
}

nlohmann::json prop2_json(const Prop2Report& report) {
  nlohmann::json out = {{"precondition_violated", report.precondition_violated},
                        {"message", report.message},
                        {"m", report.m},
                        {"alpha", report.alpha},
                        {"trials", report.trials}};
  if (report.precondition_violated) return out;

  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& c : report.candidates) {
    candidates.push_back({{"kappa", c.kappa},
                          {"sigma2", c.sigma2},
                          {"quadratic_form", c.quadratic_form},
                          {"pass_rate", c.pass_rate},
                          {"evaluated", c.evaluated}});
  }
  out["omega"] = report.omega;
  out["theta_bar"] = vector_json(report.theta_bar);
  out["kappa"] = report.kappa;
  out["shifted_sigma2"] = report.shifted_sigma2;
  out["quadratic_form"] = report.quadratic_form;
  out["tau"] = report.tau;
  out["box_bound_hit"] = report.box_bound_hit;
  out["omega_cardinality_note"] = report.omega_cardinality_note;
  out["mean_separation"] = report.mean_separation;
  out["pass_rate_unshifted"] = report.pass_rate_unshifted;
  out["pass_rate_shifted"] = report.pass_rate_shifted;
  out["matching_reward"] = report.matching_reward;
  out["matching_pass_rate"] = report.matching_pass_rate;
  out["unconstrained_reward"] = report.unconstrained_reward;
  out["constrained_reward"] = report.constrained_reward;
  out["measured_cost"] = report.measured_cost;
  out["feasibility_threshold"] = report.feasibility_threshold;
  out["candidates"] = candidates;
  return out;
}

std::string prop2_csv(const Prop2Report& report) {
  std::ostringstream out;
  out << "kappa,sigma2,quadratic_form,pass_rate,evaluated\n";
  for (const auto& c : report.candidates) {
    out << format_double(c.kappa) << ',' << format_double(c.sigma2) << ','
        << format_double(c.quadratic_form) << ',' << format_double(c.pass_rate) << ','
        << (c.evaluated ? 1 : 0) << '\n';
  }
  return out.str();
}

nlohmann::json regularity_json(const RegularityReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"condition", c.condition}, {"pass", c.pass}, {"witness", c.witness}});
  }
  return {{"family", report.family_id}, {"all_pass", report.all_pass()}, {"checks", checks}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace feedaudit
