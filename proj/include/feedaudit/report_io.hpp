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

#ifndef FEEDAUDIT_REPORT_IO_HPP_
#define FEEDAUDIT_REPORT_IO_HPP_

#include <string>

#include "json.hpp"

#include "feedaudit/audit.hpp"
#include "feedaudit/experiments.hpp"
#include "feedaudit/model_family.hpp"

namespace feedaudit {

// Shortest round-trip decimal rendering; identical across runs so emitted
// files are byte-stable.
std::string format_double(double value);

nlohmann::json audit_report_json(const AuditReport& report);
// Columns: input_id, shuffle_bit, theta_prime_*, theta_dprime_*, stat_prime,
// stat_dprime, tau, verdict, flags (semicolon-joined).
std::string audit_report_csv(const AuditReport& report);

nlohmann::json fpr_json(const FprTable& table);
std::string fpr_csv(const FprTable& table);

nlohmann::json heatmap_json(const HeatmapGrid& grid, const Classification& classification);
std::string heatmap_csv(const HeatmapGrid& grid);
// Simple color-ramp rendering of the failure-rate matrix (binary PPM).
std::string heatmap_ppm(const HeatmapGrid& grid, int cell_pixels = 12);

nlohmann::json cost_json(const CostOfAuditingResult& result);
std::string cost_csv(const CostOfAuditingResult& result);

nlohmann::json prop2_json(const Prop2Report& report);
std::string prop2_csv(const Prop2Report& report);

nlohmann::json regularity_json(const RegularityReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace feedaudit

#endif  // FEEDAUDIT_REPORT_IO_HPP_
