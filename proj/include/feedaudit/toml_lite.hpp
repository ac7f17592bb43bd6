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

#ifndef FEEDAUDIT_TOML_LITE_HPP_
#define FEEDAUDIT_TOML_LITE_HPP_

#include <string>

#include "json.hpp"

namespace feedaudit {

// Parses the TOML subset used by run configuration files into JSON:
// comments, [table] and [table.sub] headers, bare keys, basic strings,
// integers, floats, booleans, and (possibly nested, possibly multi-line)
// arrays. Dates, inline tables, and dotted keys are rejected. Throws
// ConfigError with a line number on any syntax problem.
nlohmann::json parse_toml(const std::string& text);

nlohmann::json parse_toml_file(const std::string& path);

}  // namespace feedaudit

#endif  // FEEDAUDIT_TOML_LITE_HPP_
