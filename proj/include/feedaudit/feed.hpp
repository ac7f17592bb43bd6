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

#ifndef FEEDAUDIT_FEED_HPP_
#define FEEDAUDIT_FEED_HPP_

#include <string>
#include <vector>

#include "json.hpp"

namespace feedaudit {

// An ordered feed of m content items. Items are 1-D features; bits and
// alphabet symbols are carried as 0.0/1.0 and 0.0..k-1.0.
using Feed = std::vector<double>;

// One audit query. The payload is opaque to the audit engine: it is handed
// verbatim to feed sources and never inspected, which is what keeps the
// audit free of user data.
struct AuditInput {
  std::string id;
  nlohmann::json payload;
};

// Black-box mapping from an audit input to a feed. The auditor may call
// query() and learns nothing else about the algorithm behind it.
class FeedSource {
 public:
  explicit FeedSource(std::string name) : name_(std::move(name)) {}
  virtual ~FeedSource() = default;

  FeedSource(const FeedSource&) = delete;
  FeedSource& operator=(const FeedSource&) = delete;

  const std::string& name() const { return name_; }
  virtual Feed query(const AuditInput& input) = 0;

 private:
  std::string name_;
};

}  // namespace feedaudit

#endif  // FEEDAUDIT_FEED_HPP_
