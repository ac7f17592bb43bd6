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

#ifndef FEEDAUDIT_TESTS_SUPPORT_TEST_UTIL_HPP_
#define FEEDAUDIT_TESTS_SUPPORT_TEST_UTIL_HPP_

#include <functional>
#include <string>
#include <utility>

#include "feedaudit/feed.hpp"
#include "feedaudit/parameter.hpp"
#include "feedaudit/rng.hpp"

namespace feedaudit::testing {

// Feed source backed by a lambda; handy for scripted per-input behavior.
class InlineSource final : public FeedSource {
 public:
  using Fn = std::function<Feed(const AuditInput&)>;

  InlineSource(std::string name, Fn fn) : FeedSource(std::move(name)), fn_(std::move(fn)) {}

  Feed query(const AuditInput& input) override { return fn_(input); }

 private:
  Fn fn_;
};

// Uniform draw inside [lo + inset*w, hi - inset*w] for each box coordinate.
inline Eigen::VectorXd random_interior_point(const DomainBox& box, SeedStream& rng,
                                             double inset = 0.05) {
  Eigen::VectorXd theta(box.dimension());
  for (Eigen::Index i = 0; i < box.dimension(); ++i) {
    const double w = box.hi(i) - box.lo(i);
    theta[i] = box.lo(i) + (inset + (1.0 - 2.0 * inset) * rng.uniform01()) * w;
  }
  return theta;
}

}  // namespace feedaudit::testing

#endif  // FEEDAUDIT_TESTS_SUPPORT_TEST_UTIL_HPP_
