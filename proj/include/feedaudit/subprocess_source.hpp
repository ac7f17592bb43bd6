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

#ifndef FEEDAUDIT_SUBPROCESS_SOURCE_HPP_
#define FEEDAUDIT_SUBPROCESS_SOURCE_HPP_

#include <sys/types.h>

#include <mutex>
#include <string>
#include <vector>

#include "feedaudit/feed.hpp"

namespace feedaudit {

// Black-box access to an arbitrary executable over a line-delimited JSON
// protocol. For each query the auditor writes one line to the child's stdin,
//
//   {"id": "...", "payload": ..., "m": 30}
//
// and the child replies with one line
//
//   {"id": "...", "items": [ ... ]}
//
// where id echoes the request and items holds exactly m numbers. A reply
// that does not arrive within the timeout, does not parse, echoes the wrong
// id, or has the wrong length raises a SourceError naming this source, as
// does the child exiting. Queries are serialized per process.
class SubprocessSource final : public FeedSource {
 public:
  SubprocessSource(std::vector<std::string> command, int m, std::string name,
                   int timeout_ms = 30000);
  ~SubprocessSource() override;

  SubprocessSource(const SubprocessSource&) = delete;
  SubprocessSource& operator=(const SubprocessSource&) = delete;

  Feed query(const AuditInput& input) override;

 private:
  void spawn();
  void shutdown() noexcept;
  [[noreturn]] void fail(const std::string& message);
  std::string read_line();

  std::vector<std::string> command_;
  int m_;
  int timeout_ms_;

  std::mutex mutex_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace feedaudit

#endif  // FEEDAUDIT_SUBPROCESS_SOURCE_HPP_
