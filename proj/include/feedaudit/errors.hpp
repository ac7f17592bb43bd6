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

#ifndef FEEDAUDIT_ERRORS_HPP_
#define FEEDAUDIT_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace feedaudit {

// Base class for all feedaudit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside the family's declared domain, or a scalar
// argument is out of its valid range.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Vector/matrix dimensions or feed lengths do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A feed of length zero was requested or supplied.
class EmptyFeedError : public Error {
 public:
  using Error::Error;
};

// Fisher information is singular or undefined at the requested parameter.
class SingularInformationError : public Error {
 public:
  using Error::Error;
};

// A feed source misbehaved (timeout, malformed reply, premature exit).
// Carries the name of the offending source.
class SourceError : public Error {
 public:
  SourceError(std::string source, const std::string& message)
      : Error("source '" + source + "': " + message), source_(std::move(source)) {}

  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
};

// Invalid run configuration (bad file, unknown key, inconsistent values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace feedaudit

#endif  // FEEDAUDIT_ERRORS_HPP_
