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

#include "feedaudit/subprocess_source.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "feedaudit/errors.hpp"

namespace feedaudit {

namespace {

std::string wait_status_text(int status) {
  if (WIFEXITED(status)) return "exited with status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "killed by signal " + std::to_string(WTERMSIG(status));
  return "stopped";
}

}  // namespace

SubprocessSource::SubprocessSource(std::vector<std::string> command, int m, std::string name,
                                   int timeout_ms)
    : FeedSource(std::move(name)), command_(std::move(command)), m_(m), timeout_ms_(timeout_ms) {
  if (command_.empty()) throw ConfigError("subprocess source requires a command line");
  if (m_ < 1) throw ConfigError("feed length m must be >= 1");
  if (timeout_ms_ < 1) throw ConfigError("subprocess timeout must be >= 1 ms");
  spawn();
}

SubprocessSource::~SubprocessSource() { shutdown(); }

void SubprocessSource::spawn() {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw SourceError(name(), std::string("pipe failed: ") + std::strerror(errno));
  }

  pid_ = fork();
  if (pid_ < 0) {
    throw SourceError(name(), std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> argv;
    argv.reserve(command_.size() + 1);
    for (auto& arg : command_) argv.push_back(arg.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }

  close(to_child[0]);
  close(from_child[1]);
  to_child_ = to_child[1];
  from_child_ = from_child[0];
  // A dead child must surface as a SourceError, not SIGPIPE.
  signal(SIGPIPE, SIG_IGN);
}

void SubprocessSource::shutdown() noexcept {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = -1;
  from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 200; ++i) {
      if (waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void SubprocessSource::fail(const std::string& message) {
  std::string detail = message;
  if (pid_ > 0) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      detail += " (child " + wait_status_text(status) + ")";
      pid_ = -1;
    }
  }
  shutdown();
  throw SourceError(name(), detail);
}

std::string SubprocessSource::read_line() {
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
  for (;;) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return line;
    }

    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      fail("timed out after " + std::to_string(timeout_ms_) + " ms waiting for a reply");
    }

    struct pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) {
      fail("timed out after " + std::to_string(timeout_ms_) + " ms waiting for a reply");
    }

    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      fail("closed its output before replying");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Feed SubprocessSource::query(const AuditInput& input) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (pid_ <= 0 || to_child_ < 0) {
    fail("is not running");
  }

  nlohmann::json request = {{"id", input.id}, {"payload", input.payload}, {"m", m_}};
  std::string line = request.dump();
  line.push_back('\n');
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = write(to_child_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("write failed: ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }

  const std::string reply_text = read_line();
  nlohmann::json reply = nlohmann::json::parse(reply_text, nullptr, false);
  if (reply.is_discarded() || !reply.is_object()) {
    fail("replied with malformed JSON: " + reply_text.substr(0, 200));
  }
  if (!reply.contains("id") || reply["id"] != input.id) {
    fail("replied with a mismatched id for input '" + input.id + "'");
  }
  if (!reply.contains("items") || !reply["items"].is_array()) {
    fail("reply is missing the items array");
  }
  const auto& items = reply["items"];
  if (static_cast<int>(items.size()) != m_) {
    fail("replied with " + std::to_string(items.size()) + " items, expected " +
         std::to_string(m_));
  }
  Feed feed;
  feed.reserve(items.size());
  for (const auto& item : items) {
    if (!item.is_number()) {
      fail("reply contains a non-numeric item");
    }
    feed.push_back(item.get<double>());
  }
  return feed;
}

}  // namespace feedaudit
