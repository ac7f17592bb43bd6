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

#include "feedaudit/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "feedaudit/errors.hpp"

namespace feedaudit {

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }

  void skip_spaces() {
    while (!done() && (peek() == ' ' || peek() == '\t')) take();
  }

  // Whitespace, comments, and newlines; used inside arrays where values may
  // continue on the next line.
  void skip_filler() {
    for (;;) {
      skip_spaces();
      if (!done() && peek() == '#') {
        while (!done() && peek() != '\n') take();
      }
      if (!done() && (peek() == '\n' || peek() == '\r')) {
        take();
        continue;
      }
      return;
    }
  }
};

std::string parse_basic_string(Cursor& in) {
  const int line = in.line;
  in.take();  // opening quote
  std::string out;
  for (;;) {
    if (in.done() || in.peek() == '\n') fail(line, "unterminated string");
    char c = in.take();
    if (c == '"') return out;
    if (c == '\\') {
      if (in.done()) fail(line, "unterminated escape");
      const char esc = in.take();
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: fail(line, std::string("unsupported escape '\\") + esc + "'");
      }
      continue;
    }
    out.push_back(c);
  }
}

nlohmann::json parse_scalar_token(const std::string& token, int line) {
  if (token == "true") return true;
  if (token == "false") return false;
  if (token.empty()) fail(line, "expected a value");

  // Integer first, then float; anything else is unsupported.
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading '+'
  {
    std::int64_t value = 0;
    const auto result = std::from_chars(begin, end, value);
    if (result.ec == std::errc() && result.ptr == end) return value;
  }
  {
    double value = 0.0;
    const auto result = std::from_chars(begin, end, value);
    if (result.ec == std::errc() && result.ptr == end) return value;
  }
  fail(line, "cannot parse value '" + token + "' (dates and inline tables are unsupported)");
}

nlohmann::json parse_value(Cursor& in);

nlohmann::json parse_array(Cursor& in) {
  in.take();  // '['
  nlohmann::json out = nlohmann::json::array();
  for (;;) {
    in.skip_filler();
    if (in.done()) fail(in.line, "unterminated array");
    if (in.peek() == ']') {
      in.take();
      return out;
    }
    out.push_back(parse_value(in));
    in.skip_filler();
    if (in.done()) fail(in.line, "unterminated array");
    if (in.peek() == ',') {
      in.take();
      continue;
    }
    if (in.peek() == ']') {
      in.take();
      return out;
    }
    fail(in.line, "expected ',' or ']' in array");
  }
}

nlohmann::json parse_value(Cursor& in) {
  in.skip_spaces();
  if (in.done()) fail(in.line, "expected a value");
  const char c = in.peek();
  if (c == '"') return parse_basic_string(in);
  if (c == '[') return parse_array(in);
  if (c == '{') fail(in.line, "inline tables are unsupported");
  if (c == '\'') fail(in.line, "literal strings are unsupported");

  std::string token;
  while (!in.done()) {
    const char t = in.peek();
    if (t == '\n' || t == '#' || t == ',' || t == ']' || t == ' ' || t == '\t' || t == '\r') {
      break;
    }
    token.push_back(in.take());
  }
  return parse_scalar_token(token, in.line);
}

void expect_line_end(Cursor& in) {
  in.skip_spaces();
  if (!in.done() && in.peek() == '#') {
    while (!in.done() && in.peek() != '\n') in.take();
  }
  if (in.done()) return;
  if (in.peek() == '\r') in.take();
  if (in.done()) return;
  if (in.peek() != '\n') fail(in.line, "unexpected trailing characters");
  in.take();
}

std::string parse_key(Cursor& in) {
  std::string key;
  while (!in.done() && is_bare_key_char(in.peek())) key.push_back(in.take());
  if (key.empty()) fail(in.line, "expected a key");
  return key;
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
  Cursor in{text};
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;

  while (!in.done()) {
    in.skip_spaces();
    if (in.done()) break;
    const char c = in.peek();
    if (c == '\n' || c == '\r') {
      in.take();
      continue;
    }
    if (c == '#') {
      while (!in.done() && in.peek() != '\n') in.take();
      continue;
    }
    if (c == '[') {
      const int line = in.line;
      in.take();
      if (!in.done() && in.peek() == '[') fail(line, "arrays of tables are unsupported");
      table = &root;
      for (;;) {
        const std::string part = parse_key(in);
        if (table->contains(part)) {
          if (!(*table)[part].is_object()) fail(line, "'" + part + "' is not a table");
        } else {
          (*table)[part] = nlohmann::json::object();
        }
        table = &(*table)[part];
        if (in.done()) fail(line, "unterminated table header");
        if (in.peek() == '.') {
          in.take();
          continue;
        }
        if (in.peek() == ']') {
          in.take();
          break;
        }
        fail(line, "expected '.' or ']' in table header");
      }
      expect_line_end(in);
      continue;
    }

    const int line = in.line;
    const std::string key = parse_key(in);
    in.skip_spaces();
    if (in.done() || in.peek() != '=') fail(line, "expected '=' after key '" + key + "'");
    in.take();
    if (table->contains(key)) fail(line, "duplicate key '" + key + "'");
    (*table)[key] = parse_value(in);
    expect_line_end(in);
  }
  return root;
}

nlohmann::json parse_toml_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_toml(buffer.str());
}

}  // namespace feedaudit
