// Copyright 2026 The Pairdp Authors
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

#ifndef PAIRDP_UTIL_HPP_
#define PAIRDP_UTIL_HPP_

#include <charconv>
#include <stdexcept>
#include <string>
#include <system_error>

namespace pairdp {

// Raised when a text input (CSV row, config file) cannot be parsed.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when well-formed input violates a declared contract, e.g. a sample
// outside the dataset bounds.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by iterative solvers when an iterate stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

// Formats a double with 17 significant digits, enough to reproduce the exact
// bit pattern when parsed back. Used for report serialization.
inline std::string format_double_17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Shortest decimal string that round-trips the exact double. Used for CSV.
inline std::string format_double_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Strict full-string double parse. Returns false on trailing garbage or
// syntax errors; non-finite values are accepted here and rejected by callers
// that require finiteness, so the error message can say which field is bad.
inline bool parse_double(const std::string& text, double* out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace pairdp

#endif  // PAIRDP_UTIL_HPP_
