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
//
// Streaming JSON writer with a fixed serialization: keys appear in call
// order, doubles print with 17 significant digits (full round trip), and
// there is no whitespace. Two runs that produce the same values produce
// byte-identical output, which the report determinism guarantees rely on.

#ifndef PAIRDP_JSONIO_HPP_
#define PAIRDP_JSONIO_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pairdp {

class JsonWriter {
 public:
  void begin_object();
  void end_object();
  void begin_array();
  void end_array();

  // Emits "key": inside an object. The next value call attaches to it.
  void key(std::string_view k);

  // Value emitters, usable as array elements or after key(). Non-finite
  // doubles serialize as null.
  void number(double v);
  void integer(std::int64_t v);
  void uinteger(std::uint64_t v);
  void boolean(bool v);
  void string_value(std::string_view v);
  void null();

  // Shorthand for key() followed by the value.
  void kv(std::string_view k, double v);
  void kv_int(std::string_view k, std::int64_t v);
  void kv_uint(std::string_view k, std::uint64_t v);
  void kv_bool(std::string_view k, bool v);
  void kv_string(std::string_view k, std::string_view v);

  void kv_array(std::string_view k, const std::vector<double>& values);
  void kv_array_int(std::string_view k, const std::vector<int>& values);

  // Finished document. Valid once all containers are closed.
  const std::string& str() const;

 private:
  void pre_value();
  void append_escaped(std::string_view s);

  std::string out_;
  std::vector<bool> needs_comma_;
  bool pending_key_ = false;
};

// Writes content to path atomically enough for our purposes (truncate +
// write + flush), appending a trailing newline. Throws on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace pairdp

#endif  // PAIRDP_JSONIO_HPP_
