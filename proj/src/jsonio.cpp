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

#include "pairdp/jsonio.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pairdp/util.hpp"

namespace pairdp {

void JsonWriter::append_escaped(std::string_view s) {
  out_ += '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out_ += "\\\"";
        break;
      case '\\':
        out_ += "\\\\";
        break;
      case '\n':
        out_ += "\\n";
        break;
      case '\t':
        out_ += "\\t";
        break;
      case '\r':
        out_ += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static const char* hex = "0123456789abcdef";
          out_ += "\\u00";
          out_ += hex[(c >> 4) & 0xF];
          out_ += hex[c & 0xF];
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
}

void JsonWriter::pre_value() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!needs_comma_.empty()) {
    if (needs_comma_.back()) {
      out_ += ',';
    }
    needs_comma_.back() = true;
  }
}

void JsonWriter::begin_object() {
  pre_value();
  out_ += '{';
  needs_comma_.push_back(false);
}

void JsonWriter::end_object() {
  if (needs_comma_.empty()) {
    throw std::logic_error("JsonWriter: end_object without begin_object");
  }
  needs_comma_.pop_back();
  out_ += '}';
}

void JsonWriter::begin_array() {
  pre_value();
  out_ += '[';
  needs_comma_.push_back(false);
}

void JsonWriter::end_array() {
  if (needs_comma_.empty()) {
    throw std::logic_error("JsonWriter: end_array without begin_array");
  }
  needs_comma_.pop_back();
  out_ += ']';
}

void JsonWriter::key(std::string_view k) {
  if (needs_comma_.empty()) {
    throw std::logic_error("JsonWriter: key outside of object");
  }
  if (needs_comma_.back()) {
    out_ += ',';
  }
  needs_comma_.back() = true;
  append_escaped(k);
  out_ += ':';
  pending_key_ = true;
}

void JsonWriter::number(double v) {
  pre_value();
  if (!std::isfinite(v)) {
    out_ += "null";
    return;
  }
  out_ += format_double_17(v);
}

void JsonWriter::integer(std::int64_t v) {
  pre_value();
  out_ += std::to_string(v);
}

void JsonWriter::uinteger(std::uint64_t v) {
  pre_value();
  out_ += std::to_string(v);
}

void JsonWriter::boolean(bool v) {
  pre_value();
  out_ += v ? "true" : "false";
}

void JsonWriter::string_value(std::string_view v) {
  pre_value();
  append_escaped(v);
}

void JsonWriter::null() {
  pre_value();
  out_ += "null";
}

void JsonWriter::kv(std::string_view k, double v) {
  key(k);
  number(v);
}

void JsonWriter::kv_int(std::string_view k, std::int64_t v) {
  key(k);
  integer(v);
}

void JsonWriter::kv_uint(std::string_view k, std::uint64_t v) {
  key(k);
  uinteger(v);
}

void JsonWriter::kv_bool(std::string_view k, bool v) {
  key(k);
  boolean(v);
}

void JsonWriter::kv_string(std::string_view k, std::string_view v) {
  key(k);
  string_value(v);
}

void JsonWriter::kv_array(std::string_view k, const std::vector<double>& values) {
  key(k);
  begin_array();
  for (double v : values) number(v);
  end_array();
}

void JsonWriter::kv_array_int(std::string_view k, const std::vector<int>& values) {
  key(k);
  begin_array();
  for (int v : values) integer(v);
  end_array();
}

const std::string& JsonWriter::str() const {
  if (!needs_comma_.empty()) {
    throw std::logic_error("JsonWriter: document has unclosed containers");
  }
  return out_;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  out << content << '\n';
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing " + path);
  }
}

}  // namespace pairdp
