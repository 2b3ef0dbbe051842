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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "pairdp/jsonio.hpp"
#include "pairdp/rng.hpp"
#include "pairdp/util.hpp"

using namespace pairdp;

TEST_CASE("writer emits canonical bytes for a nested document") {
  JsonWriter w;
  w.begin_object();
  w.kv_int("a", 1);
  w.key("b");
  w.begin_array();
  w.number(1.5);
  w.null();
  w.end_array();
  w.key("c");
  w.begin_object();
  w.kv_string("s", "x\"y\n");
  w.end_object();
  w.kv_bool("d", true);
  w.kv("e", std::numeric_limits<double>::quiet_NaN());
  w.end_object();
  CHECK(w.str() ==
        "{\"a\":1,\"b\":[1.5,null],\"c\":{\"s\":\"x\\\"y\\n\"},"
        "\"d\":true,\"e\":null}");
}

TEST_CASE("non-finite doubles serialize as null") {
  JsonWriter w;
  w.begin_array();
  w.number(std::numeric_limits<double>::infinity());
  w.number(-std::numeric_limits<double>::infinity());
  w.number(std::numeric_limits<double>::quiet_NaN());
  w.number(0.1);
  w.end_array();
  CHECK(w.str() == "[null,null,null,0.10000000000000001]");
}

TEST_CASE("integer emitters cover the full unsigned range") {
  JsonWriter w;
  w.begin_array();
  w.integer(-5);
  w.integer(0);
  w.uinteger(18446744073709551615ULL);
  w.end_array();
  CHECK(w.str() == "[-5,0,18446744073709551615]");
}

TEST_CASE("string escaping covers control characters") {
  JsonWriter w;
  w.begin_object();
  w.kv_string("k", std::string("a\\b\t\r") + '\x01');
  w.end_object();
  CHECK(w.str() == "{\"k\":\"a\\\\b\\t\\r\\u0001\"}");
}

TEST_CASE("array helpers emit in order") {
  JsonWriter w;
  w.begin_object();
  w.kv_array("xs", {1.0, 0.5});
  w.kv_array_int("ns", {3, 1, 2});
  w.end_object();
  CHECK(w.str() == "{\"xs\":[1,0.5],\"ns\":[3,1,2]}");
}

TEST_CASE("str before closing all containers is an error") {
  JsonWriter w;
  w.begin_object();
  w.kv_int("a", 1);
  CHECK_THROWS_AS(w.str(), std::logic_error);
}

TEST_CASE("numbers round-trip bitwise through a standard parser") {
  JsonWriter w;
  w.begin_array();
  Rng rng(7);
  std::vector<double> values;
  for (int i = 0; i < 200; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, i % 13 - 6);
    values.push_back(v);
    w.number(v);
  }
  w.end_array();
  const nlohmann::json parsed = nlohmann::json::parse(w.str());
  REQUIRE(parsed.size() == values.size());
  for (size_t i = 0; i < values.size(); ++i)
    CHECK(parsed[i].get<double>() == values[i]);
}

TEST_CASE("a writer document is valid JSON under a standard parser") {
  JsonWriter w;
  w.begin_object();
  w.key("rows");
  w.begin_array();
  for (int i = 0; i < 3; ++i) {
    w.begin_object();
    w.kv_int("i", i);
    w.kv("v", 0.1 * i);
    w.kv_string("tag", "résumé");  // UTF-8 passthrough
    w.end_object();
  }
  w.end_array();
  w.end_object();
  const nlohmann::json parsed = nlohmann::json::parse(w.str());
  CHECK(parsed["rows"].size() == 3);
  CHECK(parsed["rows"][2]["i"].get<int>() == 2);
}

TEST_CASE("write_text_file appends one trailing newline") {
  const std::string path = "/tmp/pairdp_test_jsonio.txt";
  write_text_file(path, "{\"x\":1}");
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "{\"x\":1}\n");
  std::remove(path.c_str());
  CHECK_THROWS(write_text_file("/nonexistent_dir_zz/f.json", "x"));
}
