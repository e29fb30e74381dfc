// Copyright 2026 The seqfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace seqfisher::io {

// Output serialization is hand-rolled for two contract reasons: floating
// point numbers carry exactly 17 significant digits (round-trip exact),
// and reruns with identical inputs produce byte-identical files.

/// %.17g rendering of a double.
std::string format_g17(double v);

/// Join cells with commas and terminate the line.
std::string csv_line(const std::vector<std::string>& cells);

/// Minimal ordered JSON document (objects keep insertion order).
class Json {
 public:
  static Json object();
  static Json array();
  static Json str(std::string s);
  static Json num(double v);
  static Json integer(std::int64_t v);
  static Json boolean(bool v);

  Json& set(const std::string& key, Json value);  // object only
  Json& push(Json value);                         // array only

  std::string dump(int indent = 2) const;

 private:
  Json() = default;
  enum class Kind { object, array, string, number, integer, boolean };
  Kind kind_ = Kind::object;
  std::string string_;
  double number_ = 0.0;
  std::int64_t integer_ = 0;
  bool bool_ = false;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> elements_;

  void dump_to(std::string& out, int indent, int depth) const;
};

}  // namespace seqfisher::io
