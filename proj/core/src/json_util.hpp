// Copyright 2026 The GridAudit Authors.
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

// Private JSON helpers shared by the document readers and writers.

#ifndef GRIDAUDIT_SRC_JSON_UTIL_HPP_
#define GRIDAUDIT_SRC_JSON_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <string>

#include "gridaudit/error.hpp"
#include "gridaudit/model.hpp"
#include "json.hpp"

namespace gridaudit {

// Integral doubles are written without a fractional part; both spellings
// read back as the same double.
inline nlohmann::ordered_json json_number(double v) {
  if (std::nearbyint(v) == v && std::fabs(v) < 9007199254740992.0) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

nlohmann::ordered_json cell_to_json(const Cell& cell);
Cell cell_from_json(const nlohmann::json& obj, const std::string& where);

struct Value;
nlohmann::ordered_json value_json(const Value& v);
Value value_from_json_doc(const nlohmann::json& j, const std::string& where);

inline nlohmann::json parse_json_document(std::string_view text,
                                          const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument,
                what + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

// Typed field access that reports schema violations as MalformedDocument.
template <typename T>
T require(const nlohmann::json& obj, const char* key, const std::string& what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kMalformedDocument,
                what + ": missing \"" + key + "\"");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument,
                what + ": bad \"" + key + "\": " + e.what());
  }
}

template <typename T>
T optional_field(const nlohmann::json& obj, const char* key, T fallback,
                 const std::string& what) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return require<T>(obj, key, what);
}

}  // namespace gridaudit

#endif  // GRIDAUDIT_SRC_JSON_UTIL_HPP_
