// Copyright 2026 The ldprr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldprr/io.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace ldprr {

using nlohmann::json;

std::string mechanism_to_json(const Mechanism& w, int indent) {
  json rows = json::array();
  for (int r = 0; r < w.size(); ++r) {
    json row = json::array();
    for (int c = 0; c < w.size(); ++c) row.push_back(w.matrix()(r, c));
    rows.push_back(std::move(row));
  }
  json out;
  out["k"] = w.size();
  out["matrix"] = std::move(rows);
  if (std::isinf(w.epsilon())) {
    out["epsilon"] = "inf";
  } else {
    out["epsilon"] = w.epsilon();
  }
  return out.dump(indent);
}

Mechanism mechanism_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("mechanism json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("k") || !doc.contains("matrix")) {
    throw Error(ErrorCode::kInvalidArgument, "mechanism json needs 'k' and 'matrix'");
  }
  const auto& rows = doc["matrix"];
  if (!doc["k"].is_number_integer() || !rows.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "mechanism json: bad 'k' or 'matrix'");
  }
  const int k = doc["k"].get<int>();
  if (k < 2 || static_cast<int>(rows.size()) != k) {
    throw Error(ErrorCode::kInvalidArgument, "mechanism json: 'matrix' must have k rows");
  }
  Matrix m(k, k);
  for (int r = 0; r < k; ++r) {
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != k) {
      throw Error(ErrorCode::kInvalidArgument, "mechanism json: row " + std::to_string(r) +
                                                   " must have k entries");
    }
    for (int c = 0; c < k; ++c) {
      if (!rows[r][c].is_number()) {
        throw Error(ErrorCode::kInvalidArgument, "mechanism json: non-numeric entry");
      }
      m(r, c) = rows[r][c].get<double>();
    }
  }
  Mechanism w = Mechanism::FromMatrix(m);
  if (doc.contains("epsilon")) {
    const auto& e = doc["epsilon"];
    double stored = 0.0;
    if (e.is_string() && e.get<std::string>() == "inf") {
      stored = std::numeric_limits<double>::infinity();
    } else if (e.is_number()) {
      stored = e.get<double>();
    } else {
      throw Error(ErrorCode::kInvalidArgument, "mechanism json: 'epsilon' must be a number or \"inf\"");
    }
    const bool both_inf = std::isinf(stored) && std::isinf(w.epsilon());
    if (!both_inf && !(std::abs(stored - w.epsilon()) <= 1e-9)) {
      throw Error(ErrorCode::kInvalidArgument, "mechanism json: stored epsilon disagrees with matrix");
    }
  }
  return w;
}

}  // namespace ldprr
