// Copyright 2026 The qdev Authors
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

// JSON (de)serialization. Complex numbers are [re, im] pairs; a matrix is a
// list of rows. Formats are documented in docs/formats.md.

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qdev/channel.hpp"
#include "qdev/povm.hpp"

namespace qdev::io {

using nlohmann::json;

inline json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw DomainError("json: complex entry must be a number or [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw DomainError("json: matrix must be a non-empty list of rows");
  const auto rows = Eigen::Index(j.size()), cols = Eigen::Index(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[std::size_t(i)];
    if (!row.is_array() || Eigen::Index(row.size()) != cols) throw ShapeError("json: ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[std::size_t(k)]);
  }
  if (!all_finite(m)) throw DomainError("json: non-finite matrix entry");
  return m;
}

inline json to_json(const StateVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline StateVector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("json: vector must be a non-empty list");
  StateVector v(Eigen::Index(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(Eigen::Index(i)) = complex_from_json(j[i]);
  return v;
}

inline json to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {
inline std::size_t require_size(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_unsigned()) {
    throw DomainError(std::string("json: missing or invalid \"") + key + "\"");
  }
  return j[key].get<std::size_t>();
}
inline const json& require_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("json: missing \"") + key + "\"");
  return j[key];
}
}  // namespace detail

inline json to_json(const Povm& p) {
  json eff = json::array();
  for (const auto& e : p.effects()) eff.push_back(to_json(e));
  return {{"dim", p.dim()}, {"effects", eff}, {"labels", p.labels()}};
}

inline Povm povm_from_json(const json& j) {
  const auto& eff = detail::require_field(j, "effects");
  if (!eff.is_array()) throw DomainError("json: \"effects\" must be a list");
  std::vector<ComplexMatrix> e;
  for (const auto& m : eff) e.push_back(matrix_from_json(m));
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  Povm p(std::move(e), std::move(labels));
  if (j.contains("dim") && detail::require_size(j, "dim") != p.dim()) throw ShapeError("json: \"dim\" disagrees with effects");
  return p;
}

inline json to_json(const KrausSet& k) {
  json ops = json::array();
  for (const auto& e : k.operators()) ops.push_back(to_json(e));
  return {{"in_dim", k.in_dim()}, {"out_dim", k.out_dim()}, {"operators", ops}};
}

inline KrausSet kraus_from_json(const json& j) {
  std::vector<ComplexMatrix> ops;
  for (const auto& m : detail::require_field(j, "operators")) ops.push_back(matrix_from_json(m));
  return KrausSet(detail::require_size(j, "in_dim"), detail::require_size(j, "out_dim"), std::move(ops));
}

inline json to_json(const ChoiOperator& r) {
  return {{"in_dim", r.in_dim()}, {"out_dim", r.out_dim()}, {"matrix", to_json(r.mat())}};
}

inline ChoiOperator choi_from_json(const json& j) {
  return ChoiOperator(matrix_from_json(detail::require_field(j, "matrix")), detail::require_size(j, "out_dim"),
                      detail::require_size(j, "in_dim"));
}

// {"matrix": ...} or {"vector": ...} (a pure state).
inline DensityMatrix state_from_json(const json& j) {
  if (j.is_object() && j.contains("vector")) {
    StateVector v = vector_from_json(j["vector"]);
    require_normalized(v, "json state");
    return DensityMatrix::pure(v);
  }
  return DensityMatrix(matrix_from_json(detail::require_field(j, "matrix")));
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError(path + ": " + e.what());
  }
}

}  // namespace qdev::io
