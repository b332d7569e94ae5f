// Copyright 2026 The esdlab Authors
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

// JSON and CSV forms of the library types.
//
// Matrices are {"rows":r,"cols":c,"re":[[...]],"im":[[...]]}. States add
// "kind": "density" or "pure" (a pure state is an r x 1 column). Channels
// are {"label":...,"kraus":[matrix,...]}. JSON keeps full double
// precision; CSV and printed summaries use 9 significant digits.

#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "esdlab/dynamics.hpp"
#include "esdlab/numkernel.hpp"
#include "esdlab/qstate.hpp"
#include "esdlab/tomosim.hpp"

namespace esdlab {

using Json = nlohmann::json;

inline std::string format_sig9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline std::string format_fixed9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

namespace detail {
[[noreturn]] inline void parse_fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, what);
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::size_t size_field(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    parse_fail(std::string("field '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

inline std::vector<std::vector<double>> real_table(const Json& j, const char* key, std::size_t rows,
                                                   std::size_t cols) {
  const auto& t = field(j, key);
  if (!t.is_array() || t.size() != rows) parse_fail(std::string("'") + key + "' row count mismatch");
  std::vector<std::vector<double>> out;
  for (const auto& row : t) {
    if (!row.is_array() || row.size() != cols) parse_fail(std::string("'") + key + "' is ragged");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) parse_fail(std::string("'") + key + "' holds a non-number");
      r.push_back(x.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}
}  // namespace detail

inline Json to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ii = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  const std::size_t rows = detail::size_field(j, "rows");
  const std::size_t cols = detail::size_field(j, "cols");
  if (rows == 0 || cols == 0) detail::parse_fail("matrix must be nonempty");
  const auto re = detail::real_table(j, "re", rows, cols);
  const auto im = detail::real_table(j, "im", rows, cols);
  std::vector<Complex> entries;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) entries.emplace_back(re[r][c], im[r][c]);
  return ComplexMatrix(rows, cols, std::move(entries));
}

inline Json to_json(const DensityMatrix& rho) {
  Json j = to_json(rho.matrix());
  j["kind"] = "density";
  return j;
}

inline Json to_json(const PureState& psi) {
  Json j = to_json(psi.ket());
  j["kind"] = "pure";
  return j;
}

/// Either JSON state form, as a density matrix.
inline DensityMatrix state_from_json(const Json& j) {
  const auto& kind = detail::field(j, "kind");
  if (!kind.is_string()) detail::parse_fail("'kind' must be a string");
  const auto m = matrix_from_json(j);
  if (kind == "density") return DensityMatrix(m);
  if (kind == "pure") {
    if (m.cols() != 1) detail::parse_fail("pure state must be a single column");
    return DensityMatrix(PureState({m.entries().begin(), m.entries().end()}));
  }
  detail::parse_fail("unknown state kind '" + kind.get<std::string>() + "'");
}

inline Json to_json(const QubitChannel& ch) {
  Json ops = Json::array();
  for (const auto& k : ch.kraus()) ops.push_back(to_json(k));
  return {{"label", ch.label()}, {"kraus", std::move(ops)}};
}

inline QubitChannel channel_from_json(const Json& j) {
  const auto& label = detail::field(j, "label");
  const auto& ops = detail::field(j, "kraus");
  if (!label.is_string() || !ops.is_array()) detail::parse_fail("malformed channel");
  std::vector<ComplexMatrix> kraus;
  for (const auto& op : ops) kraus.push_back(matrix_from_json(op));
  return QubitChannel(std::move(kraus), label.get<std::string>());
}

inline Json to_json(const CountRecord& r) {
  return {{"setting", r.setting}, {"counts", r.counts}, {"shots", r.shots}, {"seed", r.seed}};
}

inline CountRecord count_record_from_json(const Json& j) {
  const auto& setting = detail::field(j, "setting");
  if (!setting.is_string()) detail::parse_fail("'setting' must be a string");
  CountRecord r{setting.get<std::string>(), detail::size_field(j, "counts"),
                detail::size_field(j, "shots"), detail::size_field(j, "seed")};
  if (r.shots < 1 || r.counts > r.shots) {
    throw Error(ErrorCode::InvariantViolation, "record '" + r.setting + "' violates counts <= shots");
  }
  return r;
}

inline void write_count_lines(std::ostream& os, const std::vector<CountRecord>& records) {
  for (const auto& r : records) os << to_json(r).dump() << '\n';
}

inline std::vector<CountRecord> read_count_lines(std::istream& is) {
  std::vector<CountRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      detail::parse_fail(std::string("bad count line: ") + e.what());
    }
    out.push_back(count_record_from_json(j));
  }
  return out;
}

inline Json to_json(const ReconstructionReport& r) {
  Json j{{"estimate", to_json(r.estimate)},
         {"iterations", r.iterations},
         {"logLikelihood", r.log_likelihood}};
  j["fidelityToTruth"] = r.fidelity_to_truth ? Json(*r.fidelity_to_truth) : Json(nullptr);
  return j;
}

inline ReconstructionReport report_from_json(const Json& j) {
  ReconstructionReport r{state_from_json(detail::field(j, "estimate")), std::nullopt, 0, 0.0, {}};
  const auto& it = detail::field(j, "iterations");
  const auto& ll = detail::field(j, "logLikelihood");
  const auto& fid = detail::field(j, "fidelityToTruth");
  if (!it.is_number_integer() || !ll.is_number()) detail::parse_fail("malformed report");
  r.iterations = it.get<int>();
  r.log_likelihood = ll.get<double>();
  if (!fid.is_null()) {
    if (!fid.is_number()) detail::parse_fail("'fidelityToTruth' must be a number or null");
    r.fidelity_to_truth = fid.get<double>();
  }
  return r;
}

inline Json parse_json(std::istream& is) {
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    detail::parse_fail(std::string("invalid JSON: ") + e.what());
  }
}

inline Json parse_json(const std::string& text) {
  std::istringstream is(text);
  return parse_json(is);
}

// CSV

inline void write_sweep_csv(std::ostream& os, const SweepGrid& grid) {
  os << "h,g,concurrence\n";
  for (std::size_t i = 0; i < grid.h_axis.size(); ++i)
    for (std::size_t j = 0; j < grid.g_axis.size(); ++j)
      os << format_sig9(grid.h_axis[i]) << ',' << format_sig9(grid.g_axis[j]) << ','
         << format_sig9(grid.at(i, j)) << '\n';
}

struct SweepRow {
  double h = 0.0;
  double g = 0.0;
  double concurrence = 0.0;
};

namespace detail {
inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    parse_fail("not a number: '" + s + "'");
  }
  if (used != s.size()) parse_fail("not a number: '" + s + "'");
  return v;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}
}  // namespace detail

inline std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::strip_cr(line) != "h,g,concurrence") {
    detail::parse_fail("sweep CSV header missing");
  }
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 3) detail::parse_fail("sweep CSV row needs 3 fields");
    rows.push_back({detail::parse_double(cells[0]), detail::parse_double(cells[1]),
                    detail::parse_double(cells[2])});
  }
  return rows;
}

inline void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPoint>& points) {
  os << "param,critical\n";
  for (const auto& p : points) {
    os << format_sig9(p.param) << ',';
    if (p.critical) os << format_sig9(*p.critical);
    os << '\n';
  }
}

inline std::vector<BoundaryPoint> read_boundary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::strip_cr(line) != "param,critical") {
    detail::parse_fail("boundary CSV header missing");
  }
  std::vector<BoundaryPoint> out;
  while (std::getline(is, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 2) detail::parse_fail("boundary CSV row needs 2 fields");
    BoundaryPoint p{detail::parse_double(cells[0]), std::nullopt};
    if (!cells[1].empty()) p.critical = detail::parse_double(cells[1]);
    out.push_back(p);
  }
  return out;
}

}  // namespace esdlab
