// Copyright 2026 The CCMA Kinematics Authors
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


#include "csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace ccma {

namespace {

[[noreturn]] void parse_fail(const std::string& message) {
  throw Error(ErrorCode::kParseError, message);
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string body_label(const SceneModel& model, int b) {
  return model.bodies[b].name;
}

void push_row(CsvTable& t, std::vector<std::string> row) {
  row.insert(row.begin(), std::to_string(t.rows.size()));
  t.rows.push_back(std::move(row));
}

std::vector<std::string> numbers(const Eigen::Ref<const Vector>& v) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(format_double(v[i]));
  return out;
}

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

const std::string& cell(const CsvTable& t, std::size_t row, int col) {
  if (col < 0 || static_cast<std::size_t>(col) >= t.rows[row].size()) {
    parse_fail("csv row " + std::to_string(row + 2) + " is missing column " +
               std::to_string(col));
  }
  return t.rows[row][static_cast<std::size_t>(col)];
}

int required_column(const CsvTable& t, const std::string& name) {
  const int c = t.column(name);
  if (c < 0) parse_fail("csv is missing column '" + name + "'");
  return c;
}

int parse_int(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    parse_fail("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    parse_fail("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += quote(fields[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      field.clear();
      record.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) parse_fail("csv ends inside a quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  if (records.empty()) parse_fail("csv has no header row");
  CsvTable t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      parse_fail("csv row " + std::to_string(r + 1) + " has " +
                 std::to_string(records[r].size()) + " fields, expected " +
                 std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  out << to_csv(table);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_csv(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

const std::vector<std::string>& task_labels() {
  static const std::vector<std::string> labels = {"x",   "y",     "z",
                                                  "yaw", "pitch", "roll"};
  return labels;
}

CsvTable state_table(const SceneModel& model, const Vector& s) {
  if (s.size() != model.num_states()) {
    throw Error(ErrorCode::kDimensionMismatch, "state size does not match scene");
  }
  CsvTable t;
  t.header = {kStateSchema, "body", "name", "gamma", "beta", "alpha",
              "x",          "y",    "z"};
  for (int b = 0; b < model.num_bodies(); ++b) {
    std::vector<std::string> row = {std::to_string(b), body_label(model, b)};
    append(row, numbers(s.segment(kBodyDofs * b, kBodyDofs)));
    push_row(t, std::move(row));
  }
  return t;
}

CsvTable track_table(const SceneModel& model, const TrackReport& report) {
  CsvTable t;
  t.header = {kTrackSchema, "waypoint",  "substep", "status", "iters",
              "fk_solves",  "objective", "energy",  "task_error"};
  for (const auto& l : task_labels()) t.header.push_back("cmd_" + l);
  for (const auto& l : task_labels()) t.header.push_back("ee_" + l);
  for (int k = 0; k < model.num_bases(); ++k) {
    const std::string p = "base" + std::to_string(k) + "_";
    for (const char* c : {"x", "y", "theta"}) t.header.push_back(p + c);
  }
  for (int i = 0; i < model.num_states(); ++i) {
    t.header.push_back("s" + std::to_string(i));
  }
  for (const TrackStep& st : report.steps) {
    std::vector<std::string> row = {
        std::to_string(st.waypoint), std::to_string(st.substep),
        ik_status_name(st.status),   std::to_string(st.iters),
        std::to_string(st.fk_solves), format_double(st.objective), format_double(st.energy),
        format_double(st.task_error)};
    append(row, numbers(st.commanded));
    append(row, numbers(st.achieved));
    append(row, numbers(st.u));
    append(row, numbers(st.s_hat));
    push_row(t, std::move(row));
  }
  return t;
}

std::vector<TrackStep> track_steps_from_table(const SceneModel& model,
                                              const CsvTable& table) {
  if (table.header.empty() || table.header[0] != kTrackSchema) {
    parse_fail(std::string("not a ") + kTrackSchema + " table");
  }
  const int c_wp = required_column(table, "waypoint");
  const int c_sub = required_column(table, "substep");
  const int c_status = required_column(table, "status");
  const int c_iters = required_column(table, "iters");
  const int c_fk = required_column(table, "fk_solves");
  const int c_obj = required_column(table, "objective");
  const int c_energy = required_column(table, "energy");
  const int c_err = required_column(table, "task_error");
  const int c_cmd = required_column(table, "cmd_x");
  const int c_ee = required_column(table, "ee_x");
  const int c_u = model.num_bases() > 0 ? required_column(table, "base0_x") : -1;
  const int c_s = required_column(table, "s0");
  if (static_cast<int>(table.header.size()) != c_s + model.num_states() ||
      c_u + model.num_controls() != c_s) {
    parse_fail("track csv does not match the scene dimensions");
  }

  std::vector<TrackStep> steps;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    TrackStep st;
    st.waypoint = parse_int(cell(table, r, c_wp));
    st.substep = parse_int(cell(table, r, c_sub));
    const std::string& status = cell(table, r, c_status);
    bool known = false;
    for (IkStatus s : {IkStatus::kConverged, IkStatus::kMaxIters,
                       IkStatus::kLineSearchFailure,
                       IkStatus::kSingularSensitivity,
                       IkStatus::kForwardFailure}) {
      if (status == ik_status_name(s)) {
        st.status = s;
        known = true;
      }
    }
    if (!known) parse_fail("unknown status '" + status + "'");
    st.iters = parse_int(cell(table, r, c_iters));
    st.fk_solves = parse_int(cell(table, r, c_fk));
    st.objective = parse_double(cell(table, r, c_obj));
    st.energy = parse_double(cell(table, r, c_energy));
    st.task_error = parse_double(cell(table, r, c_err));
    for (int c = 0; c < kTaskDims; ++c) {
      st.commanded[c] = parse_double(cell(table, r, c_cmd + c));
      st.achieved[c] = parse_double(cell(table, r, c_ee + c));
    }
    st.u.resize(model.num_controls());
    for (int k = 0; k < model.num_controls(); ++k) {
      st.u[k] = parse_double(cell(table, r, c_u + k));
    }
    st.s_hat.resize(model.num_states());
    for (int k = 0; k < model.num_states(); ++k) {
      st.s_hat[k] = parse_double(cell(table, r, c_s + k));
    }
    steps.push_back(std::move(st));
  }
  return steps;
}

CsvTable exec_base_table(const ExecutionReport& report) {
  CsvTable t;
  t.header = {kExecBaseSchema, "step", "time",  "base",   "set_x",
              "set_y",         "set_theta", "x", "y",     "theta",
              "wheel0",        "wheel1", "wheel2"};
  for (const BaseSample& b : report.base_trace) {
    std::vector<std::string> row = {std::to_string(b.step),
                                    format_double(b.time),
                                    std::to_string(b.base)};
    append(row, numbers(b.set));
    append(row, numbers(b.pose));
    append(row, numbers(b.wheel_speeds));
    push_row(t, std::move(row));
  }
  return t;
}

CsvTable exec_ee_table(const ExecutionReport& report) {
  CsvTable t;
  t.header = {kExecEeSchema, "step", "time"};
  for (const auto& l : task_labels()) t.header.push_back("planned_" + l);
  for (const auto& l : task_labels()) t.header.push_back("executed_" + l);
  for (const char* c : {"position_error", "energy", "converged"}) {
    t.header.push_back(c);
  }
  for (const EeSample& e : report.ee_samples) {
    std::vector<std::string> row = {std::to_string(e.step),
                                    format_double(e.time)};
    append(row, numbers(e.planned));
    append(row, numbers(e.executed));
    row.push_back(format_double(e.position_error));
    row.push_back(format_double(e.energy));
    row.push_back(e.converged ? "1" : "0");
    push_row(t, std::move(row));
  }
  return t;
}

CsvTable validation_table(const ValidationReport& report) {
  CsvTable t;
  t.header = {kValidationSchema, "layer",       "max_rel_error", "tolerance",
              "trials",          "worst_trial", "worst_entry",   "passed"};
  for (const LayerResult& l : report.layers) {
    push_row(t, {layer_name(l.layer), format_double(l.max_rel_error),
                 format_double(l.tolerance), std::to_string(l.trials),
                 std::to_string(l.worst_trial), l.worst_entry,
                 l.passed ? "1" : "0"});
  }
  return t;
}

}  // namespace ccma
