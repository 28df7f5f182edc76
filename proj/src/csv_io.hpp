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


#ifndef CCMA_CSV_IO_HPP_
#define CCMA_CSV_IO_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "base_sim.hpp"
#include "ik_control.hpp"
#include "model.hpp"
#include "validation.hpp"

namespace ccma {

// Every table starts with a row-index column whose header is the schema id.
inline constexpr const char* kStateSchema = "ccma-state/1";
inline constexpr const char* kTrackSchema = "ccma-track/1";
inline constexpr const char* kExecBaseSchema = "ccma-exec-base/1";
inline constexpr const char* kExecEeSchema = "ccma-exec-ee/1";
inline constexpr const char* kValidationSchema = "ccma-validate/1";

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  // -1 when absent
};

// 17 significant digits, round-trips every finite double.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// Task coordinate suffixes in ee order: x, y, z, yaw, pitch, roll.
const std::vector<std::string>& task_labels();

CsvTable state_table(const SceneModel& model, const Vector& s);
CsvTable track_table(const SceneModel& model, const TrackReport& report);
// Inverse of track_table; throws ParseError on schema or shape mismatch.
std::vector<TrackStep> track_steps_from_table(const SceneModel& model,
                                              const CsvTable& table);
CsvTable exec_base_table(const ExecutionReport& report);
CsvTable exec_ee_table(const ExecutionReport& report);
CsvTable validation_table(const ValidationReport& report);

}  // namespace ccma

#endif  // CCMA_CSV_IO_HPP_
