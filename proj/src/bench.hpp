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


#ifndef CCMA_BENCH_HPP_
#define CCMA_BENCH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "csv_io.hpp"
#include "ik_control.hpp"
#include "model.hpp"

namespace ccma {

inline constexpr const char* kBenchSchema = "ccma-bench/1";
inline constexpr const char* kBenchRunsSchema = "ccma-bench-runs/1";

struct BenchConfig {
  int reps = 21;
  double translation = 0.010;  // m, along a random masked direction
  double rotation = 0.005;     // rad, random sign on every masked angle
  std::uint64_t seed = 1;
  IkConfig ik;

  void validate() const;
};

struct BenchRun {
  int rep = 0;
  Vector6 delta = Vector6::Zero();
  double wall_time = 0.0;
  int iters = 0;
  int fk_solves = 0;
  double task_error = 0.0;
  IkStatus status = IkStatus::kConverged;
};

struct BenchSummary {
  std::string scene;
  int bodies = 0;
  int bases = 0;
  int free_controls = 0;
  int reps = 0;
  int converged = 0;
  double mean_time = 0.0;    // s
  double median_time = 0.0;  // s
  double min_time = 0.0;
  double max_time = 0.0;
  double mean_iters = 0.0;
  std::vector<BenchRun> runs;
};

// Task-space step of the given sizes for repetition `rep`; deterministic in
// (seed, rep).
Vector6 combined_perturbation(const TaskMask& mask, double translation,
                              double rotation, std::uint64_t seed, int rep);

// Each repetition solves one IK step from the assembled reference pose with a
// fresh quasi-Newton state.
BenchSummary bench_scene(const SceneModel& model, const BenchConfig& cfg = {});

CsvTable bench_table(const std::vector<BenchSummary>& summaries);
CsvTable bench_runs_table(const std::vector<BenchSummary>& summaries);

}  // namespace ccma

#endif  // CCMA_BENCH_HPP_
