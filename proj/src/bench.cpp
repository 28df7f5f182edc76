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


#include "bench.hpp"

#include <algorithm>
#include <random>

#include "assembly.hpp"
#include "error.hpp"

namespace ccma {

void BenchConfig::validate() const {
  if (reps < 1) throw Error(ErrorCode::kInvalidArgument, "reps must be >= 1");
  if (!(translation >= 0.0) || !(rotation >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "perturbation sizes must be non-negative");
  }
  ik.validate();
}

Vector6 combined_perturbation(const TaskMask& mask, double translation,
                              double rotation, std::uint64_t seed, int rep) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(rep)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Vector6 d = Vector6::Zero();
  Eigen::Vector3d dir = Eigen::Vector3d::Zero();
  while (dir.norm() < 1e-3) {
    for (int c = 0; c < 3; ++c) dir[c] = mask[c] ? normal(rng) : 0.0;
    if (!mask[0] && !mask[1] && !mask[2]) break;
  }
  if (dir.norm() > 0.0) d.head<3>() = translation * dir.normalized();
  for (int c = 3; c < kTaskDims; ++c) {
    if (mask[c]) d[c] = coin(rng) ? rotation : -rotation;
  }
  return d;
}

BenchSummary bench_scene(const SceneModel& model, const BenchConfig& cfg) {
  cfg.validate();
  const Assembly a = initial_assembly(model);
  const Vector6 x0 = ee_state(model, a.s0);

  BenchSummary out;
  out.scene = model.name;
  out.bodies = model.num_bodies();
  out.bases = model.num_bases();
  out.free_controls = model.num_free_controls();
  out.reps = cfg.reps;
  std::vector<double> times;
  double iters = 0.0;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    BenchRun run;
    run.rep = rep;
    run.delta = combined_perturbation(model.end_effector.mask, cfg.translation,
                                      cfg.rotation, cfg.seed, rep);
    BfgsState bfgs;
    const IkResult r =
        solve_ik_step(model, a.s0, a.u0, x0 + run.delta, cfg.ik, &bfgs);
    run.wall_time = r.wall_time;
    run.iters = r.iters;
    run.fk_solves = r.fk_solves;
    run.task_error = r.task_error;
    run.status = r.status;
    if (r.converged()) ++out.converged;
    times.push_back(r.wall_time);
    iters += r.iters;
    out.runs.push_back(run);
  }
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  out.median_time = n % 2 ? sorted[n / 2]
                          : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  out.min_time = sorted.front();
  out.max_time = sorted.back();
  double sum = 0.0;
  for (double t : times) sum += t;
  out.mean_time = sum / static_cast<double>(n);
  out.mean_iters = iters / static_cast<double>(n);
  return out;
}

CsvTable bench_table(const std::vector<BenchSummary>& summaries) {
  CsvTable t;
  t.header = {kBenchSchema,     "scene",      "n_b",         "n_m",
              "free_controls",  "reps",       "converged",   "mean_time",
              "median_time",    "min_time",   "max_time",    "mean_iters"};
  for (const BenchSummary& s : summaries) {
    t.rows.push_back({std::to_string(t.rows.size()), s.scene,
                      std::to_string(s.bodies), std::to_string(s.bases),
                      std::to_string(s.free_controls), std::to_string(s.reps),
                      std::to_string(s.converged), format_double(s.mean_time),
                      format_double(s.median_time), format_double(s.min_time),
                      format_double(s.max_time), format_double(s.mean_iters)});
  }
  return t;
}

CsvTable bench_runs_table(const std::vector<BenchSummary>& summaries) {
  CsvTable t;
  t.header = {kBenchRunsSchema, "scene", "rep"};
  for (const auto& l : task_labels()) t.header.push_back("delta_" + l);
  for (const char* c : {"wall_time", "iters", "fk_solves", "task_error",
                        "status"}) {
    t.header.push_back(c);
  }
  for (const BenchSummary& s : summaries) {
    for (const BenchRun& r : s.runs) {
      std::vector<std::string> row = {std::to_string(t.rows.size()), s.scene,
                                      std::to_string(r.rep)};
      for (int c = 0; c < kTaskDims; ++c) row.push_back(format_double(r.delta[c]));
      row.push_back(format_double(r.wall_time));
      row.push_back(std::to_string(r.iters));
      row.push_back(std::to_string(r.fk_solves));
      row.push_back(format_double(r.task_error));
      row.push_back(ik_status_name(r.status));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

}  // namespace ccma
