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


// ccma: command-line driver for the CCMA kinematics library.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccma/ccma.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitValidation = 3;

constexpr const char* kManifestSchema = "ccma-manifest/1";
constexpr const char* kTaskLabels[6] = {"x", "y", "z", "yaw", "pitch", "roll"};

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(ccma_status st) {
  switch (st) {
    case CCMA_OK: return kExitOk;
    case CCMA_ERR_NON_CONVERGENCE:
    case CCMA_ERR_SOLVER_BREAKDOWN:
    case CCMA_ERR_SINGULAR_SENSITIVITY:
    case CCMA_ERR_MAX_ITERS: return kExitNonConvergence;
    case CCMA_ERR_VALIDATION_FAILED: return kExitValidation;
    default: return kExitInput;
  }
}

void check(ccma_status st) {
  if (st != CCMA_OK) {
    throw CliError(exit_code_for(st), std::string(ccma_status_name(st)) +
                                          ": " + ccma_last_error());
  }
}

struct SceneDeleter {
  void operator()(ccma_scene* s) const { ccma_scene_free(s); }
};
struct TrackDeleter {
  void operator()(ccma_track* t) const { ccma_track_free(t); }
};
struct BenchDeleter {
  void operator()(ccma_bench* b) const { ccma_bench_free(b); }
};
using ScenePtr = std::unique_ptr<ccma_scene, SceneDeleter>;
using TrackPtr = std::unique_ptr<ccma_track, TrackDeleter>;
using BenchPtr = std::unique_ptr<ccma_bench, BenchDeleter>;

ScenePtr open_scene(const std::string& name_or_path) {
  ccma_scene* raw = nullptr;
  check(ccma_scene_resolve(name_or_path.c_str(), &raw));
  return ScenePtr(raw);
}

ccma_scene_info scene_info(const ccma_scene* scene) {
  ccma_scene_info info{};
  check(ccma_scene_get_info(scene, &info));
  return info;
}

struct Reference {
  std::vector<double> s0;
  std::vector<double> u0;
  double pose[6] = {0, 0, 0, 0, 0, 0};
};

Reference assemble(const ccma_scene* scene) {
  const ccma_scene_info info = scene_info(scene);
  Reference r;
  r.s0.resize(static_cast<size_t>(info.num_states));
  r.u0.resize(static_cast<size_t>(info.num_controls));
  check(ccma_scene_assemble(scene, r.s0.data(), r.s0.size(), r.u0.data(),
                            r.u0.size()));
  check(ccma_ee_pose(scene, r.s0.data(), r.s0.size(), r.pose));
  return r;
}

Json pose_json(const double* p) {
  Json j = Json::object();
  for (int c = 0; c < 6; ++c) j[kTaskLabels[c]] = p[c];
  return j;
}

void write_json(const fs::path& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(2) << "\n";
  if (!out) throw CliError(kExitInput, "cannot write '" + path.string() + "'");
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw CliError(kExitInput,
                   "cannot create output directory '" + dir + "': " + ec.message());
  }
  return fs::path(dir);
}

// Options shared by the solving commands.
struct SolverFlags {
  double grad_tol = 0.0;
  int max_iters = 0;
  std::string hessian = "full";
  double lambda = 0.0;
  double ik_grad_tol = 0.0;
  int ik_max_iters = 0;
  double trans_step = 0.0;
  double rot_step = 0.0;
  bool direct = false;
  std::string bfgs_init = "task-gauss-newton";
};

void add_fk_flags(CLI::App* cmd, SolverFlags& f) {
  ccma_fk_config d;
  ccma_fk_config_default(&d);
  f.grad_tol = d.grad_tol;
  f.max_iters = d.max_iters;
  cmd->add_option("--grad-tol", f.grad_tol,
                  "forward solve: infinity-norm tolerance on dE/ds")
      ->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "forward solve: iteration cap")
      ->capture_default_str();
  cmd->add_option("--hessian", f.hessian, "forward solve Hessian")
      ->check(CLI::IsMember({"full", "gauss-newton"}))
      ->capture_default_str();
}

void add_ik_flags(CLI::App* cmd, SolverFlags& f) {
  ccma_ik_config d;
  ccma_ik_config_default(&d);
  f.lambda = d.lambda;
  f.ik_grad_tol = d.grad_tol;
  f.ik_max_iters = d.max_outer_iters;
  f.trans_step = d.trans_step;
  f.rot_step = d.rot_step;
  cmd->add_option("--lambda", f.lambda, "weight of the residual energy term")
      ->capture_default_str();
  cmd->add_option("--ik-grad-tol", f.ik_grad_tol,
                  "inverse kinematics: tolerance on |dO/du|")
      ->capture_default_str();
  cmd->add_option("--ik-max-iters", f.ik_max_iters,
                  "inverse kinematics: quasi-Newton iteration cap")
      ->capture_default_str();
  cmd->add_option("--trans-step", f.trans_step, "sub-step translation limit (m)")
      ->capture_default_str();
  cmd->add_option("--rot-step", f.rot_step, "sub-step rotation limit (rad)")
      ->capture_default_str();
  cmd->add_option("--bfgs-init", f.bfgs_init,
                  "initial inverse-Hessian approximation")
      ->check(CLI::IsMember({"task-gauss-newton", "scaled-identity"}))
      ->capture_default_str();
  cmd->add_flag("--direct", f.direct,
                "solve each waypoint in one step, without subdivision");
}

ccma_fk_config fk_config(const SolverFlags& f) {
  ccma_fk_config c;
  ccma_fk_config_default(&c);
  c.grad_tol = f.grad_tol;
  c.max_iters = f.max_iters;
  c.hessian_mode =
      f.hessian == "full" ? CCMA_HESSIAN_FULL : CCMA_HESSIAN_GAUSS_NEWTON;
  return c;
}

ccma_ik_config ik_config(const SolverFlags& f) {
  ccma_ik_config c;
  ccma_ik_config_default(&c);
  c.lambda = f.lambda;
  c.grad_tol = f.ik_grad_tol;
  c.max_outer_iters = f.ik_max_iters;
  c.trans_step = f.trans_step;
  c.rot_step = f.rot_step;
  c.direct = f.direct;
  c.bfgs_init = f.bfgs_init == "scaled-identity" ? CCMA_BFGS_SCALED_IDENTITY
                                                 : CCMA_BFGS_TASK_GAUSS_NEWTON;
  c.fk = fk_config(f);
  return c;
}

// Everything needed to rerun the command: argv plus the parsed overrides.
struct Manifest {
  std::string command;
  std::string scene;
  std::string out;
  long long seed = -1;
  std::vector<std::string> argv;
  std::vector<std::string> outputs;
  Json config = Json::object();

  void capture(const CLI::App* cmd) {
    for (const CLI::Option* opt : cmd->get_options()) {
      if (opt->count() == 0 || opt->get_name() == "--help") continue;
      const auto& res = opt->results();
      std::string name = opt->get_name();
      while (!name.empty() && name.front() == '-') name.erase(name.begin());
      if (res.size() == 1) {
        config[name] = res.front();
      } else {
        config[name] = res;
      }
    }
  }

  void write(const fs::path& dir) const {
    Json doc;
    doc["schema"] = kManifestSchema;
    doc["library_version"] = ccma_version();
    doc["command"] = command;
    doc["scene"] = scene;
    doc["out"] = out;
    if (seed >= 0) {
      doc["seed"] = seed;
    } else {
      doc["seed"] = nullptr;
    }
    doc["config"] = config;
    doc["argv"] = argv;
    doc["outputs"] = outputs;
    write_json(dir / "manifest.json", doc);
  }
};

std::vector<double> parse_number_list(const std::string& text,
                                      const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CliError(kExitInput, std::string("bad number '") + item +
                                     "' in " + what);
    }
  }
  return out;
}

// ---- solve-fk ----

struct SolveFkArgs {
  std::string scene;
  std::string out = ".";
  std::string u;
  std::vector<std::string> offsets;
  SolverFlags flags;
};

int run_solve_fk(const SolveFkArgs& a, Manifest& m) {
  ScenePtr scene = open_scene(a.scene);
  const ccma_scene_info info = scene_info(scene.get());
  Reference ref = assemble(scene.get());
  std::vector<double> u = ref.u0;
  if (!a.u.empty()) {
    u = parse_number_list(a.u, "--u");
    if (static_cast<int>(u.size()) != info.num_controls) {
      throw CliError(kExitInput, "--u needs " +
                                     std::to_string(info.num_controls) +
                                     " values (x, y, theta per base)");
    }
  }
  for (const std::string& spec : a.offsets) {
    const std::vector<double> v = parse_number_list(spec, "--base-offset");
    const int k = v.empty() ? -1 : static_cast<int>(v[0]);
    if (v.size() < 3 || v.size() > 4 || v[0] != k || k < 0 ||
        k >= info.num_bases) {
      throw CliError(kExitInput,
                     "--base-offset expects k,dx,dy[,dtheta] with a valid base k");
    }
    u[3 * k] += v[1];
    u[3 * k + 1] += v[2];
    if (v.size() == 4) u[3 * k + 2] += v[3];
  }

  const fs::path dir = prepare_out(a.out);
  const ccma_fk_config cfg = fk_config(a.flags);
  std::vector<double> s(ref.s0.size());
  ccma_fk_result res{};
  const ccma_status st = ccma_solve_fk(scene.get(), &cfg, ref.s0.data(),
                                       ref.s0.size(), u.data(), u.size(),
                                       s.data(), &res);
  if (st != CCMA_OK && st != CCMA_ERR_NON_CONVERGENCE &&
      st != CCMA_ERR_SOLVER_BREAKDOWN) {
    check(st);
  }
  check(ccma_write_state_csv(scene.get(), s.data(), s.size(),
                             (dir / "state.csv").string().c_str()));
  double pose[6];
  check(ccma_ee_pose(scene.get(), s.data(), s.size(), pose));

  Json report;
  report["scene"] = ccma_scene_name(scene.get());
  report["status"] = ccma_status_name(st);
  report["converged"] = res.converged != 0;
  report["energy"] = res.energy;
  report["grad_norm"] = res.grad_norm;
  report["iters"] = res.iters;
  report["wall_time"] = res.wall_time;
  report["controls"] = u;
  report["end_effector"] = pose_json(pose);
  report["reference_end_effector"] = pose_json(ref.pose);
  write_json(dir / "solve_fk.json", report);
  m.outputs = {"state.csv", "solve_fk.json"};

  std::printf("%s: %s, E = %.3e, |dE/ds| = %.3e, %d iterations\n",
              ccma_scene_name(scene.get()), ccma_status_name(st), res.energy,
              res.grad_norm, res.iters);
  if (st != CCMA_OK) {
    std::fprintf(stderr, "error: %s: %s\n", ccma_status_name(st),
                 ccma_last_error());
    return kExitNonConvergence;
  }
  return kExitOk;
}

// ---- track ----

struct TrackArgs {
  std::string scene;
  std::string waypoints;
  std::string out = ".";
  SolverFlags flags;
};

int run_track(const TrackArgs& a, Manifest& m) {
  ScenePtr scene = open_scene(a.scene);
  const Reference ref = assemble(scene.get());
  size_t n = 0;
  int relative = 0;
  check(ccma_waypoints_load_file(a.waypoints.c_str(), nullptr, 0, &n, nullptr));
  std::vector<double> targets(6 * n);
  check(ccma_waypoints_load_file(a.waypoints.c_str(), targets.data(), n, &n,
                                 &relative));
  if (relative) {
    for (size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 6; ++c) targets[6 * i + c] += ref.pose[c];
    }
  }

  const fs::path dir = prepare_out(a.out);
  const ccma_ik_config cfg = ik_config(a.flags);
  ccma_track* raw = nullptr;
  check(ccma_track_run(scene.get(), &cfg, targets.data(), n, &raw));
  TrackPtr track(raw);
  check(ccma_track_write_csv(track.get(), (dir / "track.csv").string().c_str()));

  const size_t steps = ccma_track_step_count(track.get());
  double prev[6];
  std::copy(ref.pose, ref.pose + 6, prev);
  double max_pos = 0.0, max_ang = 0.0, max_err = 0.0;
  int iters = 0;
  for (size_t i = 0; i < steps; ++i) {
    ccma_track_step_info info{};
    check(ccma_track_step(track.get(), i, &info));
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) {
      d2 += (info.commanded[c] - prev[c]) * (info.commanded[c] - prev[c]);
    }
    max_pos = std::max(max_pos, std::sqrt(d2));
    for (int c = 3; c < 6; ++c) {
      max_ang = std::max(max_ang, std::abs(info.commanded[c] - prev[c]));
    }
    max_err = std::max(max_err, info.task_error);
    iters += info.iters;
    std::copy(info.commanded, info.commanded + 6, prev);
  }
  double rmse[6];
  check(ccma_track_rmse(track.get(), rmse));
  const int failures = ccma_track_failures(track.get());

  Json report;
  report["scene"] = ccma_scene_name(scene.get());
  report["waypoints"] = n;
  report["relative_waypoints"] = relative != 0;
  report["substeps"] = steps;
  report["failures"] = failures;
  report["max_task_error"] = max_err;
  report["max_position_increment"] = max_pos;
  report["max_angle_increment"] = max_ang;
  report["total_iters"] = iters;
  report["wall_time"] = ccma_track_wall_time(track.get());
  report["rmse"] = pose_json(rmse);
  write_json(dir / "track.json", report);
  m.outputs = {"track.csv", "track.json"};

  std::printf("%s: %zu waypoints, %zu sub-steps, %d failed, max task error "
              "%.3e, %.3f s\n",
              ccma_scene_name(scene.get()), n, steps, failures, max_err,
              ccma_track_wall_time(track.get()));
  if (failures > 0) {
    std::fprintf(stderr, "error: %d sub-steps did not converge (see status "
                 "column of track.csv)\n", failures);
    return kExitNonConvergence;
  }
  return kExitOk;
}

// ---- validate-grad ----

struct ValidateArgs {
  std::string scene;
  std::string out = ".";
  int trials = 0;
  double h = 0.0;
  unsigned long long seed = 7;
  std::string corrupt;
};

int run_validate(const ValidateArgs& a, Manifest& m) {
  ScenePtr scene = open_scene(a.scene);
  ccma_validate_config cfg;
  ccma_validate_config_default(&cfg);
  if (a.trials > 0) cfg.local_trials = cfg.pipeline_trials = a.trials;
  if (a.h > 0.0) cfg.h_local = cfg.h_pipeline = a.h;
  cfg.seed = a.seed;
  if (!a.corrupt.empty()) {
    cfg.corrupt_layer = ccma_layer_from_name(a.corrupt.c_str());
    if (cfg.corrupt_layer < 0) {
      throw CliError(kExitInput, "unknown layer '" + a.corrupt + "'");
    }
  }
  const fs::path dir = prepare_out(a.out);
  ccma_validate_result res{};
  const ccma_status st = ccma_validate_gradients(
      scene.get(), &cfg, (dir / "validate.csv").string().c_str(), &res);
  if (st != CCMA_OK && st != CCMA_ERR_VALIDATION_FAILED) check(st);
  m.outputs = {"validate.csv"};

  std::printf("%s (%.2f s)\n", ccma_scene_name(scene.get()), res.wall_time);
  std::printf("  %-20s %12s %10s  %s\n", "layer", "max rel err", "tolerance",
              "result");
  for (const ccma_layer_result& l : res.layers) {
    std::printf("  %-20s %12.3e %10.1e  %s\n", ccma_layer_name(l.layer),
                l.max_rel_error, l.tolerance, l.passed ? "pass" : "FAIL");
  }
  if (st == CCMA_ERR_VALIDATION_FAILED) {
    for (const ccma_layer_result& l : res.layers) {
      if (!l.passed) {
        std::fprintf(stderr,
                     "error: layer %s failed: relative error %.3e > %.1e at "
                     "trial %d, %s\n",
                     ccma_layer_name(l.layer), l.max_rel_error, l.tolerance,
                     l.worst_trial, l.worst_entry);
      }
    }
    return kExitValidation;
  }
  return kExitOk;
}

// ---- bench ----

struct BenchArgs {
  std::vector<std::string> scenes;
  std::string out = ".";
  int reps = 0;
  unsigned long long seed = 1;
  SolverFlags flags;
};

int run_bench(const BenchArgs& a, Manifest& m) {
  std::vector<std::string> names = a.scenes;
  if (names.empty()) {
    for (size_t i = 0; i < ccma_canonical_count(); ++i) {
      names.push_back(ccma_canonical_name(i));
    }
  }
  std::vector<ScenePtr> owned;
  std::vector<const ccma_scene*> scenes;
  for (const std::string& n : names) {
    owned.push_back(open_scene(n));
    scenes.push_back(owned.back().get());
  }
  ccma_bench_config cfg;
  ccma_bench_config_default(&cfg);
  if (a.reps > 0) cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.ik = ik_config(a.flags);

  const fs::path dir = prepare_out(a.out);
  ccma_bench* raw = nullptr;
  check(ccma_bench_run(scenes.data(), scenes.size(), &cfg, &raw));
  BenchPtr bench(raw);
  check(ccma_bench_write_csv(bench.get(), (dir / "bench.csv").string().c_str(),
                             (dir / "bench_runs.csv").string().c_str()));
  m.outputs = {"bench.csv", "bench_runs.csv"};

  std::printf("%-22s %4s %4s %5s %5s %10s %10s %8s\n", "scene", "n_b", "n_m",
              "free", "conv", "median ms", "mean ms", "iters");
  int failed = 0;
  for (size_t i = 0; i < ccma_bench_count(bench.get()); ++i) {
    ccma_bench_summary s{};
    check(ccma_bench_summary_get(bench.get(), i, &s));
    std::printf("%-22s %4d %4d %5d %2d/%-2d %10.3f %10.3f %8.1f\n", s.scene,
                s.bodies, s.bases, s.free_controls, s.converged, s.reps,
                1e3 * s.median_time, 1e3 * s.mean_time, s.mean_iters);
    failed += s.reps - s.converged;
  }
  if (failed > 0) {
    std::fprintf(stderr, "error: %d benchmark solves did not converge\n",
                 failed);
    return kExitNonConvergence;
  }
  return kExitOk;
}

// ---- execute ----

struct ExecuteArgs {
  std::string scene;
  std::string track;
  std::string out = ".";
  double noise_sigma = 0.0;
  unsigned long long seed = 1;
  int seeds = 1;
  double dt = 0.0;
  double hold = 0.0;
  double wheel_radius = 0.0;
  double mount_radius = 0.0;
  double kp = 0.0;
  double ki = 0.0;
};

int run_execute(const ExecuteArgs& a, Manifest& m) {
  ScenePtr scene = open_scene(a.scene);
  ccma_track* raw = nullptr;
  check(ccma_track_read_csv(scene.get(), a.track.c_str(), &raw));
  TrackPtr track(raw);

  ccma_exec_config cfg;
  ccma_exec_config_default(&cfg);
  cfg.noise_sigma = a.noise_sigma;
  if (a.dt > 0.0) cfg.dt = a.dt;
  if (a.hold > 0.0) cfg.hold = a.hold;
  if (a.wheel_radius > 0.0) cfg.wheel_radius = a.wheel_radius;
  if (a.mount_radius > 0.0) cfg.mount_radius = a.mount_radius;
  for (int i = 0; i < 3; ++i) {
    if (a.kp > 0.0) cfg.kp[i] = a.kp;
    if (a.ki > 0.0) cfg.ki[i] = a.ki;
  }
  if (a.seeds < 1) throw CliError(kExitInput, "--seeds must be >= 1");

  const fs::path dir = prepare_out(a.out);
  std::ofstream seeds_csv(dir / "exec_seeds.csv", std::ios::binary);
  seeds_csv << "ccma-exec-seeds/1,seed,ee_rmse,ee_rmse_yaw,fk_failures\n";
  double sum = 0.0, sum2 = 0.0;
  int fk_failures = 0;
  for (int k = 0; k < a.seeds; ++k) {
    cfg.seed = a.seed + static_cast<unsigned long long>(k);
    const bool first = k == 0;
    ccma_exec_result res{};
    check(ccma_execute(track.get(), &cfg,
                       first ? (dir / "exec_base.csv").string().c_str() : nullptr,
                       first ? (dir / "exec_ee.csv").string().c_str() : nullptr,
                       &res));
    char line[160];
    std::snprintf(line, sizeof line, "%d,%llu,%.17g,%.17g,%d\n", k,
                  static_cast<unsigned long long>(cfg.seed), res.ee_rmse,
                  res.ee_rmse_yaw, res.fk_failures);
    seeds_csv << line;
    sum += res.ee_rmse;
    sum2 += res.ee_rmse * res.ee_rmse;
    fk_failures += res.fk_failures;
  }
  seeds_csv.close();
  if (!seeds_csv) throw CliError(kExitInput, "cannot write exec_seeds.csv");
  const double mean = sum / a.seeds;
  const double sd =
      a.seeds > 1
          ? std::sqrt(std::max(0.0, (sum2 - a.seeds * mean * mean) / (a.seeds - 1)))
          : 0.0;

  Json report;
  report["scene"] = ccma_scene_name(scene.get());
  report["substeps"] = ccma_track_step_count(track.get());
  report["noise_sigma"] = a.noise_sigma;
  report["seeds"] = a.seeds;
  report["ee_rmse_mean"] = mean;
  report["ee_rmse_std"] = sd;
  report["fk_failures"] = fk_failures;
  write_json(dir / "execute.json", report);
  m.outputs = {"exec_base.csv", "exec_ee.csv", "exec_seeds.csv",
               "execute.json"};

  std::printf("%s: %d seed(s), sigma = %.4g m, EE RMSE %.4e m (sd %.2e)\n",
              ccma_scene_name(scene.get()), a.seeds, a.noise_sigma, mean, sd);
  if (fk_failures > 0) {
    std::fprintf(stderr, "error: %d forward solves failed during execution\n",
                 fk_failures);
    return kExitNonConvergence;
  }
  return kExitOk;
}

// ---- export-scene ----

int run_export(const std::string& scene_name, const std::string& path,
               Manifest& m) {
  ScenePtr scene = open_scene(scene_name);
  size_t needed = 0;
  check(ccma_scene_serialize(scene.get(), nullptr, 0, &needed));
  std::string text(needed, '\0');
  check(ccma_scene_serialize(scene.get(), text.data(), needed, &needed));
  text.resize(needed - 1);
  const fs::path p(path);
  if (p.has_parent_path()) prepare_out(p.parent_path().string());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw CliError(kExitInput, "cannot write '" + path + "'");
  m.outputs = {p.filename().string()};
  m.out = p.has_parent_path() ? p.parent_path().string() : ".";
  return kExitOk;
}

int run(std::vector<std::string> args);

int run_rerun(const std::string& manifest_path, const std::string& out) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw CliError(kExitInput, "cannot read '" + manifest_path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw CliError(kExitInput, manifest_path + ": " + e.what());
  }
  if (doc.value("schema", "") != kManifestSchema || !doc.contains("argv")) {
    throw CliError(kExitInput, manifest_path + " is not a run manifest");
  }
  std::vector<std::string> argv = doc["argv"].get<std::vector<std::string>>();
  if (!out.empty()) {
    bool replaced = false;
    for (size_t i = 0; i + 1 < argv.size(); ++i) {
      if (argv[i] == "--out") {
        argv[i + 1] = out;
        replaced = true;
      }
    }
    if (!replaced) {
      argv.push_back("--out");
      argv.push_back(out);
    }
  }
  return run(argv);
}

int run(std::vector<std::string> args) {
  CLI::App app{"CCMA kinematics: forward and inverse kinematics, trajectory "
               "tracking, derivative validation and benchmarks for "
               "constrained collaborative mobile agents",
               "ccma"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ccma_version()));

  Manifest manifest;
  manifest.argv = args;

  SolveFkArgs fk;
  CLI::App* c_fk = app.add_subcommand("solve-fk", "forward kinematics for given controls");
  c_fk->add_option("--scene", fk.scene, "canonical name or scene file")->required();
  c_fk->add_option("--out", fk.out, "output directory")->capture_default_str();
  c_fk->add_option("--u", fk.u, "comma-separated controls (x, y, theta per base)");
  c_fk->add_option("--base-offset", fk.offsets,
                   "k,dx,dy[,dtheta] added to base k's controls (repeatable)");
  add_fk_flags(c_fk, fk.flags);

  TrackArgs tr;
  CLI::App* c_tr = app.add_subcommand("track", "track end-effector waypoints");
  c_tr->add_option("--scene", tr.scene, "canonical name or scene file")->required();
  c_tr->add_option("--waypoints", tr.waypoints, "waypoint file")
      ->required()->check(CLI::ExistingFile);
  c_tr->add_option("--out", tr.out, "output directory")->capture_default_str();
  add_fk_flags(c_tr, tr.flags);
  add_ik_flags(c_tr, tr.flags);

  ValidateArgs va;
  CLI::App* c_va = app.add_subcommand(
      "validate-grad", "check analytic derivatives against finite differences");
  c_va->add_option("--scene", va.scene, "canonical name or scene file")->required();
  c_va->add_option("--out", va.out, "output directory")->capture_default_str();
  c_va->add_option("--trials", va.trials, "random trials per layer");
  c_va->add_option("--fd-step", va.h, "finite-difference step for every layer");
  c_va->add_option("--seed", va.seed, "random seed")->capture_default_str();
  c_va->add_option("--corrupt", va.corrupt,
                   "perturb one analytic layer (negative control)")
      ->group("Testing");

  BenchArgs be;
  CLI::App* c_be = app.add_subcommand("bench", "time one combined perturbation step per scene");
  c_be->add_option("--scene", be.scenes,
                   "scene(s) to benchmark (repeatable; default all canonical)");
  c_be->add_option("--out", be.out, "output directory")->capture_default_str();
  c_be->add_option("--reps", be.reps, "repetitions per scene (default 21)");
  c_be->add_option("--seed", be.seed, "random seed")->capture_default_str();
  add_fk_flags(c_be, be.flags);
  add_ik_flags(c_be, be.flags);

  ExecuteArgs ex;
  CLI::App* c_ex = app.add_subcommand("execute", "replay a track on simulated omni-wheel bases");
  c_ex->add_option("--scene", ex.scene, "canonical name or scene file")->required();
  c_ex->add_option("--track", ex.track, "track.csv written by the track command")
      ->required()->check(CLI::ExistingFile);
  c_ex->add_option("--out", ex.out, "output directory")->capture_default_str();
  c_ex->add_option("--noise-sigma", ex.noise_sigma,
                   "std. dev. of base x/y disturbance per tick (m)")
      ->capture_default_str();
  c_ex->add_option("--seed", ex.seed, "random seed")->capture_default_str();
  c_ex->add_option("--seeds", ex.seeds, "number of consecutive seeds")
      ->capture_default_str();
  c_ex->add_option("--dt", ex.dt, "control period (s)");
  c_ex->add_option("--hold", ex.hold, "control time per sub-step (s)");
  c_ex->add_option("--wheel-radius", ex.wheel_radius, "wheel radius (m)");
  c_ex->add_option("--mount-radius", ex.mount_radius, "wheel distance from base centre (m)");
  c_ex->add_option("--kp", ex.kp, "proportional gain");
  c_ex->add_option("--ki", ex.ki, "integral gain");

  std::string ex_scene, ex_path;
  CLI::App* c_exp = app.add_subcommand("export-scene", "write a scene as JSON");
  c_exp->add_option("--scene", ex_scene, "canonical name or scene file")->required();
  c_exp->add_option("--out", ex_path, "output file")->required();

  std::string rr_manifest, rr_out;
  CLI::App* c_rr = app.add_subcommand("rerun", "repeat the run recorded in a manifest");
  c_rr->add_option("manifest", rr_manifest, "manifest.json")
      ->required()->check(CLI::ExistingFile);
  c_rr->add_option("--out", rr_out, "output directory (default: as recorded)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  CLI::App* cmd = app.get_subcommands().front();
  manifest.command = cmd->get_name();
  manifest.capture(cmd);
  int code = kExitOk;
  std::string out_dir;
  if (cmd == c_fk) {
    manifest.scene = fk.scene;
    code = run_solve_fk(fk, manifest);
    out_dir = fk.out;
  } else if (cmd == c_tr) {
    manifest.scene = tr.scene;
    code = run_track(tr, manifest);
    out_dir = tr.out;
  } else if (cmd == c_va) {
    manifest.scene = va.scene;
    manifest.seed = static_cast<long long>(va.seed);
    code = run_validate(va, manifest);
    out_dir = va.out;
  } else if (cmd == c_be) {
    std::string joined;
    for (const auto& s : be.scenes) joined += (joined.empty() ? "" : ",") + s;
    manifest.scene = joined.empty() ? "all-canonical" : joined;
    manifest.seed = static_cast<long long>(be.seed);
    code = run_bench(be, manifest);
    out_dir = be.out;
  } else if (cmd == c_ex) {
    manifest.scene = ex.scene;
    manifest.seed = static_cast<long long>(ex.seed);
    code = run_execute(ex, manifest);
    out_dir = ex.out;
  } else if (cmd == c_exp) {
    manifest.scene = ex_scene;
    code = run_export(ex_scene, ex_path, manifest);
    return code;
  } else {
    return run_rerun(rr_manifest, rr_out);
  }
  manifest.out = out_dir;
  manifest.outputs.push_back("manifest.json");
  manifest.write(fs::path(out_dir));
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
}
