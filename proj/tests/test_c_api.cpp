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


#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "ccma/ccma.h"

namespace {

namespace fs = std::filesystem;

struct SceneHandle {
  explicit SceneHandle(const char* name) {
    EXPECT_EQ(ccma_scene_canonical(name, &ptr), CCMA_OK) << ccma_last_error();
  }
  ~SceneHandle() { ccma_scene_free(ptr); }
  ccma_scene* ptr = nullptr;
};

struct Pose {
  std::vector<double> s, u;
};

Pose assembled(const ccma_scene* scene) {
  ccma_scene_info info{};
  EXPECT_EQ(ccma_scene_get_info(scene, &info), CCMA_OK);
  Pose p;
  p.s.resize(info.num_states);
  p.u.resize(info.num_controls);
  EXPECT_EQ(ccma_scene_assemble(scene, p.s.data(), p.s.size(), p.u.data(),
                                p.u.size()),
            CCMA_OK);
  return p;
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("ccma_capi_" + name);
}

TEST(CApiTest, VersionAndStatusNames) {
  EXPECT_STREQ(ccma_version(), CCMA_EXPECTED_VERSION);
  std::set<std::string> names;
  for (int s = CCMA_OK; s <= CCMA_ERR_INTERNAL; ++s) {
    names.insert(ccma_status_name(static_cast<ccma_status>(s)));
  }
  EXPECT_EQ(names.size(), static_cast<size_t>(CCMA_ERR_INTERNAL + 1));
  EXPECT_STREQ(ccma_status_name(static_cast<ccma_status>(999)), "unknown_status");
}

TEST(CApiTest, CanonicalRegistry) {
  ASSERT_EQ(ccma_canonical_count(), 5u);
  EXPECT_STREQ(ccma_canonical_name(0), "ccma-4dof-reduced");
  EXPECT_EQ(ccma_canonical_name(5), nullptr);
  ccma_scene* s = nullptr;
  EXPECT_EQ(ccma_scene_canonical("ccma-9dof", &s), CCMA_ERR_UNKNOWN_CANONICAL);
  EXPECT_EQ(s, nullptr);
  EXPECT_NE(std::string(ccma_last_error()).find("ccma-9dof"), std::string::npos);
}

TEST(CApiTest, NullArgumentsAreRejected) {
  EXPECT_EQ(ccma_scene_canonical(nullptr, nullptr), CCMA_ERR_INVALID_ARGUMENT);
  EXPECT_STRNE(ccma_last_error(), "");
  ccma_scene_info info;
  EXPECT_EQ(ccma_scene_get_info(nullptr, &info), CCMA_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ccma_solve_fk(nullptr, nullptr, nullptr, 0, nullptr, 0, nullptr, nullptr),
            CCMA_ERR_INVALID_ARGUMENT);
  ccma_scene_free(nullptr);
  ccma_track_free(nullptr);
  ccma_bench_free(nullptr);
}

TEST(CApiTest, SceneInfoAndFreeControls) {
  SceneHandle reduced("ccma-4dof-reduced"), complete("ccma-4dof-complete");
  ccma_scene_info info{};
  ASSERT_EQ(ccma_scene_get_info(reduced.ptr, &info), CCMA_OK);
  EXPECT_EQ(info.num_free_controls, 6);
  EXPECT_EQ(info.num_controls, 9);
  EXPECT_EQ(info.num_states, 6 * info.num_bodies);
  const int mask[6] = {1, 1, 1, 1, 0, 0};
  EXPECT_EQ(std::memcmp(info.task_mask, mask, sizeof mask), 0);
  EXPECT_TRUE(ccma_scene_base_reduced(reduced.ptr, 0));
  EXPECT_FALSE(ccma_scene_base_reduced(complete.ptr, 0));
  size_t n = 0;
  ASSERT_EQ(ccma_scene_free_controls(complete.ptr, nullptr, 0, &n), CCMA_OK);
  EXPECT_EQ(n, 9u);
  std::vector<int> idx(n);
  EXPECT_EQ(ccma_scene_free_controls(complete.ptr, idx.data(), 2, &n),
            CCMA_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ccma_scene_free_controls(complete.ptr, idx.data(), idx.size(), &n),
            CCMA_OK);
  EXPECT_EQ(idx.back(), 8);
  EXPECT_STREQ(ccma_scene_body_name(reduced.ptr, 0), "platform");
  EXPECT_EQ(ccma_scene_body_name(reduced.ptr, 999), nullptr);
}

TEST(CApiTest, SerializeAndReload) {
  SceneHandle scene("ccma-6dof-asym");
  size_t needed = 0;
  ASSERT_EQ(ccma_scene_serialize(scene.ptr, nullptr, 0, &needed), CCMA_OK);
  std::string text(needed, '\0');
  EXPECT_EQ(ccma_scene_serialize(scene.ptr, text.data(), needed - 1, &needed),
            CCMA_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(ccma_scene_serialize(scene.ptr, text.data(), needed, &needed), CCMA_OK);
  ccma_scene* back = nullptr;
  ASSERT_EQ(ccma_scene_load_string(text.c_str(), &back), CCMA_OK);
  EXPECT_STREQ(ccma_scene_name(back), "ccma-6dof-asym");
  ccma_scene_free(back);
}

TEST(CApiTest, LoadErrorsMapToStatusCodes) {
  ccma_scene* s = nullptr;
  EXPECT_EQ(ccma_scene_load_string("{\n  \"format\": 1,\n  oops\n}", &s),
            CCMA_ERR_PARSE);
  EXPECT_NE(std::string(ccma_last_error()).find("line 3"), std::string::npos)
      << ccma_last_error();
  EXPECT_EQ(ccma_scene_load_file("/nonexistent.json", &s), CCMA_ERR_IO);
  EXPECT_EQ(ccma_scene_resolve("/nonexistent.json", &s), CCMA_ERR_IO);
  EXPECT_EQ(s, nullptr);
}

TEST(CApiTest, ForwardSolveAndDimensionChecks) {
  SceneHandle scene("ccma-4dof-complete");
  Pose p = assembled(scene.ptr);
  double e = 1.0;
  ASSERT_EQ(ccma_energy(scene.ptr, p.s.data(), p.s.size(), p.u.data(), p.u.size(), &e),
            CCMA_OK);
  EXPECT_LT(e, 1e-18);

  ccma_fk_config cfg;
  ccma_fk_config_default(&cfg);
  std::vector<double> u = p.u, out(p.s.size());
  for (size_t k = 0; k < u.size(); k += 3) {
    u[k] += 0.01;
    u[k + 1] -= 0.02;
  }
  ccma_fk_result res{};
  ASSERT_EQ(ccma_solve_fk(scene.ptr, &cfg, p.s.data(), p.s.size(), u.data(),
                          u.size(), out.data(), &res),
            CCMA_OK);
  EXPECT_TRUE(res.converged);
  EXPECT_LT(res.energy, 1e-16);
  double before[6], after[6];
  ccma_ee_pose(scene.ptr, p.s.data(), p.s.size(), before);
  ccma_ee_pose(scene.ptr, out.data(), out.size(), after);
  // A common shift of every base translates the platform rigidly.
  EXPECT_NEAR(after[0] - before[0], 0.01, 1e-7);
  EXPECT_NEAR(after[1] - before[1], -0.02, 1e-7);
  for (int c = 2; c < 6; ++c) EXPECT_NEAR(after[c], before[c], 1e-7);

  EXPECT_EQ(ccma_solve_fk(scene.ptr, &cfg, p.s.data(), p.s.size() - 1, u.data(),
                          u.size(), out.data(), &res),
            CCMA_ERR_DIMENSION_MISMATCH);

  cfg.max_iters = 1;
  u[0] += 0.02;
  EXPECT_EQ(ccma_solve_fk(scene.ptr, &cfg, p.s.data(), p.s.size(), u.data(),
                          u.size(), out.data(), &res),
            CCMA_ERR_NON_CONVERGENCE);
  EXPECT_FALSE(res.converged);

  cfg.grad_tol = -1.0;
  EXPECT_EQ(ccma_solve_fk(scene.ptr, &cfg, p.s.data(), p.s.size(), u.data(),
                          u.size(), out.data(), &res),
            CCMA_ERR_INVALID_ARGUMENT);
}

TEST(CApiTest, StateSensitivityIsRowMajor) {
  SceneHandle scene("ccma-4dof-reduced");
  Pose p = assembled(scene.ptr);
  ccma_fk_config cfg;
  ccma_fk_config_default(&cfg);
  cfg.grad_tol = 1e-13;
  const size_t ns = p.s.size(), nu = p.u.size();
  std::vector<double> S(ns * nu);
  ASSERT_EQ(ccma_state_sensitivity(scene.ptr, &cfg, p.s.data(), ns, p.u.data(), nu,
                                   S.data()),
            CCMA_OK);
  const double h = 1e-6;
  const size_t j = 1;
  std::vector<double> up = p.u, um = p.u, sp(ns), sm(ns);
  up[j] += h;
  um[j] -= h;
  ccma_fk_result r{};
  ccma_solve_fk(scene.ptr, &cfg, p.s.data(), ns, up.data(), nu, sp.data(), &r);
  ccma_solve_fk(scene.ptr, &cfg, p.s.data(), ns, um.data(), nu, sm.data(), &r);
  for (size_t i = 0; i < ns; ++i) {
    EXPECT_NEAR(S[i * nu + j], (sp[i] - sm[i]) / (2 * h), 1e-5) << "row " << i;
  }
}

TEST(CApiTest, InverseKinematicsStep) {
  SceneHandle scene("ccma-6dof-6agents");
  Pose p = assembled(scene.ptr);
  double target[6];
  ccma_ee_pose(scene.ptr, p.s.data(), p.s.size(), target);
  target[2] += 0.005;
  target[4] += 0.003;
  ccma_ik_config cfg;
  ccma_ik_config_default(&cfg);
  std::vector<double> s(p.s.size()), u(p.u.size());
  ccma_ik_result res{};
  ASSERT_EQ(ccma_solve_ik(scene.ptr, &cfg, p.s.data(), p.s.size(), p.u.data(),
                          p.u.size(), target, s.data(), u.data(), &res),
            CCMA_OK)
      << ccma_last_error();
  EXPECT_EQ(res.status, CCMA_IK_CONVERGED);
  EXPECT_LT(res.task_error, 1e-6);
  cfg.lambda = 1.5;
  EXPECT_EQ(ccma_solve_ik(scene.ptr, &cfg, p.s.data(), p.s.size(), p.u.data(),
                          p.u.size(), target, s.data(), u.data(), &res),
            CCMA_ERR_INVALID_ARGUMENT);
}

TEST(CApiTest, TrackCsvRoundTripAndExecution) {
  SceneHandle scene("ccma-4dof-reduced");
  Pose p = assembled(scene.ptr);
  double t[6];
  ccma_ee_pose(scene.ptr, p.s.data(), p.s.size(), t);
  t[1] += 0.03;
  ccma_ik_config cfg;
  ccma_ik_config_default(&cfg);
  ccma_track* track = nullptr;
  ASSERT_EQ(ccma_track_run(scene.ptr, &cfg, t, 1, &track), CCMA_OK);
  ASSERT_EQ(ccma_track_step_count(track), 3u);
  EXPECT_EQ(ccma_track_failures(track), 0);
  ccma_track_step_info info{};
  ASSERT_EQ(ccma_track_step(track, 2, &info), CCMA_OK);
  EXPECT_DOUBLE_EQ(info.commanded[1], t[1]);
  EXPECT_EQ(ccma_track_step(track, 3, &info), CCMA_ERR_INVALID_ARGUMENT);

  const std::string path = temp_path("track.csv").string();
  ASSERT_EQ(ccma_track_write_csv(track, path.c_str()), CCMA_OK);
  ccma_track* back = nullptr;
  ASSERT_EQ(ccma_track_read_csv(scene.ptr, path.c_str(), &back), CCMA_OK)
      << ccma_last_error();
  ASSERT_EQ(ccma_track_step_count(back), 3u);
  std::vector<double> u1(p.u.size()), u2(p.u.size());
  for (size_t i = 0; i < 3; ++i) {
    ccma_track_step_controls(track, i, u1.data(), u1.size());
    ccma_track_step_controls(back, i, u2.data(), u2.size());
    EXPECT_EQ(u1, u2);
  }

  ccma_exec_config ecfg;
  ccma_exec_config_default(&ecfg);
  ccma_exec_result er{};
  ASSERT_EQ(ccma_execute(back, &ecfg, nullptr, nullptr, &er), CCMA_OK);
  EXPECT_LT(er.ee_rmse, 1e-4);
  EXPECT_EQ(er.samples, 3u);
  ccma_track_free(back);
  ccma_track_free(track);
  fs::remove(path);
}

TEST(CApiTest, ValidationFailureNamesLayer) {
  SceneHandle scene("ccma-4dof-reduced");
  ccma_validate_config cfg;
  ccma_validate_config_default(&cfg);
  cfg.local_trials = 2;
  cfg.pipeline_trials = 1;
  ccma_validate_result res{};
  ASSERT_EQ(ccma_validate_gradients(scene.ptr, &cfg, nullptr, &res), CCMA_OK);
  EXPECT_TRUE(res.passed);
  cfg.corrupt_layer = ccma_layer_from_name("mixed_derivative");
  ASSERT_GE(cfg.corrupt_layer, 0);
  EXPECT_EQ(ccma_validate_gradients(scene.ptr, &cfg, nullptr, &res),
            CCMA_ERR_VALIDATION_FAILED);
  EXPECT_FALSE(res.passed);
  EXPECT_FALSE(res.layers[cfg.corrupt_layer].passed);
  EXPECT_NE(std::string(ccma_last_error()).find("mixed_derivative"),
            std::string::npos);
  EXPECT_EQ(ccma_layer_from_name("bogus"), -1);
  EXPECT_EQ(ccma_layer_name(CCMA_NUM_LAYERS), nullptr);
}

TEST(CApiTest, BenchAcrossScenes) {
  SceneHandle a("ccma-4dof-reduced"), b("ccma-6dof-sym");
  const ccma_scene* scenes[] = {a.ptr, b.ptr};
  ccma_bench_config cfg;
  ccma_bench_config_default(&cfg);
  cfg.reps = 3;
  ccma_bench* bench = nullptr;
  ASSERT_EQ(ccma_bench_run(scenes, 2, &cfg, &bench), CCMA_OK);
  ASSERT_EQ(ccma_bench_count(bench), 2u);
  ccma_bench_summary s{};
  ASSERT_EQ(ccma_bench_summary_get(bench, 1, &s), CCMA_OK);
  EXPECT_STREQ(s.scene, "ccma-6dof-sym");
  EXPECT_EQ(s.converged, 3);
  EXPECT_EQ(ccma_bench_summary_get(bench, 2, &s), CCMA_ERR_INVALID_ARGUMENT);
  ccma_bench_free(bench);
}

TEST(CApiTest, LastErrorIsPerThread) {
  ccma_scene* s = nullptr;
  ccma_scene_canonical("main-thread-scene", &s);
  const std::string mine = ccma_last_error();
  std::thread([] {
    ccma_scene* t = nullptr;
    ccma_scene_canonical("other-thread-scene", &t);
  }).join();
  EXPECT_EQ(mine, ccma_last_error());
}

}  // namespace
