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

#include <algorithm>

#include "assembly.hpp"
#include "bench.hpp"
#include "csv_io.hpp"
#include "error.hpp"
#include "validation.hpp"
#include "test_support.hpp"

namespace ccma {
namespace {

std::string param_name(const ::testing::TestParamInfo<std::string>& info) {
  std::string n = info.param;
  for (char& c : n) {
    if (c == '-') c = '_';
  }
  return n;
}

TEST(RelativeErrorTest, NormwiseDefinition) {
  Matrix a(2, 2), b(2, 2);
  b << 4, -2, 1, 0;
  a << 4, -2, 1.5, 0;
  EXPECT_DOUBLE_EQ(relative_error(a, b), 0.5 / 4.0);
  EXPECT_EQ(relative_error(b, b), 0.0);
}

TEST(LayerNameTest, RoundTrip) {
  for (int i = 0; i < kNumDerivativeLayers; ++i) {
    const auto layer = static_cast<DerivativeLayer>(i);
    EXPECT_EQ(parse_layer(layer_name(layer)), layer);
  }
  EXPECT_FALSE(parse_layer("curl").has_value());
  EXPECT_TRUE(is_local_layer(DerivativeLayer::kEnergyHessian));
  EXPECT_FALSE(is_local_layer(DerivativeLayer::kObjectiveGradient));
}

class ValidationTest : public ::testing::TestWithParam<std::string> {};

TEST_P(ValidationTest, AllLayersPass) {
  const SceneModel m = build_canonical(GetParam());
  const ValidationReport rep = validate_gradients(m);
  EXPECT_TRUE(rep.passed);
  ASSERT_EQ(rep.layers.size(), static_cast<size_t>(kNumDerivativeLayers));
  for (const LayerResult& l : rep.layers) {
    EXPECT_TRUE(l.passed) << layer_name(l.layer) << " " << l.max_rel_error;
    EXPECT_EQ(l.tolerance, is_local_layer(l.layer) ? 1e-6 : 1e-4);
    EXPECT_EQ(l.trials, is_local_layer(l.layer) ? 50 : 20);
  }
}

INSTANTIATE_TEST_SUITE_P(Canonical, ValidationTest,
                         ::testing::ValuesIn(canonical_names()), param_name);

TEST(ValidationTest, CorruptedLayerIsNamed) {
  const SceneModel m = build_canonical("ccma-4dof-reduced");
  ValidationConfig cfg;
  cfg.local_trials = 3;
  cfg.pipeline_trials = 2;
  for (int i = 0; i < kNumDerivativeLayers; ++i) {
    cfg.corrupt = static_cast<DerivativeLayer>(i);
    const ValidationReport rep = validate_gradients(m, cfg);
    EXPECT_FALSE(rep.passed);
    for (const LayerResult& l : rep.layers) {
      EXPECT_EQ(l.passed, l.layer != *cfg.corrupt) << layer_name(l.layer);
    }
    const LayerResult& bad = rep.layers[i];
    EXPECT_NE(bad.worst_entry.find("row 0, col 0"), std::string::npos)
        << bad.worst_entry;
    EXPECT_GE(bad.max_rel_error, 1e-2 * (1 - 1e-6));
  }
}

TEST(ValidationTest, StepSweepShowsCentralDifferenceV) {
  const SceneModel m = build_canonical("ccma-4dof-reduced");
  const std::vector<double> steps = {1e-4, 1e-5, 1e-6, 1e-7};
  std::vector<std::vector<double>> err(kNumDerivativeLayers);
  for (double h : steps) {
    ValidationConfig cfg;
    cfg.local_trials = 10;
    cfg.pipeline_trials = 3;
    cfg.h_local = cfg.h_pipeline = h;
    const ValidationReport rep = validate_gradients(m, cfg);
    for (const LayerResult& l : rep.layers) {
      err[static_cast<int>(l.layer)].push_back(l.max_rel_error);
    }
  }
  for (int i = 0; i < kNumDerivativeLayers; ++i) {
    const auto& e = err[i];
    const auto best = std::min_element(e.begin(), e.end());
    const std::string name = layer_name(static_cast<DerivativeLayer>(i));
    // Truncation error dominates at the large end, round-off at the small end.
    EXPECT_NE(best, e.begin()) << name;
    EXPECT_NE(best, e.end() - 1) << name;
    EXPECT_GT(e.front(), 5 * *best) << name;
    EXPECT_GT(e.back(), 5 * *best) << name;
  }
}

TEST(ValidationTest, ReportTableHasOneRowPerLayer) {
  const SceneModel m = build_canonical("ccma-4dof-complete");
  ValidationConfig cfg;
  cfg.local_trials = 2;
  cfg.pipeline_trials = 1;
  const CsvTable t = validation_table(validate_gradients(m, cfg));
  EXPECT_EQ(t.header.front(), kValidationSchema);
  EXPECT_EQ(t.rows.size(), static_cast<size_t>(kNumDerivativeLayers));
}

TEST(ValidationTest, RejectsBadConfig) {
  ValidationConfig cfg;
  cfg.h_local = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = ValidationConfig{};
  cfg.local_trials = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(BenchTest, CombinedPerturbationShape) {
  testing::Gen gen(71);
  for (int trial = 0; trial < 200; ++trial) {
    TaskMask mask;
    for (bool& b : mask) b = gen.coin();
    mask[gen.integer(0, 2)] = true;
    const auto seed = static_cast<std::uint64_t>(gen.integer(0, 1000));
    const int rep = gen.integer(0, 50);
    const Vector6 d = combined_perturbation(mask, 0.010, 0.005, seed, rep);
    EXPECT_EQ(d, combined_perturbation(mask, 0.010, 0.005, seed, rep));
    EXPECT_NEAR(d.head<3>().norm(), 0.010, 1e-15);
    for (int c = 0; c < 6; ++c) {
      if (!mask[c]) {
        EXPECT_EQ(d[c], 0.0);
      } else if (c >= 3) {
        EXPECT_EQ(std::abs(d[c]), 0.005);
      }
    }
  }
}

TEST(BenchTest, SummaryCountsAndOrdering) {
  BenchConfig cfg;
  cfg.reps = 5;
  const BenchSummary s = bench_scene(build_canonical("ccma-4dof-complete"), cfg);
  EXPECT_EQ(s.reps, 5);
  EXPECT_EQ(s.converged, 5);
  EXPECT_EQ(s.free_controls, 9);
  EXPECT_EQ(s.bases, 3);
  EXPECT_EQ(s.runs.size(), 5u);
  EXPECT_LE(s.min_time, s.median_time);
  EXPECT_LE(s.median_time, s.max_time);
  for (const BenchRun& r : s.runs) EXPECT_LT(r.task_error, 1e-6);
  const CsvTable t = bench_table({s});
  EXPECT_EQ(t.header.front(), kBenchSchema);
  EXPECT_EQ(bench_runs_table({s}).rows.size(), 5u);
}

TEST(BenchTest, SingleRepetitionMedianIsStable) {
  const SceneModel m = build_canonical("ccma-4dof-reduced");
  BenchConfig cfg;
  cfg.reps = 3;
  bench_scene(m, cfg);  // warm caches
  cfg.reps = 1;
  const double one = bench_scene(m, cfg).median_time;
  cfg.reps = 100;
  const double hundred = bench_scene(m, cfg).median_time;
  EXPECT_LT(one, 2.0 * hundred);
  EXPECT_LT(hundred, 2.0 * one);
}

}  // namespace
}  // namespace ccma
