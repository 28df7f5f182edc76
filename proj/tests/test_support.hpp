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


#ifndef CCMA_TESTS_TEST_SUPPORT_HPP_
#define CCMA_TESTS_TEST_SUPPORT_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "assembly.hpp"
#include "constraints.hpp"
#include "model.hpp"

namespace ccma::testing {

// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal(double sigma) {
    return std::normal_distribution<double>(0.0, sigma)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool coin() { return integer(0, 1) == 1; }

  Vector vector(int n, double sigma) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(sigma);
    return v;
  }
  Vec3 unit_vector() {
    Vec3 v;
    do {
      v = Vec3(normal(1.0), normal(1.0), normal(1.0));
    } while (v.norm() < 1e-3);
    return v.normalized();
  }
  // Euler angles kept away from the pitch singularity.
  RigidBodyState body_state(double translation = 1.0) {
    RigidBodyState st;
    st.gamma = uniform(-M_PI, M_PI);
    st.beta = uniform(-1.3, 1.3);
    st.alpha = uniform(-M_PI, M_PI);
    st.t = Vec3(uniform(-translation, translation),
                uniform(-translation, translation),
                uniform(-translation, translation));
    return st;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Central difference of f: R^n -> R^m, column j is df/dx_j.
inline Matrix central_jacobian(const std::function<Vector(const Vector&)>& f,
                               const Vector& x, double h) {
  const Vector f0 = f(x);
  Matrix J(f0.size(), x.size());
  Vector xp = x, xm = x;
  for (int j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    xp[j] = xm[j] = x[j];
  }
  return J;
}

inline double normwise_error(const Matrix& a, const Matrix& ref) {
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
  return (a - ref).cwiseAbs().maxCoeff() / scale;
}

// Controls at the assembled pose with each free control moved uniformly
// within +-radius.
inline Vector perturbed_controls(const SceneModel& model, const Vector& u0,
                                 Gen& gen, double radius) {
  Vector u = u0;
  for (int k : model.free_controls()) u[k] += gen.uniform(-radius, radius);
  return u;
}

}  // namespace ccma::testing

#endif  // CCMA_TESTS_TEST_SUPPORT_HPP_
