// Copyright 2026 The parares Authors.
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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "parares/model.hpp"

using namespace parares;

namespace {

Model radial(double p, double eps = 0.0, double omega = 0.0, double gamma = 0.0) {
  Model m;
  m.kind = ModelKind::Radial;
  m.params = ModelParams(p);
  m.trap = TrapModulation::isotropic(eps, omega, gamma);
  return m;
}

// Plain bisection, independent of the library's bracket logic.
double bisect(double (*f)(double, double, double), double a, double b, double l, double p) {
  for (int i = 0; i < 300; ++i) {
    const double m = 0.5 * (a + b);
    (f(m, l, p) > 0.0 ? b : a) = m;
  }
  return 0.5 * (a + b);
}

double quintic(double v, double l, double p) { return l * l * std::pow(v, 5) - v - p; }

}  // namespace

TEST_CASE("trap modulation invariants") {
  const auto trap = TrapModulation::isotropic(0.15, 2.04);
  for (double t : {0.0, 0.7, 1.3, 3.1}) {
    const auto l2 = trap.evaluate(t);
    CHECK(l2[0] == doctest::Approx(1.0 + 0.15 * std::cos(2.04 * t)));
    CHECK(l2[0] > 0.0);
  }
  CHECK(trap.period() == doctest::Approx(2.0 * std::numbers::pi / 2.04));

  CHECK_THROWS_AS(TrapModulation({1, 1, 1}, {1.0, 0, 0}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(TrapModulation({0, 1, 1}, {0, 0, 0}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(TrapModulation({1, 1, 1}, {0.1, 0, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(TrapModulation({1, 1, 1}, {0, 0, 0}, 1.0, -0.1), std::invalid_argument);
  CHECK_NOTHROW(TrapModulation({1, 1, 1}, {0, 0, 0}, 0.0));

  const auto m0 = TrapModulation::monopole({1, 1, std::sqrt(8.0)}, 0.1, 2.0);
  CHECK(m0.amplitudes() == std::array<double, 3>{0.1, 0.1, 0.0});
  const auto m2 = TrapModulation::quadrupole({1, 1, std::sqrt(8.0)}, 0.1, 2.0);
  CHECK(m2.amplitudes() == std::array<double, 3>{0.1, -0.1, 0.0});
}

TEST_CASE("interaction strength from physical inputs") {
  const auto p = ModelParams::from_physical(5000.0, 5.4e-9, 1.2e-6);
  const double expected = std::sqrt(2.0 / std::numbers::pi) * 5000.0 * 5.4e-9 / 1.2e-6;
  CHECK(std::abs(p.interaction() - expected) <= 1e-12 * expected);
  REQUIRE(p.physical().has_value());
  CHECK(p.physical()->particle_count == 5000.0);
  CHECK_THROWS_AS(ModelParams(-1.0), std::invalid_argument);
}

TEST_CASE("rhs examples") {
  CHECK(rhs(radial(0.0), DynamicalState::scalar(1.0, 0.0))[0] == doctest::Approx(0.0));
  CHECK(rhs(radial(9.2), DynamicalState::scalar(1.6, 0.0))[0] ==
        doctest::Approx(0.04794921874999947).epsilon(1e-13));

  Model mathieu;
  mathieu.kind = ModelKind::Mathieu;
  CHECK(rhs(mathieu, DynamicalState::scalar(1.0, 0.0))[0] == doctest::Approx(-1.0));

  // damping enters as -gamma qdot
  CHECK(rhs(radial(0.0, 0.0, 0.0, 0.3), DynamicalState::scalar(1.0, 2.0))[0] ==
        doctest::Approx(-0.6));

  SUBCASE("domain errors") {
    CHECK_THROWS_AS(rhs(radial(9.2), DynamicalState::scalar(0.0, 0.0)), DomainError);
    CHECK_THROWS_AS(rhs(radial(9.2), DynamicalState::scalar(-0.1, 0.0)), DomainError);
    Model m3;
    m3.kind = ModelKind::Variational3D;
    CHECK_THROWS_AS(rhs(m3, DynamicalState::vector3({1, 0, 1}, {})), DomainError);
    CHECK_THROWS_AS(rhs(m3, DynamicalState::scalar(1, 0)), std::invalid_argument);
  }
}

TEST_CASE("variational 3d rhs matches the coupled width equations") {
  Model m;
  m.kind = ModelKind::Variational3D;
  m.params = ModelParams(2.5);
  m.trap = TrapModulation({1.0, 1.3, 0.7}, {0.1, -0.1, 0.0}, 1.7);
  const double t = 0.9;
  const std::array<double, 3> v{1.1, 0.8, 1.9};
  const auto a = rhs(m, DynamicalState::vector3(v, {0.1, 0.2, 0.3}, t));
  const auto l2 = m.trap.evaluate(t);
  const double prod = v[0] * v[1] * v[2];
  for (int i = 0; i < 3; ++i) {
    const double expected = -l2[i] * v[i] + 1.0 / std::pow(v[i], 3) + 2.5 / (v[i] * prod);
    CHECK(a[i] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("energy examples") {
  // 0 kinetic + 1/2 trap + 1/2 barrier
  CHECK(energy(radial(0.0), DynamicalState::scalar(1.0, 0.0)) == doctest::Approx(1.0));
  CHECK(energy(radial(9.2), DynamicalState::scalar(1.6, 0.0)) ==
        doctest::Approx(2.2240104166666663).epsilon(1e-13));
  Model m3;
  m3.kind = ModelKind::Variational3D;
  CHECK(energy(m3, DynamicalState::vector3({1, 1, 1}, {0, 0, 0})) == doctest::Approx(3.0));

  Model mathieu;
  mathieu.kind = ModelKind::Mathieu;
  CHECK_THROWS_AS(energy(mathieu, DynamicalState::scalar(1, 0)), UnsupportedModel);
}

TEST_CASE("equilibrium width") {
  CHECK(equilibrium_width(ModelParams(0.0), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double v1 = equilibrium_width(ModelParams(9.2), 1.0);
  CHECK(std::abs(v1 - bisect(quintic, 0.5, 5.0, 1.0, 9.2)) < 1e-12);
  CHECK(std::abs(v1 - 1.6097679414773496) < 1e-12);
  CHECK(std::abs(v1 - 1.6) < 0.011);  // close to the (1.6, 0) starting point
  const double v2 = equilibrium_width(ModelParams(9.2), 2.0);
  CHECK(std::abs(v2 - bisect(quintic, 0.1, 5.0, 2.0, 9.2)) < 1e-12);
  CHECK(std::abs(v2 - 1.210835423557694) < 1e-12);

  SUBCASE("residual property") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pd(0.0, 500.0), ld(0.2, 4.0);
    for (int i = 0; i < 200; ++i) {
      const double p = pd(rng);
      const double l = ld(rng);
      Model m = radial(p);
      m.trap = TrapModulation::stationary({l, l, l});
      const double v = equilibrium_width(ModelParams(p), l);
      const double acc = rhs(m, DynamicalState::scalar(v, 0.0))[0];
      // scale-aware residual: each term is O(l^2 v)
      CHECK(std::abs(acc) < 1e-10 * std::max(1.0, l * l * v));
    }
  }

  SUBCASE("single power-law barriers") {
    // lambda^2 v^5 = (1 + P) v  and  lambda^2 v^5 = 1 + P
    CHECK(equilibrium_width(ModelParams(15.0), 1.0, Singularity::InverseCube) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(equilibrium_width(ModelParams(31.0), 1.0, Singularity::InverseQuartic) ==
          doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("linearized frequency") {
  CHECK(linearized_frequency(ModelParams(0.0), 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  const double w = linearized_frequency(ModelParams(9.2), 1.0);
  CHECK(w == doctest::Approx(2.2025172189988815).epsilon(1e-11));

  SUBCASE("finite-difference Jacobian oracle") {
    for (double p : {0.0, 9.2, 46.0}) {
      for (double l : {1.0, 2.0}) {
        Model m = radial(p);
        m.trap = TrapModulation::stationary({l, l, l});
        const double v = equilibrium_width(ModelParams(p), l);
        const double dv = 1e-5 * v;
        const double ap = rhs(m, DynamicalState::scalar(v + dv, 0.0))[0];
        const double am = rhs(m, DynamicalState::scalar(v - dv, 0.0))[0];
        const double k = -(ap - am) / (2.0 * dv);
        CHECK(std::sqrt(k) == doctest::Approx(linearized_frequency(ModelParams(p), l)).epsilon(1e-7));
      }
    }
  }

  SUBCASE("strong interaction limit tends to sqrt(5) lambda0") {
    const double w_inf = linearized_frequency(ModelParams(1e12), 1.0);
    CHECK(w_inf * w_inf == doctest::Approx(5.0).epsilon(1e-4));
    CHECK(linearized_frequency(ModelParams(1e12), 2.0) / 2.0 == doctest::Approx(std::sqrt(5.0)).epsilon(1e-4));
  }
}

TEST_CASE("anisotropic equilibrium") {
  const ModelParams p(9.2);
  const auto iso = equilibrium_widths_3d(p, {1, 1, 1});
  const double v = equilibrium_width(p, 1.0);
  // isotropic 3d widths satisfy v^5 = v + P just like the radial model
  for (double w : iso) CHECK(w == doctest::Approx(v).epsilon(1e-10));

  Model m;
  m.kind = ModelKind::Variational3D;
  m.params = p;
  m.trap = TrapModulation::stationary({1, 1, std::sqrt(8.0)});
  const auto w = equilibrium_widths_3d(p, {1, 1, std::sqrt(8.0)});
  const auto a = rhs(m, DynamicalState::vector3(w, {0, 0, 0}));
  for (double x : a) CHECK(std::abs(x) < 1e-10);
  CHECK(w[0] == doctest::Approx(w[1]));
  CHECK(w[2] < w[0]);
}

TEST_CASE("fold to width") {
  CHECK(fold_to_width(-0.3) == 0.3);
  CHECK(fold_to_width(0.0) == 0.0);
  CHECK(fold_to_width(2.5) == 2.5);
}

TEST_CASE("name round trips") {
  for (auto k : {ModelKind::Variational3D, ModelKind::Radial, ModelKind::ImpactOscillator,
                 ModelKind::Mathieu, ModelKind::CenterOfMass}) {
    CHECK(model_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(model_kind_from_string("bogus"), std::invalid_argument);
  CHECK(singularity_from_string("inverse_cube") == Singularity::InverseCube);
  CHECK(dimension(ModelKind::Variational3D) == 3);
  CHECK(dimension(ModelKind::CenterOfMass) == 1);
}
