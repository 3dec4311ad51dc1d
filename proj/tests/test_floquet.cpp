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

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "parares/floquet.hpp"
#include "parares/integrate.hpp"

using namespace parares;
using namespace parares::floquet;
using std::numbers::pi;

namespace {

TrapModulation mathieu_trap(double omega, double eps, double gamma = 0.0, double lambda0 = 1.0) {
  return TrapModulation({lambda0, lambda0, lambda0}, {eps, 0.0, 0.0}, omega, gamma);
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0; lo + i * step <= hi + 1e-12; ++i) g.push_back(lo + i * step);
  return g;
}

double eigen_residual(const FloquetResult& r, std::complex<double> mu) {
  const auto& m = r.monodromy;
  return std::abs((m[0] - mu) * (m[3] - mu) - m[1] * m[2]);
}

// Largest |u| over tau in [0, 400] relative to the initial amplitude, for
// both canonical initial conditions.
double direct_growth_factor(double omega, double eps) {
  Model m;
  m.kind = ModelKind::Mathieu;
  m.trap = mathieu_trap(omega, eps);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  double peak = 0.0;
  for (const auto& s0 : {DynamicalState::scalar(1.0, 0.0), DynamicalState::scalar(0.0, 1.0)}) {
    const auto traj = integrate(m, s0, 400.0, cfg);
    for (const auto& s : traj.samples) peak = std::max(peak, std::abs(s.coordinates[0]));
  }
  return peak;
}

}  // namespace

TEST_CASE("unforced oscillator monodromy") {
  const auto r = monodromy(mathieu_trap(2.0, 0.0));
  CHECK(r.period == doctest::Approx(pi).epsilon(1e-15));
  CHECK(r.trace() == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(r.stable);
  CHECK(r.multipliers[0].real() == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(r.multipliers[1].real() == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(r.max_modulus() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.growth_exponent <= kNumericalZero);
}

TEST_CASE("first-wedge growth exponent at the tip") {
  const auto r = monodromy(mathieu_trap(2.0, 0.15));
  CHECK_FALSE(r.stable);
  CHECK(r.growth_exponent == doctest::Approx(0.0375).epsilon(0.10));
  CHECK(std::abs(r.multipliers[0] * r.multipliers[1] - 1.0) < 1e-9);
}

TEST_CASE("damped determinant follows the Abel identity") {
  for (double omega : {0.7, 2.0, 3.3}) {
    const auto r = monodromy(mathieu_trap(omega, 0.0, 0.2));
    CHECK(std::abs(r.determinant() - std::exp(-0.2 * r.period)) < 1e-8);
  }
}

TEST_CASE("classify examples") {
  CHECK_FALSE(classify(2.0, 0.1).stable);
  CHECK(classify(2.0, 0.1).growth_exponent > kNumericalZero);
  CHECK(classify(3.5, 0.1).stable);
  CHECK_FALSE(classify(1.0, 0.1).stable);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(monodromy(mathieu_trap(2.0, 0.1), 3), std::invalid_argument);
  CHECK_THROWS_AS(trace_wedge(4, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(trace_wedge(1, {}), std::invalid_argument);
  CHECK_THROWS_AS(trace_wedge(1, {0.2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(trace_wedge(1, {0.1, 0.9}), std::invalid_argument);
}

TEST_CASE("Abel identity and eigen residual over random samples") {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> w(0.3, 4.0), e(0.0, 0.8), g(0.0, 0.5);
  for (int i = 0; i < 50; ++i) {
    const double gamma = g(rng);
    const auto r = monodromy(mathieu_trap(w(rng), e(rng), gamma));
    CHECK(std::abs(r.determinant() - std::exp(-gamma * r.period)) < 1e-8);
    for (const auto& mu : r.multipliers) {
      CHECK(eigen_residual(r, mu) < 1e-10 * std::max(1.0, std::norm(mu)));
    }
  }
}

TEST_CASE("conservative multipliers are reciprocal") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> w(0.3, 4.0), e(0.0, 0.8);
  int unstable = 0;
  for (int i = 0; i < 50; ++i) {
    const auto r = monodromy(mathieu_trap(w(rng), e(rng)));
    const auto prod = r.multipliers[0] * r.multipliers[1];
    CHECK(std::abs(prod - 1.0) < 1e-8);
    if (r.stable) {
      CHECK(std::abs(std::abs(r.multipliers[0]) - 1.0) < 1e-5);
      CHECK(std::abs(std::abs(r.multipliers[1]) - 1.0) < 1e-5);
    } else {
      ++unstable;
      CHECK(r.multipliers[0].imag() == 0.0);
      CHECK(r.multipliers[1].imag() == 0.0);
    }
  }
  CHECK(unstable > 0);
}

TEST_CASE("wedge tips at 2, 1 and 2/3") {
  const auto w1 = trace_wedge(1, {0.01});
  REQUIRE_FALSE(w1.empty(0));
  CHECK(w1.contains(0, 2.0));
  CHECK(w1.omega_lower[0] == doctest::Approx(2.0 - 0.005).epsilon(1e-4));
  CHECK(w1.omega_upper[0] == doctest::Approx(2.0 + 0.005).epsilon(1e-4));

  const auto w2 = trace_wedge(2, {0.01});
  REQUIRE_FALSE(w2.empty(0));
  CHECK(std::abs(w2.tip[0] - 1.0) < 0.02);
  CHECK(w2.omega_lower[0] - 0.02 <= 1.0);
  CHECK(w2.omega_upper[0] + 0.02 >= 1.0);

  const auto w3 = trace_wedge(3, {0.05});
  REQUIRE_FALSE(w3.empty(0));
  CHECK(std::abs(w3.tip[0] - 2.0 / 3.0) < 0.02);
  CHECK(w3.omega_upper[0] - w3.omega_lower[0] < 1e-3);
}

TEST_CASE("first wedge collapses onto omega = 2") {
  const auto w = trace_wedge(1, {1e-4, 1e-3, 1e-2});
  double prev = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE_FALSE(w.empty(i));
    CHECK(w.contains(i, 2.0));
    const double width = w.omega_upper[i] - w.omega_lower[i];
    CHECK(width > prev);
    CHECK(width == doctest::Approx(w.epsilon[i]).epsilon(0.01));
    prev = width;
  }
}

TEST_CASE("first wedge boundaries follow the asymptotic band") {
  const std::vector<double> eps = {0.02, 0.05, 0.1, 0.2};
  const auto w = trace_wedge(1, eps);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double half = eps[i] / 2.0 + eps[i] * eps[i] / 32.0;
    const double tol = std::max(0.003, eps[i] * eps[i] / 10.0);
    CHECK(std::abs(w.omega_lower[i] - (2.0 - half)) <= tol);
    CHECK(std::abs(w.omega_upper[i] - (2.0 + half)) <= tol);
  }
}

TEST_CASE("first wedge widens monotonically") {
  const auto w = trace_wedge(1, grid(0.025, 0.5, 0.025));
  for (std::size_t i = 0; i < w.epsilon.size(); ++i) {
    REQUIRE_FALSE(w.empty(i));
    CHECK(w.omega_lower[i] <= w.omega_upper[i]);
    if (i > 0) {
      CHECK(w.omega_lower[i] < w.omega_lower[i - 1]);
      CHECK(w.omega_upper[i] > w.omega_upper[i - 1]);
    }
  }
}

TEST_CASE("damping lifts the tip to about 2 gamma") {
  const double gamma = 0.05;
  const auto g = grid(0.02, 0.2, 0.01);
  const auto w = trace_wedge(1, g, gamma);

  // Oracle: dense classify scan in omega for each epsilon.
  double oracle_tip = 0.0;
  for (double e : g) {
    bool any = false;
    for (double om = 1.9; om <= 2.1 && !any; om += 5e-4) any = !classify(om, e, gamma).stable;
    if (any) {
      oracle_tip = e;
      break;
    }
  }
  REQUIRE(oracle_tip > 0.0);
  CHECK(w.tip[1] == doctest::Approx(oracle_tip));
  CHECK(std::abs(w.tip[1] - 2.0 * gamma) <= 0.011);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < w.tip[1]) CHECK(w.empty(i));
  }
}

TEST_CASE("parallel tracing matches serial tracing") {
  const auto g = grid(0.05, 0.4, 0.05);
  WedgeOptions par;
  par.workers = 4;
  const auto a = trace_wedge(2, g);
  const auto b = trace_wedge(2, g, 0.0, 1.0, par);
  CHECK(a.omega_lower == b.omega_lower);
  CHECK(a.omega_upper == b.omega_upper);
}

TEST_CASE("classify agrees with direct integration away from boundaries") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> w(0.8, 2.4), e(0.05, 0.5);
  const auto g1 = trace_wedge(1, grid(0.05, 0.5, 0.005));
  const auto g2 = trace_wedge(2, grid(0.05, 0.5, 0.005));
  auto near_boundary = [&](double omega, double eps) {
    const std::size_t i = static_cast<std::size_t>(std::lround((eps - 0.05) / 0.005));
    for (const auto* wb : {&g1, &g2}) {
      if (wb->empty(i)) continue;
      if (std::abs(omega - wb->omega_lower[i]) < 0.005) return true;
      if (std::abs(omega - wb->omega_upper[i]) < 0.005) return true;
    }
    return false;
  };
  int tested = 0;
  while (tested < 20) {
    const double eps = 0.05 + 0.005 * std::round((e(rng) - 0.05) / 0.005);
    const double omega = w(rng);
    if (near_boundary(omega, eps)) continue;
    ++tested;
    const bool unstable = !classify(omega, eps).stable;
    const double factor = direct_growth_factor(omega, eps);
    INFO("omega=" << omega << " eps=" << eps << " factor=" << factor);
    CHECK(unstable == (factor > 1e3));
  }
}
