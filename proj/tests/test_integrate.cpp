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
#include <cstring>
#include <numbers>
#include <random>
#include <thread>

#include "doctest.h"
#include "parares/integrate.hpp"

using namespace parares;
using std::numbers::pi;

namespace {

Model make(ModelKind kind, double p, double eps, double omega, double gamma = 0.0) {
  Model m;
  m.kind = kind;
  m.params = ModelParams(p);
  m.trap = TrapModulation::isotropic(eps, omega, gamma);
  return m;
}

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-14;
  return c;
}

// Times where the first coordinate's velocity turns from + to -.
std::vector<double> maxima_times(const Model& m, const DynamicalState& s0, double tau_end) {
  std::vector<double> out;
  OdeSolver solver(m, tight());
  solver.propagate(s0, tau_end, [&](const StepView& v) {
    if (v.component(1, v.t0()) > 0.0 && v.component(1, v.t1()) <= 0.0) {
      double lo = v.t0(), hi = v.t1();
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (v.component(1, mid) > 0.0 ? lo : hi) = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    return true;
  });
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  IntegratorConfig c;
  CHECK_NOTHROW(c.validate());
  c.h_min = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.rel_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.width_floor = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("harmonic oscillator returns after one period") {
  const auto m = make(ModelKind::Mathieu, 0.0, 0.0, 0.0);
  const auto traj = integrate(m, DynamicalState::scalar(1.0, 0.0), 2.0 * pi, tight());
  CHECK(traj.back().time == 2.0 * pi);
  CHECK(std::abs(traj.back().coordinates[0] - 1.0) < 1e-8);
  CHECK(std::abs(traj.back().velocities[0]) < 1e-8);
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    CHECK(traj.samples[i].time > traj.samples[i - 1].time);
  }
}

TEST_CASE("radial equilibrium is stationary") {
  const auto m = make(ModelKind::Radial, 9.2, 0.0, 0.0);
  const double v = equilibrium_width(ModelParams(9.2), 1.0);
  IntegratorConfig c = tight();
  c.output_interval = 0.05;
  const auto traj = integrate(m, DynamicalState::scalar(v, 0.0), 50.0, c);
  CHECK(traj.dense);
  double worst = 0.0;
  for (const auto& s : traj.samples) worst = std::max(worst, std::abs(s.coordinates[0] - v));
  CHECK(worst < 1e-6);
  CHECK(traj.samples.size() == 1001);
}

TEST_CASE("resonant drive grows the width envelope") {
  // P = 9.2, omega = 2.04, eps = 0.15 from (1.6, 0)
  const auto m = make(ModelKind::Radial, 9.2, 0.15, 2.04);
  IntegratorConfig c;
  c.rel_tol = 1e-10;
  c.output_interval = 0.01;
  const auto traj = integrate(m, DynamicalState::scalar(1.6, 0.0), 400.0, c);
  double early = 0.0, late = 0.0;
  for (const auto& s : traj.samples) {
    (s.time < 50.0 ? early : late) = std::max(s.time < 50.0 ? early : late, s.coordinates[0]);
  }
  CHECK(late > 10.0 * early);
}

TEST_CASE("non-positive initial width is rejected") {
  const auto m = make(ModelKind::Radial, 9.2, 0.0, 0.0);
  CHECK_THROWS_AS(integrate(m, DynamicalState::scalar(0.0, 1.0), 1.0), DomainError);
  CHECK_THROWS_AS(integrate(m, DynamicalState::scalar(1.0, 0.0, 2.0), 1.0),
                  std::invalid_argument);
}

TEST_CASE("step budget exhaustion reports the partial trajectory") {
  const auto m = make(ModelKind::Mathieu, 0.0, 0.1, 2.0);
  IntegratorConfig c;
  c.max_steps = 10;
  try {
    integrate(m, DynamicalState::scalar(1.0, 0.0), 100.0, c);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(!e.partial().samples.empty());
    CHECK(e.partial().back().time > 0.0);
    CHECK(e.partial().back().time < 100.0);
  }
}

TEST_CASE("energy conservation for the unforced radial model") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> vd(0.3, 5.0), pd(-3.0, 3.0);
  const auto m = make(ModelKind::Radial, 9.2, 0.0, 0.0);
  IntegratorConfig c;
  c.rel_tol = 1e-10;
  c.abs_tol = 1e-12;
  c.record = false;
  for (int i = 0; i < 20; ++i) {
    const auto s0 = DynamicalState::scalar(vd(rng), pd(rng));
    const auto traj = integrate(m, s0, 100.0, c);
    REQUIRE(traj.diagnostics.max_energy_drift.has_value());
    CHECK(*traj.diagnostics.max_energy_drift < 1e-8);
  }
}

TEST_CASE("global error is proportional to the tolerance") {
  const auto m = make(ModelKind::Mathieu, 0.0, 0.0, 0.0);
  std::vector<double> logtol, logerr;
  for (double tol : {1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12}) {
    IntegratorConfig c;
    c.rel_tol = tol;
    c.abs_tol = tol;
    c.record = false;
    const auto s = integrate(m, DynamicalState::scalar(1.0, 0.0), 20.0, c).back();
    const double err = std::hypot(s.coordinates[0] - std::cos(20.0), s.velocities[0] + std::sin(20.0));
    logtol.push_back(std::log10(tol));
    logerr.push_back(std::log10(err));
  }
  const double n = static_cast<double>(logtol.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < logtol.size(); ++i) {
    sx += logtol[i];
    sy += logerr[i];
    sxx += logtol[i] * logtol[i];
    sxy += logtol[i] * logerr[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("time reversal of the unforced radial flow") {
  const auto m = make(ModelKind::Radial, 9.2, 0.0, 0.0);
  const auto s0 = DynamicalState::scalar(2.7, -0.4);
  const auto fwd = integrate(m, s0, 10.0, tight()).back();
  auto back_start = DynamicalState::scalar(fwd.coordinates[0], -fwd.velocities[0]);
  const auto back = integrate(m, back_start, 10.0, tight()).back();
  CHECK(std::abs(back.coordinates[0] - s0.coordinates[0]) < 1e-6);
  CHECK(std::abs(-back.velocities[0] - s0.velocities[0]) < 1e-6);
}

// The period grows with amplitude from 2 pi / omega_lin towards pi: the
// frequency relaxes from the linearized value to the bare trap value 2.
TEST_CASE("large-amplitude period approaches pi") {
  const auto m = make(ModelKind::Radial, 9.2, 0.0, 0.0);
  std::vector<double> periods;
  for (double v0 : {2.5, 4.0, 8.0, 25.0}) {
    const auto t = maxima_times(m, DynamicalState::scalar(v0, 0.0), 20.0);
    REQUIRE(t.size() >= 2);
    periods.push_back(t[1] - t[0]);
  }
  for (std::size_t i = 1; i < periods.size(); ++i) CHECK(periods[i] > periods[i - 1]);
  const double small = 2.0 * pi / linearized_frequency(ModelParams(9.2), 1.0);
  CHECK(periods.front() > small);
  CHECK(periods.back() < pi);
  CHECK(std::abs(periods.back() - pi) < 0.05);
}

TEST_CASE("symmetric 3d widths reproduce the radial model") {
  Model m3;
  m3.kind = ModelKind::Variational3D;
  m3.params = ModelParams(9.2);
  m3.trap = TrapModulation::isotropic(0.15, 2.04);
  const auto m1 = make(ModelKind::Radial, 9.2, 0.15, 2.04);
  IntegratorConfig c = tight();
  c.output_interval = 0.1;
  const auto t3 = integrate(m3, DynamicalState::vector3({1.6, 1.6, 1.6}, {0.0, 0.0, 0.0}), 40.0, c);
  const auto t1 = integrate(m1, DynamicalState::scalar(1.6, 0.0), 40.0, c);
  REQUIRE(t3.samples.size() == t1.samples.size());
  double asym = 0.0, dev = 0.0;
  for (std::size_t i = 0; i < t3.samples.size(); ++i) {
    const auto& q = t3.samples[i].coordinates;
    asym = std::max({asym, std::abs(q[0] - q[1]), std::abs(q[1] - q[2])});
    dev = std::max(dev, std::abs(q[0] - t1.samples[i].coordinates[0]));
  }
  CHECK(asym < 1e-10);
  CHECK(dev < 1e-8);
}

TEST_CASE("impact oscillator examples") {
  Model m;
  m.kind = ModelKind::ImpactOscillator;
  SUBCASE("launch from the wall") {
    const auto traj = integrate_with_bounce(m, DynamicalState::scalar(0.0, 1.0), 7.0, tight());
    REQUIRE(traj.event_times.size() == 2);
    CHECK(std::abs(traj.event_times[0] - pi) < 1e-9);
    CHECK(std::abs(traj.event_times[1] - 2.0 * pi) < 1e-9);
    CHECK(std::abs(traj.back().coordinates[0] - std::abs(std::sin(7.0))) < 1e-8);
  }
  SUBCASE("release from rest") {
    IntegratorConfig c = tight();
    c.output_interval = 0.01;
    const auto traj = integrate_with_bounce(m, DynamicalState::scalar(1.0, 0.0), 6.0, c);
    REQUIRE(traj.event_times.size() == 2);
    CHECK(std::abs(traj.event_times[0] - pi / 2) < 1e-9);
    CHECK(std::abs(traj.event_times[1] - 3 * pi / 2) < 1e-9);
    for (const auto& s : traj.samples) {
      CHECK(s.coordinates[0] >= 0.0);
      CHECK(std::abs(s.coordinates[0] - std::abs(std::cos(s.time))) < 1e-8);
    }
  }
  SUBCASE("invalid start") {
    CHECK_THROWS_AS(integrate_with_bounce(m, DynamicalState::scalar(0.0, -1.0), 1.0), DomainError);
    CHECK_THROWS_AS(integrate_with_bounce(m, DynamicalState::scalar(-0.1, 0.0), 1.0), DomainError);
  }
}

TEST_CASE("impact events coincide with Mathieu zeros") {
  Model impact = make(ModelKind::ImpactOscillator, 0.0, 0.15, 2.04);
  Model mathieu = make(ModelKind::Mathieu, 0.0, 0.15, 2.04);
  const auto bounce = integrate_with_bounce(impact, DynamicalState::scalar(1.6, 0.0), 60.0, tight());

  // Independent route: sign changes of the unconstrained solution.
  std::vector<double> zeros;
  OdeSolver solver(mathieu, tight());
  solver.propagate(DynamicalState::scalar(1.6, 0.0), 60.0, [&](const StepView& v) {
    const double a = v.component(0, v.t0()), b = v.component(0, v.t1());
    if ((a > 0.0) != (b > 0.0)) {
      double lo = v.t0(), hi = v.t1();
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (((v.component(0, mid) > 0.0) == (a > 0.0)) ? lo : hi) = mid;
      }
      zeros.push_back(0.5 * (lo + hi));
    }
    return true;
  });
  REQUIRE(bounce.event_times.size() == zeros.size());
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    CHECK(std::abs(bounce.event_times[i] - zeros[i]) < 1e-6);
  }
}

TEST_CASE("folded Mathieu trajectories equal impact trajectories") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> wd(0.5, 4.0), ed(0.0, 0.3), vd(0.2, 2.0), pd(-1.0, 1.0);
  for (int draw = 0; draw < 10; ++draw) {
    const double w = wd(rng), e = ed(rng);
    const auto s0 = DynamicalState::scalar(vd(rng), pd(rng));
    IntegratorConfig c = tight();
    c.output_interval = 0.02;
    const auto u = integrate(make(ModelKind::Mathieu, 0.0, e, w), s0, 30.0, c);
    const auto v = integrate_with_bounce(make(ModelKind::ImpactOscillator, 0.0, e, w), s0, 30.0, c);
    REQUIRE(u.samples.size() == v.samples.size());
    double worst = 0.0;
    long sign_changes = 0;
    for (std::size_t i = 0; i < u.samples.size(); ++i) {
      worst = std::max(worst, std::abs(fold_to_width(u.samples[i].coordinates[0]) -
                                       v.samples[i].coordinates[0]));
      if (i > 0 && (u.samples[i].coordinates[0] > 0) != (u.samples[i - 1].coordinates[0] > 0)) {
        ++sign_changes;
      }
    }
    CHECK(worst < 1e-6);
    // bounce parity, on the sampled grid
    CHECK(static_cast<long>(v.event_times.size()) == sign_changes);
  }
}

TEST_CASE("stroboscopic map") {
  SUBCASE("unforced samples equal the flow") {
    Model m = make(ModelKind::Radial, 9.2, 0.0, 1.7);
    const auto s0 = DynamicalState::scalar(2.2, 0.3);
    const auto samples = stroboscopic_map(m, s0, 5, tight());
    REQUIRE(samples.size() == 6);
    const double period = 2.0 * pi / 1.7;
    for (int n = 0; n <= 5; ++n) {
      CHECK(samples[n].time == doctest::Approx(n * period).epsilon(1e-14));
      if (n == 0) continue;
      const auto ref = integrate(m, s0, n * period, tight()).back();
      CHECK(std::abs(samples[n].coordinates[0] - ref.coordinates[0]) < 1e-8);
      CHECK(std::abs(samples[n].velocities[0] - ref.velocities[0]) < 1e-8);
    }
  }
  SUBCASE("damped stable Mathieu decays") {
    Model m = make(ModelKind::Mathieu, 0.0, 0.05, 3.0, 0.3);
    const auto samples = stroboscopic_map(m, DynamicalState::scalar(1.0, 0.0), 30, tight());
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const auto norm = [](const DynamicalState& s) {
        return std::hypot(s.coordinates[0], s.velocities[0]);
      };
      CHECK(norm(samples[i]) < norm(samples[i - 1]));
    }
    CHECK(std::hypot(samples.back().coordinates[0], samples.back().velocities[0]) < 1e-3);
  }
  SUBCASE("damped radial model settles on a synchronized cycle") {
    Model m = make(ModelKind::Radial, 9.2, 0.05, 1.8, 0.15);
    const double v = equilibrium_width(ModelParams(9.2), 1.0);
    const auto samples = stroboscopic_map(m, DynamicalState::scalar(1.01 * v, 0.0), 200, tight());
    const auto& a = samples[samples.size() - 2];
    const auto& b = samples.back();
    CHECK(std::abs(a.coordinates[0] - b.coordinates[0]) < 1e-8);
    CHECK(std::abs(a.velocities[0] - b.velocities[0]) < 1e-8);
  }
}

TEST_CASE("integration is deterministic across threads") {
  const auto m = make(ModelKind::Radial, 9.2, 0.15, 2.04);
  IntegratorConfig c;
  c.output_interval = 0.5;
  const auto ref = integrate(m, DynamicalState::scalar(1.6, 0.0), 150.0, c);
  std::vector<Trajectory> results(4);
  std::vector<std::thread> pool;
  for (int i = 0; i < 4; ++i) {
    pool.emplace_back([&, i] { results[i] = integrate(m, DynamicalState::scalar(1.6, 0.0), 150.0, c); });
  }
  for (auto& t : pool) t.join();
  for (const auto& r : results) {
    REQUIRE(r.samples.size() == ref.samples.size());
    CHECK(std::memcmp(r.samples.data(), ref.samples.data(),
                      ref.samples.size() * sizeof(DynamicalState)) == 0);
  }
}

TEST_CASE("implicit fallback engages when explicit steps keep failing") {
  // A tiny switch threshold forces the SDIRK regime on a hard bounce.
  const auto m = make(ModelKind::Radial, 9.2, 0.0, 0.0);
  IntegratorConfig c;
  c.rel_tol = 1e-8;
  c.stiff_switch_threshold = 1;
  c.h_init = 0.25;
  const auto traj = integrate(m, DynamicalState::scalar(12.0, 0.0), 10.0, c);
  CHECK(traj.diagnostics.regime_switches > 0);
  CHECK(traj.diagnostics.stiff_steps > 0);
  CHECK(traj.diagnostics.stiff_fraction() > 0.0);
  REQUIRE(traj.diagnostics.max_energy_drift.has_value());
  CHECK(*traj.diagnostics.max_energy_drift < 1e-3);
  for (const auto& s : traj.samples) CHECK(s.coordinates[0] >= c.width_floor);
}
