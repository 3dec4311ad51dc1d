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
#include <set>

#include "doctest.h"
#include "parares/floquet.hpp"
#include "parares/sweep.hpp"

using namespace parares;
using namespace parares::sweep;

namespace {

PointSetup radial(double p, double gamma = 0.0) {
  PointSetup s;
  s.model.kind = ModelKind::Radial;
  s.model.params = ModelParams(p);
  s.model.trap = TrapModulation::stationary({1.0, 1.0, 1.0}, gamma);
  return s;
}

PointSetup linear(ModelKind kind) {
  PointSetup s;
  s.model.kind = kind;
  return s;
}

bool resonant(const PointVerdict& v) { return v.verdict == Verdict::Resonant; }

}  // namespace

TEST_CASE("classify_point examples") {
  auto s = radial(9.2);
  const auto dflt = classify_point(2.04, 0.15, s);
  CHECK(resonant(dflt));
  CHECK(dflt.fitted_exponent > s.criteria.q_threshold);

  s.initial = DynamicalState::scalar(1.6, 0.0);
  const auto lit = classify_point(2.04, 0.15, s);
  CHECK(resonant(lit));
  CHECK(lit.r_squared > 0.9);

  for (double w : {0.7, 1.6, 2.0, 2.04, 3.5}) {
    CHECK(classify_point(w, 0.0, radial(9.2)).verdict == Verdict::Stable);
  }
  CHECK_FALSE(resonant(classify_point(2.0, 0.10, radial(9.2, 0.15))));
}

TEST_CASE("classify_point validates its inputs") {
  auto s = radial(9.2);
  s.criteria.tau_max = 20.0;
  CHECK_THROWS_AS(classify_point(2.0, 0.1, s), std::invalid_argument);
  s = radial(9.2);
  s.criteria.r2_min = 2.0;
  CHECK_THROWS_AS(classify_point(2.0, 0.1, s), std::invalid_argument);
}

TEST_CASE("damped runs settle on a limit cycle") {
  const auto v = classify_point(1.9, 0.08, radial(9.2, 0.15));
  CHECK(v.verdict == Verdict::LimitCycle);
  REQUIRE(v.cycle_state.has_value());
  CHECK(v.cycle_state->coordinates[0] > 0.0);
}

TEST_CASE("resonance map of the radial model forms an upward wedge") {
  SweepGrid g;
  g.omega = {1.8, 2.2, 0.02};
  g.epsilon = {0.02, 0.3, 0.02};
  g.setup = radial(9.2);
  const auto map = resonance_map(g);
  REQUIRE(map.cells.size() == map.omega.size() * map.epsilon.size());
  CHECK(map.model == "radial");
  CHECK(map.interaction == 9.2);

  std::vector<int> per_row(map.epsilon.size(), 0);
  for (std::size_t r = 0; r < map.epsilon.size(); ++r) {
    for (std::size_t c = 0; c < map.omega.size(); ++c) {
      CHECK(map.at(r, c).omega == map.omega[c]);
      CHECK(map.at(r, c).epsilon == map.epsilon[r]);
      if (resonant(map.at(r, c))) {
        ++per_row[r];
        CHECK(std::abs(map.omega[c] - 2.0) < 0.2);
      }
    }
  }
  // Rows below the nonlinear threshold are free of resonances.
  for (std::size_t r = 0; r < map.epsilon.size(); ++r) {
    if (map.epsilon[r] < 0.09) CHECK(per_row[r] == 0);
  }
  CHECK(per_row.back() >= 3);
  int first = -1;
  for (std::size_t r = 0; r < per_row.size(); ++r) {
    if (per_row[r] > 0) {
      first = static_cast<int>(r);
      break;
    }
  }
  REQUIRE(first >= 0);
  CHECK(per_row.back() > per_row[first]);
}

TEST_CASE("Mathieu resonance map matches the Floquet wedge") {
  SweepGrid g;
  g.omega = {1.8, 2.2, 0.02};
  g.epsilon = {0.02, 0.3, 0.02};
  g.setup = linear(ModelKind::Mathieu);
  const auto map = resonance_map(g);
  const auto wedge = floquet::trace_wedge(1, map.epsilon);

  int compared = 0, agree = 0;
  for (std::size_t r = 0; r < map.epsilon.size(); ++r) {
    for (std::size_t c = 0; c < map.omega.size(); ++c) {
      const double w = map.omega[c];
      const bool inside = wedge.contains(r, w);
      const double dist = std::min(std::abs(w - wedge.omega_lower[r]),
                                   std::abs(w - wedge.omega_upper[r]));
      // Within one cell of the Floquet boundary either verdict is acceptable.
      if (dist <= g.omega.step) continue;
      ++compared;
      if (resonant(map.at(r, c)) == inside) ++agree;
    }
  }
  REQUIRE(compared > 100);
  CHECK(static_cast<double>(agree) >= 0.98 * compared);
}

TEST_CASE("center-of-mass map equals the Mathieu map") {
  SweepGrid g;
  g.omega = {1.8, 2.2, 0.04};
  g.epsilon = {0.02, 0.3, 0.04};
  g.setup = linear(ModelKind::Mathieu);
  const auto a = resonance_map(g);
  g.setup = linear(ModelKind::CenterOfMass);
  const auto b = resonance_map(g);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].verdict == b.cells[i].verdict);
    CHECK(a.cells[i].fitted_exponent == b.cells[i].fitted_exponent);
  }
}

TEST_CASE("parallel and resumed maps are identical to the serial map") {
  SweepGrid g;
  g.omega = {1.9, 2.1, 0.05};
  g.epsilon = {0.1, 0.2, 0.05};
  g.setup = radial(9.2);
  const auto serial = resonance_map(g);

  MapOptions par;
  par.workers = 4;
  const auto parallel = resonance_map(g, par);

  MapOptions resume;
  resume.completed.resize(serial.cells.size());
  for (std::size_t i = 0; i < serial.cells.size(); i += 2) resume.completed[i] = serial.cells[i];
  std::set<std::size_t> computed;
  resume.on_cell = [&](std::size_t i, const PointVerdict&) { computed.insert(i); };
  const auto resumed = resonance_map(g, resume);

  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].verdict == parallel.cells[i].verdict);
    CHECK(serial.cells[i].fitted_exponent == parallel.cells[i].fitted_exponent);
    CHECK(serial.cells[i].max_amplitude == resumed.cells[i].max_amplitude);
    CHECK(computed.count(i) == (i % 2 == 1 ? 1u : 0u));
  }

  MapOptions bad;
  bad.completed.resize(3);
  CHECK_THROWS_AS(resonance_map(g, bad), std::invalid_argument);
}

TEST_CASE("threshold scan") {
  ThresholdOptions opt;
  opt.omega_step = 0.01;
  const std::vector<double> grid = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};

  const auto undamped = threshold_scan(grid, radial(9.2), opt);
  const auto damped = threshold_scan(grid, radial(9.2, 0.15), opt);
  REQUIRE(undamped.has_value());
  REQUIRE(damped.has_value());
  CHECK(undamped->epsilon_min > 0.05);
  CHECK(damped->epsilon_min > undamped->epsilon_min);
  CHECK(std::abs(undamped->omega - 2.0) < 0.1);

  // The linear tip has no threshold beyond the growth-detection floor
  // q = eps / 4 > q_threshold.
  const auto lin = threshold_scan({0.01, 0.02, 0.03, 0.04, 0.05}, linear(ModelKind::Mathieu), opt);
  REQUIRE(lin.has_value());
  CHECK(lin->epsilon_min <= 4.0 * 0.005 + 0.01);

  CHECK_FALSE(threshold_scan({0.01}, radial(9.2), opt).has_value());
  CHECK_THROWS_AS(threshold_scan({0.2, 0.1}, radial(9.2), opt), std::invalid_argument);
}

TEST_CASE("tips of the nonlinear wedge are independent of the interaction") {
  ThresholdOptions opt;
  opt.omega_step = 0.002;
  std::vector<double> grid;
  for (double e = 0.06; e <= 0.2001; e += 0.02) grid.push_back(e);
  std::vector<double> tips;
  for (double p : {9.2, 184.0}) {
    const auto t = threshold_scan(grid, radial(p), opt);
    REQUIRE(t.has_value());
    tips.push_back(t->omega);
  }
  CHECK(std::abs(tips[0] - tips[1]) <= 0.005 * tips[0]);

  auto cube = radial(9.2);
  cube.model.singularity = Singularity::InverseCube;
  const auto t = threshold_scan({0.02, 0.04, 0.06}, cube, opt);
  REQUIRE(t.has_value());
  CHECK(std::abs(t->omega - 2.0) <= 0.005 * 2.0);
}

TEST_CASE("anisotropic 3d widths") {
  PointSetup s;
  s.model.kind = ModelKind::Variational3D;
  s.model.params = ModelParams(9.2);
  s.model.trap = TrapModulation::stationary({1.0, 1.0, std::sqrt(8.0)});
  s.drive_pattern = {1.0, 1.0, 0.0};
  for (double w : {1.5, 2.0, 2.04, 3.0}) {
    s.model.channel = 0;
    const auto x = classify_point(w, 0.2, s);
    s.model.channel = 1;
    const auto y = classify_point(w, 0.2, s);
    CHECK(x.verdict == y.verdict);
    CHECK(x.fitted_exponent == doctest::Approx(y.fitted_exponent).epsilon(1e-9));
  }
  // Modulating the axial trap opens a third family near 2 lambda_z.
  s.drive_pattern = {1.0, 1.0, 1.0};
  s.model.channel = 2;
  const double lz2 = 2.0 * std::sqrt(8.0);
  CHECK(resonant(classify_point(lz2, 0.2, s)));
  CHECK_FALSE(resonant(classify_point(lz2 + 0.6, 0.2, s)));
  CHECK_FALSE(resonant(classify_point(lz2 - 0.6, 0.2, s)));
}

TEST_CASE("limit cycle examples") {
  const auto s = radial(9.2, 0.15);
  const auto flat = find_limit_cycle(1.9, 0.0, s);
  REQUIRE(flat.converged());
  CHECK(flat.amplitude < 1e-6);
  CHECK(flat.fixed_point.coordinates[0] ==
        doctest::Approx(equilibrium_width(ModelParams(9.2), 1.0)).epsilon(1e-7));

  const auto c = find_limit_cycle(1.9, 0.08, s);
  REQUIRE(c.converged());
  CHECK(c.seed_mismatch < 1e-6);
  CHECK(c.period == doctest::Approx(2.0 * std::numbers::pi / 1.9).epsilon(1e-15));
  CHECK(c.amplitude > 0.0);

  double prev = c.amplitude * 0.0;
  for (double e : {0.02, 0.04, 0.06}) {
    const auto r = find_limit_cycle(1.9, e, s);
    REQUIRE(r.converged());
    CHECK(r.amplitude > prev);
    prev = r.amplitude;
  }

  CHECK_THROWS_AS(find_limit_cycle(1.9, 0.08, radial(9.2)), std::invalid_argument);
  const auto res = find_limit_cycle(2.04, 0.5, radial(9.2, 0.01));
  CHECK(res.status == LimitCycle::Status::Diverged);
}

TEST_CASE("verdict names") {
  CHECK(to_string(Verdict::Resonant) == "resonant");
  CHECK(to_string(Verdict::LimitCycle) == "limit_cycle");
  CHECK(to_string(LimitCycle::Status::SeedMismatch) == "seed_mismatch");
  CHECK(Range{0.0, 0.1, 0.05}.values().size() == 3);
  CHECK_THROWS_AS((Range{0.0, 1.0, 0.0}.values()), std::invalid_argument);
}
