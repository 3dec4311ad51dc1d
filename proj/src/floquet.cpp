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

#include "parares/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parares/parallel.hpp"

namespace parares::floquet {

namespace {

// Instability is decided on |tr| - (1 + det), which stays well conditioned
// where the multipliers themselves are only known to sqrt(rounding): near a
// double multiplier at +-1 the margin is (|mu| - 1)^2 to leading order.
constexpr double kMarginTolerance = 1e-11;
constexpr double kDegenerateDiscriminant = 1e-10;

DynamicalState propagate_basis(const Model& m, double u, double udot, double period,
                               const IntegratorConfig& cfg) {
  IntegratorConfig c = cfg;
  c.record = false;
  c.output_interval = 0.0;
  return integrate(m, DynamicalState::scalar(u, udot), period, c).back();
}

}  // namespace

double instability_margin(const FloquetResult& r) {
  return std::abs(r.trace()) - (1.0 + r.determinant());
}

FloquetResult monodromy(const TrapModulation& trap, int channel, const IntegratorConfig& config) {
  if (channel < 0 || channel > 2) throw std::invalid_argument("monodromy: channel must be 0..2");
  Model m;
  m.kind = ModelKind::Mathieu;
  m.trap = trap;
  m.channel = channel;

  IntegratorConfig cfg = config;
  cfg.rel_tol = std::min(cfg.rel_tol, 1e-12);
  cfg.abs_tol = std::min(cfg.abs_tol, 1e-14);

  FloquetResult r;
  r.period = trap.period();
  const auto a = propagate_basis(m, 1.0, 0.0, r.period, cfg);
  const auto b = propagate_basis(m, 0.0, 1.0, r.period, cfg);
  r.monodromy = {a.coordinates[0], b.coordinates[0], a.velocities[0], b.velocities[0]};

  const double tr = r.trace();
  const double det = r.determinant();
  const double disc = 0.25 * tr * tr - det;
  const double margin = instability_margin(r);
  const bool conservative = trap.damping() == 0.0;

  if (disc < 0.0) {
    const double im = std::sqrt(-disc);
    r.multipliers = {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
  } else if (conservative && margin <= kMarginTolerance && disc < kDegenerateDiscriminant) {
    // Double multiplier on the unit circle, split only by rounding.
    r.multipliers = {std::complex<double>(0.5 * tr, 0.0), std::complex<double>(0.5 * tr, 0.0)};
  } else {
    const double root = std::sqrt(disc);
    // Stable form of the two real roots.
    const double big = 0.5 * tr + std::copysign(root, tr);
    const double small = big == 0.0 ? 0.0 : det / big;
    r.multipliers = {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
  }

  const double mod = std::max(r.max_modulus(), std::numeric_limits<double>::min());
  r.growth_exponent = std::log(mod) / r.period;
  r.stable = margin <= kMarginTolerance;
  if (r.stable) r.growth_exponent = std::min(r.growth_exponent, kNumericalZero);
  return r;
}

Verdict classify(double omega, double epsilon, double gamma, double lambda0) {
  const TrapModulation trap({lambda0, lambda0, lambda0}, {epsilon, 0.0, 0.0}, omega, gamma);
  const auto r = monodromy(trap, 0);
  return {r.stable, r.growth_exponent};
}

namespace {

double margin_at(double omega, double eps, double gamma, double lambda0) {
  const TrapModulation trap({lambda0, lambda0, lambda0}, {eps, 0.0, 0.0}, omega, gamma);
  return instability_margin(monodromy(trap, 0));
}

bool unstable_at(double omega, double eps, double gamma, double lambda0) {
  return margin_at(omega, eps, gamma, lambda0) > kMarginTolerance;
}

// Point of maximal instability margin near the nominal tip.
std::pair<double, double> find_interior(double nominal, double eps, double gamma,
                                        double lambda0) {
  const double m0 = margin_at(nominal, eps, gamma, lambda0);
  if (m0 > kMarginTolerance) return {nominal, m0};

  constexpr int kScan = 41;
  const double half = 0.1 * nominal;
  const double step = 2.0 * half / (kScan - 1);
  double best_w = nominal;
  double best = m0;
  for (int i = 0; i < kScan; ++i) {
    const double w = nominal - half + step * i;
    const double m = margin_at(w, eps, gamma, lambda0);
    if (m > best) {
      best = m;
      best_w = w;
    }
  }
  // Golden-section refinement of the smooth margin peak.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_w - step;
  double b = best_w + step;
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = margin_at(x1, eps, gamma, lambda0);
  double f2 = margin_at(x2, eps, gamma, lambda0);
  for (int it = 0; it < 80 && b - a > 1e-11; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = margin_at(x2, eps, gamma, lambda0);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = margin_at(x1, eps, gamma, lambda0);
    }
    if (std::max(f1, f2) > kMarginTolerance) break;
  }
  if (f1 >= f2 && f1 > best) return {x1, f1};
  if (f2 > best) return {x2, f2};
  return {best_w, best};
}

// Walks outward from an unstable point until stability, then bisects.
double boundary(double inside, double direction, double eps, double gamma, double lambda0,
                double tol, double limit) {
  double in = inside;
  double step = std::max(tol, 1e-6 * inside);
  double out = inside + direction * step;
  while (unstable_at(out, eps, gamma, lambda0)) {
    in = out;
    step *= 2.0;
    if (step > limit) return out;
    out = inside + direction * step;
    if (out <= 0.0) return in;
  }
  while (std::abs(out - in) > tol) {
    const double mid = 0.5 * (in + out);
    (unstable_at(mid, eps, gamma, lambda0) ? in : out) = mid;
  }
  return 0.5 * (in + out);
}

}  // namespace

WedgeBoundary trace_wedge(int tip_index, const std::vector<double>& epsilon_grid, double gamma,
                          double lambda0, const WedgeOptions& options) {
  if (tip_index < 1 || tip_index > 3) throw std::invalid_argument("trace_wedge: n must be 1..3");
  if (epsilon_grid.empty()) throw std::invalid_argument("trace_wedge: empty epsilon grid");
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    if (epsilon_grid[i] < 0.0 || epsilon_grid[i] > 0.8) {
      throw std::invalid_argument("trace_wedge: epsilon must lie in [0, 0.8]");
    }
    if (i > 0 && !(epsilon_grid[i] > epsilon_grid[i - 1])) {
      throw std::invalid_argument("trace_wedge: epsilon grid must be increasing");
    }
  }
  if (!(lambda0 > 0.0) || gamma < 0.0) throw std::invalid_argument("trace_wedge: bad trap");

  WedgeBoundary out;
  out.tip_index = tip_index;
  out.nominal_tip = 2.0 * lambda0 / tip_index;
  out.epsilon = epsilon_grid;
  const std::size_t n = epsilon_grid.size();
  out.omega_lower.assign(n, std::numeric_limits<double>::infinity());
  out.omega_upper.assign(n, -std::numeric_limits<double>::infinity());

  const double nominal = out.nominal_tip;
  parallel_for(n, options.workers, [&](std::size_t i) {
    const double eps = epsilon_grid[i];
    if (eps == 0.0) return;
    const auto [center, margin] = find_interior(nominal, eps, gamma, lambda0);
    if (margin <= kMarginTolerance) return;
    const double limit = 0.5 * nominal;
    out.omega_lower[i] =
        boundary(center, -1.0, eps, gamma, lambda0, options.omega_tolerance, limit);
    out.omega_upper[i] =
        boundary(center, +1.0, eps, gamma, lambda0, options.omega_tolerance, limit);
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (!out.empty(i)) {
      out.tip = {0.5 * (out.omega_lower[i] + out.omega_upper[i]), epsilon_grid[i]};
      break;
    }
  }
  return out;
}

}  // namespace parares::floquet
