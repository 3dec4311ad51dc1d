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

#include "parares/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "parares/parallel.hpp"
#include "parares/version.hpp"

namespace parares::sweep {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Resonant: return "resonant";
    case Verdict::LimitCycle: return "limit_cycle";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(LimitCycle::Status s) {
  switch (s) {
    case LimitCycle::Status::Converged: return "converged";
    case LimitCycle::Status::NotConverged: return "not_converged";
    case LimitCycle::Status::Diverged: return "diverged";
    case LimitCycle::Status::SeedMismatch: return "seed_mismatch";
  }
  return "not_converged";
}

void GrowthCriteria::validate() const {
  if (!(tau_max > 0.0)) throw std::invalid_argument("criteria: tau_max must be > 0");
  if (!(q_threshold >= 0.0)) throw std::invalid_argument("criteria: q_threshold must be >= 0");
  if (!(r2_min >= 0.0 && r2_min <= 1.0)) {
    throw std::invalid_argument("criteria: r2_min must lie in [0, 1]");
  }
  if (!(escape_factor > 1.0)) throw std::invalid_argument("criteria: escape_factor must be > 1");
  if (!(cycle_tolerance > 0.0)) {
    throw std::invalid_argument("criteria: cycle_tolerance must be > 0");
  }
  if (!(seed_offset >= 0.0 && seed_offset < 1.0)) {
    throw std::invalid_argument("criteria: seed_offset must lie in [0, 1)");
  }
  if (samples_per_period < 4) {
    throw std::invalid_argument("criteria: samples_per_period must be >= 4");
  }
}

Model PointSetup::at(double omega, double epsilon) const {
  Model m = model;
  std::array<double, 3> amps{};
  for (int i = 0; i < 3; ++i) amps[i] = epsilon * drive_pattern[i];
  m.trap = model.trap.with_drive(amps, omega);
  return m;
}

namespace {

int observed(const Model& m) { return m.kind == ModelKind::Variational3D ? m.channel : 0; }

std::array<double, 3> equilibria(const Model& m) {
  const auto& base = m.trap.base_strengths();
  if (m.kind == ModelKind::Variational3D) return equilibrium_widths_3d(m.params, base);
  const double v = equilibrium_width(m.params, base[m.channel], m.singularity);
  return {v, v, v};
}

double sup_distance(const DynamicalState& a, const DynamicalState& b) {
  double d = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    d = std::max(d, std::abs(a.coordinates[i] - b.coordinates[i]));
    d = std::max(d, std::abs(a.velocities[i] - b.velocities[i]));
  }
  return d;
}

struct Fit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double r2 = 0.0;
};

Fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  Fit f;
  const std::size_t n = x.size();
  if (n < 3) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  const double ssr = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 0.0;
  f.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return f;
}

}  // namespace

double PointSetup::reference() const {
  if (!is_width_model(model.kind) || model.kind == ModelKind::ImpactOscillator) return 0.0;
  return equilibria(model)[observed(model)];
}

DynamicalState PointSetup::initial_state() const {
  if (initial) return *initial;
  if (model.kind == ModelKind::Variational3D) {
    auto v = equilibria(model);
    for (auto& x : v) x *= 1.0 + criteria.seed_offset;
    return DynamicalState::vector3(v, {0.0, 0.0, 0.0});
  }
  if (model.kind == ModelKind::Radial) {
    return DynamicalState::scalar(reference() * (1.0 + criteria.seed_offset), 0.0);
  }
  return DynamicalState::scalar(1.0, 0.0);
}

double PointSetup::scale() const {
  const double ref = reference();
  if (ref > 0.0) return ref;
  const auto s = initial_state();
  const int c = observed(model);
  const double amp = std::hypot(s.coordinates[c], s.velocities[c]);
  return amp > 0.0 ? amp : 1.0;
}

PointVerdict classify_point(double omega, double epsilon, const PointSetup& setup) {
  setup.criteria.validate();
  const auto& crit = setup.criteria;
  PointVerdict out;
  out.omega = omega;
  out.epsilon = epsilon;

  const Model model = setup.at(omega, epsilon);
  const double period = model.trap.period();
  if (crit.tau_max < 10.0 * period) {
    throw std::invalid_argument("classify_point: tau_max must cover at least 10 drive periods");
  }
  const int channel = observed(model);
  const double ref = setup.reference();
  const double escape = crit.escape_factor * setup.scale();
  const DynamicalState s0 = setup.initial_state();
  const double t0 = s0.time;
  const long total = static_cast<long>(std::floor(crit.tau_max / period + 1e-9));

  IntegratorConfig cfg = setup.integrator;
  cfg.record = true;
  cfg.output_interval = period / crit.samples_per_period;

  std::vector<double> amp(static_cast<std::size_t>(total), 0.0);
  std::vector<DynamicalState> strobes{s0};
  long filled = 0;
  auto absorb = [&](const std::vector<DynamicalState>& samples) {
    for (const auto& s : samples) {
      const double phase = (s.time - t0) / period;
      if (phase <= 1e-9) continue;
      const long n = static_cast<long>(std::ceil(phase - 1e-9)) - 1;
      if (n >= total) continue;
      const double a = std::abs(s.coordinates[channel] - ref);
      amp[n] = std::max(amp[n], a);
      out.max_amplitude = std::max(out.max_amplitude, a);
      if (std::abs(phase - std::round(phase)) < 1e-9) {
        strobes.push_back(s);
        filled = std::max(filled, n + 1);
      }
    }
  };

  constexpr long kChunk = 10;
  DynamicalState state = s0;
  bool failed = false;
  for (long start = 0; start < total && !out.escaped; start += kChunk) {
    const long stop = std::min(total, start + kChunk);
    const double tau_end = t0 + period * static_cast<double>(stop);
    try {
      const auto traj = integrate(model, state, tau_end, cfg);
      absorb(traj.samples);
      state = traj.back();
    } catch (const IntegrationError& e) {
      absorb(e.partial().samples);
      out.diagnostic = e.what();
      failed = true;
    } catch (const DomainError& e) {
      out.diagnostic = e.what();
      failed = true;
    }
    out.escaped = out.max_amplitude > escape;
    if (failed) break;
  }
  out.periods = static_cast<int>(filled);

  if (out.escaped) {
    long last = 0;
    for (long n = 0; n < total; ++n) {
      if (amp[n] > 0.0) last = n;
    }
    std::vector<double> x, y;
    for (long n = 0; n <= last; ++n) {
      x.push_back(t0 + (static_cast<double>(n) + 0.5) * period);
      y.push_back(std::log(std::max(amp[n], std::numeric_limits<double>::min())));
    }
    const Fit f = fit_line(x, y);
    out.fitted_exponent = f.slope;
    out.exponent_stderr = f.stderr_;
    out.r_squared = f.r2;
    out.verdict = Verdict::Resonant;
    return out;
  }
  if (failed && filled < 10) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }

  std::vector<double> x, y;
  for (long n = filled / 2; n < filled; ++n) {
    x.push_back(t0 + (static_cast<double>(n) + 0.5) * period);
    y.push_back(std::log(std::max(amp[n], std::numeric_limits<double>::min())));
  }
  const Fit f = fit_line(x, y);
  out.fitted_exponent = f.slope;
  out.exponent_stderr = f.stderr_;
  out.r_squared = f.r2;

  const bool cycle = model.trap.damping() > 0.0 && strobes.size() >= 2 &&
                     sup_distance(strobes[strobes.size() - 1], strobes[strobes.size() - 2]) <
                         crit.cycle_tolerance;
  if (f.slope > crit.q_threshold && f.r2 > crit.r2_min) {
    out.verdict = Verdict::Resonant;
  } else if (cycle) {
    out.verdict = Verdict::LimitCycle;
    out.cycle_state = strobes.back();
  } else if (f.slope <= crit.q_threshold) {
    out.verdict = Verdict::Stable;
  } else {
    out.verdict = Verdict::Inconclusive;
    if (out.diagnostic.empty()) out.diagnostic = "growth without a clean exponential fit";
  }
  return out;
}

PointVerdict classify_series(double omega, double epsilon, const std::vector<double>& times,
                             const std::vector<double>& values, double reference,
                             double escape_level, bool escaped, const GrowthCriteria& criteria) {
  criteria.validate();
  if (!(omega > 0.0)) throw std::invalid_argument("classify_series: omega must be > 0");
  if (times.size() != values.size() || times.size() < 2) {
    throw std::invalid_argument("classify_series: need matching time and value samples");
  }
  PointVerdict out;
  out.omega = omega;
  out.epsilon = epsilon;
  const double period = 2.0 * std::numbers::pi / omega;
  const double t0 = times.front();
  const long total =
      static_cast<long>(std::floor((times.back() - t0) / period + 1e-9));
  std::vector<double> amp(static_cast<std::size_t>(std::max(total, 0L)), 0.0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double a = std::abs(values[i] - reference);
    out.max_amplitude = std::max(out.max_amplitude, a);
    const double phase = (times[i] - t0) / period;
    if (phase <= 1e-9) continue;
    const long n = static_cast<long>(std::ceil(phase - 1e-9)) - 1;
    if (n < total) amp[n] = std::max(amp[n], a);
  }
  out.periods = static_cast<int>(total);
  out.escaped = escaped || out.max_amplitude > escape_level;

  std::vector<double> x, y;
  for (long n = out.escaped ? 0 : total / 2; n < total; ++n) {
    x.push_back(t0 + (static_cast<double>(n) + 0.5) * period);
    y.push_back(std::log(std::max(amp[n], std::numeric_limits<double>::min())));
  }
  const Fit f = fit_line(x, y);
  out.fitted_exponent = f.slope;
  out.exponent_stderr = f.stderr_;
  out.r_squared = f.r2;
  if (out.escaped || (f.slope > criteria.q_threshold && f.r2 > criteria.r2_min)) {
    out.verdict = Verdict::Resonant;
  } else if (total < 10) {
    out.verdict = Verdict::Inconclusive;
    out.diagnostic = "fewer than 10 drive periods";
  } else if (f.slope <= criteria.q_threshold) {
    out.verdict = Verdict::Stable;
  } else {
    out.verdict = Verdict::Inconclusive;
    out.diagnostic = "growth without a clean exponential fit";
  }
  return out;
}

std::vector<double> Range::values() const {
  if (!(step > 0.0)) throw std::invalid_argument("range: step must be > 0");
  if (hi < lo) throw std::invalid_argument("range: hi must be >= lo");
  std::vector<double> v;
  for (long i = 0;; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (x > hi + 1e-9 * step) break;
    v.push_back(x);
  }
  return v;
}

void SweepGrid::validate() const {
  omega.values();
  epsilon.values();
  if (!(omega.lo > 0.0)) throw std::invalid_argument("sweep: omega must be > 0");
  if (epsilon.lo < 0.0 || epsilon.hi >= 1.0) {
    throw std::invalid_argument("sweep: epsilon must lie in [0, 1)");
  }
  setup.criteria.validate();
  setup.integrator.validate();
  if (setup.criteria.tau_max < 10.0 * 2.0 * std::numbers::pi / omega.lo) {
    throw std::invalid_argument("sweep: tau_max must cover at least 10 drive periods");
  }
}

ResonanceMap resonance_map(const SweepGrid& grid, const MapOptions& options) {
  grid.validate();
  ResonanceMap map;
  map.omega = grid.omega.values();
  map.epsilon = grid.epsilon.values();
  map.model = std::string(to_string(grid.setup.model.kind));
  map.interaction = grid.setup.model.params.interaction();
  map.damping = grid.setup.model.trap.damping();
  map.criteria = grid.setup.criteria;
  map.version = kVersion;

  const std::size_t n = map.omega.size() * map.epsilon.size();
  if (!options.completed.empty() && options.completed.size() != n) {
    throw std::invalid_argument("sweep: completed-cell list does not match the grid");
  }
  map.cells.resize(n);
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < n; ++i) {
    if (!options.completed.empty() && options.completed[i]) {
      map.cells[i] = *options.completed[i];
    } else {
      todo.push_back(i);
    }
  }
  std::mutex report;
  parallel_for(todo.size(), options.workers, [&](std::size_t k) {
    const std::size_t i = todo[k];
    const double w = map.omega[i % map.omega.size()];
    const double e = map.epsilon[i / map.omega.size()];
    map.cells[i] = classify_point(w, e, grid.setup);
    if (options.on_cell) {
      std::lock_guard lock(report);
      options.on_cell(i, map.cells[i]);
    }
  });
  return map;
}

namespace {

std::optional<PointVerdict> strongest_resonance(double epsilon, const PointSetup& setup,
                                                const ThresholdOptions& opt) {
  const auto omegas = Range{opt.omega_lo, opt.omega_hi, opt.omega_step}.values();
  std::vector<PointVerdict> v(omegas.size());
  parallel_for(omegas.size(), opt.workers,
               [&](std::size_t i) { v[i] = classify_point(omegas[i], epsilon, setup); });
  std::optional<PointVerdict> best;
  for (const auto& p : v) {
    if (p.verdict != Verdict::Resonant) continue;
    if (!best || p.fitted_exponent > best->fitted_exponent) best = p;
  }
  return best;
}

}  // namespace

std::optional<Threshold> threshold_scan(const std::vector<double>& epsilon_grid,
                                        const PointSetup& setup,
                                        const ThresholdOptions& options) {
  if (epsilon_grid.empty()) throw std::invalid_argument("threshold_scan: empty epsilon grid");
  for (std::size_t i = 1; i < epsilon_grid.size(); ++i) {
    if (!(epsilon_grid[i] > epsilon_grid[i - 1])) {
      throw std::invalid_argument("threshold_scan: epsilon grid must be increasing");
    }
  }
  if (!(options.omega_lo > 0.0) || options.omega_hi < options.omega_lo ||
      !(options.omega_step > 0.0) || !(options.epsilon_resolution > 0.0)) {
    throw std::invalid_argument("threshold_scan: bad omega window or resolution");
  }

  std::optional<double> below;
  for (double e : epsilon_grid) {
    auto hit = strongest_resonance(e, setup, options);
    if (!hit) {
      below = e;
      continue;
    }
    double hi = e;
    PointVerdict at_hi = *hit;
    if (below) {
      double lo = *below;
      while (hi - lo > options.epsilon_resolution) {
        const double mid = 0.5 * (lo + hi);
        if (auto m = strongest_resonance(mid, setup, options)) {
          hi = mid;
          at_hi = *m;
        } else {
          lo = mid;
        }
      }
    }
    return Threshold{hi, at_hi.omega};
  }
  return std::nullopt;
}

namespace {

struct CycleRun {
  LimitCycle::Status status = LimitCycle::Status::NotConverged;
  DynamicalState state;
  int iterations = 0;
  std::string diagnostic;
};

CycleRun iterate_map(const Model& model, DynamicalState s, int channel, double escape,
                     double ref, const IntegratorConfig& cfg, const LimitCycleOptions& opt) {
  CycleRun run;
  constexpr int kChunk = 10;
  while (run.iterations < opt.max_periods) {
    const int n = std::min(kChunk, opt.max_periods - run.iterations);
    std::vector<DynamicalState> strobes;
    try {
      strobes = stroboscopic_map(model, s, n, cfg);
    } catch (const std::exception& e) {
      run.status = LimitCycle::Status::Diverged;
      run.diagnostic = e.what();
      run.state = s;
      return run;
    }
    for (std::size_t k = 1; k < strobes.size(); ++k) {
      ++run.iterations;
      if (std::abs(strobes[k].coordinates[channel] - ref) > escape) {
        run.status = LimitCycle::Status::Diverged;
        run.diagnostic = "stroboscopic orbit escaped; point is resonant";
        run.state = strobes[k];
        return run;
      }
      if (sup_distance(strobes[k], strobes[k - 1]) < opt.tolerance) {
        run.status = LimitCycle::Status::Converged;
        run.state = strobes[k];
        return run;
      }
    }
    s = strobes.back();
  }
  run.state = s;
  run.diagnostic = "no convergence within the period budget";
  return run;
}

}  // namespace

LimitCycle find_limit_cycle(double omega, double epsilon, const PointSetup& setup,
                            const LimitCycleOptions& options) {
  if (!(setup.model.trap.damping() > 0.0)) {
    throw std::invalid_argument("find_limit_cycle: requires damping > 0");
  }
  if (!(options.tolerance > 0.0) || options.max_periods < 1 || !(options.seed_match > 0.0) ||
      options.samples_per_period < 4) {
    throw std::invalid_argument("find_limit_cycle: bad options");
  }
  const Model model = setup.at(omega, epsilon);
  const int channel = observed(model);
  const double ref = setup.reference();
  const double escape = setup.criteria.escape_factor * setup.scale();
  IntegratorConfig cfg = setup.integrator;

  LimitCycle out;
  out.period = model.trap.period();

  const DynamicalState seed1 = setup.initial_state();
  DynamicalState seed2 = seed1;
  for (int i = 0; i < seed2.dim; ++i) {
    const double base = ref > 0.0 ? ref : seed1.coordinates[i];
    seed2.coordinates[i] = base * (1.0 - options.second_seed_offset);
    seed2.velocities[i] = options.second_seed_velocity;
  }

  const auto a = iterate_map(model, seed1, channel, escape, ref, cfg, options);
  out.iterations = a.iterations;
  out.fixed_point = a.state;
  if (a.status != LimitCycle::Status::Converged) {
    out.status = a.status;
    out.diagnostic = a.diagnostic;
    return out;
  }
  const auto b = iterate_map(model, seed2, channel, escape, ref, cfg, options);
  if (b.status != LimitCycle::Status::Converged) {
    out.status = b.status;
    out.diagnostic = "second seed: " + b.diagnostic;
    return out;
  }
  // Both fixed points are compared at the same drive phase.
  DynamicalState fb = b.state;
  fb.time = a.state.time;
  out.seed_mismatch = sup_distance(a.state, fb);
  if (out.seed_mismatch > options.seed_match) {
    out.status = LimitCycle::Status::SeedMismatch;
    out.diagnostic = "seeds converged to different cycles";
    return out;
  }

  IntegratorConfig sample = cfg;
  sample.record = true;
  sample.output_interval = out.period / options.samples_per_period;
  const auto traj = integrate(model, a.state, a.state.time + out.period, sample);
  out.min_width = std::numeric_limits<double>::infinity();
  out.max_width = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    out.min_width = std::min(out.min_width, s.coordinates[channel]);
    out.max_width = std::max(out.max_width, s.coordinates[channel]);
  }
  out.amplitude = out.max_width - out.min_width;
  out.status = LimitCycle::Status::Converged;
  return out;
}

}  // namespace parares::sweep
