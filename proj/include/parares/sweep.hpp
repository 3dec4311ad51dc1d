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

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "parares/integrate.hpp"
#include "parares/model.hpp"

namespace parares::sweep {

enum class Verdict { Stable, Resonant, LimitCycle, Inconclusive };

std::string_view to_string(Verdict v);

/// Thresholds of the direct-integration resonance test.
struct GrowthCriteria {
  double tau_max = 400.0;
  /// Minimum fitted log-slope of the per-period amplitude.
  double q_threshold = 0.005;
  double r2_min = 0.9;
  /// Escape when the deviation exceeds escape_factor * reference scale.
  double escape_factor = 50.0;
  /// Successive stroboscopic states closer than this mark a limit cycle.
  double cycle_tolerance = 1e-6;
  /// Relative offset of the default initial width from equilibrium.
  double seed_offset = 0.01;
  /// Dense samples per drive period used for the amplitude envelope.
  int samples_per_period = 64;

  void validate() const;
};

/// Everything about a classification run except (omega, epsilon).
///
/// The drive at a point is trap.with_drive(epsilon * drive_pattern, omega).
/// For the variational 3D model `model.channel` selects the observed width.
struct PointSetup {
  Model model;
  std::array<double, 3> drive_pattern{1.0, 1.0, 1.0};
  /// Defaults to (1 + seed_offset) * v* at rest for width models and to
  /// (1, 0) for the linear ones.
  std::optional<DynamicalState> initial;
  GrowthCriteria criteria;
  IntegratorConfig integrator;

  Model at(double omega, double epsilon) const;
  /// Deviation origin: v* for width models, 0 otherwise.
  double reference() const;
  /// Escape scale: v* for width models, |initial amplitude| otherwise.
  double scale() const;
  DynamicalState initial_state() const;
};

struct PointVerdict {
  double omega = 0.0;
  double epsilon = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  double fitted_exponent = 0.0;
  double exponent_stderr = 0.0;
  double r_squared = 0.0;
  /// max |v - reference| over the run.
  double max_amplitude = 0.0;
  bool escaped = false;
  int periods = 0;
  std::optional<DynamicalState> cycle_state;
  std::string diagnostic;
};

PointVerdict classify_point(double omega, double epsilon, const PointSetup& setup);

/// Same growth rules applied to an externally sampled scalar signal (no
/// limit-cycle test). `escaped` marks a run cut short by blow-up.
PointVerdict classify_series(double omega, double epsilon, const std::vector<double>& times,
                             const std::vector<double>& values, double reference,
                             double escape_level, bool escaped, const GrowthCriteria& criteria);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  /// lo, lo + step, ... up to hi (inclusive within step * 1e-9).
  std::vector<double> values() const;
};

struct SweepGrid {
  Range omega;
  Range epsilon;
  PointSetup setup;

  void validate() const;
};

/// Cells are stored row-major: epsilon rows, omega columns.
struct ResonanceMap {
  std::vector<double> omega;
  std::vector<double> epsilon;
  std::vector<PointVerdict> cells;
  std::string model;
  double interaction = 0.0;
  double damping = 0.0;
  GrowthCriteria criteria;
  std::string version;

  std::size_t index(std::size_t i_eps, std::size_t i_omega) const {
    return i_eps * omega.size() + i_omega;
  }
  const PointVerdict& at(std::size_t i_eps, std::size_t i_omega) const {
    return cells[index(i_eps, i_omega)];
  }
};

struct MapOptions {
  unsigned workers = 1;
  /// Cells already computed by an earlier run, indexed like ResonanceMap::cells.
  std::vector<std::optional<PointVerdict>> completed;
  /// Called from worker threads, serialized, once per newly computed cell.
  std::function<void(std::size_t, const PointVerdict&)> on_cell;
};

ResonanceMap resonance_map(const SweepGrid& grid, const MapOptions& options = {});

struct ThresholdOptions {
  double omega_lo = 1.8;
  double omega_hi = 2.2;
  double omega_step = 0.005;
  double epsilon_resolution = 0.005;
  unsigned workers = 1;
};

struct Threshold {
  double epsilon_min = 0.0;
  /// Resonant frequency found at epsilon_min.
  double omega = 0.0;
};

/// Smallest resonant epsilon over the omega window; bisection-refined
/// between the last non-resonant and first resonant grid values.
std::optional<Threshold> threshold_scan(const std::vector<double>& epsilon_grid,
                                        const PointSetup& setup,
                                        const ThresholdOptions& options = {});

struct LimitCycleOptions {
  double tolerance = 1e-8;
  int max_periods = 5000;
  double seed_match = 1e-6;
  /// Second seed: v* * (1 - second_seed_offset) with velocity second_seed_velocity.
  double second_seed_offset = 0.05;
  double second_seed_velocity = 0.05;
  int samples_per_period = 512;
};

struct LimitCycle {
  enum class Status { Converged, NotConverged, Diverged, SeedMismatch };
  Status status = Status::NotConverged;
  DynamicalState fixed_point;
  /// max v - min v over one drive period on the cycle.
  double amplitude = 0.0;
  double min_width = 0.0;
  double max_width = 0.0;
  double period = 0.0;
  int iterations = 0;
  double seed_mismatch = 0.0;
  std::string diagnostic;

  bool converged() const { return status == Status::Converged; }
};

std::string_view to_string(LimitCycle::Status s);

/// Fixed point of the stroboscopic map of a damped width model, confirmed
/// from two seed states.
LimitCycle find_limit_cycle(double omega, double epsilon, const PointSetup& setup,
                            const LimitCycleOptions& options = {});

}  // namespace parares::sweep
