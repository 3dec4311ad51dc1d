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
#include <stdexcept>
#include <string>
#include <vector>

#include "parares/model.hpp"

namespace parares {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-13;
  double h_max = 0.25;
  /// Smallest admissible coordinate of the singular width models.
  double width_floor = 1e-4;
  /// Consecutive rejections before switching to the implicit method.
  int stiff_switch_threshold = 8;
  long max_steps = 20'000'000;
  /// Spacing of dense output samples; 0 records every accepted step.
  double output_interval = 0.0;
  /// When false only the final state is kept in Trajectory::samples.
  bool record = true;

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

struct IntegratorDiagnostics {
  long accepted_steps = 0;
  long rejected_steps = 0;
  long floor_rejections = 0;
  long stiff_steps = 0;
  long regime_switches = 0;
  /// Per-switch record: (tau, true when entering the implicit regime).
  std::vector<std::pair<double, bool>> regime_history;
  /// max |E - E0| / |E0|; only tracked for conservative width models.
  std::optional<double> max_energy_drift;

  double stiff_fraction() const {
    return accepted_steps == 0 ? 0.0
                               : static_cast<double>(stiff_steps) /
                                     static_cast<double>(accepted_steps);
  }
};

struct Trajectory {
  std::vector<DynamicalState> samples;
  bool dense = false;
  std::vector<double> event_times;
  IntegratorDiagnostics diagnostics;

  const DynamicalState& back() const { return samples.back(); }
};

/// Integration failure. Carries everything computed up to the failure.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// One accepted step with its continuous extension. Valid only inside the
/// observer callback that receives it.
class StepView {
 public:
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  bool implicit() const { return implicit_; }
  DynamicalState at(double tau) const;
  /// Single first-order component (coordinates first, then velocities).
  double component(int index, double tau) const;
  const DynamicalState& end() const { return end_; }

 private:
  friend class OdeSolver;
  double t0_ = 0.0;
  double t1_ = 0.0;
  bool implicit_ = false;
  int n_ = 2;
  // DOPRI5 continuous extension (rcont1..5) or cubic Hermite data.
  std::array<std::array<double, 6>, 5> cont_{};
  DynamicalState end_;
};

/// Called after every accepted step; return false to stop early.
using StepObserver = std::function<bool(const StepView&)>;

struct PropagationResult {
  DynamicalState final_state;
  IntegratorDiagnostics diagnostics;
  bool stopped_early = false;
  double last_step = 0.0;
};

/// Embedded Dormand-Prince 5(4) with PI step control and dense output,
/// falling back to a two-stage L-stable SDIRK when the explicit method keeps
/// rejecting steps. Single use per trajectory; not thread-safe.
class OdeSolver {
 public:
  OdeSolver(const Model& model, const IntegratorConfig& config);

  /// Advances `state` to tau_end. Throws IntegrationError (with an empty
  /// partial trajectory) on step underflow or when max_steps is exceeded.
  PropagationResult propagate(const DynamicalState& state, double tau_end,
                              const StepObserver& observer, double h_start = 0.0);

 private:
  using Vec = std::array<double, 6>;

  bool eval(double t, const Vec& y, Vec& dy) const noexcept;
  bool admissible(const Vec& y) const noexcept;
  double error_norm(const Vec& y0, const Vec& y1, const Vec& err) const noexcept;
  bool explicit_step(double t, const Vec& y, const Vec& k1, double h, Vec& y1, Vec& k7,
                     double& err, StepView& view) const noexcept;
  bool implicit_step(double t, const Vec& y, const Vec& f0, double h, Vec& y1, Vec& f1,
                     double& err, StepView& view) const noexcept;
  DynamicalState to_state(const Vec& y, double t) const;

  Model model_;
  IntegratorConfig cfg_;
  int dim_;
  int n_;
  bool width_model_;
  bool conservative_;
};

/// Integrates any model from state0 to tau_end.
Trajectory integrate(const Model& model, const DynamicalState& state0, double tau_end,
                     const IntegratorConfig& config = {});

/// Impact oscillator: linear flow between impacts, elastic reflection
/// (0+, V) -> (0+, -V) whenever the width reaches zero.
Trajectory integrate_with_bounce(const Model& model, const DynamicalState& state0,
                                 double tau_end, const IntegratorConfig& config = {});

/// States at tau_n = tau0 + n * 2 pi / omega, n = 0..n_periods, from dense
/// output. Uses the bounce integrator for the impact model.
std::vector<DynamicalState> stroboscopic_map(const Model& model, const DynamicalState& state0,
                                             int n_periods, const IntegratorConfig& config = {});

}  // namespace parares
