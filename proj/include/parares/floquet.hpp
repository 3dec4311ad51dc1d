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
#include <complex>
#include <vector>

#include "parares/integrate.hpp"
#include "parares/model.hpp"

namespace parares::floquet {

/// Instability threshold on the growth exponent.
inline constexpr double kNumericalZero = 1e-10;

struct FloquetResult {
  /// Row-major 2x2 fundamental matrix over one drive period.
  std::array<double, 4> monodromy{};
  std::array<std::complex<double>, 2> multipliers{};
  /// max Re(log mu) / T.
  double growth_exponent = 0.0;
  double period = 0.0;
  bool stable = true;

  double trace() const { return monodromy[0] + monodromy[3]; }
  double determinant() const {
    return monodromy[0] * monodromy[3] - monodromy[1] * monodromy[2];
  }
  double max_modulus() const {
    return std::max(std::abs(multipliers[0]), std::abs(multipliers[1]));
  }
};

/// Monodromy of u'' + gamma u' + lambda0^2 (1 + eps cos w t) u = 0 for the
/// selected trap channel. Integrates both canonical solutions over one
/// period at rel_tol 1e-12 unless `config` asks for something tighter.
FloquetResult monodromy(const TrapModulation& trap, int channel = 0,
                        const IntegratorConfig& config = {});

struct Verdict {
  bool stable = true;
  double growth_exponent = 0.0;
};

/// Stability of the damped Mathieu equation at (omega, eps, gamma, lambda0).
Verdict classify(double omega, double epsilon, double gamma = 0.0, double lambda0 = 1.0);

/// Signed distance from the stability boundary, |tr M| - (1 + det M).
/// Positive exactly when a multiplier lies outside the unit circle.
double instability_margin(const FloquetResult& r);

struct WedgeBoundary {
  int tip_index = 1;
  double nominal_tip = 2.0;
  std::vector<double> epsilon;
  std::vector<double> omega_lower;
  /// Empty intervals are reported with omega_lower > omega_upper.
  std::vector<double> omega_upper;
  /// (omega_min, eps_min): narrowest traced non-empty interval.
  std::array<double, 2> tip{0.0, 0.0};

  bool empty(std::size_t i) const { return omega_lower[i] > omega_upper[i]; }
  bool contains(std::size_t i, double omega) const {
    return omega_lower[i] <= omega && omega <= omega_upper[i];
  }
};

struct WedgeOptions {
  /// Boundary bisection stops below this omega resolution.
  double omega_tolerance = 1e-7;
  /// Worker threads over the epsilon grid; 0 means hardware concurrency.
  unsigned workers = 1;
};

/// Traces the n-th instability wedge (nominal tip 2 lambda0 / n, n = 1..3)
/// over an increasing epsilon grid with max <= 0.8.
WedgeBoundary trace_wedge(int tip_index, const std::vector<double>& epsilon_grid,
                          double gamma = 0.0, double lambda0 = 1.0,
                          const WedgeOptions& options = {});

}  // namespace parares::floquet
