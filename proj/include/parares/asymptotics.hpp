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

#include <optional>
#include <utility>

namespace parares::asymptotics {

// First-order resonance formulas for the driven width oscillation around
// omega = 2 (lambda0 = 1), with delta = |omega - 2| / 2.

struct ResonancePrediction {
  std::optional<double> q;
  double omega_max = 2.0;
  std::pair<double, double> band{2.0, 2.0};
  std::optional<double> damped_exponent;
};

/// sqrt(eps^2 / (4 omega^2) - delta^2), absent outside the first-order band.
std::optional<double> growth_exponent(double omega, double epsilon);

/// 2 - eps^2 / 4.
double optimal_frequency(double epsilon);

/// 2 -+ (eps / 2 + eps^2 / 32).
std::pair<double, double> resonance_band(double epsilon);

/// q - gamma where q is defined.
std::optional<double> damped_growth(double omega, double epsilon, double gamma);

ResonancePrediction predict(double omega, double epsilon, double gamma = 0.0);

}  // namespace parares::asymptotics
