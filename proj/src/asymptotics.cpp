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

#include "parares/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

namespace parares::asymptotics {

namespace {

void require_epsilon(double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("asymptotics: epsilon must be >= 0");
}

}  // namespace

std::optional<double> growth_exponent(double omega, double epsilon) {
  require_epsilon(epsilon);
  if (!(omega > 0.0)) throw std::invalid_argument("asymptotics: omega must be > 0");
  const double delta = 0.5 * std::abs(omega - 2.0);
  const double drive = epsilon / (2.0 * omega);
  const double q2 = drive * drive - delta * delta;
  if (q2 < 0.0) return std::nullopt;
  return std::sqrt(q2);
}

double optimal_frequency(double epsilon) {
  require_epsilon(epsilon);
  return 2.0 - 0.25 * epsilon * epsilon;
}

std::pair<double, double> resonance_band(double epsilon) {
  require_epsilon(epsilon);
  const double w = 0.5 * epsilon + epsilon * epsilon / 32.0;
  return {2.0 - w, 2.0 + w};
}

std::optional<double> damped_growth(double omega, double epsilon, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("asymptotics: gamma must be >= 0");
  const auto q = growth_exponent(omega, epsilon);
  if (!q) return std::nullopt;
  return *q - gamma;
}

ResonancePrediction predict(double omega, double epsilon, double gamma) {
  ResonancePrediction p;
  p.q = growth_exponent(omega, epsilon);
  p.omega_max = optimal_frequency(epsilon);
  p.band = resonance_band(epsilon);
  p.damped_exponent = damped_growth(omega, epsilon, gamma);
  return p;
}

}  // namespace parares::asymptotics
