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

#include "parares/model.hpp"

#include <cmath>
#include <numbers>

namespace parares {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

// ---------------------------------------------------------------------------
// TrapModulation

TrapModulation::TrapModulation(std::array<double, 3> base_strengths,
                               std::array<double, 3> amplitudes, double drive_frequency,
                               double damping)
    : base_(base_strengths), eps_(amplitudes), omega_(drive_frequency), gamma_(damping) {
  for (int i = 0; i < 3; ++i) {
    require(std::isfinite(base_[i]) && base_[i] > 0.0, "trap: base strength must be > 0");
    require(std::isfinite(eps_[i]) && std::abs(eps_[i]) < 1.0,
            "trap: modulation amplitude must satisfy |eps| < 1");
  }
  require(std::isfinite(omega_) && omega_ >= 0.0, "trap: drive frequency must be >= 0");
  require(!driven() || omega_ > 0.0, "trap: drive frequency must be > 0 when eps != 0");
  require(std::isfinite(gamma_) && gamma_ >= 0.0, "trap: damping must be >= 0");
}

TrapModulation TrapModulation::isotropic(double epsilon, double omega, double damping,
                                         double lambda0) {
  return {{lambda0, lambda0, lambda0}, {epsilon, epsilon, epsilon}, omega, damping};
}

TrapModulation TrapModulation::monopole(std::array<double, 3> base_strengths, double epsilon,
                                        double omega, double damping) {
  return {base_strengths, {epsilon, epsilon, 0.0}, omega, damping};
}

TrapModulation TrapModulation::quadrupole(std::array<double, 3> base_strengths, double epsilon,
                                          double omega, double damping) {
  return {base_strengths, {epsilon, -epsilon, 0.0}, omega, damping};
}

TrapModulation TrapModulation::stationary(std::array<double, 3> base_strengths, double damping) {
  return {base_strengths, {0.0, 0.0, 0.0}, 0.0, damping};
}

bool TrapModulation::driven() const {
  return eps_[0] != 0.0 || eps_[1] != 0.0 || eps_[2] != 0.0;
}

double TrapModulation::period() const {
  if (omega_ <= 0.0) throw std::invalid_argument("trap: period requires omega > 0");
  return 2.0 * std::numbers::pi / omega_;
}

std::array<double, 3> TrapModulation::evaluate(double tau) const {
  const double c = std::cos(omega_ * tau);
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = base_[i] * base_[i] * (1.0 + eps_[i] * c);
  return out;
}

double TrapModulation::strength_squared(int channel, double tau) const {
  const auto i = static_cast<std::size_t>(channel);
  return base_[i] * base_[i] * (1.0 + eps_[i] * std::cos(omega_ * tau));
}

TrapModulation TrapModulation::with_damping(double gamma) const {
  return {base_, eps_, omega_, gamma};
}

TrapModulation TrapModulation::with_drive(std::array<double, 3> amplitudes, double omega) const {
  return {base_, amplitudes, omega, gamma_};
}

// ---------------------------------------------------------------------------
// ModelParams

ModelParams::ModelParams(double interaction) : p_(interaction) {
  require(std::isfinite(p_) && p_ >= 0.0, "params: interaction P must be >= 0");
}

ModelParams ModelParams::from_physical(double particle_count, double scattering_length,
                                       double oscillator_length) {
  require(particle_count >= 0.0, "params: particle count must be >= 0");
  require(scattering_length >= 0.0, "params: scattering length must be >= 0");
  require(oscillator_length > 0.0, "params: oscillator length must be > 0");
  ModelParams out(std::sqrt(2.0 / std::numbers::pi) * particle_count * scattering_length /
                  oscillator_length);
  out.physical_ = Physical{particle_count, scattering_length, oscillator_length};
  return out;
}

// ---------------------------------------------------------------------------
// Kinds

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Variational3D: return "variational3d";
    case ModelKind::Radial: return "radial";
    case ModelKind::ImpactOscillator: return "impact";
    case ModelKind::Mathieu: return "mathieu";
    case ModelKind::CenterOfMass: return "center_of_mass";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (auto k : {ModelKind::Variational3D, ModelKind::Radial, ModelKind::ImpactOscillator,
                 ModelKind::Mathieu, ModelKind::CenterOfMass}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

int dimension(ModelKind kind) { return kind == ModelKind::Variational3D ? 3 : 1; }

bool is_width_model(ModelKind kind) {
  return kind == ModelKind::Variational3D || kind == ModelKind::Radial ||
         kind == ModelKind::ImpactOscillator;
}

std::string_view to_string(Singularity s) {
  switch (s) {
    case Singularity::Standard: return "standard";
    case Singularity::InverseCube: return "inverse_cube";
    case Singularity::InverseQuartic: return "inverse_quartic";
  }
  return "?";
}

Singularity singularity_from_string(std::string_view name) {
  for (auto s : {Singularity::Standard, Singularity::InverseCube, Singularity::InverseQuartic}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown singularity '" + std::string(name) + "'");
}

DynamicalState DynamicalState::scalar(double q, double qdot, double tau) {
  DynamicalState s;
  s.coordinates = {q, 0.0, 0.0};
  s.velocities = {qdot, 0.0, 0.0};
  s.time = tau;
  s.dim = 1;
  return s;
}

DynamicalState DynamicalState::vector3(std::array<double, 3> q, std::array<double, 3> qdot,
                                       double tau) {
  DynamicalState s;
  s.coordinates = q;
  s.velocities = qdot;
  s.time = tau;
  s.dim = 3;
  return s;
}

namespace {

std::array<double, 2> barrier(Singularity shape, double p) {
  switch (shape) {
    case Singularity::Standard: return {1.0, p};
    case Singularity::InverseCube: return {1.0 + p, 0.0};
    case Singularity::InverseQuartic: return {0.0, 1.0 + p};
  }
  return {1.0, p};
}

}  // namespace

std::array<double, 2> Model::barrier_coefficients() const {
  return barrier(singularity, params.interaction());
}

// ---------------------------------------------------------------------------
// Right-hand sides

namespace detail {

bool accelerations(const Model& model, double tau, const double* q, const double* qdot,
                   double* out) noexcept {
  const TrapModulation& trap = model.trap;
  const double gamma = trap.damping();
  switch (model.kind) {
    case ModelKind::Variational3D: {
      const double p = model.params.interaction();
      if (!(q[0] > 0.0 && q[1] > 0.0 && q[2] > 0.0)) return false;
      const auto lam2 = trap.evaluate(tau);
      const double prod = q[0] * q[1] * q[2];
      for (int i = 0; i < 3; ++i) {
        const double v = q[i];
        const double v2 = v * v;
        out[i] = -lam2[i] * v - gamma * qdot[i] + 1.0 / (v2 * v) + p / (v * prod);
      }
      return true;
    }
    case ModelKind::Radial: {
      const double v = q[0];
      if (!(v > 0.0)) return false;
      const auto [c3, c4] = model.barrier_coefficients();
      const double inv = 1.0 / v;
      const double inv3 = inv * inv * inv;
      out[0] = -trap.strength_squared(model.channel, tau) * v - gamma * qdot[0] + c3 * inv3 +
               c4 * inv3 * inv;
      return true;
    }
    case ModelKind::ImpactOscillator:
    case ModelKind::Mathieu:
    case ModelKind::CenterOfMass:
      out[0] = -trap.strength_squared(model.channel, tau) * q[0] - gamma * qdot[0];
      return true;
  }
  return false;
}

}  // namespace detail

std::array<double, 3> rhs(const Model& model, const DynamicalState& state) {
  if (state.dim != model.dim()) throw std::invalid_argument("rhs: state dimension mismatch");
  if (model.kind == ModelKind::ImpactOscillator && state.coordinates[0] < 0.0) {
    throw DomainError("rhs: impact oscillator width is negative");
  }
  std::array<double, 3> out{};
  if (!detail::accelerations(model, state.time, state.coordinates.data(),
                             state.velocities.data(), out.data())) {
    throw DomainError("rhs: width coordinate must be strictly positive");
  }
  return out;
}

double energy(const Model& model, const DynamicalState& state) {
  if (state.dim != model.dim()) throw std::invalid_argument("energy: state dimension mismatch");
  const auto lam2 = model.trap.evaluate(state.time);
  const auto& q = state.coordinates;
  const auto& qd = state.velocities;
  switch (model.kind) {
    case ModelKind::Radial: {
      const double v = q[0];
      if (!(v > 0.0)) throw DomainError("energy: width must be strictly positive");
      const auto [c3, c4] = model.barrier_coefficients();
      const double l2 = lam2[static_cast<std::size_t>(model.channel)];
      return 0.5 * qd[0] * qd[0] + 0.5 * l2 * v * v + c3 / (2.0 * v * v) +
             c4 / (3.0 * v * v * v);
    }
    case ModelKind::Variational3D: {
      if (!(q[0] > 0.0 && q[1] > 0.0 && q[2] > 0.0)) {
        throw DomainError("energy: widths must be strictly positive");
      }
      double e = model.params.interaction() / (q[0] * q[1] * q[2]);
      for (int i = 0; i < 3; ++i) {
        e += 0.5 * (qd[i] * qd[i] + lam2[i] * q[i] * q[i]) + 1.0 / (2.0 * q[i] * q[i]);
      }
      return e;
    }
    case ModelKind::ImpactOscillator: {
      const double l2 = lam2[static_cast<std::size_t>(model.channel)];
      return 0.5 * qd[0] * qd[0] + 0.5 * l2 * q[0] * q[0];
    }
    case ModelKind::Mathieu:
    case ModelKind::CenterOfMass:
      break;
  }
  throw UnsupportedModel("energy: defined for width models only");
}

// ---------------------------------------------------------------------------
// Equilibria

double equilibrium_width(const ModelParams& params, double lambda0, Singularity shape) {
  require(lambda0 > 0.0, "equilibrium_width: lambda0 must be > 0");
  const auto [c3, c4] = barrier(shape, params.interaction());
  const double l2 = lambda0 * lambda0;
  auto f = [&](double v) { return l2 * v * v * v * v * v - c3 * v - c4; };

  const double scale = std::pow(lambda0, -0.4);
  double lo = std::max(std::pow(c4, 0.2) * scale, 1e-6);
  double hi = std::pow(1.0 + params.interaction(), 0.2) * scale + 2.0;
  while (f(hi) <= 0.0) hi *= 2.0;
  if (f(lo) > 0.0) lo = 1e-12;

  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double linearized_frequency(const ModelParams& params, double lambda0, Singularity shape) {
  const double v = equilibrium_width(params, lambda0, shape);
  const auto [c3, c4] = barrier(shape, params.interaction());
  const double v4 = v * v * v * v;
  return std::sqrt(lambda0 * lambda0 + 3.0 * c3 / v4 + 4.0 * c4 / (v4 * v));
}

std::array<double, 3> equilibrium_widths_3d(const ModelParams& params,
                                            std::array<double, 3> lambda0) {
  for (double l : lambda0) require(l > 0.0, "equilibrium_widths_3d: lambda0 must be > 0");
  const double p = params.interaction();
  // With s = P / (vx vy vz) each axis obeys lambda^2 v^2 = 1/v^2 + s, so
  // v^2 = (s + sqrt(s^2 + 4 lambda^2)) / (2 lambda^2). Solve for s by
  // bisection on s - P / prod(v(s)), which is increasing in s.
  auto widths = [&](double s) {
    std::array<double, 3> v{};
    for (int i = 0; i < 3; ++i) {
      const double l2 = lambda0[i] * lambda0[i];
      v[i] = std::sqrt((s + std::sqrt(s * s + 4.0 * l2)) / (2.0 * l2));
    }
    return v;
  };
  if (p == 0.0) return widths(0.0);
  auto g = [&](double s) {
    const auto v = widths(s);
    return s - p / (v[0] * v[1] * v[2]);
  };
  double lo = 0.0;
  double hi = p;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return widths(0.5 * (lo + hi));
}

}  // namespace parares
