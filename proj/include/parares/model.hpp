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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parares {

/// Raised when a model is evaluated outside its domain, e.g. a width
/// coordinate that is not strictly positive.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for an operation that the selected model does not support.
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Periodically modulated trap strengths
///
///   lambda_eta^2(tau) = lambda0_eta^2 * (1 + eps_eta * cos(omega * tau))
///
/// plus a viscous damping coefficient shared by all channels. Instances are
/// validated on construction and immutable afterwards.
class TrapModulation {
 public:
  TrapModulation(std::array<double, 3> base_strengths, std::array<double, 3> amplitudes,
                 double drive_frequency, double damping = 0.0);

  /// Spherical trap, lambda0 = 1 on every axis, same modulation on every axis.
  static TrapModulation isotropic(double epsilon, double omega, double damping = 0.0,
                                  double lambda0 = 1.0);
  /// m = 0 drive: eps_x = eps_y = epsilon, eps_z = 0.
  static TrapModulation monopole(std::array<double, 3> base_strengths, double epsilon,
                                 double omega, double damping = 0.0);
  /// m = 2 drive: eps_x = -eps_y = epsilon, eps_z = 0.
  static TrapModulation quadrupole(std::array<double, 3> base_strengths, double epsilon,
                                   double omega, double damping = 0.0);
  static TrapModulation stationary(std::array<double, 3> base_strengths = {1.0, 1.0, 1.0},
                                   double damping = 0.0);

  const std::array<double, 3>& base_strengths() const { return base_; }
  const std::array<double, 3>& amplitudes() const { return eps_; }
  double drive_frequency() const { return omega_; }
  double damping() const { return gamma_; }
  bool driven() const;
  /// Drive period 2 pi / omega. Only meaningful when omega > 0.
  double period() const;

  /// lambda_eta^2 at time tau for all three channels.
  std::array<double, 3> evaluate(double tau) const;
  double strength_squared(int channel, double tau) const;

  TrapModulation with_damping(double gamma) const;
  TrapModulation with_drive(std::array<double, 3> amplitudes, double omega) const;

 private:
  std::array<double, 3> base_;
  std::array<double, 3> eps_;
  double omega_;
  double gamma_;
};

/// Interaction strength P = sqrt(2/pi) N a / a0 of the reduced width
/// equations. Only repulsive gases (P >= 0) are modelled.
class ModelParams {
 public:
  struct Physical {
    double particle_count;
    double scattering_length;
    double oscillator_length;
  };

  explicit ModelParams(double interaction = 0.0);
  static ModelParams from_physical(double particle_count, double scattering_length,
                                   double oscillator_length);

  double interaction() const { return p_; }
  const std::optional<Physical>& physical() const { return physical_; }

 private:
  double p_;
  std::optional<Physical> physical_;
};

enum class ModelKind { Variational3D, Radial, ImpactOscillator, Mathieu, CenterOfMass };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);
int dimension(ModelKind kind);
bool is_width_model(ModelKind kind);

/// Shape of the repulsive barrier in the radial model. Standard is the
/// variational 1/v^3 + P/v^4; the other two keep a single power law with
/// coefficient (1 + P), so they stay singular at P = 0.
enum class Singularity { Standard, InverseCube, InverseQuartic };

std::string_view to_string(Singularity s);
Singularity singularity_from_string(std::string_view name);

/// Phase-space point for 1- or 3-dimensional models. Unused trailing
/// components stay zero.
struct DynamicalState {
  std::array<double, 3> coordinates{};
  std::array<double, 3> velocities{};
  double time = 0.0;
  int dim = 1;

  static DynamicalState scalar(double q, double qdot, double tau = 0.0);
  static DynamicalState vector3(std::array<double, 3> q, std::array<double, 3> qdot,
                                double tau = 0.0);
};

/// A fully specified right-hand side: model kind, interaction, trap and the
/// channel used by the one-dimensional models.
struct Model {
  ModelKind kind = ModelKind::Radial;
  ModelParams params{};
  TrapModulation trap = TrapModulation::stationary();
  Singularity singularity = Singularity::Standard;
  int channel = 0;

  int dim() const { return dimension(kind); }
  /// Coefficients (c3, c4) of c3/v^3 + c4/v^4 in the radial model.
  std::array<double, 2> barrier_coefficients() const;
};

/// Accelerations at (q, qdot, tau). Throws DomainError on a non-positive
/// width and std::invalid_argument on a dimension mismatch.
std::array<double, 3> rhs(const Model& model, const DynamicalState& state);

namespace detail {
// Non-throwing kernel used by the integrators. Returns false when a width
// coordinate is not strictly positive.
bool accelerations(const Model& model, double tau, const double* q, const double* qdot,
                   double* out) noexcept;
}  // namespace detail

/// First integral at frozen lambda(tau). Conserved when eps = gamma = 0.
double energy(const Model& model, const DynamicalState& state);

/// Unique positive root of lambda0^2 v^5 - c3 v - c4 = 0 (c3 = 1, c4 = P for
/// the standard barrier).
double equilibrium_width(const ModelParams& params, double lambda0,
                         Singularity shape = Singularity::Standard);

/// Small-oscillation frequency about equilibrium_width.
double linearized_frequency(const ModelParams& params, double lambda0,
                            Singularity shape = Singularity::Standard);

/// Stationary widths of the anisotropic variational model.
std::array<double, 3> equilibrium_widths_3d(const ModelParams& params,
                                            std::array<double, 3> lambda0);

/// v = |u|: maps a Mathieu solution onto an impact-oscillator solution.
inline double fold_to_width(double u) { return u < 0.0 ? -u : u; }

}  // namespace parares
