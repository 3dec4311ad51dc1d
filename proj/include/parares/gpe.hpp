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

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parares/model.hpp"
#include "parares/sweep.hpp"

namespace parares::gpe {

// Dimensionless Gross-Pitaevskii equation in oscillator units,
//
//   i psi_t = -1/2 lap psi + 1/2 lambda^2(t) r^2 psi + g |psi|^2 psi,
//
// normalized to one. radial3d stores chi = r psi on r_j = j h, j = 1..M,
// h = R / (M + 1); cartesian1d stores psi on x_j = -R + j h, h = 2R / (M + 1).
// Both grids carry homogeneous Dirichlet ends.

enum class Geometry { Radial3D, Cartesian1D };

std::string_view to_string(Geometry g);
Geometry geometry_from_string(std::string_view name);

/// (2 pi)^{3/2} P: coupling reproducing the width equations' interaction.
double coupling_from(const ModelParams& params);

struct GpeConfig {
  Geometry geometry = Geometry::Radial3D;
  /// Domain extent R; 0 picks 8 * max(1, v*) from the coupling.
  double extent = 0.0;
  int points = 2048;
  double dt = 1e-3;
  double coupling = 0.0;
  TrapModulation trap = TrapModulation::stationary();
  int channel = 0;
  /// Fixed-point sweeps of the nonlinear corrector per step.
  int corrector_sweeps = 1;
  double imaginary_dt = 0.05;
  long max_imaginary_steps = 1'000'000;

  void validate() const;
  double resolved_extent() const;
  double spacing() const;
  double coordinate(int j) const;
};

struct WaveField {
  Geometry geometry = Geometry::Radial3D;
  double extent = 0.0;
  double spacing = 0.0;
  double time = 0.0;
  std::vector<std::complex<double>> values;

  int points() const { return static_cast<int>(values.size()); }
  double coordinate(int j) const;
  /// psi at grid point j (chi / r for radial3d).
  std::complex<double> psi(int j) const;
};

struct Observables {
  double time = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  /// sqrt(<r^2>) or sqrt(<x^2>).
  double rms = 0.0;
  /// Gaussian width parameter: rms / sqrt(3/2) (radial) or rms / sqrt(1/2).
  double width = 0.0;
  /// <x>; zero for radial3d.
  double center = 0.0;
  /// |<gaussian of equal rms width | |psi|>|^2; 1 for a pure Gaussian.
  double gaussian_overlap = 0.0;
};

Observables measure(const WaveField& field, const GpeConfig& config);

class GpeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The field reached the edge of the grid.
class DomainEscape : public GpeError {
 public:
  using GpeError::GpeError;
};

/// Backward-Euler imaginary-time ground state of the undriven trap (the
/// drive is ignored). Throws GpeError when the chemical potential does not
/// settle within max_imaginary_steps.
WaveField ground_state(const GpeConfig& config);

struct EvolveOptions {
  double output_interval = 0.1;
  /// 0 disables snapshots.
  double snapshot_interval = 0.0;
};

struct Evolution {
  WaveField field;
  std::vector<Observables> series;
  std::vector<WaveField> snapshots;
  /// Set when the run stopped at the grid edge.
  bool escaped = false;
  std::string diagnostic;
  double max_corrector_residual = 0.0;
  double max_norm_drift = 0.0;
  long steps = 0;
};

/// Crank-Nicolson real-time evolution to tau_end. Domain escape ends the run
/// early with `escaped` set; cumulative norm drift above 1e-8 throws GpeError.
Evolution evolve(const WaveField& field, const GpeConfig& config, double tau_end,
                 const EvolveOptions& options = {});

/// psi(x) -> psi(x - d) (cartesian1d only), cubic interpolation, renormalized.
WaveField translate(const WaveField& field, double displacement);
/// psi(r) -> psi(r / s), renormalized.
WaveField dilate(const WaveField& field, double factor);

struct ComCheck {
  std::vector<double> times;
  std::vector<double> pde;
  std::vector<double> ode;
  double max_deviation = 0.0;
  bool escaped = false;
};

/// Displaced ground state against the center-of-mass Mathieu equation.
ComCheck center_of_mass_check(const GpeConfig& config, double displacement, double tau_end,
                              double output_interval = 0.05);

/// Resonance verdict of the condensate width under the drive (omega, eps):
/// ground state of `config`, dilated by 1 + seed_offset, evolved to tau_max
/// and judged by sweep::classify_series against the ground-state width.
/// Domain escape counts as resonant.
sweep::PointVerdict classify_width(const GpeConfig& config, double omega, double epsilon,
                                   const sweep::GrowthCriteria& criteria = {});

/// Binary snapshot: "PRGPE001", u32 geometry, u32 reserved, u64 M, f64 extent,
/// f64 spacing, f64 time, then M (re, im) f64 pairs, all little-endian.
void write_snapshot(std::ostream& out, const WaveField& field);
WaveField read_snapshot(std::istream& in);

}  // namespace parares::gpe
