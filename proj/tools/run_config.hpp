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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "parares/floquet.hpp"
#include "parares/gpe.hpp"
#include "parares/integrate.hpp"
#include "parares/model.hpp"
#include "parares/sweep.hpp"

namespace parares::cli {

/// Invalid configuration. `path` is a JSON pointer to the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }
  /// 1-based line in the source text, 0 when unknown.
  int line = 0;

 private:
  std::string path_;
};

struct ModelSection {
  std::string kind = "radial";
  double interaction = 9.2;
  std::string singularity = "standard";
  int channel = 0;
};

struct TrapSection {
  std::array<double, 3> base{1.0, 1.0, 1.0};
  /// Per-axis modulation amplitudes are epsilon * pattern.
  std::array<double, 3> pattern{1.0, 1.0, 1.0};
  double epsilon = 0.0;
  double omega = 2.0;
  double damping = 0.0;
};

struct InitialSection {
  std::vector<double> coordinates;
  std::vector<double> velocities;
};

struct SimulateSection {
  double tau_end = 100.0;
};

struct ThresholdSection {
  double omega_lo = 1.8;
  double omega_hi = 2.2;
  double omega_step = 0.005;
  double epsilon_resolution = 0.005;
};

struct LimitCycleSection {
  double omega = 1.9;
  double epsilon = 0.08;
  double tolerance = 1e-8;
  int max_periods = 5000;
  double seed_match = 1e-6;
};

struct SweepSection {
  /// map | threshold | limit_cycle
  std::string mode = "map";
  sweep::Range omega{1.5, 2.5, 0.01};
  sweep::Range epsilon{0.02, 0.5, 0.02};
  ThresholdSection threshold;
  LimitCycleSection limit_cycle;
};

struct FloquetSection {
  std::vector<int> orders{1, 2, 3};
  sweep::Range epsilon{0.01, 0.5, 0.01};
  double lambda0 = 1.0;
  double omega_tolerance = 1e-7;
};

struct AsymptoteSection {
  sweep::Range omega{1.8, 2.2, 0.01};
  sweep::Range epsilon{0.05, 0.3, 0.05};
};

struct GpeSection {
  std::string geometry = "radial3d";
  double extent = 0.0;
  int points = 2048;
  double dt = 1e-3;
  /// Defaults to (2 pi)^{3/2} * model.interaction.
  std::optional<double> coupling;
  int corrector_sweeps = 1;
  double imaginary_dt = 0.05;
  long max_imaginary_steps = 1'000'000;
  double tau_end = 50.0;
  double output_interval = 0.1;
  /// 0 disables snapshot files.
  double snapshot_interval = 0.0;
  /// Initial state: ground state dilated by `dilation`, then shifted by
  /// `displacement` (cartesian1d only).
  double dilation = 1.0;
  double displacement = 0.0;
};

struct OutputSection {
  /// "-" writes to standard output.
  std::string path = "-";
  /// csv | json
  std::string format = "csv";
};

struct RunConfig {
  ModelSection model;
  TrapSection trap;
  std::optional<InitialSection> initial;
  IntegratorConfig integrator = default_integrator();
  sweep::GrowthCriteria criteria;
  SimulateSection simulate;
  SweepSection sweep;
  FloquetSection floquet;
  AsymptoteSection asymptote;
  GpeSection gpe;
  OutputSection output;
  /// 0 uses every hardware thread.
  unsigned workers = 0;
  /// Reserved; every pipeline is deterministic.
  std::uint64_t seed = 0;

  static IntegratorConfig default_integrator();

  Model build_model() const;
  TrapModulation build_trap() const;
  std::optional<DynamicalState> build_initial() const;
  sweep::PointSetup build_setup() const;
  gpe::GpeConfig build_gpe() const;
  /// Range and option checks that do not require computation.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Strict: unknown keys and mistyped values throw ConfigError.
RunConfig from_json(const nlohmann::json& j);

/// Parses config text; syntax errors carry the line number.
nlohmann::json parse_text(const std::string& text);
/// Best-effort line of the field `pointer` inside `text`, 0 if not found.
int locate(const std::string& text, const std::string& pointer);

/// Every leaf of the default configuration as "a.b.c" paths.
std::vector<std::string> leaf_keys();
/// Sets the dotted key to `value`, parsed as JSON when possible and taken
/// as a string otherwise.
void apply_override(nlohmann::json& j, const std::string& dotted, const std::string& value);

/// Canonical text of every result-relevant field (all but output and
/// workers); embedded in output metadata and sweep manifests.
std::string fingerprint(const RunConfig& config);

}  // namespace parares::cli
