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

#include "commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>

#include "output.hpp"
#include "parares/acceptance.hpp"
#include "parares/asymptotics.hpp"
#include "parares/parallel.hpp"
#include "parares/version.hpp"

namespace parares::cli {

using nlohmann::json;

namespace {

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

Table make_table(const std::string& command, const RunConfig& config,
                 std::vector<std::string> columns) {
  Table t;
  t.columns = std::move(columns);
  t.metadata = {{"program", std::string("parares ") + kVersion},
                {"command", command},
                {"config", json::parse(fingerprint(config))},
                {"generated", timestamp()}};
  return t;
}

json optional_cell(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

unsigned workers(const RunConfig& config) { return resolve_workers(config.workers); }

bool has_energy(ModelKind kind) {
  return kind == ModelKind::Radial || kind == ModelKind::Variational3D ||
         kind == ModelKind::ImpactOscillator;
}

std::vector<std::string> state_columns(ModelKind kind) {
  if (kind == ModelKind::Variational3D) {
    return {"v_x", "v_y", "v_z", "v_x_dot", "v_y_dot", "v_z_dot"};
  }
  if (kind == ModelKind::Mathieu || kind == ModelKind::CenterOfMass) return {"u", "u_dot"};
  return {"v", "v_dot"};
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
  config.validate();
  const Model model = config.build_model();
  const DynamicalState s0 = config.build_setup().initial_state();

  std::vector<std::string> columns{"tau"};
  for (auto& c : state_columns(model.kind)) columns.push_back(c);
  if (has_energy(model.kind)) columns.push_back("energy");
  Table table = make_table("simulate", config, columns);

  Trajectory traj;
  std::string status = "complete";
  int code = kSuccess;
  try {
    traj = model.kind == ModelKind::ImpactOscillator
               ? integrate_with_bounce(model, s0, config.simulate.tau_end, config.integrator)
               : integrate(model, s0, config.simulate.tau_end, config.integrator);
  } catch (const IntegrationError& e) {
    traj = e.partial();
    status = std::string("failed: ") + e.what();
    code = kComputation;
  }
  table.metadata.emplace_back("status", status);
  if (model.kind == ModelKind::ImpactOscillator) {
    table.metadata.emplace_back("bounces", traj.event_times.size());
  }
  const int dim = model.dim();
  for (const auto& s : traj.samples) {
    std::vector<json> row{s.time};
    for (int i = 0; i < dim; ++i) row.emplace_back(s.coordinates[i]);
    for (int i = 0; i < dim; ++i) row.emplace_back(s.velocities[i]);
    if (has_energy(model.kind)) {
      try {
        row.emplace_back(energy(model, s));
      } catch (const DomainError&) {
        row.emplace_back(nullptr);
      }
    }
    table.add_row(std::move(row));
  }
  write_table(config.output.path, config.output.format, table);
  if (code != kSuccess) std::cerr << "parares: " << status << '\n';
  return code;
}

namespace {

int sweep_map(const RunConfig& config) {
  sweep::SweepGrid grid{config.sweep.omega, config.sweep.epsilon, config.build_setup()};
  grid.validate();
  const std::size_t cells = grid.omega.values().size() * grid.epsilon.values().size();

  std::optional<Manifest> manifest;
  sweep::MapOptions opts;
  opts.workers = workers(config);
  if (config.output.path != "-") {
    manifest.emplace(config.output.path + ".manifest.jsonl", fingerprint(config), cells);
    opts.completed = manifest->completed();
    opts.on_cell = [&](std::size_t i, const sweep::PointVerdict& v) { manifest->record(i, v); };
    if (manifest->completed_count() > 0) {
      std::cerr << "parares: resuming, " << manifest->completed_count() << " of " << cells
                << " cells done\n";
    }
  }
  const auto map = sweep::resonance_map(grid, opts);

  Table table = make_table("sweep", config,
                           {"omega", "epsilon", "verdict", "q", "q_stderr", "r_squared",
                            "max_amplitude", "escaped", "periods"});
  for (const auto& c : map.cells) {
    table.add_row({c.omega, c.epsilon, std::string(sweep::to_string(c.verdict)),
                   c.fitted_exponent, c.exponent_stderr, c.r_squared, c.max_amplitude, c.escaped,
                   c.periods});
  }
  write_table(config.output.path, config.output.format, table);
  return kSuccess;
}

int sweep_threshold(const RunConfig& config) {
  const auto setup = config.build_setup();
  const auto& t = config.sweep.threshold;
  sweep::ThresholdOptions opts;
  opts.omega_lo = t.omega_lo;
  opts.omega_hi = t.omega_hi;
  opts.omega_step = t.omega_step;
  opts.epsilon_resolution = t.epsilon_resolution;
  opts.workers = workers(config);
  const auto found = sweep::threshold_scan(config.sweep.epsilon.values(), setup, opts);

  Table table = make_table("sweep", config, {"damping", "epsilon_min", "omega"});
  table.metadata.emplace_back("status", found ? "found" : "no resonance on the epsilon grid");
  table.add_row({config.trap.damping, found ? json(found->epsilon_min) : json(nullptr),
                 found ? json(found->omega) : json(nullptr)});
  write_table(config.output.path, config.output.format, table);
  return kSuccess;
}

int sweep_limit_cycle(const RunConfig& config) {
  const auto setup = config.build_setup();
  const auto& lc = config.sweep.limit_cycle;
  sweep::LimitCycleOptions opts;
  opts.tolerance = lc.tolerance;
  opts.max_periods = lc.max_periods;
  opts.seed_match = lc.seed_match;
  const auto c = sweep::find_limit_cycle(lc.omega, lc.epsilon, setup, opts);

  Table table = make_table("sweep", config,
                           {"omega", "epsilon", "status", "v", "v_dot", "period", "amplitude",
                            "min_width", "max_width", "iterations", "seed_mismatch"});
  if (!c.diagnostic.empty()) table.metadata.emplace_back("diagnostic", c.diagnostic);
  table.add_row({lc.omega, lc.epsilon, std::string(sweep::to_string(c.status)),
                 c.fixed_point.coordinates[0], c.fixed_point.velocities[0], c.period, c.amplitude,
                 c.min_width, c.max_width, c.iterations, c.seed_mismatch});
  write_table(config.output.path, config.output.format, table);
  return kSuccess;
}

}  // namespace

int cmd_sweep(const RunConfig& config) {
  config.validate();
  if (config.sweep.mode == "threshold") return sweep_threshold(config);
  if (config.sweep.mode == "limit_cycle") return sweep_limit_cycle(config);
  return sweep_map(config);
}

int cmd_floquet(const RunConfig& config) {
  config.validate();
  const auto& f = config.floquet;
  const auto eps = f.epsilon.values();
  floquet::WedgeOptions opts;
  opts.omega_tolerance = f.omega_tolerance;
  opts.workers = workers(config);

  Table table = make_table("floquet", config,
                           {"order", "epsilon", "omega_lower", "omega_upper", "asymptotic_lower",
                            "asymptotic_upper"});
  for (const int n : f.orders) {
    const auto w = floquet::trace_wedge(n, eps, config.trap.damping, f.lambda0, opts);
    table.metadata.emplace_back("tip_" + std::to_string(n), json{w.tip[0], w.tip[1]});
    // The asymptotic band describes the first wedge of the unit trap.
    const bool band = n == 1 && f.lambda0 == 1.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      json lo = nullptr, hi = nullptr, alo = nullptr, ahi = nullptr;
      if (!w.empty(i)) {
        lo = w.omega_lower[i];
        hi = w.omega_upper[i];
      }
      if (band) {
        const auto b = asymptotics::resonance_band(eps[i]);
        alo = b.first;
        ahi = b.second;
      }
      table.add_row({n, eps[i], lo, hi, alo, ahi});
    }
  }
  write_table(config.output.path, config.output.format, table);
  return kSuccess;
}

int cmd_asymptote(const RunConfig& config) {
  config.validate();
  const double gamma = config.trap.damping;
  Table table = make_table("asymptote", config,
                           {"omega", "epsilon", "q", "omega_max", "band_lower", "band_upper",
                            "damped_exponent"});
  for (const double e : config.asymptote.epsilon.values()) {
    for (const double w : config.asymptote.omega.values()) {
      const auto p = asymptotics::predict(w, e, gamma);
      table.add_row({w, e, optional_cell(p.q), p.omega_max, p.band.first, p.band.second,
                     optional_cell(p.damped_exponent)});
    }
  }
  write_table(config.output.path, config.output.format, table);
  return kSuccess;
}

int cmd_gpe(const RunConfig& config) {
  config.validate();
  const auto g = config.build_gpe();
  if (config.trap.damping != 0.0) throw ConfigError("/trap/damping", "the GPE is undamped; must be 0");
  const auto& p = config.gpe;
  if (p.snapshot_interval > 0.0 && config.output.path == "-") {
    throw ConfigError("/gpe/snapshot_interval", "snapshots need a file output path");
  }
  auto field = gpe::ground_state(g);
  if (p.dilation != 1.0) field = gpe::dilate(field, p.dilation);
  if (p.displacement != 0.0) field = gpe::translate(field, p.displacement);
  const auto ev = gpe::evolve(field, g, p.tau_end, {p.output_interval, p.snapshot_interval});

  const bool cartesian = g.geometry == gpe::Geometry::Cartesian1D;
  std::vector<std::string> columns{"tau", "norm", "energy", "width", "rms", "gaussian_overlap"};
  if (cartesian) columns.push_back("center");
  Table table = make_table("gpe", config, columns);
  table.metadata.emplace_back("status", ev.escaped ? "domain escape: " + ev.diagnostic
                                                   : std::string("complete"));
  table.metadata.emplace_back("steps", ev.steps);
  table.metadata.emplace_back("max_norm_drift", ev.max_norm_drift);
  table.metadata.emplace_back("max_corrector_residual", ev.max_corrector_residual);
  for (const auto& o : ev.series) {
    std::vector<json> row{o.time, o.norm, o.energy, o.width, o.rms, o.gaussian_overlap};
    if (cartesian) row.emplace_back(o.center);
    table.add_row(std::move(row));
  }
  for (std::size_t k = 0; k < ev.snapshots.size(); ++k) {
    const std::string path = config.output.path + ".snapshot-" + std::to_string(k) + ".bin";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    gpe::write_snapshot(out, ev.snapshots[k]);
    if (!out) throw std::runtime_error("failed writing " + path);
  }
  if (!ev.snapshots.empty()) table.metadata.emplace_back("snapshots", ev.snapshots.size());
  write_table(config.output.path, config.output.format, table);
  return kSuccess;
}

int cmd_verify(const RunConfig& config, const VerifyOptions& options) {
  config.validate();
  auto ids = options.only.empty() ? acceptance::criteria(options.full) : options.only;
  for (const int id : ids) acceptance::name(id);

  acceptance::Options opts;
  opts.workers = workers(config);
  Table table = make_table("verify", config, {"criterion", "name", "passed", "seconds", "detail"});
  bool all = true;
  for (const int id : ids) {
    const auto r = acceptance::run(id, opts);
    std::cerr << acceptance::format(r) << std::endl;
    all = all && r.passed;
    table.add_row({r.id, r.name, r.passed, r.seconds, r.detail});
  }
  table.metadata.emplace_back("result", all ? "pass" : "fail");
  write_table(config.output.path, config.output.format, table);
  return all ? kSuccess : kAcceptance;
}

}  // namespace parares::cli
