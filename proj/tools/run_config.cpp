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

#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace parares::cli {

using nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::invalid_argument(path.empty() ? message : path + ": " + message),
      path_(std::move(path)) {}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

void read(const json& v, const std::string& path, double& out) {
  if (!v.is_number()) fail(path, "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) fail(path, "expected a finite number");
}

void read(const json& v, const std::string& path, long& out) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  out = v.get<long>();
}

void read(const json& v, const std::string& path, int& out) {
  long x = 0;
  read(v, path, x);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    fail(path, "integer out of range");
  }
  out = static_cast<int>(x);
}

void read(const json& v, const std::string& path, unsigned& out) {
  long x = 0;
  read(v, path, x);
  if (x < 0 || x > std::numeric_limits<unsigned>::max()) fail(path, "expected a count >= 0");
  out = static_cast<unsigned>(x);
}

void read(const json& v, const std::string& path, std::uint64_t& out) {
  if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
  out = v.get<std::uint64_t>();
}

void read(const json& v, const std::string& path, std::string& out) {
  if (!v.is_string()) fail(path, "expected a string");
  out = v.get<std::string>();
}

void read(const json& v, const std::string& path, std::optional<double>& out) {
  if (v.is_null()) {
    out.reset();
    return;
  }
  double x = 0.0;
  read(v, path, x);
  out = x;
}

template <class T>
void read(const json& v, const std::string& path, std::vector<T>& out) {
  if (!v.is_array()) fail(path, "expected an array");
  out.assign(v.size(), T{});
  for (std::size_t i = 0; i < v.size(); ++i) read(v[i], path + "/" + std::to_string(i), out[i]);
}

void read(const json& v, const std::string& path, std::array<double, 3>& out) {
  if (!v.is_array() || v.size() != 3) fail(path, "expected an array of 3 numbers");
  for (std::size_t i = 0; i < 3; ++i) read(v[i], path + "/" + std::to_string(i), out[i]);
}

void read(const json& v, const std::string& path, sweep::Range& out);

/// Consumes the keys of one object and rejects whatever is left over.
class Reader {
 public:
  Reader(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ != nullptr && !j_->is_object()) fail(path_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    if (const json* v = find(key)) read(*v, path_ + "/" + key, out);
  }

  Reader sub(const char* key) {
    return Reader(find(key), path_ + "/" + key);
  }

  const json* find(const char* key) {
    if (j_ == nullptr) return nullptr;
    used_.insert(key);
    const auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  const std::string& path() const { return path_; }

  void finish() const {
    if (j_ == nullptr) return;
    for (const auto& [key, _] : j_->items()) {
      if (!used_.count(key)) fail(path_ + "/" + key, "unknown key");
    }
  }

 private:
  const json* j_;
  std::string path_;
  std::set<std::string> used_;
};

void read(const json& v, const std::string& path, sweep::Range& out) {
  Reader r(&v, path);
  r.get("lo", out.lo);
  r.get("hi", out.hi);
  r.get("step", out.step);
  r.finish();
}

json range_json(const sweep::Range& r) { return {{"lo", r.lo}, {"hi", r.hi}, {"step", r.step}}; }

void check_range(const std::string& path, const sweep::Range& r, double min_lo) {
  if (!(r.step > 0.0)) fail(path + "/step", "must be > 0");
  if (!(r.lo >= min_lo)) fail(path + "/lo", "must be >= " + std::to_string(min_lo));
  if (!(r.hi >= r.lo)) fail(path + "/hi", "must be >= lo");
  if ((r.hi - r.lo) / r.step > 1e7) fail(path, "too many grid points");
}

/// Runs `fn` and rebrands any validation failure as a ConfigError at `path`.
template <class Fn>
void guarded(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

}  // namespace

IntegratorConfig RunConfig::default_integrator() {
  IntegratorConfig c;
  c.output_interval = 0.01;
  return c;
}

TrapModulation RunConfig::build_trap() const {
  std::array<double, 3> amps{};
  for (int i = 0; i < 3; ++i) amps[i] = trap.epsilon * trap.pattern[i];
  return TrapModulation(trap.base, amps, trap.omega, trap.damping);
}

Model RunConfig::build_model() const {
  Model m;
  m.kind = model_kind_from_string(model.kind);
  m.params = ModelParams(model.interaction);
  m.singularity = singularity_from_string(model.singularity);
  m.channel = model.channel;
  m.trap = build_trap();
  return m;
}

std::optional<DynamicalState> RunConfig::build_initial() const {
  if (!initial) return std::nullopt;
  const auto& c = initial->coordinates;
  const auto& v = initial->velocities;
  if (c.size() == 1) return DynamicalState::scalar(c[0], v[0]);
  return DynamicalState::vector3({c[0], c[1], c[2]}, {v[0], v[1], v[2]});
}

sweep::PointSetup RunConfig::build_setup() const {
  sweep::PointSetup s;
  s.model = build_model();
  s.drive_pattern = trap.pattern;
  s.initial = build_initial();
  s.criteria = criteria;
  s.integrator = integrator;
  return s;
}

gpe::GpeConfig RunConfig::build_gpe() const {
  gpe::GpeConfig g;
  g.geometry = gpe::geometry_from_string(gpe.geometry);
  g.extent = gpe.extent;
  g.points = gpe.points;
  g.dt = gpe.dt;
  g.coupling = gpe.coupling ? *gpe.coupling : gpe::coupling_from(ModelParams(model.interaction));
  g.trap = build_trap();
  g.channel = model.channel;
  g.corrector_sweeps = gpe.corrector_sweeps;
  g.imaginary_dt = gpe.imaginary_dt;
  g.max_imaginary_steps = gpe.max_imaginary_steps;
  return g;
}

void RunConfig::validate() const {
  guarded("/model/kind", [&] { model_kind_from_string(model.kind); });
  guarded("/model/interaction", [&] { ModelParams p(model.interaction); });
  guarded("/model/singularity", [&] { singularity_from_string(model.singularity); });
  if (model.channel < 0 || model.channel > 2) fail("/model/channel", "must be 0, 1 or 2");
  guarded("/trap", [&] { build_trap(); });
  if (initial) {
    const int dim = dimension(model_kind_from_string(model.kind));
    const auto n = static_cast<std::size_t>(dim);
    if (initial->coordinates.size() != n) {
      fail("/initial/coordinates", "expected " + std::to_string(dim) + " entries");
    }
    if (initial->velocities.size() != n) {
      fail("/initial/velocities", "expected " + std::to_string(dim) + " entries");
    }
  }
  guarded("/integrator", [&] { integrator.validate(); });
  guarded("/criteria", [&] { criteria.validate(); });
  if (!(simulate.tau_end > 0.0)) fail("/simulate/tau_end", "must be > 0");

  if (sweep.mode != "map" && sweep.mode != "threshold" && sweep.mode != "limit_cycle") {
    fail("/sweep/mode", "expected map, threshold or limit_cycle");
  }
  check_range("/sweep/omega", sweep.omega, std::numeric_limits<double>::min());
  check_range("/sweep/epsilon", sweep.epsilon, 0.0);
  const auto& t = sweep.threshold;
  if (!(t.omega_lo > 0.0)) fail("/sweep/threshold/omega_lo", "must be > 0");
  if (!(t.omega_hi > t.omega_lo)) fail("/sweep/threshold/omega_hi", "must be > omega_lo");
  if (!(t.omega_step > 0.0)) fail("/sweep/threshold/omega_step", "must be > 0");
  if (!(t.epsilon_resolution > 0.0)) fail("/sweep/threshold/epsilon_resolution", "must be > 0");
  const auto& lc = sweep.limit_cycle;
  if (!(lc.omega > 0.0)) fail("/sweep/limit_cycle/omega", "must be > 0");
  if (!(lc.epsilon >= 0.0)) fail("/sweep/limit_cycle/epsilon", "must be >= 0");
  if (!(lc.tolerance > 0.0)) fail("/sweep/limit_cycle/tolerance", "must be > 0");
  if (lc.max_periods <= 0) fail("/sweep/limit_cycle/max_periods", "must be > 0");
  if (!(lc.seed_match > 0.0)) fail("/sweep/limit_cycle/seed_match", "must be > 0");

  if (floquet.orders.empty()) fail("/floquet/orders", "must not be empty");
  for (std::size_t i = 0; i < floquet.orders.size(); ++i) {
    if (floquet.orders[i] < 1 || floquet.orders[i] > 3) {
      fail("/floquet/orders/" + std::to_string(i), "must be 1, 2 or 3");
    }
  }
  check_range("/floquet/epsilon", floquet.epsilon, 0.0);
  if (floquet.epsilon.hi > 0.8) fail("/floquet/epsilon/hi", "must be <= 0.8");
  if (!(floquet.lambda0 > 0.0)) fail("/floquet/lambda0", "must be > 0");
  if (!(floquet.omega_tolerance > 0.0)) fail("/floquet/omega_tolerance", "must be > 0");

  check_range("/asymptote/omega", asymptote.omega, std::numeric_limits<double>::min());
  check_range("/asymptote/epsilon", asymptote.epsilon, 0.0);

  guarded("/gpe/geometry", [&] { gpe::geometry_from_string(gpe.geometry); });
  if (gpe.coupling && *gpe.coupling < 0.0) fail("/gpe/coupling", "must be >= 0");
  // Damping belongs to the ODE models; cmd_gpe rejects it separately.
  guarded("/gpe", [&] {
    auto g = build_gpe();
    g.trap = g.trap.with_damping(0.0);
    g.validate();
  });
  if (!(gpe.tau_end > 0.0)) fail("/gpe/tau_end", "must be > 0");
  if (!(gpe.output_interval > 0.0)) fail("/gpe/output_interval", "must be > 0");
  if (!(gpe.snapshot_interval >= 0.0)) fail("/gpe/snapshot_interval", "must be >= 0");
  if (!(gpe.dilation > 0.0)) fail("/gpe/dilation", "must be > 0");
  if (gpe.displacement != 0.0 && gpe.geometry != "cartesian1d") {
    fail("/gpe/displacement", "only available for cartesian1d");
  }

  if (output.format != "csv" && output.format != "json") fail("/output/format", "expected csv or json");
  if (output.path.empty()) fail("/output/path", "must not be empty");
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"kind", c.model.kind},
                {"interaction", c.model.interaction},
                {"singularity", c.model.singularity},
                {"channel", c.model.channel}};
  j["trap"] = {{"base", c.trap.base},
               {"pattern", c.trap.pattern},
               {"epsilon", c.trap.epsilon},
               {"omega", c.trap.omega},
               {"damping", c.trap.damping}};
  j["initial"] = c.initial ? json{{"coordinates", c.initial->coordinates},
                                  {"velocities", c.initial->velocities}}
                           : json(nullptr);
  const auto& i = c.integrator;
  j["integrator"] = {{"rel_tol", i.rel_tol},
                     {"abs_tol", i.abs_tol},
                     {"h_init", i.h_init},
                     {"h_min", i.h_min},
                     {"h_max", i.h_max},
                     {"width_floor", i.width_floor},
                     {"stiff_switch_threshold", i.stiff_switch_threshold},
                     {"max_steps", i.max_steps},
                     {"output_interval", i.output_interval}};
  const auto& g = c.criteria;
  j["criteria"] = {{"tau_max", g.tau_max},
                   {"q_threshold", g.q_threshold},
                   {"r2_min", g.r2_min},
                   {"escape_factor", g.escape_factor},
                   {"cycle_tolerance", g.cycle_tolerance},
                   {"seed_offset", g.seed_offset},
                   {"samples_per_period", g.samples_per_period}};
  j["simulate"] = {{"tau_end", c.simulate.tau_end}};
  const auto& t = c.sweep.threshold;
  const auto& lc = c.sweep.limit_cycle;
  j["sweep"] = {{"mode", c.sweep.mode},
                {"omega", range_json(c.sweep.omega)},
                {"epsilon", range_json(c.sweep.epsilon)},
                {"threshold",
                 {{"omega_lo", t.omega_lo},
                  {"omega_hi", t.omega_hi},
                  {"omega_step", t.omega_step},
                  {"epsilon_resolution", t.epsilon_resolution}}},
                {"limit_cycle",
                 {{"omega", lc.omega},
                  {"epsilon", lc.epsilon},
                  {"tolerance", lc.tolerance},
                  {"max_periods", lc.max_periods},
                  {"seed_match", lc.seed_match}}}};
  j["floquet"] = {{"orders", c.floquet.orders},
                  {"epsilon", range_json(c.floquet.epsilon)},
                  {"lambda0", c.floquet.lambda0},
                  {"omega_tolerance", c.floquet.omega_tolerance}};
  j["asymptote"] = {{"omega", range_json(c.asymptote.omega)},
                    {"epsilon", range_json(c.asymptote.epsilon)}};
  const auto& p = c.gpe;
  j["gpe"] = {{"geometry", p.geometry},
              {"extent", p.extent},
              {"points", p.points},
              {"dt", p.dt},
              {"coupling", p.coupling ? json(*p.coupling) : json(nullptr)},
              {"corrector_sweeps", p.corrector_sweeps},
              {"imaginary_dt", p.imaginary_dt},
              {"max_imaginary_steps", p.max_imaginary_steps},
              {"tau_end", p.tau_end},
              {"output_interval", p.output_interval},
              {"snapshot_interval", p.snapshot_interval},
              {"dilation", p.dilation},
              {"displacement", p.displacement}};
  j["output"] = {{"path", c.output.path}, {"format", c.output.format}};
  j["workers"] = c.workers;
  j["seed"] = c.seed;
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  Reader root(&j, "");

  Reader m = root.sub("model");
  m.get("kind", c.model.kind);
  m.get("interaction", c.model.interaction);
  m.get("singularity", c.model.singularity);
  m.get("channel", c.model.channel);
  m.finish();

  Reader t = root.sub("trap");
  t.get("base", c.trap.base);
  t.get("pattern", c.trap.pattern);
  t.get("epsilon", c.trap.epsilon);
  t.get("omega", c.trap.omega);
  t.get("damping", c.trap.damping);
  t.finish();

  if (const json* init = root.find("initial"); init != nullptr && !init->is_null()) {
    Reader r(init, "/initial");
    InitialSection s;
    if (r.find("coordinates") == nullptr) fail("/initial/coordinates", "required");
    if (r.find("velocities") == nullptr) fail("/initial/velocities", "required");
    r.get("coordinates", s.coordinates);
    r.get("velocities", s.velocities);
    r.finish();
    c.initial = s;
  }

  Reader i = root.sub("integrator");
  i.get("rel_tol", c.integrator.rel_tol);
  i.get("abs_tol", c.integrator.abs_tol);
  i.get("h_init", c.integrator.h_init);
  i.get("h_min", c.integrator.h_min);
  i.get("h_max", c.integrator.h_max);
  i.get("width_floor", c.integrator.width_floor);
  i.get("stiff_switch_threshold", c.integrator.stiff_switch_threshold);
  i.get("max_steps", c.integrator.max_steps);
  i.get("output_interval", c.integrator.output_interval);
  i.finish();

  Reader g = root.sub("criteria");
  g.get("tau_max", c.criteria.tau_max);
  g.get("q_threshold", c.criteria.q_threshold);
  g.get("r2_min", c.criteria.r2_min);
  g.get("escape_factor", c.criteria.escape_factor);
  g.get("cycle_tolerance", c.criteria.cycle_tolerance);
  g.get("seed_offset", c.criteria.seed_offset);
  g.get("samples_per_period", c.criteria.samples_per_period);
  g.finish();

  Reader s = root.sub("simulate");
  s.get("tau_end", c.simulate.tau_end);
  s.finish();

  Reader w = root.sub("sweep");
  w.get("mode", c.sweep.mode);
  w.get("omega", c.sweep.omega);
  w.get("epsilon", c.sweep.epsilon);
  Reader th = w.sub("threshold");
  th.get("omega_lo", c.sweep.threshold.omega_lo);
  th.get("omega_hi", c.sweep.threshold.omega_hi);
  th.get("omega_step", c.sweep.threshold.omega_step);
  th.get("epsilon_resolution", c.sweep.threshold.epsilon_resolution);
  th.finish();
  Reader lc = w.sub("limit_cycle");
  lc.get("omega", c.sweep.limit_cycle.omega);
  lc.get("epsilon", c.sweep.limit_cycle.epsilon);
  lc.get("tolerance", c.sweep.limit_cycle.tolerance);
  lc.get("max_periods", c.sweep.limit_cycle.max_periods);
  lc.get("seed_match", c.sweep.limit_cycle.seed_match);
  lc.finish();
  w.finish();

  Reader f = root.sub("floquet");
  f.get("orders", c.floquet.orders);
  f.get("epsilon", c.floquet.epsilon);
  f.get("lambda0", c.floquet.lambda0);
  f.get("omega_tolerance", c.floquet.omega_tolerance);
  f.finish();

  Reader a = root.sub("asymptote");
  a.get("omega", c.asymptote.omega);
  a.get("epsilon", c.asymptote.epsilon);
  a.finish();

  Reader p = root.sub("gpe");
  p.get("geometry", c.gpe.geometry);
  p.get("extent", c.gpe.extent);
  p.get("points", c.gpe.points);
  p.get("dt", c.gpe.dt);
  p.get("coupling", c.gpe.coupling);
  p.get("corrector_sweeps", c.gpe.corrector_sweeps);
  p.get("imaginary_dt", c.gpe.imaginary_dt);
  p.get("max_imaginary_steps", c.gpe.max_imaginary_steps);
  p.get("tau_end", c.gpe.tau_end);
  p.get("output_interval", c.gpe.output_interval);
  p.get("snapshot_interval", c.gpe.snapshot_interval);
  p.get("dilation", c.gpe.dilation);
  p.get("displacement", c.gpe.displacement);
  p.finish();

  Reader o = root.sub("output");
  o.get("path", c.output.path);
  o.get("format", c.output.format);
  o.finish();

  root.get("workers", c.workers);
  root.get("seed", c.seed);
  root.finish();
  return c;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto end = std::min<std::size_t>(e.byte, text.size());
    ConfigError err("", std::string("syntax error: ") + e.what());
    err.line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(end), '\n'));
    throw err;
  }
}

int locate(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  bool found = false;
  std::stringstream parts(pointer);
  std::string part;
  while (std::getline(parts, part, '/')) {
    if (part.empty() || std::all_of(part.begin(), part.end(), ::isdigit)) continue;
    const auto at = text.find('"' + part + '"', pos);
    if (at == std::string::npos) break;
    pos = at;
    found = true;
  }
  if (!found) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

std::vector<std::string> leaf_keys() {
  std::vector<std::string> out;
  auto walk = [&](auto&& self, const json& j, const std::string& prefix) -> void {
    for (const auto& [key, value] : j.items()) {
      const std::string name = prefix.empty() ? key : prefix + "." + key;
      if (value.is_object()) {
        self(self, value, name);
      } else {
        out.push_back(name);
      }
    }
  };
  walk(walk, to_json(RunConfig{}), "");
  return out;
}

void apply_override(json& j, const std::string& dotted, const std::string& value) {
  json* node = &j;
  std::stringstream parts(dotted);
  std::string part;
  std::vector<std::string> keys;
  while (std::getline(parts, part, '.')) keys.push_back(part);
  for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) fail("/" + keys[k], "cannot override inside a non-object");
    node = &(*node)[keys[k]];
  }
  if (node->is_null()) *node = json::object();
  if (!node->is_object()) fail("--" + dotted, "cannot override inside a non-object");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  (*node)[keys.back()] = std::move(parsed);
}

std::string fingerprint(const RunConfig& config) {
  json j = to_json(config);
  j.erase("output");
  j.erase("workers");
  return j.dump();
}

}  // namespace parares::cli
