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

#include "parares/gpe.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "parares/integrate.hpp"

namespace parares::gpe {

using cplx = std::complex<double>;
using std::numbers::pi;

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

std::string_view to_string(Geometry g) {
  return g == Geometry::Radial3D ? "radial3d" : "cartesian1d";
}

Geometry geometry_from_string(std::string_view name) {
  if (name == "radial3d") return Geometry::Radial3D;
  if (name == "cartesian1d") return Geometry::Cartesian1D;
  throw std::invalid_argument("unknown geometry: " + std::string(name));
}

double coupling_from(const ModelParams& params) {
  return std::pow(2.0 * pi, 1.5) * params.interaction();
}

void GpeConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(extent >= 0.0, "gpe: extent must be >= 0");
  require(points >= 16, "gpe: points must be >= 16");
  require(dt > 0.0 && dt <= 1e-2, "gpe: dt must lie in (0, 1e-2]");
  require(coupling >= 0.0, "gpe: coupling must be >= 0");
  require(channel >= 0 && channel <= 2, "gpe: channel must be 0..2");
  require(trap.damping() == 0.0, "gpe: the condensate evolution is undamped");
  require(corrector_sweeps >= 0, "gpe: corrector_sweeps must be >= 0");
  require(imaginary_dt > 0.0, "gpe: imaginary_dt must be > 0");
  require(max_imaginary_steps > 0, "gpe: max_imaginary_steps must be > 0");
}

double GpeConfig::resolved_extent() const {
  if (extent > 0.0) return extent;
  const double lambda0 = trap.base_strengths()[channel];
  const double v = equilibrium_width(ModelParams(coupling / std::pow(2.0 * pi, 1.5)), lambda0);
  return 8.0 * std::max(1.0, v);
}

double GpeConfig::spacing() const {
  const double r = resolved_extent();
  return (geometry == Geometry::Radial3D ? r : 2.0 * r) / (points + 1);
}

double GpeConfig::coordinate(int j) const {
  const double h = spacing();
  return geometry == Geometry::Radial3D ? (j + 1) * h : -resolved_extent() + (j + 1) * h;
}

double WaveField::coordinate(int j) const {
  return geometry == Geometry::Radial3D ? (j + 1) * spacing : -extent + (j + 1) * spacing;
}

cplx WaveField::psi(int j) const {
  return geometry == Geometry::Radial3D ? values[j] / coordinate(j) : values[j];
}

namespace {

constexpr double kGroundResidual = 1e-9;

double measure_weight(Geometry g) { return g == Geometry::Radial3D ? 4.0 * pi : 1.0; }

// |psi|^2 on the grid of f for stored values u.
void density(const WaveField& f, const std::vector<cplx>& u, std::vector<double>& out) {
  const int m = static_cast<int>(u.size());
  out.resize(m);
  for (int j = 0; j < m; ++j) {
    const double a = std::norm(u[j]);
    if (f.geometry == Geometry::Radial3D) {
      const double r = f.coordinate(j);
      out[j] = a / (r * r);
    } else {
      out[j] = a;
    }
  }
}

double norm_of(const WaveField& f) {
  double s = 0.0;
  for (const auto& u : f.values) s += std::norm(u);
  return measure_weight(f.geometry) * f.spacing * s;
}

void normalize(WaveField& f) {
  const double n = norm_of(f);
  if (!(n > 0.0)) throw GpeError("gpe: cannot normalize a vanishing field");
  const double s = 1.0 / std::sqrt(n);
  for (auto& u : f.values) u *= s;
}

// Tridiagonal solve with constant off-diagonal; x may alias rhs.
void thomas(const std::vector<cplx>& diag, cplx off, const std::vector<cplx>& rhs,
            std::vector<cplx>& x, std::vector<cplx>& work) {
  const std::size_t m = diag.size();
  work.resize(m);
  x.resize(m);
  cplx denom = diag[0];
  work[0] = off / denom;
  x[0] = rhs[0] / denom;
  for (std::size_t j = 1; j < m; ++j) {
    denom = diag[j] - off * work[j - 1];
    work[j] = off / denom;
    x[j] = (rhs[j] - off * x[j - 1]) / denom;
  }
  for (std::size_t j = m - 1; j-- > 0;) x[j] -= work[j] * x[j + 1];
}

WaveField empty_field(const GpeConfig& c) {
  WaveField f;
  f.geometry = c.geometry;
  f.extent = c.resolved_extent();
  f.spacing = c.spacing();
  f.values.assign(static_cast<std::size_t>(c.points), cplx(0.0, 0.0));
  return f;
}

void check_grid(const WaveField& f, const GpeConfig& c) {
  if (f.geometry != c.geometry || f.points() != c.points ||
      std::abs(f.spacing - c.spacing()) > 1e-12 * c.spacing()) {
    throw std::invalid_argument("gpe: field does not match the configured grid");
  }
}

// Cubic Lagrange interpolation of the stored variable including the zero
// Dirichlet end nodes; zero outside the grid.
cplx interpolate(const WaveField& f, double p) {
  const int m = f.points();
  const double c0 = f.geometry == Geometry::Radial3D ? 0.0 : -f.extent;
  const double idx = (p - c0) / f.spacing;
  if (idx <= 0.0 || idx >= m + 1) return {0.0, 0.0};
  auto node = [&](int k) -> cplx {
    return (k <= 0 || k >= m + 1) ? cplx(0.0, 0.0) : f.values[k - 1];
  };
  const int k = static_cast<int>(std::floor(idx));
  const double t = idx - k;
  const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return w0 * node(k - 1) + w1 * node(k) + w2 * node(k + 1) + w3 * node(k + 2);
}

bool at_edge(const WaveField& f) {
  constexpr int kCells = 5;
  constexpr double kLevel = 1e-8;
  const int m = f.points();
  for (int j = std::max(0, m - kCells); j < m; ++j) {
    if (std::norm(f.psi(j)) > kLevel) return true;
  }
  if (f.geometry == Geometry::Cartesian1D) {
    for (int j = 0; j < std::min(kCells, m); ++j) {
      if (std::norm(f.psi(j)) > kLevel) return true;
    }
  }
  return false;
}

}  // namespace

Observables measure(const WaveField& f, const GpeConfig& config) {
  Observables o;
  o.time = f.time;
  const int m = f.points();
  const double h = f.spacing;
  const double w = measure_weight(f.geometry);
  const double lam2 = config.trap.strength_squared(config.channel, f.time);
  std::vector<double> dens;
  density(f, f.values, dens);

  double n = 0.0, x1 = 0.0, x2 = 0.0, kin = 0.0, pot = 0.0, inter = 0.0;
  for (int j = 0; j < m; ++j) {
    const double a = std::norm(f.values[j]);
    const double c = f.coordinate(j);
    n += a;
    x1 += c * a;
    x2 += c * c * a;
    pot += 0.5 * lam2 * c * c * a;
    inter += 0.5 * config.coupling * dens[j] * a;
  }
  for (int j = 0; j <= m; ++j) {
    const cplx left = j == 0 ? cplx(0.0, 0.0) : f.values[j - 1];
    const cplx right = j == m ? cplx(0.0, 0.0) : f.values[j];
    kin += 0.5 * std::norm(right - left) / (h * h);
  }
  o.norm = w * h * n;
  o.energy = w * h * (kin + pot + inter);
  const double mean_x2 = x2 / n;
  o.rms = std::sqrt(mean_x2);
  if (f.geometry == Geometry::Radial3D) {
    o.width = o.rms / std::sqrt(1.5);
    const double g = o.width;
    const double amp = std::pow(pi * g * g, -0.75);
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double r = f.coordinate(j);
      s += r * std::abs(f.values[j]) * amp * std::exp(-r * r / (2.0 * g * g));
    }
    const double overlap = w * h * s;
    o.gaussian_overlap = overlap * overlap / o.norm;
  } else {
    o.width = o.rms / std::sqrt(0.5);
    o.center = x1 / n;
    const double var = std::max(mean_x2 - o.center * o.center, 1e-300);
    const double g = std::sqrt(2.0 * var);
    const double amp = std::pow(pi * g * g, -0.25);
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double d = f.coordinate(j) - o.center;
      s += std::abs(f.values[j]) * amp * std::exp(-d * d / (2.0 * g * g));
    }
    const double overlap = h * s;
    o.gaussian_overlap = overlap * overlap / o.norm;
  }
  return o;
}

WaveField ground_state(const GpeConfig& config) {
  config.validate();
  WaveField f = empty_field(config);
  const int m = config.points;
  const double h = f.spacing;
  const double lam2 = std::pow(config.trap.base_strengths()[config.channel], 2);
  const double v0 = 0.5 * f.extent / 8.0 + 0.5;
  for (int j = 0; j < m; ++j) {
    const double c = f.coordinate(j);
    const double g = std::exp(-c * c / (2.0 * v0 * v0));
    f.values[j] = config.geometry == Geometry::Radial3D ? c * g : g;
  }
  normalize(f);

  const double dt = config.imaginary_dt;
  const double off = -0.5 / (h * h);
  const double w = measure_weight(config.geometry);
  std::vector<double> pot(m), dens;
  for (int j = 0; j < m; ++j) {
    const double c = f.coordinate(j);
    pot[j] = 0.5 * lam2 * c * c;
  }
  std::vector<cplx> diag(m), next, work;
  double mu_prev = std::numeric_limits<double>::infinity();
  for (long step = 0; step < config.max_imaginary_steps; ++step) {
    density(f, f.values, dens);
    // Chemical potential <u, H u> of the current iterate.
    double mu = 0.0;
    for (int j = 0; j < m; ++j) {
      const double d = 1.0 / (h * h) + pot[j] + config.coupling * dens[j];
      cplx hu = d * f.values[j];
      if (j > 0) hu += off * f.values[j - 1];
      if (j + 1 < m) hu += off * f.values[j + 1];
      mu += std::real(std::conj(f.values[j]) * hu);
    }
    mu *= w * h;
    if (std::abs(mu - mu_prev) < 1e-10) {
      // mu is quadratic in the state error; also require a small residual.
      double res = 0.0;
      for (int j = 0; j < m; ++j) {
        const double d = 1.0 / (h * h) + pot[j] + config.coupling * dens[j];
        cplx hu = d * f.values[j];
        if (j > 0) hu += off * f.values[j - 1];
        if (j + 1 < m) hu += off * f.values[j + 1];
        res += std::norm(hu - mu * f.values[j]);
      }
      if (std::sqrt(w * h * res) < kGroundResidual) return f;
    }
    mu_prev = mu;
    for (int j = 0; j < m; ++j) {
      diag[j] = 1.0 + dt * (1.0 / (h * h) + pot[j] + config.coupling * dens[j]);
    }
    thomas(diag, cplx(dt * off, 0.0), f.values, next, work);
    f.values.swap(next);
    normalize(f);
  }
  throw GpeError("gpe: imaginary-time propagation did not converge");
}

Evolution evolve(const WaveField& field, const GpeConfig& config, double tau_end,
                 const EvolveOptions& options) {
  config.validate();
  check_grid(field, config);
  if (!(tau_end >= field.time)) throw std::invalid_argument("gpe: tau_end before field time");
  if (!(options.output_interval > 0.0) || options.snapshot_interval < 0.0) {
    throw std::invalid_argument("gpe: bad output or snapshot interval");
  }

  Evolution ev;
  ev.field = field;
  WaveField& f = ev.field;
  const int m = f.points();
  const double h = f.spacing;
  const double t0 = f.time;
  const long n_steps = std::max(1L, static_cast<long>(std::ceil((tau_end - t0) / config.dt - 1e-9)));
  const double dt = (tau_end - t0) / static_cast<double>(n_steps);
  const long out_every = std::max(1L, std::lround(options.output_interval / dt));
  const long snap_every =
      options.snapshot_interval > 0.0 ? std::max(1L, std::lround(options.snapshot_interval / dt))
                                      : 0;
  const double n0 = norm_of(f);

  std::vector<double> c2(m);
  for (int j = 0; j < m; ++j) c2[j] = std::pow(f.coordinate(j), 2);
  const double off = -0.5 / (h * h);
  const cplx half_i(0.0, 0.5 * dt);
  const cplx a_off = half_i * off;

  std::vector<double> dens0, dens1, dens(m);
  std::vector<cplx> rhs(m), diag(m), next(m), prev, work;
  std::vector<double> d(m);

  ev.series.push_back(measure(f, config));
  if (snap_every > 0) ev.snapshots.push_back(f);
  if (tau_end == t0) return ev;

  for (long step = 1; step <= n_steps; ++step) {
    const double tmid = t0 + (static_cast<double>(step) - 0.5) * dt;
    const double lam2 = config.trap.strength_squared(config.channel, tmid);
    density(f, f.values, dens0);
    dens = dens0;
    const int sweeps = config.coupling > 0.0 ? config.corrector_sweeps : 0;
    for (int s = 0; s <= sweeps; ++s) {
      for (int j = 0; j < m; ++j) {
        d[j] = 1.0 / (h * h) + 0.5 * lam2 * c2[j] + config.coupling * dens[j];
        cplx hu = d[j] * f.values[j];
        if (j > 0) hu += off * f.values[j - 1];
        if (j + 1 < m) hu += off * f.values[j + 1];
        rhs[j] = f.values[j] - half_i * hu;
        diag[j] = 1.0 + half_i * d[j];
      }
      if (s > 0) prev = next;
      thomas(diag, a_off, rhs, next, work);
      if (s > 0) {
        double res = 0.0;
        for (int j = 0; j < m; ++j) res = std::max(res, std::abs(next[j] - prev[j]));
        ev.max_corrector_residual = std::max(ev.max_corrector_residual, res);
      }
      if (s < sweeps) {
        density(f, next, dens1);
        for (int j = 0; j < m; ++j) dens[j] = 0.5 * (dens0[j] + dens1[j]);
      }
    }
    f.values.swap(next);
    f.time = t0 + static_cast<double>(step) * dt;
    ++ev.steps;

    const double drift = std::abs(norm_of(f) - n0);
    ev.max_norm_drift = std::max(ev.max_norm_drift, drift);
    if (drift > 1e-8) {
      throw GpeError("gpe: cumulative norm drift exceeds 1e-8; reduce dt");
    }
    const bool edge = at_edge(f);
    if (step % out_every == 0 || step == n_steps || edge) ev.series.push_back(measure(f, config));
    if (snap_every > 0 && (step % snap_every == 0 || step == n_steps)) ev.snapshots.push_back(f);
    if (edge) {
      ev.escaped = true;
      ev.diagnostic = "field reached the grid edge; increase the extent";
      break;
    }
  }
  return ev;
}

WaveField translate(const WaveField& field, double displacement) {
  if (field.geometry != Geometry::Cartesian1D) {
    throw std::invalid_argument("gpe: translation needs the cartesian1d geometry");
  }
  WaveField out = field;
  for (int j = 0; j < field.points(); ++j) {
    out.values[j] = interpolate(field, field.coordinate(j) - displacement);
  }
  normalize(out);
  return out;
}

WaveField dilate(const WaveField& field, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("gpe: dilation factor must be > 0");
  WaveField out = field;
  for (int j = 0; j < field.points(); ++j) {
    const double c = field.coordinate(j);
    const cplx v = interpolate(field, c / factor);
    // chi = r psi picks up the factor from r.
    out.values[j] = field.geometry == Geometry::Radial3D ? factor * v : v;
  }
  normalize(out);
  return out;
}

ComCheck center_of_mass_check(const GpeConfig& config, double displacement, double tau_end,
                              double output_interval) {
  if (config.geometry != Geometry::Cartesian1D) {
    throw std::invalid_argument("gpe: center-of-mass check needs the cartesian1d geometry");
  }
  const WaveField start = translate(ground_state(config), displacement);
  EvolveOptions opt;
  opt.output_interval = output_interval;
  const Evolution ev = evolve(start, config, tau_end, opt);

  ComCheck out;
  out.escaped = ev.escaped;
  for (const auto& o : ev.series) {
    out.times.push_back(o.time);
    out.pde.push_back(o.center);
  }

  Model com;
  com.kind = ModelKind::CenterOfMass;
  com.trap = config.trap;
  com.channel = config.channel;
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  OdeSolver solver(com, cfg);
  std::size_t next = 0;
  out.ode.resize(out.times.size());
  auto emit = [&](const StepView& v) {
    while (next < out.times.size() && out.times[next] <= v.t1()) {
      out.ode[next] = v.component(0, out.times[next]);
      ++next;
    }
    return next < out.times.size();
  };
  const DynamicalState s0 = DynamicalState::scalar(displacement, 0.0, start.time);
  while (next < out.times.size() && out.times[next] <= s0.time) out.ode[next++] = displacement;
  if (next < out.times.size()) solver.propagate(s0, out.times.back(), emit);

  for (std::size_t i = 0; i < out.times.size(); ++i) {
    out.max_deviation = std::max(out.max_deviation, std::abs(out.pde[i] - out.ode[i]));
  }
  return out;
}

sweep::PointVerdict classify_width(const GpeConfig& config, double omega, double epsilon,
                                   const sweep::GrowthCriteria& criteria) {
  criteria.validate();
  if (config.geometry != Geometry::Radial3D) {
    throw std::invalid_argument("gpe: width classification needs the radial3d geometry");
  }
  const WaveField ground = ground_state(config);
  const double reference = measure(ground, config).width;
  GpeConfig driven = config;
  std::array<double, 3> amps{};
  amps[config.channel] = epsilon;
  driven.trap = config.trap.with_drive(amps, omega);
  EvolveOptions opt;
  opt.output_interval = driven.trap.period() / criteria.samples_per_period;
  const Evolution ev =
      evolve(dilate(ground, 1.0 + criteria.seed_offset), driven, criteria.tau_max, opt);
  std::vector<double> t, w;
  for (const auto& o : ev.series) {
    t.push_back(o.time);
    w.push_back(o.width);
  }
  auto v = sweep::classify_series(omega, epsilon, t, w, reference,
                                  criteria.escape_factor * reference, ev.escaped, criteria);
  if (ev.escaped) v.diagnostic = ev.diagnostic;
  return v;
}

void write_snapshot(std::ostream& out, const WaveField& field) {
  const char magic[8] = {'P', 'R', 'G', 'P', 'E', '0', '0', '1'};
  const std::uint32_t geom = field.geometry == Geometry::Radial3D ? 0u : 1u;
  const std::uint32_t reserved = 0;
  const std::uint64_t m = field.values.size();
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&geom), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  out.write(reinterpret_cast<const char*>(&m), 8);
  out.write(reinterpret_cast<const char*>(&field.extent), 8);
  out.write(reinterpret_cast<const char*>(&field.spacing), 8);
  out.write(reinterpret_cast<const char*>(&field.time), 8);
  static_assert(sizeof(cplx) == 16);
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(m * sizeof(cplx)));
  if (!out) throw GpeError("gpe: snapshot write failed");
}

WaveField read_snapshot(std::istream& in) {
  char magic[8];
  std::uint32_t geom = 0, reserved = 0;
  std::uint64_t m = 0;
  WaveField f;
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "PRGPE001", 8) != 0) throw GpeError("gpe: not a snapshot");
  in.read(reinterpret_cast<char*>(&geom), 4);
  in.read(reinterpret_cast<char*>(&reserved), 4);
  in.read(reinterpret_cast<char*>(&m), 8);
  in.read(reinterpret_cast<char*>(&f.extent), 8);
  in.read(reinterpret_cast<char*>(&f.spacing), 8);
  in.read(reinterpret_cast<char*>(&f.time), 8);
  if (!in || geom > 1 || m == 0 || m > (1ull << 32)) throw GpeError("gpe: corrupt snapshot header");
  f.geometry = geom == 0 ? Geometry::Radial3D : Geometry::Cartesian1D;
  f.values.resize(m);
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(m * sizeof(cplx)));
  if (!in) throw GpeError("gpe: truncated snapshot");
  return f;
}

}  // namespace parares::gpe
