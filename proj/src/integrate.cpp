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

#include "parares/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace parares {

namespace {

// Dormand-Prince 5(4), FSAL form.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension of order 4.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Alexander's two-stage L-stable SDIRK of order 2.
const double kSdirkGamma = 1.0 - 1.0 / std::numbers::sqrt2;

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2;  // h_new >= 0.2 h
constexpr double kFacMax = 10.0;

// In-place LU solve of a dense n x n system, n <= 6, partial pivoting.
bool solve_small(std::array<std::array<double, 6>, 6> a, std::array<double, 6>& b, int n) {
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    }
    if (a[piv][k] == 0.0) return false;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * b[j];
    b[i] = s / a[i][i];
  }
  return true;
}

}  // namespace

void IntegratorConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(rel_tol > 0.0 && abs_tol > 0.0, "integrator: tolerances must be > 0");
  require(h_min > 0.0 && h_min <= h_init && h_init <= h_max,
          "integrator: need 0 < h_min <= h_init <= h_max");
  require(width_floor > 0.0, "integrator: width_floor must be > 0");
  require(stiff_switch_threshold > 0, "integrator: stiff_switch_threshold must be > 0");
  require(max_steps > 0, "integrator: max_steps must be > 0");
  require(output_interval >= 0.0, "integrator: output_interval must be >= 0");
}

// ---------------------------------------------------------------------------
// StepView

double StepView::component(int i, double tau) const {
  const double h = t1_ - t0_;
  const double s = h == 0.0 ? 1.0 : (tau - t0_) / h;
  const auto& r = cont_;
  if (!implicit_) {
    const double s1 = 1.0 - s;
    return r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
  }
  // Cubic Hermite: r0 = y0, r1 = y1, r2 = h f0, r3 = h f1.
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * r[0][i] + (s3 - 2.0 * s2 + s) * r[2][i] +
         (-2.0 * s3 + 3.0 * s2) * r[1][i] + (s3 - s2) * r[3][i];
}

DynamicalState StepView::at(double tau) const {
  DynamicalState s;
  s.dim = n_ / 2;
  s.time = tau;
  for (int i = 0; i < s.dim; ++i) {
    s.coordinates[i] = component(i, tau);
    s.velocities[i] = component(i + s.dim, tau);
  }
  return s;
}

// ---------------------------------------------------------------------------
// OdeSolver

OdeSolver::OdeSolver(const Model& model, const IntegratorConfig& config)
    : model_(model),
      cfg_(config),
      dim_(model.dim()),
      n_(2 * model.dim()),
      width_model_(model.kind == ModelKind::Radial || model.kind == ModelKind::Variational3D),
      conservative_(is_width_model(model.kind) && !model.trap.driven() &&
                    model.trap.damping() == 0.0) {
  cfg_.validate();
}

bool OdeSolver::eval(double t, const Vec& y, Vec& dy) const noexcept {
  for (int i = 0; i < dim_; ++i) dy[i] = y[i + dim_];
  return detail::accelerations(model_, t, y.data(), y.data() + dim_, dy.data() + dim_);
}

bool OdeSolver::admissible(const Vec& y) const noexcept {
  if (!width_model_) return true;
  for (int i = 0; i < dim_; ++i) {
    if (!(y[i] >= cfg_.width_floor)) return false;
  }
  return true;
}

double OdeSolver::error_norm(const Vec& y0, const Vec& y1, const Vec& err) const noexcept {
  // Max norm: every component must meet abs_tol + rel_tol * |y|.
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double sk = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / sk);
  }
  return worst;
}

DynamicalState OdeSolver::to_state(const Vec& y, double t) const {
  DynamicalState s;
  s.dim = dim_;
  s.time = t;
  for (int i = 0; i < dim_; ++i) {
    s.coordinates[i] = y[i];
    s.velocities[i] = y[i + dim_];
  }
  return s;
}

bool OdeSolver::explicit_step(double t, const Vec& y, const Vec& k1, double h, Vec& y1,
                              Vec& k7, double& err, StepView& view) const noexcept {
  Vec k2{}, k3{}, k4{}, k5{}, k6{}, tmp{};
  const int n = n_;
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  if (!eval(t + c2 * h, tmp, k2)) return false;
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  if (!eval(t + c3 * h, tmp, k3)) return false;
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  if (!eval(t + c4 * h, tmp, k4)) return false;
  for (int i = 0; i < n; ++i) {
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  }
  if (!eval(t + c5 * h, tmp, k5)) return false;
  for (int i = 0; i < n; ++i) {
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  }
  if (!eval(t + h, tmp, k6)) return false;
  for (int i = 0; i < n; ++i) {
    y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
  }
  if (!admissible(y1) || !eval(t + h, y1, k7)) return false;

  Vec e{};
  for (int i = 0; i < n; ++i) {
    e[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  err = error_norm(y, y1, e);

  view.implicit_ = false;
  for (int i = 0; i < n; ++i) {
    const double ydiff = y1[i] - y[i];
    const double bspl = h * k1[i] - ydiff;
    view.cont_[0][i] = y[i];
    view.cont_[1][i] = ydiff;
    view.cont_[2][i] = bspl;
    view.cont_[3][i] = ydiff - h * k7[i] - bspl;
    view.cont_[4][i] =
        h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
  }
  return std::isfinite(err);
}

bool OdeSolver::implicit_step(double t, const Vec& y, const Vec& f0, double h, Vec& y1,
                              Vec& f1, double& err, StepView& view) const noexcept {
  const int n = n_;
  const double g = kSdirkGamma;

  // Finite-difference Jacobian at (t, y), frozen for both stages.
  std::array<std::array<double, 6>, 6> jac{};
  for (int j = 0; j < n; ++j) {
    Vec yp = y;
    const double dj = std::sqrt(1e-16) * std::max(1.0, std::abs(y[j]));
    yp[j] += dj;
    Vec fp{};
    if (!eval(t, yp, fp)) {
      yp[j] = y[j] - dj;
      if (!eval(t, yp, fp)) return false;
      for (int i = 0; i < n; ++i) jac[i][j] = (f0[i] - fp[i]) / dj;
    } else {
      for (int i = 0; i < n; ++i) jac[i][j] = (fp[i] - f0[i]) / dj;
    }
  }
  std::array<std::array<double, 6>, 6> iter{};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) iter[i][j] = (i == j ? 1.0 : 0.0) - h * g * jac[i][j];
  }

  // Solves z = base + h g f(tc, z) by simplified Newton.
  auto stage = [&](double tc, const Vec& base, Vec& z, Vec& fz) {
    z = base;
    for (int i = 0; i < n; ++i) z[i] += h * g * f0[i];
    for (int it = 0; it < 12; ++it) {
      if (!eval(tc, z, fz)) return false;
      Vec res{};
      for (int i = 0; i < n; ++i) res[i] = base[i] + h * g * fz[i] - z[i];
      if (!solve_small(iter, res, n)) return false;
      double norm = 0.0;
      for (int i = 0; i < n; ++i) {
        z[i] += res[i];
        const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(z[i]);
        norm = std::max(norm, std::abs(res[i]) / sk);
      }
      if (norm < 1e-3) return eval(tc, z, fz);
    }
    return false;
  };

  Vec z1{}, k1{}, z2{}, k2{}, base{};
  if (!stage(t + g * h, y, z1, k1)) return false;
  if (width_model_ && !admissible(z1)) return false;
  for (int i = 0; i < n; ++i) base[i] = y[i] + h * (1.0 - g) * k1[i];
  if (!stage(t + h, base, z2, k2)) return false;
  y1 = z2;
  f1 = k2;
  if (!admissible(y1)) return false;

  Vec e{};
  for (int i = 0; i < n; ++i) e[i] = h * g * (k2[i] - k1[i]);
  err = error_norm(y, y1, e);

  view.implicit_ = true;
  for (int i = 0; i < n; ++i) {
    view.cont_[0][i] = y[i];
    view.cont_[1][i] = y1[i];
    view.cont_[2][i] = h * f0[i];
    view.cont_[3][i] = h * f1[i];
  }
  return std::isfinite(err);
}

PropagationResult OdeSolver::propagate(const DynamicalState& state, double tau_end,
                                       const StepObserver& observer, double h_start) {
  if (state.dim != dim_) throw std::invalid_argument("integrate: state dimension mismatch");
  PropagationResult out;
  auto& diag = out.diagnostics;

  Vec y{};
  for (int i = 0; i < dim_; ++i) {
    y[i] = state.coordinates[i];
    y[i + dim_] = state.velocities[i];
  }
  double t = state.time;
  out.final_state = state;
  if (!(tau_end > t)) {
    if (tau_end == t) return out;
    throw std::invalid_argument("integrate: tau_end must exceed the initial time");
  }
  if (width_model_ && !admissible(y)) {
    throw DomainError("integrate: initial width below width_floor");
  }

  Vec f{};
  if (!eval(t, y, f)) throw DomainError("integrate: initial state outside model domain");

  std::optional<double> e0;
  if (conservative_) e0 = energy(model_, state);
  if (e0) diag.max_energy_drift = 0.0;

  double h = std::clamp(h_start > 0.0 ? h_start : cfg_.h_init, cfg_.h_min, cfg_.h_max);
  double facold = 1e-4;
  bool last_rejected = false;
  int consecutive_rejections = 0;
  bool stiff = false;
  double stiff_entry_h = 0.0;

  StepView view;
  view.n_ = n_;

  auto fail = [&](const std::string& why) {
    Trajectory partial;
    partial.samples.push_back(to_state(y, t));
    partial.diagnostics = diag;
    throw IntegrationError(why + " at tau = " + std::to_string(t), std::move(partial));
  };

  auto enter_stiff = [&]() {
    stiff = true;
    stiff_entry_h = h;
    consecutive_rejections = 0;
    ++diag.regime_switches;
    diag.regime_history.emplace_back(t, true);
  };

  const double span = tau_end - state.time;
  while (t < tau_end) {
    if (diag.accepted_steps + diag.rejected_steps >= cfg_.max_steps) fail("max_steps exceeded");
    bool final_step = false;
    if (t + h >= tau_end || (tau_end - (t + h)) < 1e-12 * span) {
      h = tau_end - t;
      final_step = true;
    }

    Vec y1{}, f1{};
    double err = 0.0;
    const bool ok = stiff ? implicit_step(t, y, f, h, y1, f1, err, view)
                          : explicit_step(t, y, f, h, y1, f1, err, view);

    if (!ok || err > 1.0) {
      ++diag.rejected_steps;
      ++consecutive_rejections;
      if (!ok) {
        ++diag.floor_rejections;
        h *= 0.5;
      } else if (stiff) {
        h *= std::max(kFacMin, kSafety / std::sqrt(err));
      } else {
        h /= std::min(1.0 / kFacMin, std::pow(err, kExpo) / kSafety);
      }
      last_rejected = true;
      if (h < cfg_.h_min) {
        if (stiff) fail("step size underflow");
        h = cfg_.h_min;
        enter_stiff();
      } else if (!stiff && consecutive_rejections >= cfg_.stiff_switch_threshold) {
        enter_stiff();
      }
      continue;
    }

    // Accepted.
    const double t1 = final_step ? tau_end : t + h;
    view.t0_ = t;
    view.t1_ = t1;
    view.end_ = to_state(y1, t1);
    ++diag.accepted_steps;
    if (stiff) ++diag.stiff_steps;
    consecutive_rejections = 0;

    double h_next = 0.0;
    if (stiff) {
      h_next = h * std::clamp(kSafety / std::sqrt(std::max(err, 1e-10)), kFacMin, 5.0);
      if (last_rejected) h_next = std::min(h_next, h);
      if (h_next > 10.0 * std::max(cfg_.h_min, stiff_entry_h)) {
        stiff = false;
        ++diag.regime_switches;
        diag.regime_history.emplace_back(t1, false);
        facold = 1e-4;
      }
    } else {
      const double fac11 = std::pow(std::max(err, 1e-16), kExpo);
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
      h_next = h / fac;
      if (last_rejected) h_next = std::min(h_next, h);
      facold = std::max(err, 1e-4);
    }
    last_rejected = false;

    y = y1;
    f = f1;
    t = t1;
    if (e0) {
      const double e = energy(model_, view.end_);
      const double drift = std::abs(e - *e0) / std::max(std::abs(*e0), 1e-300);
      diag.max_energy_drift = std::max(*diag.max_energy_drift, drift);
    }
    out.last_step = h;
    h = std::min(h_next, cfg_.h_max);

    if (observer && !observer(view)) {
      out.stopped_early = true;
      break;
    }
  }
  out.final_state = to_state(y, t);
  return out;
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

void merge(IntegratorDiagnostics& into, const IntegratorDiagnostics& from) {
  into.accepted_steps += from.accepted_steps;
  into.rejected_steps += from.rejected_steps;
  into.floor_rejections += from.floor_rejections;
  into.stiff_steps += from.stiff_steps;
  into.regime_switches += from.regime_switches;
  into.regime_history.insert(into.regime_history.end(), from.regime_history.begin(),
                             from.regime_history.end());
  if (from.max_energy_drift) {
    into.max_energy_drift = std::max(into.max_energy_drift.value_or(0.0), *from.max_energy_drift);
  }
}

// Appends samples from one accepted step according to the output policy.
class Recorder {
 public:
  Recorder(const IntegratorConfig& cfg, Trajectory& traj, double t0)
      : cfg_(cfg), traj_(traj), next_(t0) {
    traj_.dense = cfg.output_interval > 0.0;
  }

  void start(const DynamicalState& s) {
    if (!cfg_.record) return;
    if (traj_.samples.empty() || traj_.samples.back().time < s.time) traj_.samples.push_back(s);
    if (traj_.dense) {
      ++count_;
      next_ = origin() + static_cast<double>(count_) * cfg_.output_interval;
    }
  }

  void step(const StepView& v) { step(v, v.t1()); }

  // Records the part of the step up to `limit`; non-dense mode keeps only
  // whole steps.
  void step(const StepView& v, double limit) {
    if (!cfg_.record) return;
    if (!traj_.dense) {
      if (limit == v.t1()) traj_.samples.push_back(v.end());
      return;
    }
    while (next_ <= limit) {
      if (next_ > traj_.samples.back().time) traj_.samples.push_back(v.at(next_));
      ++count_;
      next_ = origin() + static_cast<double>(count_) * cfg_.output_interval;
    }
  }

  void impact(const DynamicalState& s) {
    if (cfg_.record && !traj_.dense) traj_.samples.push_back(s);
  }

  void finish(const DynamicalState& s) {
    if (!cfg_.record) {
      traj_.samples.assign(1, s);
      return;
    }
    if (traj_.samples.empty() || traj_.samples.back().time < s.time) traj_.samples.push_back(s);
  }

  void set_origin(double t0) { origin_ = t0; }

 private:
  double origin() const { return origin_; }
  const IntegratorConfig& cfg_;
  Trajectory& traj_;
  double next_;
  double origin_ = 0.0;
  long count_ = 0;
};

}  // namespace

Trajectory integrate(const Model& model, const DynamicalState& state0, double tau_end,
                     const IntegratorConfig& config) {
  if (model.kind == ModelKind::ImpactOscillator) {
    return integrate_with_bounce(model, state0, tau_end, config);
  }
  Trajectory traj;
  Recorder rec(config, traj, state0.time);
  rec.set_origin(state0.time);
  rec.start(state0);
  OdeSolver solver(model, config);
  try {
    auto res = solver.propagate(state0, tau_end, [&](const StepView& v) {
      rec.step(v);
      return true;
    });
    traj.diagnostics = res.diagnostics;
    rec.finish(res.final_state);
  } catch (const IntegrationError& e) {
    merge(traj.diagnostics, e.partial().diagnostics);
    if (config.record) {
      for (const auto& s : e.partial().samples) rec.finish(s);
    }
    throw IntegrationError(e.what(), std::move(traj));
  }
  return traj;
}

Trajectory integrate_with_bounce(const Model& model_in, const DynamicalState& state0,
                                 double tau_end, const IntegratorConfig& config) {
  if (model_in.dim() != 1 || state0.dim != 1) {
    throw std::invalid_argument("integrate_with_bounce: one-dimensional model required");
  }
  const double v0 = state0.coordinates[0];
  if (v0 < 0.0 || (v0 == 0.0 && state0.velocities[0] <= 0.0)) {
    throw DomainError("integrate_with_bounce: need v > 0, or v = 0 with positive velocity");
  }
  Model model = model_in;
  model.kind = ModelKind::ImpactOscillator;

  constexpr long kMaxEvents = 1'000'000;
  constexpr double kEventTol = 1e-12;

  Trajectory traj;
  Recorder rec(config, traj, state0.time);
  rec.set_origin(state0.time);
  rec.start(state0);

  OdeSolver solver(model, config);
  DynamicalState current = state0;
  double h_start = 0.0;

  while (current.time < tau_end) {
    std::optional<DynamicalState> impact;
    auto observer = [&](const StepView& v) {
      // First sign change of the width, probing inside the step for grazing dips.
      constexpr int kProbe = 8;
      double ta = v.t0();
      for (int k = 1; k <= kProbe; ++k) {
        const double tb = k == kProbe ? v.t1() : v.t0() + (v.t1() - v.t0()) * k / kProbe;
        if (v.component(0, tb) < 0.0) {
          double lo = ta;
          double hi = tb;
          for (int it = 0; it < 200; ++it) {
            if (std::abs(v.component(0, lo)) < kEventTol) break;
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (v.component(0, mid) >= 0.0 ? lo : hi) = mid;
          }
          if (lo > current.time) {
            DynamicalState s = v.at(lo);
            rec.step(v, lo);
            s.coordinates[0] = 0.0;
            s.velocities[0] = -s.velocities[0];
            impact = s;
            return false;
          }
        }
        ta = tb;
      }
      rec.step(v);
      return true;
    };

    PropagationResult res;
    try {
      res = solver.propagate(current, tau_end, observer, h_start);
    } catch (const IntegrationError& e) {
      merge(traj.diagnostics, e.partial().diagnostics);
      throw IntegrationError(e.what(), std::move(traj));
    }
    merge(traj.diagnostics, res.diagnostics);
    h_start = res.last_step;

    if (!impact) {
      current = res.final_state;
      break;
    }
    traj.event_times.push_back(impact->time);
    if (static_cast<long>(traj.event_times.size()) > kMaxEvents) {
      throw IntegrationError("integrate_with_bounce: chattering (more than 1e6 impacts)",
                             std::move(traj));
    }
    rec.impact(*impact);
    current = *impact;
  }
  rec.finish(current);
  return traj;
}

std::vector<DynamicalState> stroboscopic_map(const Model& model, const DynamicalState& state0,
                                             int n_periods, const IntegratorConfig& config) {
  if (n_periods < 0) throw std::invalid_argument("stroboscopic_map: n_periods must be >= 0");
  const double period = model.trap.period();
  IntegratorConfig cfg = config;
  cfg.output_interval = period;
  cfg.record = true;
  const double tau_end = state0.time + period * n_periods;
  std::vector<DynamicalState> out;
  out.reserve(static_cast<std::size_t>(n_periods) + 1);
  if (n_periods == 0) return {state0};
  Trajectory traj = integrate(model, state0, tau_end, cfg);
  out = std::move(traj.samples);
  // The final sample lands exactly on tau_end; drop any duplicate.
  if (out.size() > static_cast<std::size_t>(n_periods) + 1) out.resize(n_periods + 1);
  return out;
}

}  // namespace parares
