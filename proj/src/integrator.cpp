#include "ptt/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ptt/spectral_ops.hpp"

namespace ptt {

void StepControl::validate() const {
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  if (!(dt_min > 0.0) || !(dt_min < dt)) throw ParameterError("dt_min must lie in (0, dt)");
  if (!(blowup_threshold > 0.0)) throw ParameterError("blowup_threshold must be positive");
  if (!(t_max >= 0.0)) throw ParameterError("t_max must be nonnegative");
  if (!(cfl_target > 0.0) || !(trace_cfl > 0.0)) throw ParameterError("CFL numbers must be positive");
  if (!(record_interval > 0.0)) throw ParameterError("record_interval must be positive");
}

namespace {

std::vector<double> viscous_factor(const Grid& grid, double mu, double dt, Scheme scheme) {
  std::vector<double> factor(grid.size());
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
    const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
    factor[idx] = scheme == Scheme::if_ssprk2 ? std::exp(-mu * ksq * dt) : 1.0 / (1.0 + mu * ksq * dt);
  });
  return factor;
}

void scale_modes(VectorField& v, const std::vector<double>& factor) {
  for (auto& c : v) {
    for (std::size_t i = 0; i < factor.size(); ++i) c[i] *= factor[i];
  }
}

void finalize(FlowState& s) {
  s.u = leray_project(s.u);
  for (auto& c : s.u) {
    dealias_in_place(c);
    c[0] = 0.0;
  }
  for (auto& c : s.tau.comp) dealias_in_place(c);
}

FlowState advance_from(const FlowState& state, const Tendency& n0, const ModelParams& p, double dt,
                       Scheme scheme) {
  const std::vector<double> factor = viscous_factor(state.grid(), p.mu, dt, scheme);
  FlowState first = state;
  first.t = state.t + dt;
  add_scaled(first.u, n0.du, dt);
  scale_modes(first.u, factor);
  first.tau.add_scaled(n0.dtau, dt);
  if (scheme == Scheme::imex_euler) {
    finalize(first);
    return first;
  }
  finalize(first);
  const Tendency n1 = explicit_tendency(first, p);
  FlowState out = state;
  out.t = state.t + dt;
  scale_modes(out.u, factor);
  for (std::size_t i = 0; i < 3; ++i) {
    out.u[i] += first.u[i];
    out.u[i].add_scaled(n1.du[i], dt);
    out.u[i] *= 0.5;
  }
  out.tau += first.tau;
  out.tau.add_scaled(n1.dtau, dt);
  for (auto& c : out.tau.comp) c *= 0.5;
  finalize(out);
  return out;
}

double tail_ratio(const SpectralField& f) {
  const Grid& grid = f.grid();
  const int edge = std::max(1, grid.dealias_cut() - 1);
  double tail = 0.0, total = 0.0;
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
    if (idx == 0) return;
    const double e = std::norm(f[idx]);
    total += e;
    if (std::max({std::abs(k1), std::abs(k2), std::abs(k3)}) >= edge) tail += e;
  });
  return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

Vec3 grid_point(const Grid& grid, std::size_t flat) {
  const std::size_t n = static_cast<std::size_t>(grid.n());
  return {grid_coordinate(grid, int(flat / (n * n))), grid_coordinate(grid, int(flat / n % n)),
          grid_coordinate(grid, int(flat % n))};
}

}  // namespace

FlowState step_fixed(const FlowState& state, const ModelParams& p, double dt, Scheme scheme) {
  if (!(dt >= 0.0)) throw DomainError("time step must be nonnegative");
  return advance_from(state, explicit_tendency(state, p), p, dt, scheme);
}

double stable_dt(const GridProbe& probe, double spacing, const ModelParams& p, const StepControl& ctl,
                 double dt_max, int& halvings, bool& trace_limited) {
  halvings = 0;
  trace_limited = false;
  auto advective_ok = [&](double h) {
    return std::isfinite(probe.max_speed) && h * probe.max_speed <= ctl.cfl_target * spacing;
  };
  auto trace_ok = [&](double h) {
    return std::isfinite(probe.max_abs_trace) && p.b * probe.max_abs_trace * h <= ctl.trace_cfl;
  };
  double dt = dt_max;
  while (!(advective_ok(dt) && trace_ok(dt))) {
    trace_limited = !trace_ok(dt);
    dt *= 0.5;
    ++halvings;
    if (dt < ctl.dt_min) {
      std::ostringstream msg;
      msg << "time step collapsed below " << ctl.dt_min << " ("
          << (trace_limited ? "stress trace" : "advective") << " constraint, |u| = " << probe.max_speed
          << ", |tr tau| = " << probe.max_abs_trace << ")";
      throw StepCollapseError(dt, trace_limited, msg.str());
    }
  }
  return dt;
}

StepResult step(const FlowState& state, const ModelParams& p, const StepControl& ctl) {
  GridProbe probe;
  const Tendency n0 = explicit_tendency(state, p, &probe);
  int halvings = 0;
  bool trace_limited = false;
  const double dt = stable_dt(probe, state.grid().spacing(), p, ctl, ctl.dt, halvings, trace_limited);
  return {advance_from(state, n0, p, dt, ctl.scheme), dt, halvings, probe};
}

void InvariantMonitor::check(const FlowState& state) {
  const StateDefects d = state_defects(state);
  max_divergence = std::max(max_divergence, d.divergence);
  max_velocity_mean = std::max(max_velocity_mean, d.velocity_mean);
  max_coupling = std::max(max_coupling, coupling_cancellation(state.u, state.tau).relative());
}

void InvariantMonitor::on_start(const FlowState& state) { check(state); }

void InvariantMonitor::on_step(const FlowState&, const FlowState& after, const GridProbe& probe) {
  check(after);
  max_trace_q = std::max(max_trace_q, probe.max_trace_q);
  ++steps;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::blowup_detected:
      return "blowup_detected";
    case RunStatus::step_collapse:
      return "step_collapse";
  }
  return "unknown";
}

RunOutcome run(const FlowState& initial, const ModelParams& p, const StepControl& ctl, RecordSink* sink,
               std::span<StepObserver* const> observers) {
  ctl.validate();
  p.validate();
  const StateDefects defects = state_defects(initial);
  if (defects.divergence > 1e-10 || defects.velocity_mean > 1e-10) {
    throw PreconditionError("initial velocity must be divergence-free and mean-free");
  }

  RunOutcome out{RunStatus::completed, initial.t, std::nullopt, initial, {}, 0, 0, ctl.dt};
  FlowState state = initial;
  const double t_end = initial.t + ctl.t_max;
  const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end));

  std::optional<double> predicted;
  if (p.b > 0.0) {
    const BlowupPrediction pred = predict_blowup_time(trace_field(initial.tau), p.a, p.b);
    if (pred.predicted) predicted = pred.t_star;
  }

  for (StepObserver* obs : observers) obs->on_start(state);
  double last_record = -std::numeric_limits<double>::infinity();
  double next_record = initial.t;
  auto emit = [&](const FlowState& s) {
    if (sink) sink->on_record(record(s));
    last_record = s.t;
    while (next_record <= s.t + 1e-9 * ctl.dt) next_record += ctl.record_interval;
  };
  emit(state);

  auto report_blowup = [&](const std::string& trigger, std::size_t flat) {
    out.status = RunStatus::blowup_detected;
    BlowupReport rep;
    rep.t_detect = state.t;
    rep.trigger = trigger;
    rep.location = grid_point(state.grid(), flat);
    rep.t_predicted = predicted;
    rep.min_trace_history = out.trace_history;
    out.blowup = std::move(rep);
  };

  while (true) {
    GridProbe probe;
    const Tendency n0 = explicit_tendency(state, p, &probe);
    out.trace_history.push_back(
        {state.t, probe.min_trace, probe.max_abs_trace, tail_ratio(trace_field(state.tau))});
    if (!(probe.max_abs_trace <= ctl.blowup_threshold) && std::isfinite(probe.max_abs_trace)) {
      report_blowup("threshold", probe.argmax_abs_trace);
      break;
    }
    if (state.t >= t_end - t_eps) break;

    int halvings = 0;
    bool trace_limited = false;
    double dt = 0.0;
    try {
      dt = stable_dt(probe, state.grid().spacing(), p, ctl, ctl.dt, halvings, trace_limited);
    } catch (const StepCollapseError& e) {
      if (e.trace_limited()) {
        report_blowup("trace step collapse", probe.argmax_abs_trace);
      } else {
        out.status = RunStatus::step_collapse;
      }
      break;
    }
    out.halvings += halvings;
    dt = std::min(dt, t_end - state.t);
    out.smallest_dt = std::min(out.smallest_dt, dt);

    FlowState next = advance_from(state, n0, p, dt, ctl.scheme);
    if (std::abs(next.t - t_end) <= t_eps) next.t = t_end;
    for (StepObserver* obs : observers) obs->on_step(state, next, probe);
    state = std::move(next);
    ++out.steps;
    if (state.t >= next_record - 1e-9 * ctl.dt) emit(state);
  }

  if (last_record != state.t) emit(state);
  for (StepObserver* obs : observers) obs->on_finish(state);
  out.t_end = state.t;
  out.final_state = std::move(state);
  return out;
}

RateFit blowup_rate_probe(std::span<const TraceSample> history, double t_detect, double resolution_tol) {
  std::vector<TraceSample> resolved;
  bool any_negative = false;
  for (const auto& s : history) {
    if (s.t > t_detect || !(s.min_trace < 0.0)) continue;
    any_negative = true;
    if (s.tail_ratio <= resolution_tol) resolved.push_back(s);
  }
  if (!any_negative) throw InsufficientDataError("trace history has no negative minimum to fit");
  double peak = 0.0;
  for (const auto& s : resolved) peak = std::max(peak, -s.min_trace);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  RateFit fit;
  fit.window_start = std::numeric_limits<double>::infinity();
  for (const auto& s : resolved) {
    if (-s.min_trace < 0.1 * peak) continue;
    const double y = 1.0 / s.min_trace;
    sx += s.t;
    sy += y;
    sxx += s.t * s.t;
    sxy += s.t * y;
    ++fit.samples;
    fit.window_start = std::min(fit.window_start, s.t);
    fit.window_end = std::max(fit.window_end, s.t);
  }
  if (fit.samples < 10) {
    throw InsufficientDataError("rate fit window holds " + std::to_string(fit.samples) +
                                " samples, need at least 10");
  }
  const double m = fit.samples;
  const double alpha = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double beta = (sy - alpha * sx) / m;
  fit.constant = -1.0 / alpha;
  fit.t_star = -beta / alpha;
  return fit;
}

}  // namespace ptt
