#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ptt/diagnostics.hpp"
#include "ptt/initial_data.hpp"
#include "ptt/integrator.hpp"
#include "ptt/particles.hpp"
#include "ptt/projection_identities.hpp"
#include "ptt/riccati.hpp"
#include "ptt/semigroup.hpp"
#include "ptt/spectral_ops.hpp"

using namespace ptt;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Invariant maxima gathered by the long runs for criterion 9.
struct RunInvariants {
  std::string label;
  double divergence = 0.0;
  double velocity_mean = 0.0;
  double trace_q = 0.0;
  double coupling = 0.0;
  double det_defect = 0.0;
};
std::vector<RunInvariants> g_invariants;

RunInvariants collect(const std::string& label, const InvariantMonitor& m, const ParticleTracker& t) {
  return {label, m.max_divergence, m.max_velocity_mean, m.max_trace_q, m.max_coupling, t.max_det_defect()};
}

// exp(tA) for A = [[−K, 1], [−K/2, 0]] by Sylvester's formula in extended precision.
std::array<std::array<long double, 2>, 2> exp_oracle(long double t, int ksq) {
  using C = std::complex<long double>;
  const long double K = ksq;
  const long double a[2][2] = {{-K, 1.0L}, {-K / 2, 0.0L}};
  std::array<std::array<long double, 2>, 2> out{};
  if (ksq == 2) {
    // Double root −1: e^{−t}(I + t(A + I)).
    const long double e = std::exp(-t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out[i][j] = e * ((i == j ? 1.0L : 0.0L) + t * (a[i][j] + (i == j ? 1.0L : 0.0L)));
    return out;
  }
  const C disc = std::sqrt(C(K * K - 2 * K, 0.0L));
  const C l1 = (-K + disc) / 2.0L, l2 = (-K - disc) / 2.0L;
  const C e1 = std::exp(l1 * t), e2 = std::exp(l2 * t);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const long double id = i == j ? 1.0L : 0.0L;
      const C v = (e1 * (a[i][j] - l2 * id) - e2 * (a[i][j] - l1 * id)) / (l1 - l2);
      out[i][j] = v.real();
    }
  return out;
}

Verdict criterion_green() {
  double worst = 0.0;
  for (int ksq = 1; ksq <= 64; ++ksq)
    for (double t : {0.1, 1.0, 5.0}) {
      const GreenBlocks g = green_blocks(t, ksq);
      const auto e = exp_oracle(t, ksq);
      const double got[2][2] = {{g.n_uu, g.n_utau}, {g.m_uu, g.m_utau}};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) worst = std::max(worst, static_cast<double>(std::abs(got[i][j] - e[i][j])));
    }
  const auto [l1, l2] = eigenvalues(1);
  const double eig = std::max(std::abs(l1 - Complex(-0.5, 0.5)), std::abs(l2 - Complex(-0.5, -0.5)));
  return {worst <= 1e-10 && eig <= 1e-14, "max block deviation " + fmt(worst) + ", ksq=1 eigenvalue error " + fmt(eig)};
}

Verdict criterion_projection() {
  const Grid g(32);
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const VectorField u = random_solenoidal(g, rng);
    const SymTensorField tau = random_symmetric(g, rng);
    const IdentityResiduals r = projection_identity_residuals(u, tau);
    worst = std::max({worst, r.transport_relative(), r.trace_relative()});
  }
  return {worst <= 1e-10, "max relative residual " + fmt(worst) + " over 20 pairs"};
}

Verdict criterion_blowup() {
  const Grid grid(32);
  const ModelParams p;
  InitialDataSpec spec;
  spec.kind = InitialKind::blowup;
  spec.trace_min = -2.0;
  const FlowState initial = make_initial_data(grid, spec);
  const SpectralField trace0 = trace_field(initial.tau);
  ParticleTracker tracker(default_particles(trace0), p, 0.01);
  InvariantMonitor monitor;
  StepObserver* observers[] = {&tracker, &monitor};
  StepControl ctl;
  ctl.dt = 5e-4;
  ctl.t_max = 1.0;
  const RunOutcome out = run(initial, p, ctl, nullptr, observers);
  g_invariants.push_back(collect("blowup", monitor, tracker));

  const double dev = trace_transport_check(tracker.rows(), 0.4);
  const bool a_ok = dev <= 1e-2;
  std::string detail = "(a) transport deviation " + fmt(dev) + (a_ok ? " ok" : " too large");
  if (!out.blowup) return {false, detail + "; (b) no blowup detected (" + to_string(out.status) + ")"};
  const double td = out.blowup->t_detect;
  const bool b_ok = td >= 0.45 && td <= 0.55;
  detail += "; (b) detected t=" + fmt(td) + " via " + out.blowup->trigger;
  bool c_ok = false;
  try {
    const RateFit fit = blowup_rate_probe(out.trace_history, td);
    c_ok = fit.constant >= -1.1 && fit.constant <= -0.9;
    detail += "; (c) rate constant " + fmt(fit.constant) + " from " + std::to_string(fit.samples) + " samples";
  } catch (const Error& e) {
    detail += std::string("; (c) ") + e.what();
  }
  return {a_ok && b_ok && c_ok, detail};
}

// Classical RK4 in long double for y' = −by² − ay.
long double rk4_oracle(long double y, long double t, long double a, long double b, int steps) {
  auto f = [&](long double v) { return -b * v * v - a * v; };
  const long double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const long double k1 = f(y), k2 = f(y + h / 2 * k1), k3 = f(y + h / 2 * k2), k4 = f(y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

Verdict criterion_riccati() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(-1.0, 2.0), ub(0.1, 2.0), ut(-1.5, 1.5);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = ua(rng), b = ub(rng), tr0 = ut(rng);
    double t = 1.0;
    if (const auto ts = riccati_blowup_time(tr0, a, b)) t = std::min(t, 0.8 * *ts);
    const double closed = riccati_trace(tr0, t, a, b);
    const double oracle = static_cast<double>(rk4_oracle(tr0, t, a, b, 20000));
    worst = std::max(worst, std::abs(closed - oracle) / std::max(1.0, std::abs(oracle)));
  }
  // tr0 = −a/b sits on the fixed point and neither decays nor blows up.
  const double a = 0.5, b = 1.0, tr0 = -0.5;
  double threshold = riccati_blowup_time(tr0, a, b) ? 1.0 : 0.0;
  for (double t = 0.0; t <= 50.0; t += 0.5) {
    threshold = std::max(threshold, std::abs(riccati_trace(tr0, t, a, b) - tr0));
    threshold = std::max(threshold, std::abs(riccati_trace(tr0, t, a, b) -
                                              static_cast<double>(rk4_oracle(tr0, t, a, b, 2000))));
  }
  return {worst <= 1e-10 && threshold <= 1e-10,
          "max deviation " + fmt(worst) + " over 100 triples, threshold case " + fmt(threshold)};
}

Verdict criterion_global() {
  const double delta0 = 0.02;
  const Grid grid(32);
  const ModelParams p;
  InitialDataSpec spec;
  spec.delta0 = delta0;
  const FlowState initial = make_initial_data(grid, spec);
  ParticleTracker tracker(default_particles(trace_field(initial.tau)), p, 0.05);
  InvariantMonitor monitor;
  StepObserver* observers[] = {&tracker, &monitor};
  RecordCollector records;
  StepControl ctl;
  ctl.dt = 4e-3;
  ctl.t_max = 20.0;
  const RunOutcome out = run(initial, p, ctl, &records, observers);
  g_invariants.push_back(collect("global", monitor, tracker));

  double energy = 0.0, min_trace = INFINITY;
  for (const auto& r : records.records) {
    energy = std::max(energy, (r.h2_u * r.h2_u + r.h2_tau * r.h2_tau) / kBoxVolume);
    min_trace = std::min(min_trace, r.min_trtau);
  }
  for (const auto& s : out.trace_history) min_trace = std::min(min_trace, s.min_trace);
  const bool completed = out.status == RunStatus::completed && out.t_end >= 20.0 - 1e-9;
  const double cap = 25 * delta0 * delta0;
  std::string detail = "status " + to_string(out.status) + " t=" + fmt(out.t_end) + ", max energy " + fmt(energy) +
                       " cap " + fmt(cap) + ", min trace " + fmt(min_trace);
  bool envelope = false;
  try {
    const EnvelopeCheck env = decay_envelope_check(records.records, 0.1);
    envelope = env.passed;
    detail += ", envelope worst ratio " + fmt(env.worst_ratio) + " exponent " + fmt(env.fitted_exponent);
  } catch (const Error& e) {
    detail += std::string(", envelope: ") + e.what();
  }
  return {completed && energy <= cap && envelope && min_trace > 0.0, detail};
}

double l2_pair(const VectorField& u, const VectorField& w) {
  const double a = sobolev_norm(u, SobolevIndex(0)), b = sobolev_norm(w, SobolevIndex(0));
  return std::sqrt(a * a + b * b);
}

FlowState linear_data() {
  InitialDataSpec spec;
  spec.kind = InitialKind::linear;
  return make_initial_data(Grid(32), spec);
}

Verdict criterion_linear() {
  const FlowState s = linear_data();
  const VectorField pd0 = leray_project(divergence(s.tau));
  const double norm0 = l2_pair(s.u, pd0);
  auto ratio_at = [&](double t) {
    const LinearState out = evolve_linear(s.u, pd0, t);
    return l2_pair(out.u, out.pdivtau) / (std::exp(-0.5 * t) * norm0);
  };
  const double c = ratio_at(0.5);
  bool ok = true;
  std::string detail = "C(0.5)=" + fmt(c) + ", ratios";
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    const double r = ratio_at(t);
    ok = ok && r <= c * (1.0 + 1e-12);
    detail += " " + fmt(t) + ":" + fmt(r);
  }
  return {ok, detail};
}

Verdict criterion_duhamel() {
  const ModelParams p;
  StepControl ctl;
  ctl.dt = 1e-3;
  ctl.t_max = 1.0;
  InitialDataSpec spec;
  spec.kind = InitialKind::linear;
  auto defect = [&](double delta) {
    spec.delta0 = delta;
    const FlowState s = make_initial_data(Grid(32), spec);
    const RunOutcome out = run(s, p, ctl);
    const LinearState lin = evolve_linear(s.u, leray_project(divergence(s.tau)), out.t_end);
    return duhamel_defect(out.final_state.u, lin.u);
  };
  const double full = defect(0.02), half = defect(0.01);
  const double ratio = full / half;
  return {ratio >= 3.2 && ratio <= 4.8, "defects " + fmt(full) + " / " + fmt(half) + " ratio " + fmt(ratio)};
}

// Composite 5-point Gauss–Legendre.
double gauss(const std::function<double(double)>& f, double lo, double hi, int panels) {
  static const double x[] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static const double w[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                             0.2369268850561891};
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < 5; ++i) sum += 0.5 * h * w[i] * f(lo + (k + 0.5) * h + 0.5 * h * x[i]);
  return sum;
}

Verdict criterion_lemma() {
  std::vector<double> times;
  for (double t = 0.5; t <= 64.0; t *= 2.0) times.push_back(t);
  bool ok = true;
  double growth = 0.0, quad = 0.0;
  for (double r : {0.5, 1.0, 2.0, 3.0})
    for (double c0 : {0.01, 0.1, 1.0}) {
      const Lemma23Report rep = lemma23_check(r, c0, times);
      ok = ok && rep.passed;
      growth = std::max(growth, rep.worst_tail_growth);
      for (const auto& row : rep.rows) {
        auto f = [&](double s) { return std::exp(-(row.t - s)) * std::pow(1.0 + c0 * s, -r); };
        const double near = gauss(f, 0.0, row.t / 2, 400), far = gauss(f, row.t / 2, row.t, 400);
        quad = std::max({quad, std::abs(row.near_integral - near) / near, std::abs(row.far_integral - far) / far});
      }
    }
  return {ok && quad <= 1e-12, "worst settled growth " + fmt(growth) + ", quadrature deviation " + fmt(quad)};
}

Verdict criterion_invariants() {
  if (g_invariants.empty()) return {false, "criteria 3 and 5 did not run"};
  bool ok = true;
  std::string detail;
  for (const auto& v : g_invariants) {
    const bool pass = v.divergence <= 1e-11 && v.velocity_mean == 0.0 && v.trace_q <= 1e-12 &&
                      v.coupling <= 1e-10 && v.det_defect <= 1e-6;
    ok = ok && pass;
    detail += v.label + ": div " + fmt(v.divergence) + " mean " + fmt(v.velocity_mean) + " trQ " + fmt(v.trace_q) +
              " I3 " + fmt(v.coupling) + " det " + fmt(v.det_defect) + "; ";
  }
  if (g_invariants.size() < 2) {
    ok = false;
    detail += "one of criteria 3 and 5 did not run";
  }
  return {ok, detail};
}

double state_distance(const FlowState& x, const FlowState& y) {
  double sum = 0.0;
  auto add = [&](const SpectralField& f, const SpectralField& g) {
    for (std::size_t i = 0; i < f.size(); ++i) sum += std::norm(f[i] - g[i]);
  };
  for (int i = 0; i < 3; ++i) add(x.u[i], y.u[i]);
  for (int c = 0; c < 6; ++c) add(x.tau.comp[c], y.tau.comp[c]);
  return std::sqrt(sum);
}

Verdict criterion_convergence() {
  const ModelParams p;
  InitialDataSpec spec;
  spec.kind = InitialKind::blowup;
  spec.trace_min = -2.0;
  const FlowState s0 = make_initial_data(Grid(32), spec);
  const double t_end = 0.2, dt0 = 4e-3;
  std::vector<FlowState> finals;
  for (int level = 0; level < 3; ++level) {
    const int steps = static_cast<int>(std::lround(t_end / dt0)) << level;
    const double dt = t_end / steps;
    FlowState s = s0;
    for (int i = 0; i < steps; ++i) s = step_fixed(s, p, dt);
    finals.push_back(s);
  }
  const double e1 = state_distance(finals[0], finals[1]), e2 = state_distance(finals[1], finals[2]);
  const double order = std::log2(e1 / e2);
  return {order >= 1.9, "differences " + fmt(e1) + ", " + fmt(e2) + ", observed order " + fmt(order)};
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Verdict()> body;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria, one PASS/FAIL line each"};
  std::vector<int> only;
  app.add_option("criteria", only, "Criterion numbers to run (default: all)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "green blocks vs matrix exponential", 1.0, criterion_green},
      {2, "projection identities", 30.0, criterion_projection},
      {3, "blowup run", 600.0, criterion_blowup},
      {4, "Riccati closed form vs RK4", 1.0, criterion_riccati},
      {5, "global run", 1800.0, criterion_global},
      {6, "linear decay with C from t=0.5", 10.0, criterion_linear},
      {7, "Duhamel defect ratio", 300.0, criterion_duhamel},
      {8, "weighted-integral ratios", 5.0, criterion_lemma},
      {9, "invariants during blowup and global runs", 1.0, criterion_invariants},
      {10, "self-convergence order", 300.0, criterion_convergence},
  };
  std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool passed = v.passed && in_time;
    if (!passed) ++failures;
    std::cout << (passed ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << ": " << v.detail << " ["
              << fmt(seconds) << " s of " << fmt(c.budget_seconds) << " s" << (in_time ? "" : ", over budget")
              << "]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
