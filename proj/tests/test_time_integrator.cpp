#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ptt/error.hpp"
#include "ptt/integrator.hpp"
#include "ptt/riccati.hpp"
#include "ptt/spectral_ops.hpp"
#include "support.hpp"

using namespace ptt;
using testing::field_of;
using testing::max_diff;

namespace {

FlowState advance(FlowState s, const ModelParams& p, double dt, int steps, Scheme scheme) {
  for (int i = 0; i < steps; ++i) s = step_fixed(s, p, dt, scheme);
  return s;
}

double l2_difference(const FlowState& a, const FlowState& b) {
  double sq = 0.0;
  for (int i = 0; i < 3; ++i) sq += std::pow(sobolev_norm(a.u[i] - b.u[i], SobolevIndex(0)), 2);
  for (int c = 0; c < 6; ++c) sq += std::pow(sobolev_norm(a.tau.comp[c] - b.tau.comp[c], SobolevIndex(0)), 2);
  return std::sqrt(sq);
}

// Ratio of successive self-differences over dt, dt/2, dt/4.
double self_convergence_ratio(const FlowState& s0, const ModelParams& p, double T, int steps, Scheme scheme) {
  const double dt = T / steps;
  const FlowState a = advance(s0, p, dt, steps, scheme);
  const FlowState b = advance(s0, p, dt / 2, 2 * steps, scheme);
  const FlowState c = advance(s0, p, dt / 4, 4 * steps, scheme);
  return l2_difference(a, b) / l2_difference(b, c);
}

FlowState isotropic_state(const Grid& g, const SpectralField& phi) {
  SymTensorField tau(g);
  for (int i = 0; i < 3; ++i) tau(i, i) = phi;
  return FlowState(0.0, zero_vector(g), tau);
}

std::vector<TraceSample> riccati_history(double m, double dt, double t_end) {
  std::vector<TraceSample> h;
  for (double t = 0.0; t < t_end; t += dt) h.push_back({t, m / (1 + m * t), std::abs(m / (1 + m * t)), 0.0});
  return h;
}

struct CountingObserver : StepObserver {
  int starts = 0, steps = 0, finishes = 0;
  double last_t = 0.0;
  void on_start(const FlowState&) override { ++starts; }
  void on_step(const FlowState& before, const FlowState& after, const GridProbe&) override {
    CHECK(after.t > before.t);
    last_t = after.t;
    ++steps;
  }
  void on_finish(const FlowState&) override { ++finishes; }
};

}  // namespace

TEST_CASE("step control validation") {
  StepControl c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = StepControl{};
  c.dt_min = 1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = StepControl{};
  c.t_max = -1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("zero state stays zero") {
  const Grid g(16);
  const ModelParams p;
  for (Scheme s : {Scheme::if_ssprk2, Scheme::imex_euler}) {
    const FlowState out = step_fixed(FlowState(g), p, 0.01, s);
    CHECK(out.t == doctest::Approx(0.01));
    for (const auto& c : out.u) CHECK(c.max_abs() == 0.0);
    for (const auto& c : out.tau.comp) CHECK(c.max_abs() == 0.0);
  }
}

TEST_CASE("viscous decay of a decoupled shear is exact") {
  const Grid g(16);
  ModelParams p;
  p.mu = 0.7;
  p.mu1 = 0.0;
  const VectorField u = testing::vector_of(
      g, [](double, double y, double) { return std::sin(y); }, testing::zero_fn, testing::zero_fn);
  const FlowState out = advance(FlowState(0.0, u, SymTensorField(g)), p, 0.05, 20, Scheme::if_ssprk2);
  CHECK(max_diff(out.u[0], std::exp(-0.7) * u[0]) < 1e-13);
}

TEST_CASE("constant isotropic stress follows the Riccati law") {
  const Grid g(8);
  ModelParams p;
  p.a = 0.3;
  SpectralField c(g);
  c[0] = 0.4;
  const FlowState s0 = isotropic_state(g, c);
  // trτ = 3c obeys y' = −b y² − a y.
  const double exact = riccati_trace(1.2, 1.0, p.a, p.b);
  double prev = 0.0;
  for (int steps : {100, 200, 400}) {
    const FlowState out = advance(s0, p, 1.0 / steps, steps, Scheme::if_ssprk2);
    const double err = std::abs(3.0 * out.tau(0, 0)[0].real() - exact);
    CHECK(err < 1e-4);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("self-convergence on a random small state") {
  const Grid g(16);
  const ModelParams p;
  const FlowState s0 = testing::random_state(g, 5, 0.3, 0.3);
  const double r2 = self_convergence_ratio(s0, p, 0.2, 10, Scheme::if_ssprk2);
  CHECK(r2 >= 3.4);
  CHECK(r2 <= 4.6);
  const double r1 = self_convergence_ratio(s0, p, 0.2, 10, Scheme::imex_euler);
  CHECK(r1 >= 1.7);
  CHECK(r1 <= 2.3);
}

TEST_CASE("property: steps keep the velocity solenoidal and mean-free") {
  const Grid g(16);
  ModelParams p;
  p.lambda = 0.5;
  p.a = 0.1;
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 3; ++trial) {
    FlowState s = testing::random_state(g, rng(), 0.5, 0.5);
    for (int i = 0; i < 5; ++i) s = step_fixed(s, p, 0.01);
    const StateDefects d = state_defects(s);
    CHECK(d.divergence < 1e-13);
    CHECK(d.velocity_mean == 0.0);
  }
}

TEST_CASE("stable time step") {
  const ModelParams p;
  StepControl c;
  c.dt = 0.1;
  GridProbe probe;
  probe.max_speed = 10.0;
  int halvings = 0;
  bool trace_limited = false;
  const double spacing = kTwoPi / 16;
  const double dt = stable_dt(probe, spacing, p, c, c.dt, halvings, trace_limited);
  CHECK(dt * probe.max_speed <= c.cfl_target * spacing);
  CHECK(2 * dt * probe.max_speed > c.cfl_target * spacing);
  CHECK(dt == doctest::Approx(0.1 / (1 << halvings)));
  CHECK_FALSE(trace_limited);

  probe.max_speed = 0.0;
  probe.max_abs_trace = 1e3;
  const double dt2 = stable_dt(probe, spacing, p, c, c.dt, halvings, trace_limited);
  CHECK(trace_limited);
  CHECK(dt2 * 1e3 <= c.trace_cfl);

  probe.max_abs_trace = 1e12;
  try {
    stable_dt(probe, spacing, p, c, c.dt, halvings, trace_limited);
    FAIL("expected a collapse");
  } catch (const StepCollapseError& e) {
    CHECK(e.trace_limited());
    CHECK(e.dt_needed() < c.dt_min);
  }
}

TEST_CASE("adaptive step halves for fast flows") {
  const Grid g(16);
  const ModelParams p;
  const FlowState s = testing::random_state(g, 3, 20.0, 0.1);
  StepControl c;
  c.dt = 0.1;
  const StepResult r = step(s, p, c);
  CHECK(r.halvings > 0);
  CHECK(r.dt * r.probe.max_speed <= c.cfl_target * g.spacing());
  CHECK(r.state.t == doctest::Approx(r.dt));
}

TEST_CASE("run bookkeeping") {
  const Grid g(16);
  const ModelParams p;
  const FlowState s0 = testing::random_state(g, 9, 0.05, 0.05);
  SUBCASE("t_max = 0 completes with one record") {
    StepControl c;
    c.t_max = 0.0;
    RecordCollector col;
    const RunOutcome out = run(s0, p, c, &col);
    CHECK(out.status == RunStatus::completed);
    CHECK(out.steps == 0);
    CHECK(col.records.size() == 1);
  }
  SUBCASE("records at every interval and the end") {
    StepControl c;
    c.dt = 0.01;
    c.t_max = 0.23;
    c.record_interval = 0.05;
    RecordCollector col;
    CountingObserver counter;
    InvariantMonitor mon;
    StepObserver* obs[] = {&counter, &mon};
    const RunOutcome out = run(s0, p, c, &col, obs);
    CHECK(out.status == RunStatus::completed);
    CHECK(out.t_end == doctest::Approx(0.23));
    REQUIRE(col.records.size() == 6);
    for (int i = 0; i < 5; ++i) CHECK(col.records[i].t == doctest::Approx(0.05 * i));
    CHECK(col.records.back().t == doctest::Approx(0.23));
    CHECK(counter.starts == 1);
    CHECK(counter.finishes == 1);
    CHECK(counter.steps == out.steps);
    CHECK(mon.steps == out.steps);
    CHECK(mon.max_divergence < 1e-12);
    CHECK(mon.max_trace_q < 1e-12);
    CHECK(mon.max_coupling < 1e-10);
  }
  SUBCASE("deterministic") {
    StepControl c;
    c.t_max = 0.05;
    const RunOutcome a = run(s0, p, c), b = run(s0, p, c);
    CHECK(max_diff(a.final_state.u, b.final_state.u) == 0.0);
    CHECK(max_diff(a.final_state.tau.comp, b.final_state.tau.comp) == 0.0);
  }
  SUBCASE("compressible initial data is rejected") {
    FlowState bad = s0;
    bad.u[0] = field_of(g, [](double x, double, double) { return std::sin(x); });
    CHECK_THROWS_AS(run(bad, p, StepControl{}), PreconditionError);
  }
}

TEST_CASE("isotropic negative trace blows up at the Riccati time") {
  const Grid g(16);
  const ModelParams p;
  const SpectralField phi = field_of(g, [](double x, double y, double z) {
    return -2.0 / 3.0 * (1 + std::cos(x)) * (1 + std::cos(y)) * (1 + std::cos(z)) / 8.0;
  });
  StepControl c;
  c.dt = 2e-3;
  const RunOutcome out = run(isotropic_state(g, phi), p, c);
  REQUIRE(out.status == RunStatus::blowup_detected);
  REQUIRE(out.blowup.has_value());
  CHECK(out.blowup->t_predicted.value_or(0.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(out.blowup->t_detect == doctest::Approx(0.5).epsilon(0.05));
  for (double x : out.blowup->location) CHECK(std::min(x, kTwoPi - x) < 1e-12);
  for (const auto& c : out.final_state.u) CHECK(c.max_abs() < 1e-12);
}

TEST_CASE("blow-up rate fit") {
  SUBCASE("exact Riccati series") {
    const auto h = riccati_history(-2.0, 1e-4, 0.4999);
    const RateFit fit = blowup_rate_probe(h, 0.4999);
    CHECK(fit.constant == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(fit.t_star == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit.samples >= 10);
  }
  SUBCASE("positive history has nothing to fit") {
    std::vector<TraceSample> h;
    for (int i = 0; i < 100; ++i) h.push_back({0.01 * i, 1.0, 1.0, 0.0});
    CHECK_THROWS_AS(blowup_rate_probe(h, 1.0), InsufficientDataError);
  }
  SUBCASE("under-resolved samples are dropped") {
    auto h = riccati_history(-2.0, 1e-3, 0.499);
    for (auto& s : h) s.tail_ratio = 0.5;
    CHECK_THROWS_AS(blowup_rate_probe(h, 0.499), InsufficientDataError);
  }
}
