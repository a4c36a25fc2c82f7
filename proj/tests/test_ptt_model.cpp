#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ptt/error.hpp"
#include "ptt/initial_data.hpp"
#include "ptt/model.hpp"
#include "ptt/riccati.hpp"
#include "ptt/spectral_ops.hpp"
#include "support.hpp"

using namespace ptt;
using testing::field_of;
using testing::max_diff;

namespace {

using M3 = std::array<std::array<double, 3>, 3>;

M3 mul(const M3& a, const M3& b) {
  M3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Q assembled pointwise from dense 3×3 products, then brought back and dealiased.
SymTensorField q_oracle(const SymTensorField& tau, const VectorField& u, double lambda) {
  const Grid& g = tau.grid();
  std::array<RealField, 9> grad;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) grad[3 * i + j] = transform_backward(derivative(u[i], j));
  std::array<RealField, 6> t;
  for (int s = 0; s < 6; ++s) t[s] = transform_backward(tau.comp[s]);
  std::array<RealField, 6> q;
  for (auto& c : q) c.resize(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    M3 T{}, D{}, W{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T[i][j] = t[SymTensorField::slot(i, j)][p];
        D[i][j] = 0.5 * (grad[3 * i + j][p] + grad[3 * j + i][p]);
        W[i][j] = 0.5 * (grad[3 * i + j][p] - grad[3 * j + i][p]);
      }
    const M3 tw = mul(T, W), wt = mul(W, T), dt = mul(D, T), td = mul(T, D);
    for (int s = 0; s < 6; ++s) {
      const auto [i, j] = SymTensorField::kPairs[s];
      q[s][p] = tw[i][j] - wt[i][j] + lambda * (dt[i][j] + td[i][j]);
    }
  }
  SymTensorField out(g);
  for (int s = 0; s < 6; ++s) out.comp[s] = dealias(transform_forward(g, q[s]));
  return out;
}

// Classical RK4 for y' = −b y² − a y, written independently of the library.
double rk4_oracle(double y, double t, double a, double b, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    auto f = [&](double v) { return -v * (a + b * v); };
    const double k1 = f(y), k2 = f(y + h / 2 * k1), k3 = f(y + h / 2 * k2), k4 = f(y + h * k3);
    y += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
  }
  return y;
}

SymTensorField isotropic(const SpectralField& phi) {
  SymTensorField tau(phi.grid());
  for (int i = 0; i < 3; ++i) tau(i, i) = phi;
  return tau;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(ModelParams::preset().validate());
  ModelParams p;
  p.lambda = 2.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = ModelParams{};
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = ModelParams{};
  p.b = -1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("deformation and vorticity of a shear") {
  const Grid g(16);
  const VectorField u = testing::vector_of(
      g, [](double, double y, double) { return std::sin(y); }, testing::zero_fn, testing::zero_fn);
  const SpectralField half_cos = field_of(g, [](double, double y, double) { return 0.5 * std::cos(y); });
  const SymTensorField d = deformation(u);
  CHECK(max_diff(d(0, 1), half_cos) < 1e-15);
  for (int i = 0; i < 3; ++i) CHECK(d(i, i).max_abs() < 1e-15);
  const TensorField w = vorticity_tensor(u);
  CHECK(max_diff(w(0, 1), half_cos) < 1e-15);
  CHECK(max_diff(w(1, 0), -1.0 * half_cos) < 1e-15);
  for (const auto& c : deformation(zero_vector(g)).comp) CHECK(c.max_abs() == 0.0);
}

TEST_CASE("irrotational and solenoidal fields") {
  const Grid g(16);
  const SpectralField phi = field_of(g, [](double x, double y, double z) { return std::sin(x) * std::cos(y + z); });
  const TensorField w = vorticity_tensor(gradient(phi));
  for (const auto& c : w.comp) CHECK(c.max_abs() < 1e-15);
  std::mt19937_64 rng(3);
  const VectorField u = random_solenoidal(g, rng);
  CHECK(linf_norm(trace_field(deformation(u))) < 1e-12);
}

TEST_CASE("Q bilinear term") {
  const Grid g(16);
  std::mt19937_64 rng(21);
  const VectorField u = random_solenoidal(g, rng);
  SymTensorField eye(g);
  for (int i = 0; i < 3; ++i) eye(i, i)[0] = 1.0;
  SUBCASE("identity stress, lambda 0") {
    for (const auto& c : q_bilinear(eye, u, 0.0).comp) CHECK(c.max_abs() < 1e-15);
  }
  SUBCASE("identity stress, lambda 1 gives 2D") {
    const SymTensorField q = q_bilinear(eye, u, 1.0);
    const SymTensorField d = deformation(u);
    for (int s = 0; s < 6; ++s) CHECK(max_diff(q.comp[s], 2.0 * d.comp[s]) < 1e-14);
  }
  SUBCASE("property: dense matrix oracle") {
    for (double lambda : {0.5, -0.3, 0.0}) {
      const VectorField v = random_solenoidal(g, rng);
      const SymTensorField tau = random_symmetric(g, rng);
      const SymTensorField q = q_bilinear(tau, v, lambda);
      const SymTensorField ref = q_oracle(tau, v, lambda);
      for (int s = 0; s < 6; ++s) CHECK(max_diff(q.comp[s], ref.comp[s]) < 1e-10);
      if (lambda == 0.0) CHECK(linf_norm(trace_field(q)) < 1e-12);
    }
  }
}

TEST_CASE("momentum tendency") {
  const Grid g(16);
  const ModelParams p = ModelParams::preset();
  SUBCASE("pure-trace stress is projected out") {
    const SpectralField phi = field_of(g, [](double x, double y, double) { return std::sin(x) * std::cos(y); });
    const FlowState s(0.0, zero_vector(g), isotropic(phi));
    for (const auto& c : momentum_rhs(s, p)) CHECK(c.max_abs() < 1e-15);
  }
  SUBCASE("shear mode decays by mu") {
    const VectorField u = testing::vector_of(
        g, [](double, double y, double) { return std::sin(y); }, testing::zero_fn, testing::zero_fn);
    const FlowState s(0.0, u, SymTensorField(g));
    const VectorField r = momentum_rhs(s, p);
    for (int i = 0; i < 3; ++i) CHECK(max_diff(r[i], -1.0 * u[i]) < 1e-14);
  }
}

TEST_CASE("stress tendency") {
  const Grid g(16);
  SUBCASE("constant isotropic stress") {
    ModelParams p;
    p.a = 0.5;
    SpectralField c(g);
    c[0] = 0.7;
    const SymTensorField r = stress_rhs(FlowState(0.0, zero_vector(g), isotropic(c)), p);
    const double expect = -(0.5 + 3 * 0.7) * 0.7;
    for (int s = 0; s < 6; ++s) {
      const bool diag = SymTensorField::kPairs[s][0] == SymTensorField::kPairs[s][1];
      CHECK(std::abs(r.comp[s][0] - (diag ? expect : 0.0)) < 1e-15);
    }
  }
  SUBCASE("zero stress gives mu2 D(u)") {
    ModelParams p;
    p.mu2 = 1.7;
    std::mt19937_64 rng(8);
    const VectorField u = random_solenoidal(g, rng);
    const SymTensorField r = stress_rhs(FlowState(0.0, u, SymTensorField(g)), p);
    const SymTensorField d = deformation(u);
    for (int s = 0; s < 6; ++s) CHECK(max_diff(r.comp[s], 1.7 * d.comp[s]) < 1e-14);
  }
  SUBCASE("property: trace obeys the transported Riccati law") {
    std::mt19937_64 rng(12);
    for (double a : {0.0, 0.4}) {
      ModelParams p;
      p.a = a;
      p.b = 1.3;
      const FlowState s = testing::random_state(g, rng(), 0.1, 0.2);
      const SpectralField tr = trace_field(s.tau);
      SpectralField expect = -1.3 * dealiased_product(tr, tr) + (-a) * tr;
      for (int j = 0; j < 3; ++j) expect -= dealiased_product(s.u[j], derivative(tr, j));
      CHECK(max_diff(trace_field(stress_rhs(s, p)), expect) < 1e-10);
    }
  }
}

TEST_CASE("explicit tendency agrees with the separate right-hand sides") {
  const Grid g(16);
  std::mt19937_64 rng(31);
  ModelParams p;
  p.a = 0.2;
  p.lambda = 0.4;
  p.mu = 0.8;
  p.mu1 = 1.1;
  p.mu2 = 0.9;
  const FlowState s = testing::random_state(g, rng(), 0.1, 0.1);
  GridProbe probe;
  const Tendency t = explicit_tendency(s, p, &probe);
  const VectorField m = momentum_rhs(s, p);
  for (int i = 0; i < 3; ++i) CHECK(max_diff(t.du[i] + 0.8 * laplacian(s.u[i]), m[i]) < 1e-13);
  const SymTensorField r = stress_rhs(s, p);
  for (int c = 0; c < 6; ++c) CHECK(max_diff(t.dtau.comp[c], r.comp[c]) < 1e-13);
  const RealField tr = transform_backward(trace_field(s.tau));
  CHECK(probe.min_trace == doctest::Approx(*std::min_element(tr.begin(), tr.end())).epsilon(1e-12));
  CHECK(divergence(t.du).max_abs() < 1e-14);
}

TEST_CASE("pressure") {
  const Grid g(16);
  const ModelParams p;
  SUBCASE("zero state") {
    CHECK(pressure(FlowState(g), p).max_abs() == 0.0);
  }
  SUBCASE("pure-trace stress gives mu1 phi") {
    const SpectralField phi = field_of(g, [](double x, double, double) { return std::cos(x); });
    CHECK(max_diff(pressure(FlowState(0.0, zero_vector(g), isotropic(phi)), p), phi) < 1e-15);
  }
  SUBCASE("property: gradient removes the compressible part") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 3; ++trial) {
      const FlowState s = testing::random_state(g, rng(), 0.5, 0.5);
      VectorField f = divergence(s.tau);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f[i] -= dealiased_product(s.u[j], derivative(s.u[i], j));
      const VectorField grad_p = gradient(pressure(s, p));
      for (int i = 0; i < 3; ++i) f[i] -= grad_p[i];
      CHECK(max_diff(leray_project(f), f) < 1e-10);
    }
  }
}

TEST_CASE("property: coupling cancellation for symmetric stress") {
  const Grid g(16);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const FlowState s = testing::random_state(g, rng(), 0.3, 0.7);
    const CouplingCancellation c = coupling_cancellation(s.u, s.tau);
    CHECK(c.scale > 0.0);
    CHECK(c.relative() < 1e-10);
  }
}

TEST_CASE("state invariants") {
  const Grid g(16);
  const VectorField comp = testing::vector_of(
      g, [](double x, double, double) { return std::sin(x); }, testing::zero_fn, testing::zero_fn);
  FlowState s(0.0, comp, SymTensorField(g));
  CHECK_THROWS_AS(check_state(s), InvariantError);
  FlowState m(g);
  m.u[2][0] = 0.3;
  CHECK(state_defects(m).velocity_mean == doctest::Approx(0.3));
  CHECK_THROWS_AS(check_state(m), InvariantError);
  CHECK_NOTHROW(check_state(FlowState(g)));
}

TEST_CASE("initial data") {
  const Grid g(32);
  SUBCASE("global data has the requested size and trace floor") {
    InitialDataSpec spec;
    spec.delta0 = 0.01;
    const FlowState s = make_initial_data(g, spec);
    CHECK(averaged_h2_size(s.u, s.tau) == doctest::Approx(0.01).epsilon(1e-10));
    const RealField tr = transform_backward(trace_field(s.tau));
    CHECK(*std::min_element(tr.begin(), tr.end()) >= 0.005);
    CHECK(state_defects(s).divergence < 1e-14);
    const FlowState again = make_initial_data(g, spec);
    CHECK(max_diff(again.u, s.u) == 0.0);
    CHECK(max_diff(again.tau.comp, s.tau.comp) == 0.0);
  }
  SUBCASE("blowup data has the requested trace minimum") {
    InitialDataSpec spec;
    spec.kind = InitialKind::blowup;
    spec.trace_min = -2.0;
    const FlowState s = make_initial_data(g, spec);
    const RealField tr = transform_backward(trace_field(s.tau));
    CHECK(*std::min_element(tr.begin(), tr.end()) == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("seeds change the data") {
    InitialDataSpec a, b;
    b.seed = 2;
    CHECK(max_diff(make_initial_data(g, a).u, make_initial_data(g, b).u) > 0.0);
  }
}

TEST_CASE("Riccati closed form") {
  CHECK(riccati_trace(-2.0, 0.25, 0.0, 1.0) == doctest::Approx(-4.0).epsilon(1e-15));
  for (double t : {0.0, 1.0, 10.0, 100.0}) CHECK(riccati_trace(0.3, t, 0.0, 1.0) == doctest::Approx(0.3 / (1 + 0.3 * t)));
  CHECK(std::abs(riccati_trace(-3.0, 0.05, 1.0, 1.0) - rk4_oracle(-3.0, 0.05, 1.0, 1.0, 2000)) < 1e-10);
  CHECK(*riccati_blowup_time(-2.0, 0.0, 1.0) == doctest::Approx(0.5));
  CHECK_FALSE(riccati_blowup_time(1.0, 0.0, 1.0).has_value());
  CHECK_FALSE(riccati_blowup_time(-0.5, 1.0, 1.0).has_value());
  CHECK(riccati_blowup_time(-1.5, 1.0, 1.0).has_value());
  CHECK_THROWS_AS(riccati_trace(-2.0, 0.5, 0.0, 1.0), SingularityError);
  try {
    riccati_trace(-2.0, 0.7, 0.0, 1.0);
  } catch (const SingularityError& e) {
    CHECK(e.blowup_time() == doctest::Approx(0.5));
  }
}

TEST_CASE("Riccati fixed point stays put for long times") {
  for (double a : {0.5, 1.0, 3.0}) {
    const double tr0 = -a / 2.0;
    CHECK_FALSE(riccati_blowup_time(tr0, a, 2.0).has_value());
    for (double t = 0.0; t <= 50.0; t += 0.5) CHECK(riccati_trace(tr0, t, a, 2.0) == tr0);
  }
  // Just above the fixed point the solution decays to tiny values; relative accuracy survives.
  const double y = riccati_trace(-0.4, 40.0, 0.5, 1.0);
  CHECK(y == doctest::Approx(rk4_oracle(-0.4, 40.0, 0.5, 1.0, 40000)).epsilon(1e-9));
}

TEST_CASE("property: Riccati closed form against an RK4 oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> tr(-3.0, 3.0), a(-1.0, 1.0), b(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double y0 = tr(rng), aa = a(rng), bb = b(rng);
    double t = 2.0;
    if (const auto ts = riccati_blowup_time(y0, aa, bb)) t = std::min(t, 0.7 * *ts);
    const double exact = riccati_trace(y0, t, aa, bb);
    CHECK(std::abs(exact - rk4_oracle(y0, t, aa, bb, 20000)) <= 1e-10 * std::max(1.0, std::abs(exact)));
    CHECK(std::abs(exact - riccati_rk4(y0, t, aa, bb, 20000)) <= 1e-10 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("blow-up prediction from the initial trace") {
  const Grid g(32);
  InitialDataSpec spec;
  spec.kind = InitialKind::blowup;
  const FlowState s = make_initial_data(g, spec);
  const BlowupPrediction p = predict_blowup_time(trace_field(s.tau), 0.0, 1.0);
  REQUIRE(p.predicted);
  CHECK(p.t_star == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(p.min_trace == doctest::Approx(-2.0).epsilon(1e-12));
  for (double x : p.x_star) CHECK(std::min(x, kTwoPi - x) < 1e-8);
  SpectralField positive(g);
  positive[0] = 1.0;
  CHECK_FALSE(predict_blowup_time(positive, 0.0, 1.0).predicted);
  CHECK_THROWS_AS(predict_blowup_time(positive, 0.0, 0.0), ParameterError);
}
