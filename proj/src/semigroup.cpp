#include "ptt/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "ptt/error.hpp"
#include "ptt/spectral_ops.hpp"

namespace ptt {

std::pair<Complex, Complex> eigenvalues(int ksq) {
  if (ksq < 1) throw DomainError("eigenvalues need ksq >= 1, the mean mode is excluded");
  const double K = ksq;
  const double disc = K * K - 2.0 * K;
  if (ksq == 2) return {Complex(-1.0), Complex(-1.0)};
  if (disc < 0.0) {
    const double im = 0.5 * std::sqrt(-disc);
    return {Complex(-0.5 * K, im), Complex(-0.5 * K, -im)};
  }
  const double big = -0.5 * (K + std::sqrt(disc));
  const double small = 0.5 * K / big;
  return {Complex(small), Complex(big)};
}

ModeMatrix mode_matrix(int ksq) {
  const auto [l1, l2] = eigenvalues(ksq);
  const Regime regime = ksq == 1 ? Regime::complex_pair : ksq == 2 ? Regime::degenerate : Regime::real_pair;
  return {ksq, l1, l2, regime};
}

GreenBlocks green_blocks(double t, int ksq) {
  if (t < 0.0) throw DomainError("green_blocks needs t >= 0");
  const double K = ksq;
  const auto [l1, l2] = eigenvalues(ksq);
  if (ksq == 2) {
    const double lam = l1.real();
    const double e = std::exp(lam * t);
    const double g = t * e;
    const double f = (1.0 - lam * t) * e;
    return {f - K * g, g, -0.5 * K * g, f};
  }
  const Complex e1 = std::exp(l1 * t);
  const Complex e2 = std::exp(l2 * t);
  const Complex d = l1 - l2;
  const Complex g = (e1 - e2) / d;
  const Complex f = (l1 * e2 - l2 * e1) / d;
  // f − K g rewritten with λ₁ + λ₂ = −K to avoid cancellation at large K.
  const Complex nuu = (l1 * e1 - l2 * e2) / d;
  const Complex values[4] = {nuu, g, -0.5 * K * g, f};
  GreenBlocks out;
  double* slots[4] = {&out.n_uu, &out.n_utau, &out.m_uu, &out.m_utau};
  for (int i = 0; i < 4; ++i) {
    if (std::abs(values[i].imag()) > 1e-13 * std::max(1.0, std::abs(values[i]))) {
      throw NumericError("Green's function block has a non-negligible imaginary part");
    }
    *slots[i] = values[i].real();
  }
  return out;
}

namespace {

Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

}  // namespace

Mat2 matrix_exponential_oracle(double t, int ksq) {
  if (t < 0.0) throw DomainError("matrix exponential oracle needs t >= 0");
  const double K = ksq;
  Mat2 a{{{-K * t, t}, {-0.5 * K * t, 0.0}}};
  const double norm = std::max(std::abs(a[0][0]) + std::abs(a[0][1]), std::abs(a[1][0]) + std::abs(a[1][1]));
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  for (auto& row : a)
    for (double& v : row) v *= scale;
  Mat2 result{{{1.0, 0.0}, {0.0, 1.0}}};
  Mat2 term = result;
  for (int k = 1; k <= 24; ++k) {
    term = mul(term, a);
    for (auto& row : term)
      for (double& v : row) v /= k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = mul(result, result);
  return result;
}

double block_envelope_constant() {
  static const double constant = [] {
    double best = 0.0;
    for (int ksq = 1; ksq <= 4096; ++ksq) {
      for (int i = 0; i <= 2000; ++i) {
        const double t = 0.01 * i;
        const GreenBlocks g = green_blocks(t, ksq);
        const double m = std::max({std::abs(g.n_uu), std::abs(g.n_utau), std::abs(g.m_uu), std::abs(g.m_utau)});
        best = std::max(best, m * std::exp(0.5 * t));
      }
    }
    return best;
  }();
  return constant;
}

LinearState evolve_linear(const VectorField& u0, const VectorField& pdivtau0, double t) {
  if (t < 0.0) throw DomainError("evolve_linear needs t >= 0");
  const Grid& grid = u0[0].grid();
  for (const VectorField* v : {&u0, &pdivtau0}) {
    double scale = 0.0;
    for (const auto& c : *v) {
      if (!(c.grid() == grid)) throw DimensionError("linear evolution inputs live on different grids");
      scale = std::max(scale, c.max_abs());
    }
    for (const auto& c : *v) {
      if (std::abs(c.mean()) > 1e-12 * std::max(1.0, scale)) {
        throw PreconditionError("linear evolution needs mean-free input");
      }
    }
    if (divergence(*v).max_abs() > 1e-10 * std::max(1.0, scale)) {
      throw PreconditionError("linear evolution needs divergence-free input");
    }
  }
  LinearState out{u0, pdivtau0};
  if (t == 0.0) return out;
  std::map<int, GreenBlocks> table;
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
    const int ksq = k1 * k1 + k2 * k2 + k3 * k3;
    if (ksq == 0) return;
    auto it = table.find(ksq);
    if (it == table.end()) it = table.emplace(ksq, green_blocks(t, ksq)).first;
    const GreenBlocks& g = it->second;
    for (std::size_t i = 0; i < 3; ++i) {
      const Complex u = u0[i][idx];
      const Complex p = pdivtau0[i][idx];
      out.u[i][idx] = g.n_uu * u + g.n_utau * p;
      out.pdivtau[i][idx] = g.m_uu * u + g.m_utau * p;
    }
  });
  auto norm = [](const LinearState& s) {
    return std::hypot(sobolev_norm(s.u, SobolevIndex(0)), sobolev_norm(s.pdivtau, SobolevIndex(0)));
  };
  const double before = std::hypot(sobolev_norm(u0, SobolevIndex(0)), sobolev_norm(pdivtau0, SobolevIndex(0)));
  const double after = norm(out);
  const double envelope = 2.0 * block_envelope_constant() * (1.0 + 1e-3) * std::exp(-0.5 * t) * before;
  if (after > envelope) {
    std::ostringstream msg;
    msg << "linear evolution left the e^{-t/2} envelope: " << after << " > " << envelope;
    throw InvariantError(msg.str());
  }
  return out;
}

double duhamel_defect(const VectorField& nonlinear_u, const VectorField& linear_u) {
  VectorField diff = nonlinear_u;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(nonlinear_u[i].grid() == linear_u[i].grid())) throw DimensionError("defect fields live on different grids");
    diff[i] -= linear_u[i];
  }
  return sobolev_norm(diff, SobolevIndex(0));
}

void write_green_table(std::ostream& out, std::span<const int> ksqs, std::span<const double> times) {
  out << "ksq,t,n_uu,n_utau,m_uu,m_utau,oracle_deviation\n";
  out << std::setprecision(17);
  for (int ksq : ksqs) {
    for (double t : times) {
      const GreenBlocks g = green_blocks(t, ksq);
      const Mat2 m = matrix_exponential_oracle(t, ksq);
      const double dev = std::max({std::abs(g.n_uu - m[0][0]), std::abs(g.n_utau - m[0][1]),
                                   std::abs(g.m_uu - m[1][0]), std::abs(g.m_utau - m[1][1])});
      out << ksq << ',' << t << ',' << g.n_uu << ',' << g.n_utau << ',' << g.m_uu << ',' << g.m_utau << ','
          << dev << '\n';
    }
  }
}

}  // namespace ptt
