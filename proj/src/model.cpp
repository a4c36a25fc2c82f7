#include "ptt/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "ptt/error.hpp"
#include "ptt/spectral_ops.hpp"

namespace ptt {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Q = τΩ − Ωτ + λ(Dτ + τD) from the velocity gradient g_{ij} = ∂_j u_i. For symmetric τ this is
// M + Mᵀ with M = τΩ + λDτ.
Mat3 q_pointwise(const Mat3& tau, const Mat3& g, double lambda) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double w = 0.5 * (g[k][j] - g[j][k]);
        const double d = 0.5 * (g[i][k] + g[k][i]);
        s += tau[i][k] * w + lambda * d * tau[k][j];
      }
      m[i][j] = s;
    }
  Mat3 q{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q[i][j] = m[i][j] + m[j][i];
  return q;
}

std::vector<SpectralField> forward_dealiased(const Grid& grid, const std::vector<RealField>& fields) {
  std::vector<const RealField*> ptrs;
  for (const auto& f : fields) ptrs.push_back(&f);
  return transform_forward_dealiased(grid, ptrs);
}

}  // namespace

void ModelParams::validate() const {
  if (!(mu > 0.0)) throw ParameterError("viscosity mu must be positive");
  if (!(lambda >= -1.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [-1, 1]");
  if (!(b >= 0.0)) throw ParameterError("b must be nonnegative");
  for (double v : {a, b, lambda, mu, mu1, mu2}) {
    if (!std::isfinite(v)) throw ParameterError("model constants must be finite");
  }
}

FlowState::FlowState(double time, VectorField velocity, SymTensorField stress)
    : t(time), u(std::move(velocity)), tau(std::move(stress)) {
  for (const auto& c : u)
    if (!(c.grid() == tau.grid())) throw DimensionError("velocity and stress grids differ");
}

FlowState::FlowState(const Grid& grid) : t(0.0), u(zero_vector(grid)), tau(grid) {}

StateDefects state_defects(const FlowState& state) {
  StateDefects d;
  double scale = 0.0;
  for (const auto& c : state.u) scale = std::max(scale, c.max_abs());
  const int nyquist = state.grid().n() / 2;
  double worst = 0.0;
  for_each_mode(state.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
    const Complex div = double(k1 == nyquist ? 0 : k1) * state.u[0][idx] +
                        double(k2 == nyquist ? 0 : k2) * state.u[1][idx] +
                        double(k3 == nyquist ? 0 : k3) * state.u[2][idx];
    worst = std::max(worst, std::abs(div));
  });
  d.divergence = scale > 0.0 ? worst / scale : 0.0;
  for (const auto& c : state.u) d.velocity_mean = std::max(d.velocity_mean, std::abs(c.mean()));
  return d;
}

void check_state(const FlowState& state, double tol) {
  const StateDefects d = state_defects(state);
  if (d.divergence > tol) {
    std::ostringstream msg;
    msg << "velocity divergence " << d.divergence << " exceeds " << tol;
    throw InvariantError(msg.str());
  }
  if (d.velocity_mean > tol) {
    std::ostringstream msg;
    msg << "velocity mean " << d.velocity_mean << " exceeds " << tol;
    throw InvariantError(msg.str());
  }
}

SymTensorField deformation(const VectorField& u) {
  const Grid& grid = u[0].grid();
  SymTensorField d(grid);
  for (const auto& [i, j] : SymTensorField::kPairs) {
    SpectralField s = derivative(u[static_cast<std::size_t>(i)], j);
    s += derivative(u[static_cast<std::size_t>(j)], i);
    s *= 0.5;
    d(i, j) = std::move(s);
  }
  return d;
}

TensorField vorticity_tensor(const VectorField& u) {
  const TensorField g = gradient(u);
  TensorField w(u[0].grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      SpectralField s = g(i, j);
      s -= g(j, i);
      s *= 0.5;
      w(i, j) = std::move(s);
    }
  return w;
}

SpectralField trace_field(const SymTensorField& tau) {
  SpectralField tr = tau(0, 0);
  tr += tau(1, 1);
  tr += tau(2, 2);
  return tr;
}

SymTensorField q_bilinear(const SymTensorField& tau, const VectorField& u, double lambda) {
  const Grid& grid = tau.grid();
  const TensorField g = gradient(u);
  std::vector<const SpectralField*> spec;
  for (const auto& c : g.comp) spec.push_back(&c);
  for (const auto& c : tau.comp) spec.push_back(&c);
  const auto phys = transform_backward(spec);
  std::vector<RealField> q(6, RealField(grid.size()));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    Mat3 gm{};
    Mat3 tm{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        gm[i][j] = phys[static_cast<std::size_t>(3 * i + j)][p];
        tm[i][j] = phys[static_cast<std::size_t>(9 + SymTensorField::slot(i, j))][p];
      }
    const Mat3 qm = q_pointwise(tm, gm, lambda);
    for (std::size_t s = 0; s < 6; ++s) {
      const auto [i, j] = SymTensorField::kPairs[s];
      q[s][p] = 0.5 * (qm[i][j] + qm[j][i]);
    }
  }
  auto spec_q = forward_dealiased(grid, q);
  SymTensorField out(grid);
  for (std::size_t s = 0; s < 6; ++s) out.comp[s] = std::move(spec_q[s]);
  return out;
}

Tendency explicit_tendency(const FlowState& state, const ModelParams& p, GridProbe* probe) {
  const Grid& grid = state.grid();
  const std::size_t points = grid.size();
  std::vector<SpectralTerm> terms;
  terms.reserve(36);
  for (const auto& c : state.u) terms.push_back({&c});  // 0..2
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) terms.push_back({&state.u[static_cast<std::size_t>(i)], j});  // 3..11
  for (const auto& c : state.tau.comp) terms.push_back({&c});  // 12..17
  for (const auto& c : state.tau.comp)
    for (int k = 0; k < 3; ++k) terms.push_back({&c, k});  // 18..35
  const auto phys = transform_backward(std::span<const SpectralTerm>(terms));

  std::vector<RealField> nonlinear(9, RealField(points));  // 3 convective + 6 stress
  GridProbe pr;
  pr.min_trace = std::numeric_limits<double>::infinity();
  pr.max_trace = -std::numeric_limits<double>::infinity();
  for (std::size_t pt = 0; pt < points; ++pt) {
    Mat3 gm{};
    Mat3 tm{};
    double uu[3];
    double speed_sq = 0.0;
    double grad_sq = 0.0;
    for (int i = 0; i < 3; ++i) {
      uu[i] = phys[static_cast<std::size_t>(i)][pt];
      speed_sq += uu[i] * uu[i];
      for (int j = 0; j < 3; ++j) {
        gm[i][j] = phys[static_cast<std::size_t>(3 + 3 * i + j)][pt];
        tm[i][j] = phys[static_cast<std::size_t>(12 + SymTensorField::slot(i, j))][pt];
        grad_sq += gm[i][j] * gm[i][j];
      }
    }
    for (int i = 0; i < 3; ++i) {
      double conv = 0.0;
      for (int k = 0; k < 3; ++k) conv += uu[k] * gm[i][k];
      nonlinear[static_cast<std::size_t>(i)][pt] = conv;
    }
    const double tr = tm[0][0] + tm[1][1] + tm[2][2];
    const Mat3 qm = q_pointwise(tm, gm, p.lambda);
    const double damping = p.a + p.b * tr;
    for (std::size_t s = 0; s < 6; ++s) {
      const auto [i, j] = SymTensorField::kPairs[s];
      double adv = 0.0;
      for (int k = 0; k < 3; ++k) {
        adv += uu[k] * phys[18 + 3 * s + static_cast<std::size_t>(k)][pt];
      }
      nonlinear[3 + s][pt] = -adv - damping * tm[i][j] - 0.5 * (qm[i][j] + qm[j][i]);
    }
    if (probe) {
      double tau_sq = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tau_sq += tm[i][j] * tm[i][j];
      const double trq = qm[0][0] + qm[1][1] + qm[2][2];
      const double q_scale = std::max(1.0, std::sqrt(tau_sq * grad_sq));
      pr.max_trace_q = std::max(pr.max_trace_q, std::abs(trq) / q_scale);
      pr.max_speed = std::max(pr.max_speed, std::sqrt(speed_sq));
      pr.max_grad_u = std::max(pr.max_grad_u, std::sqrt(grad_sq));
      if (tr < pr.min_trace) {
        pr.min_trace = tr;
        pr.argmin_trace = pt;
      }
      pr.max_trace = std::max(pr.max_trace, tr);
      if (std::abs(tr) > pr.max_abs_trace) {
        pr.max_abs_trace = std::abs(tr);
        pr.argmax_abs_trace = pt;
      }
    }
  }
  if (probe) *probe = pr;

  auto spec_nl = forward_dealiased(grid, nonlinear);
  // ℙ(μ₁divτ − u·∇u) with zero mean, and the stress terms plus μ₂D(u), in one pass over the modes.
  const int nyquist = grid.n() / 2;
  const Complex iu(0.0, 1.0);
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
    if (idx == 0) {
      for (std::size_t i = 0; i < 3; ++i) spec_nl[i][0] = Complex{};
      return;
    }
    const double dk[3] = {k1 == nyquist ? 0.0 : k1, k2 == nyquist ? 0.0 : k2, k3 == nyquist ? 0.0 : k3};
    Complex f[3];
    for (int i = 0; i < 3; ++i) {
      Complex div = 0.0;
      for (int j = 0; j < 3; ++j) div += dk[j] * state.tau(i, j)[idx];
      f[i] = p.mu1 * iu * div - spec_nl[static_cast<std::size_t>(i)][idx];
    }
    const double keff = dk[0] * dk[0] + dk[1] * dk[1] + dk[2] * dk[2];
    if (keff > 0.0) {
      const Complex kdotf = dk[0] * f[0] + dk[1] * f[1] + dk[2] * f[2];
      for (int i = 0; i < 3; ++i) f[i] -= dk[i] * kdotf / keff;
    }
    for (std::size_t i = 0; i < 3; ++i) spec_nl[i][idx] = f[i];
    for (std::size_t s = 0; s < 6; ++s) {
      const auto [i, j] = SymTensorField::kPairs[s];
      const Complex d = 0.5 * iu * (dk[j] * state.u[static_cast<std::size_t>(i)][idx] +
                                    dk[i] * state.u[static_cast<std::size_t>(j)][idx]);
      spec_nl[3 + s][idx] += p.mu2 * d;
    }
  });
  return {{std::move(spec_nl[0]), std::move(spec_nl[1]), std::move(spec_nl[2])},
          SymTensorField({std::move(spec_nl[3]), std::move(spec_nl[4]), std::move(spec_nl[5]),
                          std::move(spec_nl[6]), std::move(spec_nl[7]), std::move(spec_nl[8])})};
}

VectorField momentum_rhs(const FlowState& state, const ModelParams& p) {
  Tendency t = explicit_tendency(state, p);
  for (std::size_t i = 0; i < 3; ++i) t.du[i].add_scaled(laplacian(state.u[i]), p.mu);
  return std::move(t.du);
}

SymTensorField stress_rhs(const FlowState& state, const ModelParams& p) {
  return std::move(explicit_tendency(state, p).dtau);
}

SpectralField pressure(const FlowState& state, const ModelParams& p) {
  const Grid& grid = state.grid();
  const TensorField g = gradient(state.u);
  std::vector<const SpectralField*> spec;
  for (const auto& c : state.u) spec.push_back(&c);
  for (const auto& c : g.comp) spec.push_back(&c);
  const auto phys = transform_backward(spec);
  std::vector<RealField> conv(3, RealField(grid.size()));
  for (std::size_t pt = 0; pt < grid.size(); ++pt)
    for (std::size_t i = 0; i < 3; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += phys[k][pt] * phys[3 + 3 * i + k][pt];
      conv[i][pt] = s;
    }
  auto conv_spec = forward_dealiased(grid, conv);
  VectorField force = divergence(state.tau);
  for (std::size_t i = 0; i < 3; ++i) {
    force[i] *= p.mu1;
    force[i] -= conv_spec[i];
  }
  SpectralField div = divergence(force);
  div[0] = Complex{};
  return inverse_laplacian(div);
}

CouplingCancellation coupling_cancellation(const VectorField& u, const SymTensorField& tau) {
  const Grid& grid = u[0].grid();
  const int nyquist = grid.n() / 2;
  const Complex iu(0.0, 1.0);
  double first = 0.0;
  double second = 0.0;
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
    const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
    const double w = 1.0 + ksq + ksq * ksq;
    const double dk[3] = {k1 == nyquist ? 0.0 : k1, k2 == nyquist ? 0.0 : k2, k3 == nyquist ? 0.0 : k3};
    for (int i = 0; i < 3; ++i) {
      Complex div = 0.0;
      for (int j = 0; j < 3; ++j) div += iu * dk[j] * tau(i, j)[idx];
      first += w * std::real(div * std::conj(u[static_cast<std::size_t>(i)][idx]));
    }
    for (std::size_t s = 0; s < 6; ++s) {
      const auto [i, j] = SymTensorField::kPairs[s];
      const Complex d = 0.5 * iu * (dk[j] * u[static_cast<std::size_t>(i)][idx] + dk[i] * u[static_cast<std::size_t>(j)][idx]);
      const double mult = i == j ? 1.0 : 2.0;
      second += mult * w * std::real(d * std::conj(tau.comp[s][idx]));
    }
  });
  CouplingCancellation c;
  c.sum = kBoxVolume * (first + second);
  c.scale = kBoxVolume * (std::abs(first) + std::abs(second));
  return c;
}

}  // namespace ptt
