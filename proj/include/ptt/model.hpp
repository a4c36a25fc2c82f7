#pragma once

#include <cmath>

#include "ptt/fft.hpp"
#include "ptt/spectral_field.hpp"

namespace ptt {

/// Constants of the PTT system
///   u_t + u·∇u − μΔu + ∇p = μ₁ div τ
///   τ_t + u·∇τ + (a + b trτ)τ + Q(τ,∇u) = μ₂ D(u).
struct ModelParams {
  double a = 0.0;
  double b = 1.0;
  double lambda = 0.0;
  double mu = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;

  /// a = λ = 0, b = μ = μ₁ = μ₂ = 1.
  static ModelParams preset() { return {}; }
  /// Throws ParameterError unless μ > 0, λ ∈ [−1,1], b ≥ 0.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Solution at one instant: solenoidal mean-free velocity and symmetric stress.
struct FlowState {
  FlowState(double time, VectorField velocity, SymTensorField stress);
  explicit FlowState(const Grid& grid);

  const Grid& grid() const { return u[0].grid(); }

  double t;
  VectorField u;
  SymTensorField tau;
};

/// Largest |k·û(k)| relative to max |û|, and largest |mean u_i|.
struct StateDefects {
  double divergence = 0.0;
  double velocity_mean = 0.0;
};
StateDefects state_defects(const FlowState& state);
/// Throws InvariantError when the divergence or the velocity mean exceeds tol.
void check_state(const FlowState& state, double tol = 1e-12);

/// Right-hand side with the stiff viscous term μΔu left out.
struct Tendency {
  VectorField du;
  SymTensorField dtau;
};

/// Grid quantities gathered while evaluating the explicit tendency.
struct GridProbe {
  double max_speed = 0.0;       // max |u|
  double max_abs_trace = 0.0;   // max |trτ|
  double min_trace = 0.0;
  double max_trace = 0.0;
  std::size_t argmin_trace = 0;  // flat grid index of min trτ
  std::size_t argmax_abs_trace = 0;
  double max_grad_u = 0.0;      // max pointwise Frobenius norm of ∇u
  double max_trace_q = 0.0;     // max |tr Q| relative to max(1, |τ||∇u|)
};

/// ℙ(−u·∇u + μ₁divτ) for the velocity, −u·∇τ − (a+b trτ)τ − Q + μ₂D(u) for the stress.
/// Products are formed on the grid and dealiased once.
Tendency explicit_tendency(const FlowState& state, const ModelParams& p, GridProbe* probe = nullptr);

/// ℙ(−u·∇u + μ₁ divτ) + μΔu.
VectorField momentum_rhs(const FlowState& state, const ModelParams& p);
/// −u·∇τ − (a + b trτ)τ − Q(τ,∇u) + μ₂D(u), dealiased and symmetric.
SymTensorField stress_rhs(const FlowState& state, const ModelParams& p);

/// D(u) = ½(∇u + ∇uᵀ).
SymTensorField deformation(const VectorField& u);
/// Ω(u) = ½(∇u − ∇uᵀ) with (∇u)_{ij} = ∂_j u_i.
TensorField vorticity_tensor(const VectorField& u);
/// Q(τ,∇u) = τΩ − Ωτ + λ(Dτ + τD), formed on the grid and dealiased.
SymTensorField q_bilinear(const SymTensorField& tau, const VectorField& u, double lambda);
/// τ₁₁ + τ₂₂ + τ₃₃.
SpectralField trace_field(const SymTensorField& tau);
/// Mean-free p = Δ⁻¹div(μ₁divτ − u·∇u).
SpectralField pressure(const FlowState& state, const ModelParams& p);

/// Σ_{k=0..2} ∫ (∇^k divτ · ∇^k u + ∇^k D(u) : ∇^k τ) dx, which vanishes for symmetric τ.
/// Returned together with the sum of magnitudes of the two integrals for scaling.
struct CouplingCancellation {
  double sum = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? std::abs(sum) / scale : std::abs(sum); }
};
CouplingCancellation coupling_cancellation(const VectorField& u, const SymTensorField& tau);

}  // namespace ptt
