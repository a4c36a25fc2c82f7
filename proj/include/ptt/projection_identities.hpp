#pragma once

#include "ptt/spectral_field.hpp"

namespace ptt {

/// L² residuals of the two commutator identities for ℙdiv:
///
///   ℙdiv(u·∇τ)      = ℙ(u·∇ℙdivτ) + ℙ(∇u·∇τ) − ℙ(∇u·∇Δ⁻¹divdivτ)
///   ℙdiv((trτ)τ)    = ℙ((trτ)ℙdivτ) + ℙ(τ·∇trτ) − ℙ(∇trτ Δ⁻¹divdivτ)
///
/// with (∇u·∇τ)_i = Σ_j ∂_j u·∇τ_ij and (∇u·∇φ)_i = ∂_i u·∇φ.
struct IdentityResiduals {
  double transport_residual = 0.0;
  double transport_lhs = 0.0;
  double trace_residual = 0.0;
  double trace_lhs = 0.0;

  /// Residual over the LHS norm; the absolute residual when the LHS vanishes.
  double transport_relative() const;
  double trace_relative() const;
};

/// Evaluates both sides spectrally with dealiased products. Throws
/// PreconditionError when u is not divergence-free.
IdentityResiduals projection_identity_residuals(const VectorField& u, const SymTensorField& tau);

}  // namespace ptt
