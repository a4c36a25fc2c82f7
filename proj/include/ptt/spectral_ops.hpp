#pragma once

#include <span>

#include "ptt/fft.hpp"
#include "ptt/spectral_field.hpp"

namespace ptt {

/// Calls fn(flat_index, k1, k2, k3) for every lattice mode of the grid.
template <class Fn>
void for_each_mode(const Grid& grid, Fn&& fn) {
  const int n = grid.n();
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = grid.wavenumber(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = grid.wavenumber(i2);
      for (int i3 = 0; i3 < n; ++i3) fn(grid.flat(i1, i2, i3), k1, k2, grid.wavenumber(i3));
    }
  }
}

/// Order of a Sobolev norm, restricted to {0, 1, 2, 3}.
class SobolevIndex {
 public:
  explicit SobolevIndex(int s);
  int value() const { return s_; }

 private:
  int s_;
};

/// ∂f/∂x_axis for axis ∈ {0, 1, 2}. The Nyquist plane is zeroed so the result stays real.
SpectralField derivative(const SpectralField& f, int axis);
VectorField gradient(const SpectralField& f);
/// (∇v)_{ij} = ∂_j v_i.
TensorField gradient(const VectorField& v);
SpectralField divergence(const VectorField& v);
/// (div τ)_i = Σ_j ∂_j τ_ij.
VectorField divergence(const SymTensorField& tau);
SpectralField laplacian(const SpectralField& f);

/// ℙ = I − Δ⁻¹∇div applied mode by mode; the mean mode passes through.
VectorField leray_project(const VectorField& v);

/// Δ⁻¹ on mean-free fields. Throws PreconditionError naming the mean if |c_0| exceeds 1e-12.
SpectralField inverse_laplacian(const SpectralField& f);

/// Zeroes every mode with some |k_i| above the grid's dealias cut.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);

/// (Σ_k (1+|k|²)^s |f̂(k)|²)^{1/2}, normalized so that s = 0 is the integral L² norm on [0,2π)³.
double sobolev_norm(const SpectralField& f, SobolevIndex s);
/// Norm of a collection, summing squares over the components.
double sobolev_norm(std::span<const SpectralField> fields, SobolevIndex s);
double sobolev_norm(const VectorField& v, SobolevIndex s);
/// Frobenius-type norm of the full symmetric tensor (off-diagonal entries counted twice).
double sobolev_norm(const SymTensorField& tau, SobolevIndex s);

/// Homogeneous seminorm ‖∇^m f‖_{L²} = (Σ_k |k|^{2m} |f̂(k)|²)^{1/2}, integral-normalized.
double derivative_norm(const SpectralField& f, int order);
double derivative_norm(const VectorField& v, int order);

/// Converts an integral-normalized norm to the volume-averaged one, ‖f‖ / (2π)^{3/2}.
double volume_averaged(double integral_norm);

/// Grid maximum of |f|.
double linf_norm(const SpectralField& f);

/// max_k |f̂(k) − conj f̂(−k)|; zero for fields that are real in physical space.
double conjugate_symmetry_defect(const SpectralField& f);

/// Multiplies each mode by exp(−ν|k|² t).
SpectralField heat_evolve(const SpectralField& f, double nu_t);

/// Pointwise product of two fields, computed on the grid and dealiased.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

/// ∇²-tensor of all components: grid max of the pointwise Frobenius norm √(Σ|∂_i∂_j v_l|²).
double linf_hessian(std::span<const SpectralField> fields);
/// Grid max of the pointwise Frobenius norm of ∇v.
double linf_gradient(const VectorField& v);

}  // namespace ptt
