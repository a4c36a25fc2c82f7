#pragma once

#include <array>
#include <complex>
#include <ostream>
#include <span>
#include <utility>

#include "ptt/model.hpp"

namespace ptt {

enum class Regime { complex_pair, degenerate, real_pair };

/// Mode matrix A(k) = [[−|k|², 1], [−|k|²/2, 0]] of the linearized system for (û, ℙdivτ̂),
/// with roots of λ² + |k|²λ + |k|²/2 = 0.
struct ModeMatrix {
  int ksq = 0;
  Complex lambda1;
  Complex lambda2;
  Regime regime = Regime::real_pair;
};

/// Both roots, ordered by real part then imaginary part, descending. Throws DomainError for ksq < 1.
std::pair<Complex, Complex> eigenvalues(int ksq);
ModeMatrix mode_matrix(int ksq);

/// Scalar factors of the Green's function: û(t) = n_uu û₀ + n_utau P̂₀, P̂(t) = m_uu û₀ + m_utau P̂₀
/// with P = ℙdivτ.
struct GreenBlocks {
  double n_uu = 1.0;
  double n_utau = 0.0;
  double m_uu = 0.0;
  double m_utau = 1.0;
};

/// Closed form, with the confluent limits at ksq = 2. Throws DomainError for t < 0 or ksq < 1.
GreenBlocks green_blocks(double t, int ksq);

using Mat2 = std::array<std::array<double, 2>, 2>;

/// exp(tA(k)) by scaling and squaring of a Taylor polynomial.
Mat2 matrix_exponential_oracle(double t, int ksq);

/// max over ksq ∈ [1, 4096] and t ∈ [0, 20] of e^{t/2}·max(|n_uu|, |n_utau|, |m_uu|, |m_utau|),
/// computed once on a fine sweep.
double block_envelope_constant();

struct LinearState {
  VectorField u;
  VectorField pdivtau;
};

/// Applies the Green's function mode by mode. Both inputs must be mean-free and divergence-free
/// (PreconditionError otherwise). The output is checked against ‖·‖ ≤ 2C e^{−t/2}‖input‖ with
/// C = block_envelope_constant(); a violation raises InvariantError.
LinearState evolve_linear(const VectorField& u0, const VectorField& pdivtau0, double t);

/// ‖u_nonlinear − u_linear‖_{L²}; DimensionError when the grids differ.
double duhamel_defect(const VectorField& nonlinear_u, const VectorField& linear_u);

/// CSV table with columns ksq, t, n_uu, n_utau, m_uu, m_utau, oracle_deviation.
void write_green_table(std::ostream& out, std::span<const int> ksqs, std::span<const double> times);

}  // namespace ptt
