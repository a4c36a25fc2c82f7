#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "ptt/model.hpp"

namespace ptt {

enum class InitialKind { global, blowup, linear };

struct InitialDataSpec {
  InitialKind kind = InitialKind::global;
  /// global: ‖(u₀,τ₀)‖_{H²} in the volume-averaged norm. blowup: size of the
  /// velocity and traceless stress perturbation. linear: data amplitude.
  double delta0 = 0.02;
  /// Lower bound of trτ₀ for the global builder; defaults to δ₀/2.
  std::optional<double> c0;
  /// Amplitude factor of the sin x₁ sin x₂ sin x₃ trace perturbation.
  double eps_tilde0 = 1.0;
  /// Minimum of trτ₀ for the blowup builder.
  double trace_min = -2.0;
  std::uint64_t seed = 1;
};

/// Three builders:
///  - global: trτ₀ = 3c₀/2 + c₀²ε̃₀/4 · sin x₁ sin x₂ sin x₃ on the diagonal, random
///    off-diagonal stress and velocity scaled so the total H² size is δ₀; checks trτ₀ ≥ c₀.
///  - blowup: trτ₀ = m (1+cos x₁)(1+cos x₂)(1+cos x₃)/8 with minimum m at the origin,
///    plus a small traceless stress and velocity perturbation.
///  - linear: random solenoidal velocity and symmetric mean-free stress of size δ₀.
FlowState make_initial_data(const Grid& grid, const InitialDataSpec& spec);

/// Random real field with Gaussian coefficients on 1 ≤ |k| ≤ kmax, amplitude |k|^{-decay},
/// dealiased. Deterministic for a fixed generator state.
SpectralField random_field(const Grid& grid, std::mt19937_64& rng, double kmax = 4.0,
                           double decay = 4.0);
/// ℙ of a random vector field with the mean removed.
VectorField random_solenoidal(const Grid& grid, std::mt19937_64& rng, double kmax = 4.0,
                              double decay = 4.0);
SymTensorField random_symmetric(const Grid& grid, std::mt19937_64& rng, double kmax = 4.0,
                                double decay = 4.0);

/// ‖(u,τ)‖_{H²} in the volume-averaged normalization.
double averaged_h2_size(const VectorField& u, const SymTensorField& tau);

}  // namespace ptt
