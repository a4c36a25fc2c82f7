#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ptt/spectral_field.hpp"

namespace ptt {

/// Grid samples of a real field, same row-major layout as the coefficients.
using RealField = std::vector<double>;

/// Coefficients c_k = n⁻³ Σ_x f(x) e^{−ik·x}; throws DimensionError on a size mismatch.
SpectralField transform_forward(const Grid& grid, std::span<const double> samples);
/// Real part of Σ_k c_k e^{ik·x} on the grid.
RealField transform_backward(const SpectralField& field);

/// Batched variants. Two real fields share one complex transform, so inputs
/// are assumed to be real (conjugate-symmetric spectra).
std::vector<RealField> transform_backward(std::span<const SpectralField* const> fields);

/// A field to bring to the grid, differentiated on the fly: ∂_{axis1}∂_{axis2} f with −1 meaning
/// no derivative. Derivatives zero the Nyquist plane of their axis, as derivative() does.
struct SpectralTerm {
  const SpectralField* field = nullptr;
  int axis1 = -1;
  int axis2 = -1;
};
std::vector<RealField> transform_backward(std::span<const SpectralTerm> terms);
std::vector<SpectralField> transform_forward(const Grid& grid,
                                             std::span<const RealField* const> samples);
/// Batched forward transform followed by the 2/3-rule truncation.
std::vector<SpectralField> transform_forward_dealiased(const Grid& grid,
                                                       std::span<const RealField* const> samples);

/// Coordinate of grid index i along any axis.
inline double grid_coordinate(const Grid& grid, int i) { return grid.spacing() * i; }

/// Evaluates f at every grid point.
RealField sample(const Grid& grid, const std::function<double(double, double, double)>& f);

}  // namespace ptt
