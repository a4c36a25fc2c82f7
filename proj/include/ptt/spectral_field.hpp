#pragma once

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "ptt/grid.hpp"

namespace ptt {

using Complex = std::complex<double>;

/// Fourier coefficients of a periodic scalar field, f(x) = Σ_k c_k e^{ik·x}.
class SpectralField {
 public:
  explicit SpectralField(const Grid& grid);
  SpectralField(const Grid& grid, std::vector<Complex> coeffs);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }

  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

  /// Coefficient addressed by signed wavenumber.
  Complex& at(int k1, int k2, int k3);
  const Complex& at(int k1, int k2, int k3) const;

  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  Complex mean() const { return coeffs_[0]; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(Complex s);
  /// this += s * other
  SpectralField& add_scaled(const SpectralField& other, double s);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  bool operator==(const SpectralField& other) const;

  /// Largest coefficient magnitude.
  double max_abs() const;

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

using VectorField = std::array<SpectralField, 3>;
VectorField zero_vector(const Grid& grid);

/// Full (not necessarily symmetric) 3×3 tensor field, row-major.
struct TensorField {
  explicit TensorField(const Grid& grid);
  SpectralField& operator()(int i, int j) { return comp[static_cast<std::size_t>(3 * i + j)]; }
  const SpectralField& operator()(int i, int j) const {
    return comp[static_cast<std::size_t>(3 * i + j)];
  }
  std::array<SpectralField, 9> comp;
};

/// Symmetric 3×3 tensor stored as (11, 12, 13, 22, 23, 33).
struct SymTensorField {
  explicit SymTensorField(const Grid& grid);
  explicit SymTensorField(std::array<SpectralField, 6> components) : comp(std::move(components)) {}

  static constexpr int slot(int i, int j) {
    constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return table[i][j];
  }
  static constexpr std::array<std::array<int, 2>, 6> kPairs{
      {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

  SpectralField& operator()(int i, int j) { return comp[static_cast<std::size_t>(slot(i, j))]; }
  const SpectralField& operator()(int i, int j) const {
    return comp[static_cast<std::size_t>(slot(i, j))];
  }
  const Grid& grid() const { return comp[0].grid(); }

  SymTensorField& operator+=(const SymTensorField& other);
  SymTensorField& add_scaled(const SymTensorField& other, double s);

  std::array<SpectralField, 6> comp;
};

VectorField& add_scaled(VectorField& target, const VectorField& other, double s);

}  // namespace ptt
