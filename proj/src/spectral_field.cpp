#include "ptt/spectral_field.hpp"

#include <algorithm>
#include <cmath>

#include "ptt/error.hpp"

namespace ptt {

namespace {

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DimensionError("spectral fields live on different grids");
}

}  // namespace

SpectralField::SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.size()) {}

SpectralField::SpectralField(const Grid& grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw DimensionError("coefficient array has " + std::to_string(coeffs_.size()) +
                         " entries, grid needs " + std::to_string(grid_.size()));
  }
}

Complex& SpectralField::at(int k1, int k2, int k3) {
  return coeffs_[grid_.flat(grid_.index_of(k1), grid_.index_of(k2), grid_.index_of(k3))];
}

const Complex& SpectralField::at(int k1, int k2, int k3) const {
  return coeffs_[grid_.flat(grid_.index_of(k1), grid_.index_of(k2), grid_.index_of(k3))];
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::add_scaled(const SpectralField& other, double s) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  return *this;
}

bool SpectralField::operator==(const SpectralField& other) const {
  return grid_ == other.grid_ && coeffs_ == other.coeffs_;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

VectorField zero_vector(const Grid& grid) {
  return {SpectralField(grid), SpectralField(grid), SpectralField(grid)};
}

TensorField::TensorField(const Grid& g)
    : comp{SpectralField(g), SpectralField(g), SpectralField(g), SpectralField(g), SpectralField(g),
           SpectralField(g), SpectralField(g), SpectralField(g), SpectralField(g)} {}

SymTensorField::SymTensorField(const Grid& g)
    : comp{SpectralField(g), SpectralField(g), SpectralField(g),
           SpectralField(g), SpectralField(g), SpectralField(g)} {}

SymTensorField& SymTensorField::operator+=(const SymTensorField& other) {
  for (std::size_t c = 0; c < comp.size(); ++c) comp[c] += other.comp[c];
  return *this;
}

SymTensorField& SymTensorField::add_scaled(const SymTensorField& other, double s) {
  for (std::size_t c = 0; c < comp.size(); ++c) comp[c].add_scaled(other.comp[c], s);
  return *this;
}

VectorField& add_scaled(VectorField& target, const VectorField& other, double s) {
  for (std::size_t c = 0; c < 3; ++c) target[c].add_scaled(other[c], s);
  return target;
}

}  // namespace ptt
