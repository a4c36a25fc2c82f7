#pragma once

#include <cstddef>
#include <numbers>

namespace ptt {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Volume of the periodic box [0, 2π)³.
inline constexpr double kBoxVolume = kTwoPi * kTwoPi * kTwoPi;

/// Uniform periodic grid on [0, 2π)³ with n points per axis.
///
/// Storage is row-major in (i1, i2, i3) with i3 fastest. Index i maps to the
/// integer wavenumber i for i ≤ n/2 and i − n otherwise, so the retained
/// wavenumbers per axis are {−n/2+1, …, n/2}.
class Grid {
 public:
  /// Grid with the 2/3-rule cutoff floor(n/3).
  explicit Grid(int n);
  Grid(int n, int dealias_cut);

  int n() const { return n_; }
  int dealias_cut() const { return cut_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  double spacing() const { return kTwoPi / n_; }

  int wavenumber(int index) const { return index <= n_ / 2 ? index : index - n_; }
  /// Storage index for a wavenumber in {−n/2+1, …, n/2}.
  int index_of(int wavenumber) const { return wavenumber >= 0 ? wavenumber : wavenumber + n_; }

  std::size_t flat(int i1, int i2, int i3) const {
    return (static_cast<std::size_t>(i1) * n_ + i2) * n_ + i3;
  }

  bool retained(int k1, int k2, int k3) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
  int cut_;
};

}  // namespace ptt
