#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "ptt/fft.hpp"
#include "ptt/initial_data.hpp"
#include "ptt/model.hpp"

namespace testing {

using ptt::Complex;
using ptt::Grid;
using ptt::SpectralField;

inline SpectralField field_of(const Grid& g, const std::function<double(double, double, double)>& f) {
  return ptt::transform_forward(g, ptt::sample(g, f));
}

inline ptt::VectorField vector_of(const Grid& g, const std::function<double(double, double, double)>& f0,
                                  const std::function<double(double, double, double)>& f1,
                                  const std::function<double(double, double, double)>& f2) {
  return {field_of(g, f0), field_of(g, f1), field_of(g, f2)};
}

inline double zero_fn(double, double, double) { return 0.0; }

/// Max coefficient difference over two fields.
inline double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <std::size_t N>
double max_diff(const std::array<SpectralField, N>& a, const std::array<SpectralField, N>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i) m = std::max(m, max_diff(a[i], b[i]));
  return m;
}

inline double max_abs(const SpectralField& a) { return a.max_abs(); }

/// Direct evaluation of Σ c_k e^{ik·x} at one point.
inline double evaluate_direct(const SpectralField& f, double x1, double x2, double x3) {
  const Grid& g = f.grid();
  Complex sum = 0.0;
  for (int i1 = 0; i1 < g.n(); ++i1)
    for (int i2 = 0; i2 < g.n(); ++i2)
      for (int i3 = 0; i3 < g.n(); ++i3) {
        const Complex c = f[g.flat(i1, i2, i3)];
        if (c == Complex(0.0)) continue;
        const double phase = g.wavenumber(i1) * x1 + g.wavenumber(i2) * x2 + g.wavenumber(i3) * x3;
        sum += c * std::polar(1.0, phase);
      }
  return sum.real();
}

/// Small random state: solenoidal velocity and symmetric stress of the given sizes.
inline ptt::FlowState random_state(const Grid& g, std::uint64_t seed, double u_size, double tau_size) {
  std::mt19937_64 rng(seed);
  ptt::VectorField u = ptt::random_solenoidal(g, rng);
  ptt::SymTensorField tau = ptt::random_symmetric(g, rng);
  const double su = ptt::averaged_h2_size(u, ptt::SymTensorField(g));
  const double st = ptt::averaged_h2_size(ptt::zero_vector(g), tau);
  for (auto& c : u) c *= u_size / su;
  for (auto& c : tau.comp) c *= tau_size / st;
  return ptt::FlowState(0.0, std::move(u), std::move(tau));
}

}  // namespace testing
