#include "ptt/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptt/error.hpp"
#include "ptt/spectral_ops.hpp"

namespace ptt {

namespace {

// True for the representative of each ±k pair (first nonzero component positive).
bool upper_half(int k1, int k2, int k3) {
  if (k1 != 0) return k1 > 0;
  if (k2 != 0) return k2 > 0;
  return k3 > 0;
}

SymTensorField isotropic(const SpectralField& phi) {
  SymTensorField tau(phi.grid());
  tau(0, 0) = phi;
  tau(1, 1) = phi;
  tau(2, 2) = phi;
  return tau;
}

void scale(VectorField& u, double s) {
  for (auto& c : u) c *= s;
}

void scale(SymTensorField& tau, double s) {
  for (auto& c : tau.comp) c *= s;
}

FlowState build_global(const Grid& grid, const InitialDataSpec& spec, std::mt19937_64& rng) {
  if (!(spec.delta0 > 0.0)) throw ParameterError("global data needs delta0 > 0");
  const double c0 = spec.c0.value_or(0.5 * spec.delta0);
  if (!(c0 > 0.0)) throw ParameterError("global data needs c0 > 0");
  const double amp = 0.25 * c0 * c0 * spec.eps_tilde0;
  const RealField tr_samples = sample(grid, [&](double x1, double x2, double x3) {
    return 1.5 * c0 + amp * std::sin(x1) * std::sin(x2) * std::sin(x3);
  });
  SpectralField third = transform_forward(grid, tr_samples);
  third *= 1.0 / 3.0;
  SymTensorField diag = isotropic(third);

  VectorField u = random_solenoidal(grid, rng);
  SymTensorField off = random_symmetric(grid, rng);
  for (int i = 0; i < 3; ++i) off(i, i) = SpectralField(grid);

  const double fixed = averaged_h2_size(zero_vector(grid), diag);
  const double free = averaged_h2_size(u, off);
  const double room = spec.delta0 * spec.delta0 - fixed * fixed;
  if (room <= 0.0 || free <= 0.0) {
    std::ostringstream msg;
    msg << "cannot reach H2 size " << spec.delta0 << ": the trace part alone has size " << fixed;
    throw ConstructionError(msg.str());
  }
  const double s = std::sqrt(room) / free;
  scale(u, s);
  scale(off, s);
  SymTensorField tau = diag;
  tau += off;

  const RealField tr = transform_backward(trace_field(tau));
  const double min_tr = *std::min_element(tr.begin(), tr.end());
  if (min_tr < c0 * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "constructed trace minimum " << min_tr << " is below c0 = " << c0;
    throw ConstructionError(msg.str());
  }
  return FlowState(0.0, std::move(u), std::move(tau));
}

FlowState build_blowup(const Grid& grid, const InitialDataSpec& spec, std::mt19937_64& rng) {
  if (!(spec.trace_min < 0.0)) throw ParameterError("blowup data needs a negative trace minimum");
  if (!(spec.delta0 >= 0.0)) throw ParameterError("blowup perturbation size must be nonnegative");
  const double m = spec.trace_min;
  const RealField samples = sample(grid, [&](double x1, double x2, double x3) {
    return m * (1.0 + std::cos(x1)) * (1.0 + std::cos(x2)) * (1.0 + std::cos(x3)) / 24.0;
  });
  SymTensorField tau = isotropic(transform_forward(grid, samples));

  VectorField u = random_solenoidal(grid, rng);
  SymTensorField dev = random_symmetric(grid, rng);
  SpectralField third = trace_field(dev);
  third *= 1.0 / 3.0;
  for (int i = 0; i < 3; ++i) dev(i, i) -= third;
  const double size = averaged_h2_size(u, dev);
  if (size > 0.0) {
    scale(u, spec.delta0 / size);
    scale(dev, spec.delta0 / size);
  }
  tau += dev;
  return FlowState(0.0, std::move(u), std::move(tau));
}

FlowState build_linear(const Grid& grid, const InitialDataSpec& spec, std::mt19937_64& rng) {
  VectorField u = random_solenoidal(grid, rng);
  SymTensorField tau = random_symmetric(grid, rng);
  const double size = averaged_h2_size(u, tau);
  scale(u, spec.delta0 / size);
  scale(tau, spec.delta0 / size);
  return FlowState(0.0, std::move(u), std::move(tau));
}

}  // namespace

SpectralField random_field(const Grid& grid, std::mt19937_64& rng, double kmax, double decay) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(grid);
  const int kint = static_cast<int>(std::floor(kmax));
  // Fixed lexicographic draw order keeps the field a pure function of the seed.
  for (int k1 = -kint; k1 <= kint; ++k1)
    for (int k2 = -kint; k2 <= kint; ++k2)
      for (int k3 = -kint; k3 <= kint; ++k3) {
        if (!upper_half(k1, k2, k3)) continue;
        const double kmag = std::sqrt(double(k1) * k1 + double(k2) * k2 + double(k3) * k3);
        if (kmag > kmax) continue;
        const double re = normal(rng);
        const double im = normal(rng);
        if (!grid.retained(k1, k2, k3)) continue;
        const Complex c = std::pow(kmag, -decay) * Complex(re, im);
        f.at(k1, k2, k3) = c;
        f.at(-k1, -k2, -k3) = std::conj(c);
      }
  return f;
}

VectorField random_solenoidal(const Grid& grid, std::mt19937_64& rng, double kmax, double decay) {
  VectorField v{random_field(grid, rng, kmax, decay), random_field(grid, rng, kmax, decay),
                random_field(grid, rng, kmax, decay)};
  VectorField p = leray_project(v);
  for (auto& c : p) c[0] = Complex{};
  return p;
}

SymTensorField random_symmetric(const Grid& grid, std::mt19937_64& rng, double kmax, double decay) {
  SymTensorField tau(grid);
  for (auto& c : tau.comp) c = random_field(grid, rng, kmax, decay);
  return tau;
}

double averaged_h2_size(const VectorField& u, const SymTensorField& tau) {
  const double hu = sobolev_norm(u, SobolevIndex(2));
  const double ht = sobolev_norm(tau, SobolevIndex(2));
  return volume_averaged(std::sqrt(hu * hu + ht * ht));
}

FlowState make_initial_data(const Grid& grid, const InitialDataSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  switch (spec.kind) {
    case InitialKind::global:
      return build_global(grid, spec, rng);
    case InitialKind::blowup:
      return build_blowup(grid, spec, rng);
    case InitialKind::linear:
      return build_linear(grid, spec, rng);
  }
  throw ParameterError("unknown initial data kind");
}

}  // namespace ptt
