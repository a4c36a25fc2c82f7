#include "ptt/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptt/error.hpp"

namespace ptt {

namespace {

constexpr Complex kI(0.0, 1.0);

double ksq_of(int k1, int k2, int k3) {
  return static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 + static_cast<double>(k3) * k3;
}

}  // namespace

SobolevIndex::SobolevIndex(int s) : s_(s) {
  if (s < 0 || s > 3) throw DomainError("Sobolev index must be in {0,1,2,3}, got " + std::to_string(s));
}

SpectralField derivative(const SpectralField& f, int axis) {
  if (axis < 0 || axis > 2) throw DomainError("axis must be 0, 1 or 2");
  const Grid& grid = f.grid();
  const int nyquist = grid.n() / 2;
  SpectralField out(grid);
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
    const int k = axis == 0 ? k1 : (axis == 1 ? k2 : k3);
    out[idx] = k == nyquist ? Complex{} : kI * static_cast<double>(k) * f[idx];
  });
  return out;
}

VectorField gradient(const SpectralField& f) {
  return {derivative(f, 0), derivative(f, 1), derivative(f, 2)};
}

TensorField gradient(const VectorField& v) {
  TensorField g(v[0].grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = derivative(v[static_cast<std::size_t>(i)], j);
  return g;
}

SpectralField divergence(const VectorField& v) {
  SpectralField d = derivative(v[0], 0);
  d += derivative(v[1], 1);
  d += derivative(v[2], 2);
  return d;
}

VectorField divergence(const SymTensorField& tau) {
  VectorField out = zero_vector(tau.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[static_cast<std::size_t>(i)] += derivative(tau(i, j), j);
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  SpectralField out(f.grid());
  for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
    out[idx] = -ksq_of(k1, k2, k3) * f[idx];
  });
  return out;
}

VectorField leray_project(const VectorField& v) {
  const Grid& grid = v[0].grid();
  VectorField out = v;
  const int nyquist = grid.n() / 2;
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
    const double ksq = ksq_of(k1, k2, k3);
    if (ksq == 0.0) return;
    // Nyquist components are dropped by derivative(); match that here so ℙ∇φ = 0 exactly.
    const double kk[3] = {k1 == nyquist ? 0.0 : double(k1), k2 == nyquist ? 0.0 : double(k2),
                          k3 == nyquist ? 0.0 : double(k3)};
    const double keff = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
    if (keff == 0.0) return;
    const Complex kdotv = kk[0] * v[0][idx] + kk[1] * v[1][idx] + kk[2] * v[2][idx];
    for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(c)][idx] -= kk[c] * kdotv / keff;
  });
  return out;
}

SpectralField inverse_laplacian(const SpectralField& f) {
  const double scale = std::max(1.0, f.max_abs());
  if (std::abs(f.mean()) > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "inverse Laplacian needs a mean-free field; mean coefficient is " << f.mean();
    throw PreconditionError(msg.str());
  }
  SpectralField out(f.grid());
  for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
    const double ksq = ksq_of(k1, k2, k3);
    out[idx] = ksq == 0.0 ? Complex{} : -f[idx] / ksq;
  });
  return out;
}

void dealias_in_place(SpectralField& f) {
  const Grid& grid = f.grid();
  const int n = grid.n();
  auto kept = [&](int i) { return std::abs(grid.wavenumber(i)) <= grid.dealias_cut(); };
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      const bool row = kept(i1) && kept(i2);
      for (int i3 = 0; i3 < n; ++i3)
        if (!row || !kept(i3)) f[grid.flat(i1, i2, i3)] = Complex{};
    }
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  dealias_in_place(out);
  return out;
}

double sobolev_norm(std::span<const SpectralField> fields, SobolevIndex s) {
  double sum = 0.0;
  for (const auto& f : fields) {
    for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
      sum += std::pow(1.0 + ksq_of(k1, k2, k3), s.value()) * std::norm(f[idx]);
    });
  }
  return std::sqrt(kBoxVolume * sum);
}

double sobolev_norm(const SpectralField& f, SobolevIndex s) {
  return sobolev_norm(std::span<const SpectralField>(&f, 1), s);
}

double sobolev_norm(const VectorField& v, SobolevIndex s) {
  return sobolev_norm(std::span<const SpectralField>(v), s);
}

double sobolev_norm(const SymTensorField& tau, SobolevIndex s) {
  double sq = 0.0;
  for (std::size_t c = 0; c < 6; ++c) {
    const auto [i, j] = SymTensorField::kPairs[c];
    const double w = i == j ? 1.0 : 2.0;
    const double part = sobolev_norm(tau.comp[c], s);
    sq += w * part * part;
  }
  return std::sqrt(sq);
}

double derivative_norm(const SpectralField& f, int order) {
  double sum = 0.0;
  for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
    sum += std::pow(ksq_of(k1, k2, k3), order) * std::norm(f[idx]);
  });
  return std::sqrt(kBoxVolume * sum);
}

double derivative_norm(const VectorField& v, int order) {
  double sq = 0.0;
  for (const auto& c : v) {
    const double part = derivative_norm(c, order);
    sq += part * part;
  }
  return std::sqrt(sq);
}

double volume_averaged(double integral_norm) { return integral_norm / std::sqrt(kBoxVolume); }

double linf_norm(const SpectralField& f) {
  const RealField values = transform_backward(f);
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double conjugate_symmetry_defect(const SpectralField& f) {
  double worst = 0.0;
  for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
    worst = std::max(worst, std::abs(f[idx] - std::conj(f.at(-k1, -k2, -k3))));
  });
  return worst;
}

SpectralField heat_evolve(const SpectralField& f, double nu_t) {
  SpectralField out(f.grid());
  for_each_mode(f.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
    out[idx] = std::exp(-nu_t * ksq_of(k1, k2, k3)) * f[idx];
  });
  return out;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid())) throw DimensionError("product of fields on different grids");
  const SpectralField* in[2] = {&f, &g};
  auto phys = transform_backward(std::span<const SpectralField* const>(in, 2));
  for (std::size_t i = 0; i < phys[0].size(); ++i) phys[0][i] *= phys[1][i];
  SpectralField out = transform_forward(f.grid(), phys[0]);
  dealias_in_place(out);
  return out;
}

double linf_hessian(std::span<const SpectralField> fields) {
  if (fields.empty()) return 0.0;
  const Grid& grid = fields.front().grid();
  std::vector<SpectralTerm> terms;
  for (const auto& f : fields)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) terms.push_back({&f, i, j});
  const auto phys = transform_backward(std::span<const SpectralTerm>(terms));
  RealField sq(grid.size(), 0.0);
  for (std::size_t f = 0; f < phys.size(); ++f) {
    const int pair = static_cast<int>(f % 6);
    const double w = (pair == 0 || pair == 3 || pair == 5) ? 1.0 : 2.0;  // (ii) once, (ij) twice
    for (std::size_t p = 0; p < sq.size(); ++p) sq[p] += w * phys[f][p] * phys[f][p];
  }
  return std::sqrt(*std::max_element(sq.begin(), sq.end()));
}

double linf_gradient(const VectorField& v) {
  std::vector<SpectralTerm> terms;
  for (const auto& c : v)
    for (int j = 0; j < 3; ++j) terms.push_back({&c, j});
  const auto phys = transform_backward(std::span<const SpectralTerm>(terms));
  double worst = 0.0;
  for (std::size_t p = 0; p < phys[0].size(); ++p) {
    double sq = 0.0;
    for (const auto& comp : phys) sq += comp[p] * comp[p];
    worst = std::max(worst, sq);
  }
  return std::sqrt(worst);
}

}  // namespace ptt
