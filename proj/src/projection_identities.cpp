#include "ptt/projection_identities.hpp"

#include <array>
#include <vector>

#include "ptt/error.hpp"
#include "ptt/fft.hpp"
#include "ptt/spectral_ops.hpp"

namespace ptt {

namespace {

double relative(double residual, double lhs) { return lhs > 0.0 ? residual / lhs : residual; }

std::vector<RealField> to_physical(const std::vector<const SpectralField*>& fields) {
  return transform_backward(std::span<const SpectralField* const>(fields));
}

VectorField to_spectral(const Grid& grid, const std::array<RealField, 3>& v) {
  const RealField* ptrs[3] = {&v[0], &v[1], &v[2]};
  auto s = transform_forward(grid, std::span<const RealField* const>(ptrs, 3));
  for (auto& f : s) dealias_in_place(f);
  return {std::move(s[0]), std::move(s[1]), std::move(s[2])};
}

double difference_norm(const VectorField& a, const VectorField& b) {
  VectorField d = a;
  add_scaled(d, b, -1.0);
  return sobolev_norm(d, SobolevIndex(0));
}

}  // namespace

double IdentityResiduals::transport_relative() const {
  return relative(transport_residual, transport_lhs);
}

double IdentityResiduals::trace_relative() const { return relative(trace_residual, trace_lhs); }

IdentityResiduals projection_identity_residuals(const VectorField& u, const SymTensorField& tau) {
  const Grid& grid = u[0].grid();
  const SpectralField div_u = divergence(u);
  double scale = 1.0;
  for (const auto& c : u) scale = std::max(scale, c.max_abs());
  if (div_u.max_abs() > 1e-10 * scale) {
    throw PreconditionError("projection identities need a divergence-free velocity");
  }
  const std::size_t points = grid.size();

  const TensorField grad_u = gradient(u);
  const VectorField div_tau = divergence(tau);
  const VectorField pdiv_tau = leray_project(div_tau);
  const SpectralField psi = inverse_laplacian(divergence(div_tau));
  SpectralField trace = tau(0, 0);
  trace += tau(1, 1);
  trace += tau(2, 2);

  // Physical-space copies, in a fixed order.
  std::vector<const SpectralField*> spec;
  for (const auto& c : u) spec.push_back(&c);                        // 0..2
  for (const auto& c : grad_u.comp) spec.push_back(&c);              // 3..11  ∂_j u_i at 3+3i+j
  for (const auto& c : tau.comp) spec.push_back(&c);                 // 12..17
  std::vector<SpectralField> dtau;
  for (const auto& c : tau.comp)
    for (int k = 0; k < 3; ++k) dtau.push_back(derivative(c, k));  // 18..35 ∂_k τ_s at 18+3s+k
  for (const auto& c : dtau) spec.push_back(&c);
  const TensorField grad_pdiv = gradient(pdiv_tau);
  for (const auto& c : pdiv_tau) spec.push_back(&c);                // 36..38
  for (const auto& c : grad_pdiv.comp) spec.push_back(&c);          // 39..47 ∂_j P_i at 39+3i+j
  const VectorField grad_psi = gradient(psi);
  spec.push_back(&psi);                                              // 48
  for (const auto& c : grad_psi) spec.push_back(&c);                // 49..51
  const VectorField grad_tr = gradient(trace);
  spec.push_back(&trace);                                            // 52
  for (const auto& c : grad_tr) spec.push_back(&c);                 // 53..55
  const auto phys = to_physical(spec);

  auto u_at = [&](int i, std::size_t p) { return phys[static_cast<std::size_t>(i)][p]; };
  auto du = [&](int i, int j, std::size_t p) { return phys[static_cast<std::size_t>(3 + 3 * i + j)][p]; };
  auto tau_at = [&](int i, int j, std::size_t p) {
    return phys[static_cast<std::size_t>(12 + SymTensorField::slot(i, j))][p];
  };
  auto dtau_at = [&](int i, int j, int k, std::size_t p) {
    return phys[static_cast<std::size_t>(18 + 3 * SymTensorField::slot(i, j) + k)][p];
  };
  auto pdiv_at = [&](int i, std::size_t p) { return phys[static_cast<std::size_t>(36 + i)][p]; };
  auto dpdiv = [&](int i, int j, std::size_t p) { return phys[static_cast<std::size_t>(39 + 3 * i + j)][p]; };
  auto psi_at = [&](std::size_t p) { return phys[48][p]; };
  auto dpsi = [&](int k, std::size_t p) { return phys[static_cast<std::size_t>(49 + k)][p]; };
  auto tr_at = [&](std::size_t p) { return phys[52][p]; };
  auto dtr = [&](int k, std::size_t p) { return phys[static_cast<std::size_t>(53 + k)][p]; };

  // Tensor products for the left-hand sides.
  SymTensorField transported(grid);
  SymTensorField trace_weighted(grid);
  {
    std::array<RealField, 6> a;
    std::array<RealField, 6> b;
    for (int s = 0; s < 6; ++s) {
      a[static_cast<std::size_t>(s)].assign(points, 0.0);
      b[static_cast<std::size_t>(s)].assign(points, 0.0);
    }
    for (std::size_t p = 0; p < points; ++p) {
      for (int s = 0; s < 6; ++s) {
        const auto [i, j] = SymTensorField::kPairs[static_cast<std::size_t>(s)];
        double adv = 0.0;
        for (int k = 0; k < 3; ++k) adv += u_at(k, p) * dtau_at(i, j, k, p);
        a[static_cast<std::size_t>(s)][p] = adv;
        b[static_cast<std::size_t>(s)][p] = tr_at(p) * tau_at(i, j, p);
      }
    }
    std::vector<const RealField*> ptrs;
    for (const auto& f : a) ptrs.push_back(&f);
    for (const auto& f : b) ptrs.push_back(&f);
    auto s = transform_forward(grid, ptrs);
    for (std::size_t c = 0; c < 6; ++c) {
      dealias_in_place(s[c]);
      dealias_in_place(s[6 + c]);
      transported.comp[c] = std::move(s[c]);
      trace_weighted.comp[c] = std::move(s[6 + c]);
    }
  }
  const VectorField lhs_transport = leray_project(divergence(transported));
  const VectorField lhs_trace = leray_project(divergence(trace_weighted));

  std::array<RealField, 3> rhs1;
  std::array<RealField, 3> rhs2;
  for (int i = 0; i < 3; ++i) {
    rhs1[static_cast<std::size_t>(i)].assign(points, 0.0);
    rhs2[static_cast<std::size_t>(i)].assign(points, 0.0);
  }
  for (std::size_t p = 0; p < points; ++p) {
    for (int i = 0; i < 3; ++i) {
      double adv = 0.0;        // u·∇(ℙdivτ)_i
      double cross = 0.0;      // Σ_j ∂_j u_k ∂_k τ_ij
      double grad_term = 0.0;  // ∂_i u_k ∂_k ψ
      double tau_grad = 0.0;   // τ_ij ∂_j trτ
      for (int k = 0; k < 3; ++k) {
        adv += u_at(k, p) * dpdiv(i, k, p);
        grad_term += du(k, i, p) * dpsi(k, p);
        tau_grad += tau_at(i, k, p) * dtr(k, p);
        for (int j = 0; j < 3; ++j) cross += du(k, j, p) * dtau_at(i, j, k, p);
      }
      rhs1[static_cast<std::size_t>(i)][p] = adv + cross - grad_term;
      rhs2[static_cast<std::size_t>(i)][p] =
          tr_at(p) * pdiv_at(i, p) + tau_grad - dtr(i, p) * psi_at(p);
    }
  }
  const VectorField rhs_transport = leray_project(to_spectral(grid, rhs1));
  const VectorField rhs_trace = leray_project(to_spectral(grid, rhs2));

  IdentityResiduals r;
  r.transport_lhs = sobolev_norm(lhs_transport, SobolevIndex(0));
  r.transport_residual = difference_norm(lhs_transport, rhs_transport);
  r.trace_lhs = sobolev_norm(lhs_trace, SobolevIndex(0));
  r.trace_residual = difference_norm(lhs_trace, rhs_trace);
  return r;
}

}  // namespace ptt
