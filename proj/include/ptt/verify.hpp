#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ptt {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Relative residuals of both projection identities on `pairs` random dealiased (u, τ), ≤ 1e-10.
SuiteResult verify_projection_identities(int n = 32, int pairs = 20, std::uint64_t seed = 1);

/// Closed-form eigenvalues and Green blocks against the scaling-and-squaring exponential.
SuiteResult verify_green_blocks();

/// Closed-form Riccati trace against RK4 on random (tr0, a, b), plus a sub-threshold run to t = 50.
SuiteResult verify_riccati(std::uint64_t seed = 1);

/// Quadrature over bound ratios for r ∈ {0.5, 1, 2}, c₀ ∈ {0.01, 1}, t = 1..32.
SuiteResult verify_weighted_integrals(double eps = 0.1);

/// ‖∇²e^{tΔ}u₀‖_∞ against e^{−t}‖u₀‖_{L²} on random solenoidal data.
SuiteResult verify_heat(int n = 32, std::uint64_t seed = 1);

/// All of the above.
std::vector<SuiteResult> run_verify_suites(std::uint64_t seed = 1);

}  // namespace ptt
