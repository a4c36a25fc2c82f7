#include "ptt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include "ptt/diagnostics.hpp"
#include "ptt/initial_data.hpp"
#include "ptt/projection_identities.hpp"
#include "ptt/riccati.hpp"
#include "ptt/semigroup.hpp"

namespace ptt {

namespace {

template <class Fn>
SuiteResult guarded(const std::string& name, Fn&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("error: ") + e.what()};
  }
}

}  // namespace

SuiteResult verify_projection_identities(int n, int pairs, std::uint64_t seed) {
  return guarded("projection_identities", [&] {
    const Grid grid(n);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
      const VectorField u = random_solenoidal(grid, rng);
      const SymTensorField tau = random_symmetric(grid, rng);
      const auto r = projection_identity_residuals(u, tau);
      worst = std::max({worst, r.transport_relative(), r.trace_relative()});
    }
    std::ostringstream d;
    d << pairs << " pairs at n=" << n << ", worst relative residual " << worst;
    return SuiteResult{"projection_identities", worst <= 1e-10, d.str()};
  });
}

SuiteResult verify_green_blocks() {
  return guarded("green_blocks", [&] {
    double worst = 0.0;
    for (int ksq = 1; ksq <= 64; ++ksq) {
      for (double t : {0.1, 1.0, 5.0}) {
        const GreenBlocks g = green_blocks(t, ksq);
        const Mat2 m = matrix_exponential_oracle(t, ksq);
        worst = std::max({worst, std::abs(g.n_uu - m[0][0]), std::abs(g.n_utau - m[0][1]),
                          std::abs(g.m_uu - m[1][0]), std::abs(g.m_utau - m[1][1])});
      }
    }
    const auto [l1, l2] = eigenvalues(1);
    const Complex plus(-0.5, 0.5), minus(-0.5, -0.5);
    const double eig_dev = std::min(std::max(std::abs(l1 - plus), std::abs(l2 - minus)),
                                    std::max(std::abs(l1 - minus), std::abs(l2 - plus)));
    std::ostringstream d;
    d << "max block deviation " << worst << ", ksq=1 eigenvalue deviation " << eig_dev;
    return SuiteResult{"green_blocks", worst <= 1e-10 && eig_dev <= 1e-14, d.str()};
  });
}

SuiteResult verify_riccati(std::uint64_t seed) {
  return guarded("riccati", [&] {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> tr_dist(-2.0, 2.0), a_dist(-1.0, 1.0), b_dist(0.1, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double tr0 = tr_dist(rng), a = a_dist(rng), b = b_dist(rng);
      double t = 1.0;
      if (const auto ts = riccati_blowup_time(tr0, a, b)) t = std::min(t, 0.8 * *ts);
      const double exact = riccati_trace(tr0, t, a, b);
      const double rk = riccati_rk4(tr0, t, a, b, 4000);
      worst = std::max(worst, std::abs(exact - rk) / std::max(1.0, std::abs(exact)));
    }
    // Sub-threshold start for a > 0: decays instead of blowing up.
    const double a = 0.5, b = 1.0, tr0 = -0.9 * a / b;
    bool bounded = !riccati_blowup_time(tr0, a, b).has_value();
    double threshold_dev = 0.0;
    for (double t = 1.0; t <= 50.0; t += 1.0) {
      const double exact = riccati_trace(tr0, t, a, b);
      const double rk = riccati_rk4(tr0, t, a, b, 200 * static_cast<int>(t));
      bounded = bounded && std::isfinite(rk) && rk <= 0.0 && rk >= tr0;
      threshold_dev = std::max(threshold_dev, std::abs(exact - rk));
    }
    std::ostringstream d;
    d << "100 triples, worst deviation " << worst << "; sub-threshold run to t=50 "
      << (bounded ? "bounded" : "NOT bounded") << ", deviation " << threshold_dev;
    return SuiteResult{"riccati", worst <= 1e-10 && bounded && threshold_dev <= 1e-10, d.str()};
  });
}

SuiteResult verify_weighted_integrals(double eps) {
  return guarded("weighted_integrals", [&] {
    std::vector<double> times;
    for (int t = 1; t <= 32; ++t) times.push_back(t);
    bool ok = true;
    std::ostringstream d;
    for (double r : {0.5, 1.0, 2.0}) {
      for (double c0 : {0.01, 1.0}) {
        const auto rep = lemma23_check(r, c0, times, eps);
        ok = ok && rep.passed;
        d << "r=" << r << " c0=" << c0 << (rep.passed ? " ok" : " FAIL") << " (growth " << rep.worst_tail_growth
          << "); ";
      }
    }
    return SuiteResult{"weighted_integrals", ok, d.str()};
  });
}

SuiteResult verify_heat(int n, std::uint64_t seed) {
  return guarded("heat", [&] {
    const Grid grid(n);
    std::mt19937_64 rng(seed);
    const VectorField u = random_solenoidal(grid, rng);
    const auto rep = heat_linf_check(u);
    std::ostringstream d;
    d << "C=" << rep.constant << ", ratios";
    for (const auto& row : rep.rows) d << ' ' << row.ratio;
    return SuiteResult{"heat", rep.passed, d.str()};
  });
}

std::vector<SuiteResult> run_verify_suites(std::uint64_t seed) {
  return {verify_projection_identities(32, 20, seed), verify_green_blocks(), verify_riccati(seed),
          verify_weighted_integrals(), verify_heat(32, seed)};
}

}  // namespace ptt
