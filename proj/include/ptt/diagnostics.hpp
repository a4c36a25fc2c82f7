#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ptt/model.hpp"

namespace ptt {

/// One time sample of the monitored norms. Norms are integral-normalized on [0,2π)³.
struct EnergyRecord {
  double t = 0.0;
  double l2_u = 0.0;
  double h2_u = 0.0;
  double h2_tau = 0.0;
  double l2_pdivtau = 0.0;
  double h1_pdivtau = 0.0;
  double min_trtau = 0.0;
  double max_trtau = 0.0;
  double l2_grad_trtau = 0.0;
  double l2_grad2_trtau = 0.0;
  double linf_grad_u = 0.0;
  double linf_grad2_u = 0.0;
  // Extra seminorms needed by the weighted energies.
  double h2_grad_u = 0.0;        // ‖∇u‖_{H²}
  double l2_grad2_u = 0.0;       // ‖∇²u‖_{L²}
  double l2_grad3_u = 0.0;       // ‖∇³u‖_{L²}
  double l2_grad_pdivtau = 0.0;  // ‖∇ℙdivτ‖_{L²}

  static std::vector<std::string> column_names();
  std::vector<double> values() const;
};

EnergyRecord record(const FlowState& state);

/// Receives records from a single producer, in time order.
class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void on_record(const EnergyRecord& rec) = 0;
};

class RecordCollector : public RecordSink {
 public:
  void on_record(const EnergyRecord& rec) override { records.push_back(rec); }
  std::vector<EnergyRecord> records;
};

/// Initial energies and running values of the five time-weighted functionals.
struct WeightedEnergies {
  WeightedEnergies(double eps, double c0);

  double eps;
  double c0;
  double E0 = 0.0;        // ‖u₀‖²_{H²} + ‖τ₀‖²_{H²}
  double E0_tilde = 0.0;  // c₀⁻²‖∇²trτ₀‖²
  double E1 = 0.0;
  double E2 = 0.0;
  double E3 = 0.0;
  double E4 = 0.0;
  double E5 = 0.0;

  // Components: running suprema and integrals.
  double sup1 = 0.0, int1 = 0.0;
  double sup2 = 0.0, int2 = 0.0;
  double sup3 = 0.0;
  double int4 = 0.0, int5 = 0.0;

  bool started = false;
  EnergyRecord last;
};

/// Adds one record: trapezoid rule for the integral parts, running max for the sups.
/// Throws SequencingError if rec.t precedes the previous record.
WeightedEnergies accumulate(const WeightedEnergies& weighted, const EnergyRecord& rec);

struct EnvelopeCheck {
  double fitted_exponent = 0.0;
  double envelope_constant = 0.0;
  double worst_ratio = 0.0;  // max of quantity / envelope over t ≥ 2
  bool passed = false;
};

/// Fits log(‖u‖_{H²} + ‖ℙdivτ‖_{L²}) against log(1+t) on [2, t_max] and checks the quantity
/// stays under C(1+t)^{−3/2+ε/2} with C = 3× its t = 2 value. Needs t_max ≥ 10.
EnvelopeCheck decay_envelope_check(std::span<const EnergyRecord> history, double eps);

struct Lemma23Row {
  double t = 0.0;
  double near_integral = 0.0;  // ∫₀^{t/2} e^{−(t−s)}(1+c₀s)^{−r} ds
  double near_bound = 0.0;
  double far_integral = 0.0;   // ∫_{t/2}^t e^{−(t−s)}(1+c₀s)^{−r} ds
  double far_bound = 0.0;
  double near_ratio() const { return near_integral / near_bound; }
  double far_ratio() const { return far_integral / far_bound; }
};

struct Lemma23Report {
  double r = 0.0;
  double c0 = 0.0;
  std::vector<Lemma23Row> rows;
  double max_near_ratio = 0.0;
  double max_far_ratio = 0.0;
  double worst_tail_growth = 0.0;  // largest ratio(t_{i+1})/ratio(t_i) once t_i ≥ settle time
  bool passed = false;
};

/// Adaptive Simpson quadrature on [lo, hi] to absolute tolerance tol. Throws NumericError
/// when the recursion depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Compares both weighted integrals with their bounds (c₀⁻¹e^{−t/2}, with (1+c₀t)^ε when r = 1
/// and (1+c₀t)^{1−r} when r < 1; (1+c₀t)^{−r} for the far half). The ratios must stay bounded:
/// once e^{−t/2} has settled (t ≥ settle) a doubling of t may grow them by at most `growth`.
Lemma23Report lemma23_check(double r, double c0, std::span<const double> t_grid, double eps = 0.1,
                            double settle = 8.0, double growth = 1.05);

struct HeatRow {
  double t = 0.0;
  double linf_hessian = 0.0;
  double ratio = 0.0;  // linf / (e^{−t}‖u₀‖_{L²})
};

struct HeatReport {
  std::vector<HeatRow> rows;
  double constant = 0.0;  // ratio measured at the first time
  bool passed = false;
};

/// Evolves u₀ under e^{tΔ} and checks ‖∇²e^{tΔ}u₀‖_∞ ≤ C e^{−t}‖u₀‖_{L²} with C taken at
/// the first time and non-growing afterwards. Throws PreconditionError for non-mean-free input.
HeatReport heat_linf_check(std::span<const SpectralField> u0,
                           std::span<const double> times = std::span<const double>());

}  // namespace ptt
