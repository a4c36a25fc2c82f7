#include "ptt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptt/error.hpp"
#include "ptt/spectral_ops.hpp"

namespace ptt {

std::vector<std::string> EnergyRecord::column_names() {
  return {"t",           "l2_u",           "h2_u",           "h2_tau",
          "l2_pdivtau",  "h1_pdivtau",     "min_trtau",      "max_trtau",
          "l2_grad_trtau", "l2_grad2_trtau", "linf_grad_u",  "linf_grad2_u",
          "h2_grad_u",   "l2_grad2_u",     "l2_grad3_u",     "l2_grad_pdivtau"};
}

std::vector<double> EnergyRecord::values() const {
  return {t,          l2_u,           h2_u,        h2_tau,       l2_pdivtau, h1_pdivtau,
          min_trtau,  max_trtau,      l2_grad_trtau, l2_grad2_trtau, linf_grad_u, linf_grad2_u,
          h2_grad_u,  l2_grad2_u,     l2_grad3_u,  l2_grad_pdivtau};
}

EnergyRecord record(const FlowState& state) {
  EnergyRecord rec;
  rec.t = state.t;
  rec.l2_u = sobolev_norm(state.u, SobolevIndex(0));
  rec.h2_u = sobolev_norm(state.u, SobolevIndex(2));
  rec.h2_tau = sobolev_norm(state.tau, SobolevIndex(2));
  const VectorField pdiv = leray_project(divergence(state.tau));
  rec.l2_pdivtau = sobolev_norm(pdiv, SobolevIndex(0));
  rec.h1_pdivtau = sobolev_norm(pdiv, SobolevIndex(1));
  rec.l2_grad_pdivtau = derivative_norm(pdiv, 1);

  const SpectralField tr = trace_field(state.tau);
  const RealField tr_grid = transform_backward(tr);
  const auto [lo, hi] = std::minmax_element(tr_grid.begin(), tr_grid.end());
  rec.min_trtau = *lo;
  rec.max_trtau = *hi;
  rec.l2_grad_trtau = derivative_norm(tr, 1);
  rec.l2_grad2_trtau = derivative_norm(tr, 2);

  rec.linf_grad_u = linf_gradient(state.u);
  rec.linf_grad2_u = linf_hessian(std::span<const SpectralField>(state.u));

  double grad_h2 = 0.0;
  for (const auto& c : state.u) {
    for_each_mode(c.grid(), [&](std::size_t idx, int k1, int k2, int k3) {
      const double ksq = double(k1) * k1 + double(k2) * k2 + double(k3) * k3;
      grad_h2 += (1.0 + ksq) * (1.0 + ksq) * ksq * std::norm(c[idx]);
    });
  }
  rec.h2_grad_u = std::sqrt(kBoxVolume * grad_h2);
  rec.l2_grad2_u = derivative_norm(state.u, 2);
  rec.l2_grad3_u = derivative_norm(state.u, 3);
  return rec;
}

WeightedEnergies::WeightedEnergies(double eps_, double c0_) : eps(eps_), c0(c0_) {
  if (!(eps > 0.0)) throw ParameterError("weight exponent eps must be positive");
  if (!(c0 > 0.0)) throw ParameterError("trace lower bound c0 must be positive");
}

WeightedEnergies accumulate(const WeightedEnergies& weighted, const EnergyRecord& rec) {
  WeightedEnergies w = weighted;
  const double power = 3.0 - w.eps;
  auto slow_weight = [&](double s) { return std::pow(1.0 + w.c0 * s, power); };
  auto fast_weight = [&](double s) { return std::pow(1.0 + s, power); };
  auto sq = [](double x) { return x * x; };

  const double energy = sq(rec.h2_u) + sq(rec.h2_tau);
  const double top = slow_weight(rec.t) * (sq(rec.l2_grad2_u) + sq(rec.l2_grad_pdivtau));
  const double decay = fast_weight(rec.t) * (sq(rec.h2_u) + sq(rec.l2_pdivtau));

  if (!w.started) {
    w.started = true;
    w.E0 = energy;
    w.E0_tilde = sq(rec.l2_grad2_trtau) / sq(w.c0);
    w.sup1 = energy;
    w.sup2 = top;
    w.sup3 = decay;
  } else {
    const EnergyRecord& prev = w.last;
    const double dt = rec.t - prev.t;
    if (dt < 0.0) {
      throw SequencingError("record at t = " + std::to_string(rec.t) +
                            " arrived after t = " + std::to_string(prev.t));
    }
    auto trap = [&](double a, double b) { return 0.5 * dt * (a + b); };
    w.int1 += trap(sq(prev.h2_grad_u) + sq(prev.h1_pdivtau), sq(rec.h2_grad_u) + sq(rec.h1_pdivtau));
    w.int2 += trap(slow_weight(prev.t) * (sq(prev.l2_grad3_u) + sq(prev.l2_grad_pdivtau)),
                   slow_weight(rec.t) * (sq(rec.l2_grad3_u) + sq(rec.l2_grad_pdivtau)));
    w.int4 += trap(slow_weight(prev.t) * sq(prev.l2_grad_trtau), slow_weight(rec.t) * sq(rec.l2_grad_trtau));
    w.int5 += trap(slow_weight(prev.t) * sq(prev.l2_grad2_trtau), slow_weight(rec.t) * sq(rec.l2_grad2_trtau));
    w.sup1 = std::max(w.sup1, energy);
    w.sup2 = std::max(w.sup2, top);
    w.sup3 = std::max(w.sup3, decay);
  }
  w.last = rec;
  w.E1 = w.sup1 + w.int1;
  w.E2 = w.sup2 + w.int2;
  w.E3 = w.sup3;
  w.E4 = w.int4 / w.c0;
  w.E5 = w.int5 / w.c0;
  return w;
}

EnvelopeCheck decay_envelope_check(std::span<const EnergyRecord> history, double eps) {
  constexpr double start = 2.0;
  if (history.empty() || history.back().t < 10.0) {
    throw InsufficientDataError("decay envelope check needs a history reaching t >= 10");
  }
  auto quantity = [](const EnergyRecord& r) { return r.h2_u + r.l2_pdivtau; };
  // Quantity at t = 2, interpolated between the bracketing records.
  double q_start = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].t >= start) {
      if (i == 0 || history[i].t == start) {
        q_start = quantity(history[i]);
      } else {
        const auto& a = history[i - 1];
        const auto& b = history[i];
        const double theta = (start - a.t) / (b.t - a.t);
        q_start = (1.0 - theta) * quantity(a) + theta * quantity(b);
      }
      break;
    }
  }
  EnvelopeCheck out;
  const double rate = -1.5 + 0.5 * eps;
  out.envelope_constant = 3.0 * q_start * std::pow(1.0 + start, -rate);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& r : history) {
    if (r.t < start) continue;
    const double q = quantity(r);
    const double envelope = out.envelope_constant * std::pow(1.0 + r.t, rate);
    out.worst_ratio = std::max(out.worst_ratio, envelope > 0.0 ? q / envelope : (q > 0.0 ? INFINITY : 0.0));
    if (q > 0.0) {
      const double x = std::log1p(r.t);
      const double y = std::log(q);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
  }
  if (count < 2) throw InsufficientDataError("decay envelope check needs two positive samples after t = 2");
  out.fitted_exponent = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  out.passed = out.worst_ratio <= 1.0;
  return out;
}

namespace {

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (!std::isfinite(delta)) throw NumericError("adaptive Simpson quadrature met a non-finite value");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw NumericError("adaptive Simpson quadrature did not converge");
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (hi == lo) return 0.0;
  const double fa = f(lo);
  const double fb = f(hi);
  const double fm = f(0.5 * (lo + hi));
  return simpson_step(f, lo, hi, fa, fm, fb, simpson(fa, fm, fb, hi - lo), tol, 50);
}

Lemma23Report lemma23_check(double r, double c0, std::span<const double> t_grid, double eps,
                            double settle, double growth) {
  if (!(r > 0.0) || !(c0 > 0.0)) throw DomainError("lemma check needs r > 0 and c0 > 0");
  Lemma23Report rep;
  rep.r = r;
  rep.c0 = c0;
  for (double t : t_grid) {
    // Each half is scaled by its integrand's value at the right end so that the absolute
    // tolerance acts as a relative one.
    const double mid_weight = std::pow(1.0 + 0.5 * c0 * t, -r);
    const double end_weight = std::pow(1.0 + c0 * t, -r);
    auto near_scaled = [&](double s) {
      return std::exp(s - 0.5 * t) * std::pow((1.0 + c0 * s) / (1.0 + 0.5 * c0 * t), -r);
    };
    auto far_scaled = [&](double s) { return std::exp(s - t) * std::pow((1.0 + c0 * s) / (1.0 + c0 * t), -r); };
    Lemma23Row row;
    row.t = t;
    row.near_integral = std::exp(-0.5 * t) * mid_weight * adaptive_simpson(near_scaled, 0.0, 0.5 * t, 1e-13);
    row.far_integral = end_weight * adaptive_simpson(far_scaled, 0.5 * t, t, 1e-13);
    double near = std::exp(-0.5 * t) / c0;
    if (r == 1.0) {
      near *= std::pow(1.0 + c0 * t, eps);
    } else if (r < 1.0) {
      near *= std::pow(1.0 + c0 * t, 1.0 - r);
    }
    row.near_bound = near;
    row.far_bound = std::pow(1.0 + c0 * t, -r);
    rep.rows.push_back(row);
  }
  bool finite = true;
  double early_near = 0.0, early_far = 0.0, late_near = 0.0, late_far = 0.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    finite = finite && std::isfinite(row.near_ratio()) && std::isfinite(row.far_ratio());
    rep.max_near_ratio = std::max(rep.max_near_ratio, row.near_ratio());
    rep.max_far_ratio = std::max(rep.max_far_ratio, row.far_ratio());
    if (row.t <= settle) {
      early_near = std::max(early_near, row.near_ratio());
      early_far = std::max(early_far, row.far_ratio());
    } else {
      late_near = std::max(late_near, row.near_ratio());
      late_far = std::max(late_far, row.far_ratio());
    }
    if (i + 1 < rep.rows.size() && row.t >= settle) {
      const auto& next = rep.rows[i + 1];
      rep.worst_tail_growth = std::max({rep.worst_tail_growth, next.near_ratio() / row.near_ratio(),
                                        next.far_ratio() / row.far_ratio()});
    }
  }
  rep.passed = finite && rep.worst_tail_growth <= growth && late_near <= growth * early_near &&
               late_far <= growth * early_far;
  return rep;
}

HeatReport heat_linf_check(std::span<const SpectralField> u0, std::span<const double> times) {
  static constexpr double kDefaultTimes[] = {0.5, 1.0, 2.0, 4.0};
  if (times.empty()) times = kDefaultTimes;
  for (const auto& f : u0) {
    if (std::abs(f.mean()) > 1e-12 * std::max(1.0, f.max_abs())) {
      throw PreconditionError("heat kernel check needs mean-free data");
    }
  }
  const double l2 = sobolev_norm(u0, SobolevIndex(0));
  HeatReport rep;
  for (double t : times) {
    std::vector<SpectralField> evolved;
    for (const auto& f : u0) evolved.push_back(heat_evolve(f, t));
    HeatRow row;
    row.t = t;
    row.linf_hessian = linf_hessian(evolved);
    row.ratio = l2 > 0.0 ? row.linf_hessian / (std::exp(-t) * l2) : 0.0;
    rep.rows.push_back(row);
  }
  rep.constant = rep.rows.front().ratio;
  rep.passed = std::all_of(rep.rows.begin(), rep.rows.end(), [&](const HeatRow& row) {
    return row.ratio <= rep.constant * (1.0 + 1e-9);
  });
  return rep;
}

}  // namespace ptt
