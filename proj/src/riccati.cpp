#include "ptt/riccati.hpp"

#include <cmath>
#include <sstream>

#include "ptt/fft.hpp"
#include "ptt/particles.hpp"

namespace ptt {

std::optional<double> riccati_blowup_time(double tr0, double a, double b) {
  if (b == 0.0 || tr0 >= 0.0) return std::nullopt;
  if (a == 0.0) return -1.0 / (b * tr0);
  // Denominator a + b tr0 (1 − e^{−at}) vanishes at e^{−at} = 1 + a/(b tr0).
  const double ratio = a / (b * tr0);
  if (a > 0.0 && ratio <= -1.0) return std::nullopt;  // tr0 ≥ −a/b decays
  return -std::log1p(ratio) / a;
}

double riccati_trace(double tr0, double t, double a, double b) {
  if (const auto ts = riccati_blowup_time(tr0, a, b); ts && t >= *ts) {
    std::ostringstream msg;
    msg << "Riccati solution with tr0 = " << tr0 << " blows up at t = " << *ts
        << ", requested t = " << t;
    throw SingularityError(*ts, msg.str());
  }
  if (a == 0.0) return tr0 / (1.0 + b * tr0 * t);
  // Exact on the fixed point tr0 = −a/b, where the coefficient of expm1 vanishes.
  return a * tr0 / (a + (a + b * tr0) * std::expm1(a * t));
}

double riccati_rk4(double tr0, double t, double a, double b, int steps) {
  auto f = [&](double y) { return -b * y * y - a * y; };
  const double h = t / steps;
  double y = tr0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * h * k1);
    const double k3 = f(y + 0.5 * h * k2);
    const double k4 = f(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

BlowupPrediction predict_blowup_time(const SpectralField& trace0, double a, double b) {
  if (!(b > 0.0)) throw ParameterError("blow-up prediction needs b > 0");
  const Grid& grid = trace0.grid();
  const int n = grid.n();
  const RealField values = transform_backward(trace0);
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  const int idx[3] = {static_cast<int>(best / (std::size_t(n) * n)),
                      static_cast<int>((best / n) % n), static_cast<int>(best % n)};
  BlowupPrediction out;
  for (int axis = 0; axis < 3; ++axis) {
    int lo[3] = {idx[0], idx[1], idx[2]};
    int hi[3] = {idx[0], idx[1], idx[2]};
    lo[axis] = (idx[axis] + n - 1) % n;
    hi[axis] = (idx[axis] + 1) % n;
    const double fm = values[grid.flat(lo[0], lo[1], lo[2])];
    const double f0 = values[best];
    const double fp = values[grid.flat(hi[0], hi[1], hi[2])];
    const double curvature = fm - 2.0 * f0 + fp;
    const double shift = curvature > 0.0 ? 0.5 * (fm - fp) / curvature : 0.0;
    out.x_star[static_cast<std::size_t>(axis)] = grid.spacing() * (idx[axis] + shift);
  }
  const FieldInterpolator interp(std::span<const SpectralField>(&trace0, 1));
  double refined = 0.0;
  interp.evaluate(out.x_star, std::span<double>(&refined, 1));
  if (refined <= values[best]) {
    out.min_trace = refined;
  } else {
    out.min_trace = values[best];
    for (int axis = 0; axis < 3; ++axis) out.x_star[static_cast<std::size_t>(axis)] = grid.spacing() * idx[axis];
  }
  if (const auto ts = riccati_blowup_time(out.min_trace, a, b)) {
    out.predicted = true;
    out.t_star = *ts;
  }
  return out;
}

}  // namespace ptt
