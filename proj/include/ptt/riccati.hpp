#pragma once

#include <array>
#include <optional>

#include "ptt/error.hpp"
#include "ptt/spectral_field.hpp"

namespace ptt {

using Vec3 = std::array<double, 3>;

/// Raised when the Riccati solution is asked for at or past its blow-up time.
class SingularityError : public Error {
 public:
  SingularityError(double blowup_time, const std::string& what)
      : Error(what), blowup_time_(blowup_time) {}
  double blowup_time() const { return blowup_time_; }

 private:
  double blowup_time_;
};

/// Blow-up time of y' = −b y² − a y, y(0) = tr0, or nullopt if the solution stays finite.
std::optional<double> riccati_blowup_time(double tr0, double a, double b);

/// Closed-form trace along a trajectory:
///   a = 0: tr0 / (1 + b tr0 t)
///   a ≠ 0: a tr0 e^{−at} / (a + b tr0 (1 − e^{−at})).
/// Throws SingularityError at or after the blow-up time.
double riccati_trace(double tr0, double t, double a, double b);

/// Classical RK4 integration of the same ODE with `steps` uniform steps; a check on the closed form.
double riccati_rk4(double tr0, double t, double a, double b, int steps);

struct BlowupPrediction {
  bool predicted = false;
  double t_star = 0.0;      // valid when predicted
  Vec3 x_star{};            // refined location of min trτ₀
  double min_trace = 0.0;   // trτ₀ at x_star
};

/// Locates min trτ₀ (grid scan, then a per-axis parabola through the neighbours) and
/// returns the Riccati blow-up time from that value. Throws ParameterError unless b > 0.
BlowupPrediction predict_blowup_time(const SpectralField& trace0, double a, double b);

}  // namespace ptt
