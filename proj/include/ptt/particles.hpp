#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ptt/integrator.hpp"
#include "ptt/riccati.hpp"
#include "ptt/spectral_field.hpp"

namespace ptt {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 identity3();
Mat3 multiply(const Mat3& a, const Mat3& b);
double determinant(const Mat3& m);
/// Largest singular value.
double operator_norm(const Mat3& m);

/// Evaluates real fields at arbitrary points by direct summation of their Fourier series.
/// The Nyquist plane is ignored; fields are assumed real (conjugate-symmetric spectra).
class FieldInterpolator {
 public:
  explicit FieldInterpolator(std::span<const SpectralField> fields);

  std::size_t components() const { return components_; }
  /// Writes one value per field into out (size ≥ components()).
  void evaluate(const Vec3& x, std::span<double> out) const;

 private:
  struct Row {
    int k2;
    int k3;
    int k1_first;
    int count;
    std::size_t offset;
  };
  std::size_t components_;
  int bandwidth_;
  std::vector<Row> rows_;
  std::vector<double> coeffs_;  // per mode: (re, im) for each field, half-space weight folded in
};

struct Particle {
  int id = 0;
  Vec3 x0{};
  Vec3 q{};
  Mat3 grad_q = identity3();
  double tr0 = 0.0;
};

using ParticleSet = std::vector<Particle>;

/// Particles starting at the given points, carrying trτ₀ sampled from trace0.
ParticleSet make_particles(std::span<const Vec3> positions, const SpectralField& trace0);

/// 27 points on a 3×3×3 lattice, one at the minimizer of trace0, the rest uniform random.
ParticleSet default_particles(const SpectralField& trace0, std::size_t count = 64,
                              std::uint64_t seed = 1);

/// One RK4 step of dq/dt = u(t, q) and d∇q/dt = ∇u(t, q)∇q over [t, t+dt], with the velocity
/// linear in time between u_start and u_end. Positions wrap into [0, 2π)³.
ParticleSet advect(const ParticleSet& particles, const VectorField& u_start,
                   const VectorField& u_end, double dt);

/// Advects through a velocity series sampled every dt (samples[i] at t0 + i·dt); a series of
/// length one is a frozen field advanced for a single step. Throws PreconditionError if empty.
ParticleSet advect(const ParticleSet& particles, std::span<const VectorField> samples, double dt);

/// V(t) = ∫‖∇u‖_∞ ds and W(t) = ∫‖∇²u‖_∞ e^{V(s)} ds, grid maxima of pointwise Frobenius norms.
struct VNorm {
  double V = 0.0;
  double W = 0.0;
};

/// Adds the interval [t, t+dt] with the larger endpoint value of each integrand.
VNorm accumulate(const VNorm& v, const VectorField& u_start, const VectorField& u_end, double dt);

struct FlowBoundReport {
  double max_grad_q = 0.0;      // max operator norm of ∇q
  double bound = 0.0;           // exp V
  double margin = 0.0;          // bound·(1+1e-6) − max_grad_q
  double max_deviation = 0.0;   // max operator norm of ∇q − I
  double max_det_defect = 0.0;  // max |det ∇q − 1|
};

/// Checks ‖∇q‖ ≤ e^V(1+1e-6) and ‖∇q − I‖ ≤ e^V − 1 + 1e-6 for every particle.
/// Throws InvariantError naming the first violating particle.
FlowBoundReport flow_bound_check(const ParticleSet& particles, const VNorm& vnorm);

/// One row of the particle trajectory table.
struct TrajectoryRow {
  double t = 0.0;
  int particle_id = 0;
  Vec3 q{};
  double tr_interp = 0.0;
  double tr_riccati = 0.0;  // NaN past the particle's Riccati blow-up time
  double det_grad_q = 1.0;
};

/// Max over rows with t ≤ t_limit of |tr_interp − tr_riccati| / max(|tr_riccati|, s), where
/// s is the largest |tr_riccati| at t = 0 among the rows. Rows without a Riccati value are skipped.
double trace_transport_check(std::span<const TrajectoryRow> rows, double t_limit);

/// Carries particles along a run and samples their trajectories at a fixed interval.
class ParticleTracker : public StepObserver {
 public:
  ParticleTracker(ParticleSet particles, const ModelParams& params, double record_interval);

  void on_start(const FlowState& state) override;
  void on_step(const FlowState& before, const FlowState& after, const GridProbe& probe) override;
  void on_finish(const FlowState& state) override;

  const ParticleSet& particles() const { return particles_; }
  const std::vector<TrajectoryRow>& rows() const { return rows_; }
  const VNorm& vnorm() const { return vnorm_; }
  /// Largest |det ∇q − 1| over all particles and steps.
  double max_det_defect() const { return max_det_defect_; }
  /// Smallest flow-bound margin seen after any step.
  double min_flow_margin() const { return min_flow_margin_; }

 private:
  void sample(const FlowState& state);

  ParticleSet particles_;
  ModelParams params_;
  double interval_;
  double next_record_ = 0.0;
  std::vector<TrajectoryRow> rows_;
  VNorm vnorm_;
  double max_det_defect_ = 0.0;
  double min_flow_margin_ = 0.0;
  bool started_ = false;
  // Quantities of the latest velocity, reused as the start of the next step.
  std::optional<FieldInterpolator> sampler_;
  double grad_linf_ = 0.0;
  double hess_linf_ = 0.0;
};

}  // namespace ptt
