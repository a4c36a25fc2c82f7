#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptt/diagnostics.hpp"
#include "ptt/model.hpp"
#include "ptt/riccati.hpp"

namespace ptt {

enum class Scheme {
  if_ssprk2,   // integrating factor for μΔ, two-stage SSP Runge–Kutta for the rest
  imex_euler,  // implicit μΔ, explicit Euler for the rest
};

struct StepControl {
  double dt = 1e-3;
  double t_max = 1.0;
  double cfl_target = 0.4;        // dt ≤ cfl_target·Δx/|u|_∞
  double trace_cfl = 0.5;         // dt ≤ trace_cfl/(b|trτ|_∞)
  double blowup_threshold = 1e6;  // |trτ|_∞ cap
  double dt_min = 1e-9;
  double record_interval = 0.05;
  Scheme scheme = Scheme::if_ssprk2;

  /// Throws ParameterError unless dt > 0, dt_min < dt, blowup_threshold > 0, t_max ≥ 0.
  void validate() const;
};

/// Raised when the stability constraints would need dt below dt_min.
class StepCollapseError : public Error {
 public:
  StepCollapseError(double dt_needed, bool trace_limited, const std::string& what)
      : Error(what), dt_needed_(dt_needed), trace_limited_(trace_limited) {}
  double dt_needed() const { return dt_needed_; }
  /// True when the stress-trace constraint, not advection, forced the collapse.
  bool trace_limited() const { return trace_limited_; }

 private:
  double dt_needed_;
  bool trace_limited_;
};

/// Advances by exactly dt with no stability control.
FlowState step_fixed(const FlowState& state, const ModelParams& p, double dt,
                     Scheme scheme = Scheme::if_ssprk2);

struct StepResult {
  FlowState state;
  double dt = 0.0;     // step actually taken
  int halvings = 0;    // how often ctl.dt was halved to satisfy the constraints
  GridProbe probe;     // grid quantities of the input state
};

/// One step of at most ctl.dt, halved until the advective and trace constraints hold.
/// Throws StepCollapseError when dt would drop below ctl.dt_min.
StepResult step(const FlowState& state, const ModelParams& p, const StepControl& ctl);

/// Largest dt = dt_max/2^j satisfying both constraints for the given probe and grid spacing.
/// Throws StepCollapseError below ctl.dt_min.
double stable_dt(const GridProbe& probe, double spacing, const ModelParams& p, const StepControl& ctl,
                 double dt_max, int& halvings, bool& trace_limited);

/// Observes every accepted step of a run.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_start(const FlowState& state) { (void)state; }
  /// probe holds the grid quantities of `before`.
  virtual void on_step(const FlowState& before, const FlowState& after, const GridProbe& probe) = 0;
  virtual void on_finish(const FlowState& state) { (void)state; }
};

/// Tracks the structural invariants after every step.
class InvariantMonitor : public StepObserver {
 public:
  void on_start(const FlowState& state) override;
  void on_step(const FlowState& before, const FlowState& after, const GridProbe& probe) override;

  double max_divergence = 0.0;     // largest |k·û| relative to max |û|
  double max_velocity_mean = 0.0;
  double max_trace_q = 0.0;        // from the tendency probe
  double max_coupling = 0.0;       // relative I₃ cancellation defect
  int steps = 0;

 private:
  void check(const FlowState& state);
};

enum class RunStatus { completed, blowup_detected, step_collapse };

std::string to_string(RunStatus status);

/// Per-step sample of the trace minimum.
struct TraceSample {
  double t = 0.0;
  double min_trace = 0.0;
  double max_abs_trace = 0.0;
  /// √(energy of trτ in the two outermost retained shells / total energy); small when resolved.
  double tail_ratio = 0.0;
};

struct BlowupReport {
  double t_detect = 0.0;
  std::string trigger;             // "threshold" or "trace step collapse"
  Vec3 location{};                 // grid point of min trτ at detection
  std::optional<double> t_predicted;  // Riccati time from min trτ₀
  std::vector<TraceSample> min_trace_history;
};

struct RunOutcome {
  RunStatus status = RunStatus::completed;
  double t_end = 0.0;
  std::optional<BlowupReport> blowup;
  FlowState final_state;
  std::vector<TraceSample> trace_history;
  long steps = 0;
  long halvings = 0;
  double smallest_dt = 0.0;
};

/// Steps to ctl.t_max or until breakdown. Records go to sink (may be null) at t = 0, every
/// record_interval and at the final time; observers see every step.
RunOutcome run(const FlowState& initial, const ModelParams& p, const StepControl& ctl,
               RecordSink* sink = nullptr, std::span<StepObserver* const> observers = {});

struct RateFit {
  double constant = 0.0;  // limit of trτ·(T* − t)
  double t_star = 0.0;    // fitted singular time
  double window_start = 0.0;
  double window_end = 0.0;
  int samples = 0;
};

/// Fits 1/trτ = α(t − T*) over the last decade of |trτ| among resolved samples before t_detect
/// (tail_ratio ≤ resolution_tol), giving the constant −1/α. Throws InsufficientDataError when
/// the history has no negative trace or fewer than 10 samples in the window.
RateFit blowup_rate_probe(std::span<const TraceSample> history, double t_detect,
                          double resolution_tol = 1e-3);

}  // namespace ptt
