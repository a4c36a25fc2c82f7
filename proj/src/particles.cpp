#include "ptt/particles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ptt/spectral_ops.hpp"

namespace ptt {

Mat3 identity3() { return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}; }

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

double determinant(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double operator_norm(const Mat3& m) {
  // Largest eigenvalue of the symmetric matrix mᵀm, trigonometric closed form.
  Mat3 a{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) a[i][j] += m[k][i] * m[k][j];
  const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                    (a[2][2] - q) * (a[2][2] - q) + 2.0 * off;
  if (p2 <= 0.0) return std::sqrt(std::max(q, 0.0));
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b = a;
  for (int i = 0; i < 3; ++i) b[i][i] -= q;
  for (auto& row : b)
    for (double& v : row) v /= p;
  const double r = std::clamp(determinant(b) / 2.0, -1.0, 1.0);
  const double largest = q + 2.0 * p * std::cos(std::acos(r) / 3.0);
  return std::sqrt(std::max(largest, 0.0));
}

FieldInterpolator::FieldInterpolator(std::span<const SpectralField> fields)
    : components_(fields.size()), bandwidth_(0) {
  if (fields.empty()) throw PreconditionError("interpolator needs at least one field");
  const Grid& grid = fields[0].grid();
  for (const auto& f : fields) {
    if (!(f.grid() == grid)) throw DimensionError("interpolated fields live on different grids");
  }
  const int half = grid.n() / 2;
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
    if (std::max({std::abs(k1), std::abs(k2), std::abs(k3)}) >= half) return;
    for (const auto& f : fields) {
      if (f[idx] != Complex(0.0)) {
        bandwidth_ = std::max({bandwidth_, std::abs(k1), std::abs(k2), std::abs(k3)});
        break;
      }
    }
  });
  const int K = bandwidth_;
  const std::size_t nf = components_;
  for (int k3 = 0; k3 <= K; ++k3) {
    for (int k2 = (k3 == 0 ? 0 : -K); k2 <= K; ++k2) {
      const int first = (k3 == 0 && k2 == 0) ? 0 : -K;
      Row row{k2, k3, first, K - first + 1, coeffs_.size() / (2 * nf)};
      for (int k1 = first; k1 <= K; ++k1) {
        const double weight = (k1 == 0 && k2 == 0 && k3 == 0) ? 1.0 : 2.0;
        const std::size_t idx = grid.flat(grid.index_of(k1), grid.index_of(k2), grid.index_of(k3));
        for (const auto& f : fields) {
          coeffs_.push_back(weight * f[idx].real());
          coeffs_.push_back(weight * f[idx].imag());
        }
      }
      rows_.push_back(row);
    }
  }
}

void FieldInterpolator::evaluate(const Vec3& x, std::span<double> out) const {
  if (out.size() < components_) throw DimensionError("interpolation output too small");
  const int K = bandwidth_;
  const std::size_t width = static_cast<std::size_t>(2 * K + 1);
  // e^{ik x_d} for k = −K..K, stored as (re, im) at offset k + K.
  std::vector<double> phase(6 * width);
  for (int d = 0; d < 3; ++d) {
    for (int k = -K; k <= K; ++k) {
      const std::size_t at = 2 * (d * width + static_cast<std::size_t>(k + K));
      phase[at] = std::cos(k * x[static_cast<std::size_t>(d)]);
      phase[at + 1] = std::sin(k * x[static_cast<std::size_t>(d)]);
    }
  }
  const std::size_t nf = components_;
  std::vector<double> acc(nf, 0.0);
  const double* p1 = phase.data();
  const double* p2 = phase.data() + 2 * width;
  const double* p3 = phase.data() + 4 * width;
  for (const Row& row : rows_) {
    const double* a = p2 + 2 * (row.k2 + K);
    const double* b = p3 + 2 * (row.k3 + K);
    const double r23 = a[0] * b[0] - a[1] * b[1];
    const double i23 = a[0] * b[1] + a[1] * b[0];
    const double* c = coeffs_.data() + row.offset * 2 * nf;
    for (int j = 0; j < row.count; ++j) {
      const double* e = p1 + 2 * (row.k1_first + j + K);
      const double pr = e[0] * r23 - e[1] * i23;
      const double pi = e[0] * i23 + e[1] * r23;
      for (std::size_t f = 0; f < nf; ++f) acc[f] += c[2 * f] * pr - c[2 * f + 1] * pi;
      c += 2 * nf;
    }
  }
  std::copy(acc.begin(), acc.end(), out.begin());
}

namespace {

double wrap(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y;
}

/// Velocity and velocity gradient of one field, ready for point evaluation.
FieldInterpolator velocity_sampler(const VectorField& u) {
  std::vector<SpectralField> fields(u.begin(), u.end());
  const TensorField g = gradient(u);
  for (const auto& c : g.comp) fields.push_back(c);
  return FieldInterpolator(fields);
}

struct Motion {
  Vec3 velocity;
  Mat3 rate;  // ∇u(q)∇q
};

Motion motion(const FieldInterpolator& sampler, const Vec3& q, const Mat3& grad_q) {
  double v[12];
  sampler.evaluate(q, std::span<double>(v, 12));
  Mat3 gu{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gu[i][j] = v[3 + 3 * i + j];
  return {{v[0], v[1], v[2]}, multiply(gu, grad_q)};
}

void rk4(Particle& p, const FieldInterpolator& start, const FieldInterpolator& mid,
         const FieldInterpolator& end, double dt) {
  auto shifted = [&](const Motion& m, double h, Vec3& q, Mat3& g) {
    for (int i = 0; i < 3; ++i) {
      q[i] = p.q[i] + h * m.velocity[i];
      for (int j = 0; j < 3; ++j) g[i][j] = p.grad_q[i][j] + h * m.rate[i][j];
    }
  };
  Vec3 q;
  Mat3 g;
  const Motion m1 = motion(start, p.q, p.grad_q);
  shifted(m1, 0.5 * dt, q, g);
  const Motion m2 = motion(mid, q, g);
  shifted(m2, 0.5 * dt, q, g);
  const Motion m3 = motion(mid, q, g);
  shifted(m3, dt, q, g);
  const Motion m4 = motion(end, q, g);
  for (int i = 0; i < 3; ++i) {
    p.q[i] = wrap(p.q[i] + dt / 6.0 *
                               (m1.velocity[i] + 2.0 * m2.velocity[i] + 2.0 * m3.velocity[i] + m4.velocity[i]));
    for (int j = 0; j < 3; ++j) {
      p.grad_q[i][j] += dt / 6.0 * (m1.rate[i][j] + 2.0 * m2.rate[i][j] + 2.0 * m3.rate[i][j] + m4.rate[i][j]);
    }
  }
}

VectorField midpoint(const VectorField& a, const VectorField& b) {
  VectorField m = a;
  for (std::size_t i = 0; i < 3; ++i) {
    m[i] += b[i];
    m[i] *= 0.5;
  }
  return m;
}

FlowBoundReport flow_bounds(const ParticleSet& particles, const VNorm& vnorm, int* violator) {
  FlowBoundReport rep;
  rep.bound = std::exp(vnorm.V);
  rep.margin = std::numeric_limits<double>::infinity();
  if (violator) *violator = -1;
  for (const auto& p : particles) {
    const double norm = operator_norm(p.grad_q);
    Mat3 dev = p.grad_q;
    for (int i = 0; i < 3; ++i) dev[i][i] -= 1.0;
    const double deviation = operator_norm(dev);
    rep.max_grad_q = std::max(rep.max_grad_q, norm);
    rep.max_deviation = std::max(rep.max_deviation, deviation);
    rep.max_det_defect = std::max(rep.max_det_defect, std::abs(determinant(p.grad_q) - 1.0));
    const double margin = std::min(rep.bound * (1.0 + 1e-6) - norm, rep.bound - 1.0 + 1e-6 - deviation);
    if (margin < 0.0 && violator && *violator < 0) *violator = p.id;
    rep.margin = std::min(rep.margin, margin);
  }
  if (particles.empty()) rep.margin = rep.bound * (1.0 + 1e-6) - 1.0;
  return rep;
}

}  // namespace

ParticleSet make_particles(std::span<const Vec3> positions, const SpectralField& trace0) {
  const FieldInterpolator interp(std::span<const SpectralField>(&trace0, 1));
  ParticleSet out;
  out.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Particle p;
    p.id = static_cast<int>(i);
    for (int d = 0; d < 3; ++d) p.x0[d] = wrap(positions[i][d]);
    p.q = p.x0;
    interp.evaluate(p.x0, std::span<double>(&p.tr0, 1));
    out.push_back(p);
  }
  return out;
}

ParticleSet default_particles(const SpectralField& trace0, std::size_t count, std::uint64_t seed) {
  std::vector<Vec3> points;
  const double step = kTwoPi / 3.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) points.push_back({step * (i + 0.5), step * (j + 0.5), step * (k + 0.5)});
  points.push_back(predict_blowup_time(trace0, 0.0, 1.0).x_star);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, kTwoPi);
  while (points.size() < count) points.push_back({coord(rng), coord(rng), coord(rng)});
  points.resize(count);
  return make_particles(points, trace0);
}

ParticleSet advect(const ParticleSet& particles, const VectorField& u_start, const VectorField& u_end,
                   double dt) {
  const FieldInterpolator start = velocity_sampler(u_start);
  const FieldInterpolator mid = velocity_sampler(midpoint(u_start, u_end));
  const FieldInterpolator end = velocity_sampler(u_end);
  ParticleSet out = particles;
  for (auto& p : out) rk4(p, start, mid, end, dt);
  return out;
}

ParticleSet advect(const ParticleSet& particles, std::span<const VectorField> samples, double dt) {
  if (samples.empty()) throw PreconditionError("velocity series is empty");
  if (samples.size() == 1) {
    const FieldInterpolator frozen = velocity_sampler(samples[0]);
    ParticleSet out = particles;
    for (auto& p : out) rk4(p, frozen, frozen, frozen, dt);
    return out;
  }
  ParticleSet out = particles;
  FieldInterpolator start = velocity_sampler(samples[0]);
  for (std::size_t s = 1; s < samples.size(); ++s) {
    const FieldInterpolator mid = velocity_sampler(midpoint(samples[s - 1], samples[s]));
    FieldInterpolator end = velocity_sampler(samples[s]);
    for (auto& p : out) rk4(p, start, mid, end, dt);
    start = std::move(end);
  }
  return out;
}

VNorm accumulate(const VNorm& v, const VectorField& u_start, const VectorField& u_end, double dt) {
  const double grad = std::max(linf_gradient(u_start), linf_gradient(u_end));
  const double hess = std::max(linf_hessian(std::span<const SpectralField>(u_start)),
                               linf_hessian(std::span<const SpectralField>(u_end)));
  VNorm out;
  out.V = v.V + dt * grad;
  out.W = v.W + dt * hess * std::exp(out.V);
  return out;
}

FlowBoundReport flow_bound_check(const ParticleSet& particles, const VNorm& vnorm) {
  int violator = -1;
  const FlowBoundReport rep = flow_bounds(particles, vnorm, &violator);
  if (violator >= 0) {
    std::ostringstream msg;
    msg << "flow gradient bound violated by particle " << violator << " (max |grad q| = " << rep.max_grad_q
        << ", exp V = " << rep.bound << ")";
    throw InvariantError(msg.str());
  }
  return rep;
}

double trace_transport_check(std::span<const TrajectoryRow> rows, double t_limit) {
  if (rows.empty()) return 0.0;
  double t_first = rows.front().t;
  for (const auto& r : rows) t_first = std::min(t_first, r.t);
  double scale = 0.0;
  for (const auto& r : rows) {
    if (r.t == t_first && std::isfinite(r.tr_riccati)) scale = std::max(scale, std::abs(r.tr_riccati));
  }
  double worst = 0.0;
  for (const auto& r : rows) {
    if (r.t > t_limit || !std::isfinite(r.tr_riccati)) continue;
    const double denom = std::max(std::abs(r.tr_riccati), scale);
    const double diff = std::abs(r.tr_interp - r.tr_riccati);
    worst = std::max(worst, denom > 0.0 ? diff / denom : diff);
  }
  return worst;
}

ParticleTracker::ParticleTracker(ParticleSet particles, const ModelParams& params, double record_interval)
    : particles_(std::move(particles)), params_(params), interval_(record_interval) {
  if (!(record_interval > 0.0)) throw ParameterError("particle record interval must be positive");
}

void ParticleTracker::sample(const FlowState& state) {
  const SpectralField tr = trace_field(state.tau);
  const FieldInterpolator interp(std::span<const SpectralField>(&tr, 1));
  for (const auto& p : particles_) {
    TrajectoryRow row;
    row.t = state.t;
    row.particle_id = p.id;
    row.q = p.q;
    interp.evaluate(p.q, std::span<double>(&row.tr_interp, 1));
    try {
      row.tr_riccati = riccati_trace(p.tr0, state.t, params_.a, params_.b);
    } catch (const SingularityError&) {
      row.tr_riccati = std::numeric_limits<double>::quiet_NaN();
    }
    row.det_grad_q = determinant(p.grad_q);
    rows_.push_back(row);
  }
  while (next_record_ <= state.t + 1e-12) next_record_ += interval_;
}

void ParticleTracker::on_start(const FlowState& state) {
  started_ = true;
  next_record_ = state.t;
  min_flow_margin_ = flow_bounds(particles_, vnorm_, nullptr).margin;
  sampler_.emplace(velocity_sampler(state.u));
  grad_linf_ = linf_gradient(state.u);
  hess_linf_ = linf_hessian(std::span<const SpectralField>(state.u));
  sample(state);
}

void ParticleTracker::on_step(const FlowState& before, const FlowState& after, const GridProbe&) {
  if (!started_) on_start(before);
  const double dt = after.t - before.t;
  const FieldInterpolator mid = velocity_sampler(midpoint(before.u, after.u));
  FieldInterpolator end = velocity_sampler(after.u);
  for (auto& p : particles_) rk4(p, *sampler_, mid, end, dt);
  sampler_.emplace(std::move(end));

  const double grad = linf_gradient(after.u);
  const double hess = linf_hessian(std::span<const SpectralField>(after.u));
  vnorm_.V += dt * std::max(grad_linf_, grad);
  vnorm_.W += dt * std::max(hess_linf_, hess) * std::exp(vnorm_.V);
  grad_linf_ = grad;
  hess_linf_ = hess;

  const FlowBoundReport rep = flow_bounds(particles_, vnorm_, nullptr);
  max_det_defect_ = std::max(max_det_defect_, rep.max_det_defect);
  min_flow_margin_ = std::min(min_flow_margin_, rep.margin);
  if (after.t >= next_record_ - 1e-9 * std::max(dt, 1e-12)) sample(after);
}

void ParticleTracker::on_finish(const FlowState& state) {
  if (rows_.empty() || rows_.back().t != state.t) sample(state);
}

}  // namespace ptt
