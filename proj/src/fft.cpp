#include "ptt/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <new>
#include <mutex>

#include "ptt/error.hpp"

namespace ptt {

namespace {

struct Plans {
  fftw_plan forward;
  fftw_plan backward;
};

// Planning is not thread-safe in FFTW; execution with new-array execute is.
// FFTW_ESTIMATE keeps the chosen algorithm, hence the roundoff, identical run to run.
const Plans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, Plans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  auto* in = fftw_alloc_complex(total);
  auto* out = fftw_alloc_complex(total);
  const unsigned flags = FFTW_ESTIMATE;
  Plans p{fftw_plan_dft_3d(n, n, n, in, out, FFTW_FORWARD, flags),
          fftw_plan_dft_3d(n, n, n, in, out, FFTW_BACKWARD, flags)};
  fftw_free(in);
  fftw_free(out);
  return cache.emplace(n, p).first->second;
}

// SIMD-aligned transform buffer; plans are made for aligned arrays.
class Scratch {
 public:
  explicit Scratch(std::size_t n) : data_(reinterpret_cast<Complex*>(fftw_alloc_complex(n))), size_(n) {
    if (data_ == nullptr) throw std::bad_alloc();
  }
  ~Scratch() { fftw_free(data_); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;

  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }
  std::size_t size() const { return size_; }
  Complex* data() { return data_; }
  Complex* begin() { return data_; }
  Complex* end() { return data_ + size_; }

 private:
  Complex* data_;
  std::size_t size_;
};

void execute(fftw_plan plan, Scratch& in, Scratch& out) {
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void check_samples(const Grid& grid, std::size_t size) {
  if (size != grid.size()) {
    throw DimensionError("sample array has " + std::to_string(size) + " entries, grid " +
                         std::to_string(grid.n()) + "^3 needs " + std::to_string(grid.size()));
  }
}

// Index of −k for the storage index of k.
std::vector<std::size_t> mirror_table(const Grid& grid) {
  const int n = grid.n();
  std::vector<std::size_t> mirror(grid.size());
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3)
        mirror[grid.flat(i1, i2, i3)] = grid.flat((n - i1) % n, (n - i2) % n, (n - i3) % n);
  return mirror;
}

const std::vector<std::size_t>& mirror_for(const Grid& grid) {
  static std::mutex mutex;
  static std::map<int, std::vector<std::size_t>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(grid.n());
  if (it == cache.end()) it = cache.emplace(grid.n(), mirror_table(grid)).first;
  return it->second;
}

}  // namespace

SpectralField transform_forward(const Grid& grid, std::span<const double> samples) {
  check_samples(grid, samples.size());
  Scratch in(grid.size());
  Scratch out(grid.size());
  std::copy(samples.begin(), samples.end(), in.begin());
  execute(plans_for(grid.n()).forward, in, out);
  const double scale = 1.0 / static_cast<double>(grid.size());
  std::vector<Complex> coeffs(out.begin(), out.end());
  for (auto& c : coeffs) c *= scale;
  return SpectralField(grid, std::move(coeffs));
}

RealField transform_backward(const SpectralField& field) {
  Scratch in(field.size());
  Scratch out(field.size());
  std::copy(field.coeffs().begin(), field.coeffs().end(), in.begin());
  execute(plans_for(field.grid().n()).backward, in, out);
  RealField result(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) result[i] = out[i].real();
  return result;
}

std::vector<RealField> transform_backward(std::span<const SpectralField* const> fields) {
  std::vector<SpectralTerm> terms;
  terms.reserve(fields.size());
  for (const SpectralField* f : fields) terms.push_back({f});
  return transform_backward(std::span<const SpectralTerm>(terms));
}

namespace {

// Coefficient of a term at one mode; dk holds the derivative wavenumbers (Nyquist zeroed).
inline Complex term_value(const SpectralTerm& t, std::size_t idx, const int dk[3]) {
  const Complex c = (*t.field)[idx];
  if (t.axis1 < 0) return c;
  if (t.axis2 < 0) {
    const double k = dk[t.axis1];
    return {-k * c.imag(), k * c.real()};
  }
  return -static_cast<double>(dk[t.axis1]) * dk[t.axis2] * c;
}

void check_term(const SpectralTerm& t, const Grid& grid) {
  if (t.field == nullptr) throw PreconditionError("transform term has no field");
  if (!(t.field->grid() == grid)) throw DimensionError("batched transform over mixed grids");
  if (t.axis1 < -1 || t.axis1 > 2 || t.axis2 < -1 || t.axis2 > 2 || (t.axis1 < 0 && t.axis2 >= 0)) {
    throw DomainError("derivative axis must be -1, 0, 1 or 2");
  }
}

}  // namespace

std::vector<RealField> transform_backward(std::span<const SpectralTerm> terms) {
  std::vector<RealField> result;
  result.reserve(terms.size());
  if (terms.empty()) return result;
  const Grid& grid = terms.front().field->grid();
  for (const auto& t : terms) check_term(t, grid);
  const int n = grid.n();
  const auto& plan = plans_for(n);
  Scratch in(grid.size());
  Scratch out(grid.size());
  std::vector<int> dk(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dk[static_cast<std::size_t>(i)] = (i == n / 2) ? 0 : grid.wavenumber(i);
  for (std::size_t f = 0; f < terms.size(); f += 2) {
    const SpectralTerm& a = terms[f];
    const bool paired = f + 1 < terms.size();
    const SpectralTerm& b = paired ? terms[f + 1] : terms[f];
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          const int k[3] = {dk[static_cast<std::size_t>(i1)], dk[static_cast<std::size_t>(i2)],
                            dk[static_cast<std::size_t>(i3)]};
          const std::size_t idx = grid.flat(i1, i2, i3);
          const Complex va = term_value(a, idx, k);
          if (paired) {
            const Complex vb = term_value(b, idx, k);
            in[idx] = Complex(va.real() - vb.imag(), va.imag() + vb.real());
          } else {
            in[idx] = va;
          }
        }
    execute(plan.backward, in, out);
    RealField re(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) re[i] = out[i].real();
    result.push_back(std::move(re));
    if (paired) {
      RealField im(out.size());
      for (std::size_t i = 0; i < out.size(); ++i) im[i] = out[i].imag();
      result.push_back(std::move(im));
    }
  }
  return result;
}

namespace {

// 1 for modes kept by the 2/3 rule, keyed by (n, cut).
const std::vector<char>& dealias_mask_for(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<char>> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(grid.n(), grid.dealias_cut());
  auto it = cache.find(key);
  if (it == cache.end()) {
    const int n = grid.n();
    std::vector<char> mask(grid.size());
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3)
          mask[grid.flat(i1, i2, i3)] =
              grid.retained(grid.wavenumber(i1), grid.wavenumber(i2), grid.wavenumber(i3)) ? 1 : 0;
    it = cache.emplace(key, std::move(mask)).first;
  }
  return it->second;
}

std::vector<SpectralField> forward_batch(const Grid& grid, std::span<const RealField* const> samples,
                                         bool dealias) {
  std::vector<SpectralField> result;
  result.reserve(samples.size());
  if (samples.empty()) return result;
  const auto& plan = plans_for(grid.n());
  const auto& mirror = mirror_for(grid);
  const auto& mask = dealias_mask_for(grid);
  const double scale = 1.0 / static_cast<double>(grid.size());
  Scratch in(grid.size());
  Scratch out(grid.size());
  for (std::size_t f = 0; f < samples.size(); f += 2) {
    const RealField& a = *samples[f];
    check_samples(grid, a.size());
    const bool paired = f + 1 < samples.size();
    if (paired) {
      const RealField& b = *samples[f + 1];
      check_samples(grid, b.size());
      for (std::size_t i = 0; i < in.size(); ++i) in[i] = Complex(a[i], b[i]);
    } else {
      for (std::size_t i = 0; i < in.size(); ++i) in[i] = Complex(a[i], 0.0);
    }
    execute(plan.forward, in, out);
    if (!paired) {
      std::vector<Complex> c(out.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!dealias || mask[i]) c[i] = out[i] * scale;
      }
      result.emplace_back(grid, std::move(c));
      continue;
    }
    // Z = A + iB with A, B conjugate-symmetric: A = (Z + conj Z(−k))/2, B = (Z − conj Z(−k))/(2i).
    std::vector<Complex> ca(out.size());
    std::vector<Complex> cb(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (dealias && !mask[i]) continue;
      const Complex z = out[i];
      const Complex zm = std::conj(out[mirror[i]]);
      ca[i] = 0.5 * scale * (z + zm);
      cb[i] = Complex(0.0, -0.5 * scale) * (z - zm);
    }
    result.emplace_back(grid, std::move(ca));
    result.emplace_back(grid, std::move(cb));
  }
  return result;
}

}  // namespace

std::vector<SpectralField> transform_forward(const Grid& grid,
                                             std::span<const RealField* const> samples) {
  return forward_batch(grid, samples, false);
}

std::vector<SpectralField> transform_forward_dealiased(const Grid& grid,
                                                       std::span<const RealField* const> samples) {
  return forward_batch(grid, samples, true);
}

RealField sample(const Grid& grid, const std::function<double(double, double, double)>& f) {
  const int n = grid.n();
  RealField values(grid.size());
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3)
        values[grid.flat(i1, i2, i3)] =
            f(grid_coordinate(grid, i1), grid_coordinate(grid, i2), grid_coordinate(grid, i3));
  return values;
}

}  // namespace ptt
