#include "ptt/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "ptt/error.hpp"

namespace ptt {

namespace {

constexpr char kMagic[4] = {'P', 'T', 'T', 'F'};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError(std::string("snapshot truncated while reading ") + what);
  }
  return to_little(v);
}

std::vector<const SpectralField*> fields_of(const FlowState& s) {
  std::vector<const SpectralField*> out;
  for (const auto& c : s.u) out.push_back(&c);
  for (const auto& c : s.tau.comp) out.push_back(&c);
  return out;
}

}  // namespace

void write_snapshot(std::ostream& out, const FlowState& state, const ModelParams& params) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(state.grid().n()));
  put<double>(out, state.t);
  for (double v : {params.a, params.b, params.lambda, params.mu, params.mu1, params.mu2}) put<double>(out, v);
  for (const SpectralField* f : fields_of(state)) {
    for (const Complex& c : f->coeffs()) {
      put<double>(out, c.real());
      put<double>(out, c.imag());
    }
  }
  if (!out) throw Error("snapshot write failed");
}

void save_snapshot(const std::filesystem::path& path, const FlowState& state, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_snapshot(out, state, params);
}

Snapshot read_snapshot(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw FormatError("snapshot truncated while reading magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad snapshot magic");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kSnapshotVersion) {
    throw UnsupportedVersionError("unsupported snapshot version " + std::to_string(version));
  }
  const auto n = get<std::uint32_t>(in, "grid size");
  if (n < 2 || n % 2 != 0 || n > 4096) throw FormatError("invalid grid size " + std::to_string(n));
  const double t = get<double>(in, "time");
  ModelParams p;
  p.a = get<double>(in, "parameters");
  p.b = get<double>(in, "parameters");
  p.lambda = get<double>(in, "parameters");
  p.mu = get<double>(in, "parameters");
  p.mu1 = get<double>(in, "parameters");
  p.mu2 = get<double>(in, "parameters");

  const Grid grid(static_cast<int>(n));
  FlowState state(grid);
  state.t = t;
  std::vector<SpectralField*> fields;
  for (auto& c : state.u) fields.push_back(&c);
  for (auto& c : state.tau.comp) fields.push_back(&c);
  std::vector<double> buffer(2 * grid.size());
  for (SpectralField* f : fields) {
    const auto bytes = static_cast<std::streamsize>(buffer.size() * sizeof(double));
    if (!in.read(reinterpret_cast<char*>(buffer.data()), bytes)) {
      throw FormatError("snapshot truncated in coefficient payload");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      (*f)[i] = Complex(to_little(buffer[2 * i]), to_little(buffer[2 * i + 1]));
    }
  }

  if (!std::isfinite(t)) throw CorruptStateError("snapshot time is not finite");
  try {
    p.validate();
  } catch (const ParameterError& e) {
    throw CorruptStateError(std::string("snapshot parameters: ") + e.what());
  }
  for (const SpectralField* f : fields) {
    for (const Complex& c : f->coeffs()) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw CorruptStateError("snapshot holds non-finite coefficients");
      }
    }
  }
  try {
    check_state(state, 1e-10);
  } catch (const InvariantError& e) {
    throw CorruptStateError(std::string("snapshot state: ") + e.what());
  }
  return Snapshot{std::move(state), p};
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace ptt
