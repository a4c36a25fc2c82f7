#include "ptt/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ptt/error.hpp"

namespace ptt {

namespace {

constexpr std::array<std::string_view, 22> kKeys{
    "scenario", "n",    "dt",     "t_max",  "delta0",          "c0",
    "eps_tilde0", "eps", "a",     "b",      "lambda",          "mu",
    "mu1",      "mu2",  "seed",   "record_interval", "output_dir", "trace_min",
    "cfl_target", "blowup_threshold", "dt_min", "particles"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Reader {
 public:
  explicit Reader(const ConfigEntries& e) : entries_(e) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  int line(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  double real(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
      throw ConfigError(key, it->second.line, "'" + v + "' is not a finite number");
    }
    return out;
  }

  long long integer(const std::string& key, long long fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError(key, it->second.line, "'" + v + "' is not an integer");
    }
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  void require(bool ok, const std::string& key, const std::string& what) const {
    if (!ok) throw ConfigError(key, line(key), what);
  }

 private:
  const ConfigEntries& entries_;
};

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::blowup:
      return "blowup";
    case Scenario::global:
      return "global";
    case Scenario::linear:
      return "linear";
    case Scenario::verify:
      return "verify";
  }
  return "unknown";
}

ConfigEntries parse_config_entries(std::string_view text) {
  ConfigEntries out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), line_no, "expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    bool known = false;
    for (auto k : kKeys) known = known || k == key;
    if (!known) throw ConfigError(key, line_no, "unknown key");
    if (value.empty()) throw ConfigError(key, line_no, "missing value");
    if (out.count(key)) throw ConfigError(key, line_no, "key given twice");
    out[key] = {value, line_no};
  }
  return out;
}

ScenarioConfig build_config(const ConfigEntries& entries) {
  const Reader r(entries);
  ScenarioConfig c;
  if (!r.has("scenario")) throw ConfigError("scenario", 0, "scenario is mandatory");
  const std::string name = r.text("scenario", "");
  if (name == "blowup") {
    c.scenario = Scenario::blowup;
  } else if (name == "global") {
    c.scenario = Scenario::global;
  } else if (name == "linear") {
    c.scenario = Scenario::linear;
  } else if (name == "verify") {
    c.scenario = Scenario::verify;
  } else {
    throw ConfigError("scenario", r.line("scenario"), "unknown scenario '" + name + "'");
  }

  const long long n = r.integer("n", c.n);
  r.require(n >= 8 && n <= 1024 && n % 2 == 0, "n", "grid size must be even and in [8, 1024]");
  c.n = static_cast<int>(n);
  c.dt = r.real("dt", c.dt);
  r.require(c.dt > 0.0, "dt", "dt must be positive");
  c.t_max = r.real("t_max", c.t_max);
  r.require(c.t_max >= 0.0, "t_max", "t_max must be nonnegative");
  c.delta0 = r.real("delta0", c.delta0);
  r.require(c.delta0 > 0.0, "delta0", "delta0 must be positive");
  if (r.has("c0")) {
    c.c0 = r.real("c0", 0.0);
    r.require(*c.c0 > 0.0, "c0", "c0 must be positive");
  }
  c.eps_tilde0 = r.real("eps_tilde0", c.eps_tilde0);
  c.eps = r.real("eps", c.eps);
  r.require(c.eps > 0.0 && c.eps < 1.0, "eps", "eps must lie in (0, 1)");

  c.params.a = r.real("a", c.params.a);
  c.params.b = r.real("b", c.params.b);
  r.require(c.params.b >= 0.0, "b", "b must be nonnegative");
  c.params.lambda = r.real("lambda", c.params.lambda);
  r.require(c.params.lambda >= -1.0 && c.params.lambda <= 1.0, "lambda", "lambda must lie in [-1, 1]");
  c.params.mu = r.real("mu", c.params.mu);
  r.require(c.params.mu > 0.0, "mu", "mu must be positive");
  c.params.mu1 = r.real("mu1", c.params.mu1);
  c.params.mu2 = r.real("mu2", c.params.mu2);

  const long long seed = r.integer("seed", static_cast<long long>(c.seed));
  r.require(seed >= 0, "seed", "seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.record_interval = r.real("record_interval", c.record_interval);
  r.require(c.record_interval > 0.0, "record_interval", "record_interval must be positive");
  c.output_dir = r.text("output_dir", c.output_dir);

  c.trace_min = r.real("trace_min", c.trace_min);
  r.require(c.trace_min < 0.0, "trace_min", "trace_min must be negative");
  c.cfl_target = r.real("cfl_target", c.cfl_target);
  r.require(c.cfl_target > 0.0, "cfl_target", "cfl_target must be positive");
  c.blowup_threshold = r.real("blowup_threshold", c.blowup_threshold);
  r.require(c.blowup_threshold > 0.0, "blowup_threshold", "blowup_threshold must be positive");
  c.dt_min = r.real("dt_min", c.dt_min);
  r.require(c.dt_min > 0.0 && c.dt_min < c.dt, "dt_min", "dt_min must lie in (0, dt)");
  const long long particles = r.integer("particles", c.particles);
  r.require(particles >= 0 && particles <= 100000, "particles", "particles must lie in [0, 100000]");
  c.particles = static_cast<int>(particles);
  return c;
}

ScenarioConfig parse_config(std::string_view text) { return build_config(parse_config_entries(text)); }

std::string echo_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "scenario=" << to_string(c.scenario) << '\n'
      << "n=" << c.n << '\n'
      << "dt=" << c.dt << '\n'
      << "t_max=" << c.t_max << '\n'
      << "delta0=" << c.delta0 << '\n';
  if (c.c0) out << "c0=" << *c.c0 << '\n';
  out << "eps_tilde0=" << c.eps_tilde0 << '\n'
      << "eps=" << c.eps << '\n'
      << "a=" << c.params.a << '\n'
      << "b=" << c.params.b << '\n'
      << "lambda=" << c.params.lambda << '\n'
      << "mu=" << c.params.mu << '\n'
      << "mu1=" << c.params.mu1 << '\n'
      << "mu2=" << c.params.mu2 << '\n'
      << "seed=" << c.seed << '\n'
      << "record_interval=" << c.record_interval << '\n'
      << "output_dir=" << c.output_dir << '\n'
      << "trace_min=" << c.trace_min << '\n'
      << "cfl_target=" << c.cfl_target << '\n'
      << "blowup_threshold=" << c.blowup_threshold << '\n'
      << "dt_min=" << c.dt_min << '\n'
      << "particles=" << c.particles << '\n';
  return out.str();
}

}  // namespace ptt
